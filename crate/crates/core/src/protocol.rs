//! Query testers and the two-party simulation that runs a tester on
//! `h = f·g·χ_{[n]∖[l]}` when Alice holds `f` and Bob holds `g`.
//!
//! Every query costs two bits: Alice sends `f(x)`, Bob replies with `h(x)`,
//! which he computes from `f(x)`, his own `g(x)` and the public character.
//! The final verdict is not counted.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{character_bit, full_mask, BooleanFunction};
use crate::constructions::rng_from_seed;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

/// Answers queries `x ↦ f(x) ∈ {-1, +1}`.
pub trait QueryOracle {
    fn query(&mut self, point: u64) -> Result<i8>;
}

/// A randomized query algorithm. Randomness comes only from `seed`, so a run
/// is determined by the seed and the answers it receives.
pub trait Tester: Send + Sync {
    fn name(&self) -> &str;
    fn arity(&self) -> usize;
    fn budget(&self) -> usize;
    fn run(&self, seed: u64, oracle: &mut dyn QueryOracle) -> Result<Verdict>;
}

/// Direct oracle access to a truth table, with budget enforcement.
pub struct FunctionOracle<'a> {
    f: &'a BooleanFunction,
    budget: usize,
    queries: usize,
}

impl<'a> FunctionOracle<'a> {
    pub fn new(f: &'a BooleanFunction, budget: usize) -> Self {
        FunctionOracle {
            f,
            budget,
            queries: 0,
        }
    }

    pub fn queries(&self) -> usize {
        self.queries
    }
}

impl QueryOracle for FunctionOracle<'_> {
    fn query(&mut self, point: u64) -> Result<i8> {
        if self.queries == self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        self.queries += 1;
        Ok(self.f.value(point & full_mask(self.f.arity())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

/// Simulated public-coin protocol: each party answers from its own input.
struct ProtocolOracle<'a> {
    alice: &'a BooleanFunction,
    bob: &'a BooleanFunction,
    public_mask: u64,
    budget: usize,
    queries: usize,
    channel: Vec<(Party, bool)>,
}

impl ProtocolOracle<'_> {
    fn send(&mut self, from: Party, bit: bool) -> bool {
        self.channel.push((from, bit));
        bit
    }
}

impl QueryOracle for ProtocolOracle<'_> {
    fn query(&mut self, point: u64) -> Result<i8> {
        if self.queries == self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        self.queries += 1;
        let x = point & full_mask(self.alice.arity());
        let from_alice = self.send(Party::Alice, self.alice.bit(x));
        let h = from_alice ^ self.bob.bit(x) ^ character_bit(self.public_mask, x);
        let answer = self.send(Party::Bob, h);
        Ok(if answer { -1 } else { 1 })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed: u64,
    pub queries_made: usize,
    pub bits_exchanged: usize,
    pub verdict: Verdict,
    /// Each message on the channel in order: sender and the bit (`true` = -1).
    pub messages: Vec<(Party, bool)>,
}

/// Runs `tester` as a two-party protocol where Alice holds `f`, Bob holds `g`,
/// and the tester's target is `h = f·g·χ_{[n]∖[l]}`.
pub fn compile_and_run(
    tester: &dyn Tester,
    f: &BooleanFunction,
    g: &BooleanFunction,
    l: usize,
    seed: u64,
) -> Result<Transcript> {
    let n = f.arity();
    if g.arity() != n {
        return Err(Error::ArityMismatch {
            left: n,
            right: g.arity(),
        });
    }
    if tester.arity() != n {
        return Err(Error::ArityMismatch {
            left: tester.arity(),
            right: n,
        });
    }
    if l > n {
        return Err(Error::InvalidParameters(format!("l = {l} exceeds n = {n}")));
    }
    let mut oracle = ProtocolOracle {
        alice: f,
        bob: g,
        public_mask: full_mask(n) & !full_mask(l),
        budget: tester.budget(),
        queries: 0,
        channel: Vec::new(),
    };
    let verdict = tester.run(seed, &mut oracle)?;
    Ok(Transcript {
        seed,
        queries_made: oracle.queries,
        bits_exchanged: oracle.channel.len(),
        verdict,
        messages: oracle.channel,
    })
}

/// Outcome of running a tester with direct oracle access.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub queries: usize,
    pub verdict: Verdict,
}

pub fn run_direct(tester: &dyn Tester, target: &BooleanFunction, seed: u64) -> Result<SeedOutcome> {
    if tester.arity() != target.arity() {
        return Err(Error::ArityMismatch {
            left: tester.arity(),
            right: target.arity(),
        });
    }
    let mut oracle = FunctionOracle::new(target, tester.budget());
    let verdict = tester.run(seed, &mut oracle)?;
    Ok(SeedOutcome {
        seed,
        queries: oracle.queries(),
        verdict,
    })
}

/// Acceptance statistics over a list of seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuerySummary {
    pub outcomes: Vec<SeedOutcome>,
    pub accepted: usize,
    pub acceptance_frequency: f64,
    /// Wilson score interval at 95%.
    pub ci95: (f64, f64),
}

pub fn query_account(tester: &dyn Tester, target: &BooleanFunction, seeds: &[u64]) -> Result<QuerySummary> {
    let outcomes = seeds
        .iter()
        .map(|&s| run_direct(tester, target, s))
        .collect::<Result<Vec<_>>>()?;
    let accepted = outcomes.iter().filter(|o| o.verdict == Verdict::Accept).count();
    let total = outcomes.len();
    let freq = if total == 0 { 0.0 } else { accepted as f64 / total as f64 };
    Ok(QuerySummary {
        outcomes,
        accepted,
        acceptance_frequency: freq,
        ci95: wilson_interval(accepted, total),
    })
}

/// Wilson score interval for a binomial proportion at z = 1.96.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Accepts without querying.
#[derive(Clone, Debug)]
pub struct AcceptAll {
    n: usize,
}

impl AcceptAll {
    pub fn new(n: usize) -> Self {
        AcceptAll { n }
    }
}

impl Tester for AcceptAll {
    fn name(&self) -> &str {
        "accept-all"
    }
    fn arity(&self) -> usize {
        self.n
    }
    fn budget(&self) -> usize {
        0
    }
    fn run(&self, _seed: u64, _oracle: &mut dyn QueryOracle) -> Result<Verdict> {
        Ok(Verdict::Accept)
    }
}

/// `Σ_{T ⊆ dirs} (-1)^{|T|} f(base ⊕ T)`: the (|dirs|)-fold discrete
/// derivative of `f` at `base`, up to the factor `2^{|dirs|} ∏ x_i`.
pub fn signed_subcube_sum(f: impl Fn(u64) -> i8, base: u64, dirs: u64) -> i64 {
    let mut sum = 0i64;
    let mut t = dirs;
    // Enumerate all submasks of `dirs`, including the empty one.
    loop {
        let sign = if t.count_ones() % 2 == 0 { 1 } else { -1 };
        sum += sign * f(base ^ t) as i64;
        if t == 0 {
            break;
        }
        t = (t - 1) & dirs;
    }
    sum
}

/// Non-adaptive `(k+1)`-fold derivative check. Each round draws a base point
/// and `k+1` distinct directions and rejects if the signed sum over the
/// subcube is non-zero. All rounds are queried before deciding.
#[derive(Clone, Debug)]
pub struct DerivativeTester {
    n: usize,
    k: usize,
    rounds: usize,
}

impl DerivativeTester {
    pub fn new(n: usize, k: usize, rounds: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParameters(format!("k = {k} must be below n = {n}")));
        }
        if rounds == 0 {
            return Err(Error::InvalidParameters("rounds must be at least 1".into()));
        }
        if k + 1 > 20 {
            return Err(Error::InvalidParameters(format!("subcube dimension {} too large", k + 1)));
        }
        Ok(DerivativeTester { n, k, rounds })
    }

    pub fn round_cost(&self) -> usize {
        1 << (self.k + 1)
    }

    /// The subcubes a seed selects, as `(base, direction mask)`.
    pub fn subcubes(&self, seed: u64) -> Vec<(u64, u64)> {
        let mut rng = rng_from_seed(seed);
        let mut coords: Vec<usize> = (0..self.n).collect();
        (0..self.rounds)
            .map(|_| {
                let base = rng.random::<u64>() & full_mask(self.n);
                let (dirs, _) = coords.partial_shuffle(&mut rng, self.k + 1);
                (base, dirs.iter().fold(0, |m, &i| m | 1u64 << i))
            })
            .collect()
    }
}

impl Tester for DerivativeTester {
    fn name(&self) -> &str {
        "derivative"
    }
    fn arity(&self) -> usize {
        self.n
    }
    fn budget(&self) -> usize {
        self.rounds * self.round_cost()
    }
    fn run(&self, seed: u64, oracle: &mut dyn QueryOracle) -> Result<Verdict> {
        let mut verdict = Verdict::Accept;
        for (base, dirs) in self.subcubes(seed) {
            let mut sum = 0i64;
            let mut t = dirs;
            loop {
                let sign = if t.count_ones() % 2 == 0 { 1 } else { -1 };
                sum += sign * oracle.query(base ^ t)? as i64;
                if t == 0 {
                    break;
                }
                t = (t - 1) & dirs;
            }
            if sum != 0 {
                verdict = Verdict::Reject;
            }
        }
        Ok(verdict)
    }
}

/// Exhaustive one-round acceptance of the derivative test on `f`: the number
/// of `(base, directions)` choices with zero signed sum, and the total.
pub fn derivative_round_acceptance(f: &BooleanFunction, k: usize) -> Result<(u64, u64)> {
    let n = f.arity();
    if k >= n {
        return Err(Error::InvalidParameters(format!("k = {k} must be below n = {n}")));
    }
    let dir_sets: Vec<u64> = (0..1u64 << n)
        .filter(|d| d.count_ones() as usize == k + 1)
        .collect();
    let mut accepting = 0u64;
    for base in 0..1u64 << n {
        for &dirs in &dir_sets {
            if signed_subcube_sum(|x| f.value(x), base, dirs) == 0 {
                accepting += 1;
            }
        }
    }
    Ok((accepting, (dir_sets.len() as u64) << n))
}

/// Adaptive probe: walks the cube, choosing each flipped coordinate from the
/// previous answer. Accepts iff at most half the answers are `-1`.
#[derive(Clone, Debug)]
pub struct AdaptiveWalkTester {
    n: usize,
    steps: usize,
}

impl AdaptiveWalkTester {
    pub fn new(n: usize, steps: usize) -> Self {
        AdaptiveWalkTester { n, steps }
    }
}

impl Tester for AdaptiveWalkTester {
    fn name(&self) -> &str {
        "adaptive-walk"
    }
    fn arity(&self) -> usize {
        self.n
    }
    fn budget(&self) -> usize {
        self.steps
    }
    fn run(&self, seed: u64, oracle: &mut dyn QueryOracle) -> Result<Verdict> {
        let mut rng = rng_from_seed(seed);
        let mut x = rng.random::<u64>() & full_mask(self.n);
        let mut minus = 0;
        for _ in 0..self.steps {
            let answer = oracle.query(x)?;
            let jump = rng.random_range(0..self.n);
            let coord = if answer < 0 {
                minus += 1;
                (jump + 1) % self.n
            } else {
                jump
            };
            x ^= 1 << coord;
        }
        Ok(if 2 * minus <= self.steps {
            Verdict::Accept
        } else {
            Verdict::Reject
        })
    }
}

/// Exceeds its declared budget by one query.
#[cfg(test)]
struct Overspender;

#[cfg(test)]
impl Tester for Overspender {
    fn name(&self) -> &str {
        "overspender"
    }
    fn arity(&self) -> usize {
        3
    }
    fn budget(&self) -> usize {
        2
    }
    fn run(&self, _seed: u64, oracle: &mut dyn QueryOracle) -> Result<Verdict> {
        for x in 0..3 {
            oracle.query(x)?;
        }
        Ok(Verdict::Accept)
    }
}
