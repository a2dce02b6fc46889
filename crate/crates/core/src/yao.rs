//! Minimax experiment for deterministic non-adaptive testers against the
//! half/half mixture of `D_p` and `D_n`.
//!
//! A plan that never queries the subcube of the heavy prefix sees the same
//! answers on a `D_n` draw as on the coupled `D_p` draw, so every decision
//! rule errs with probability at least `½ · (1 - |covered| / 2^l)`.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::full_mask;
use crate::constructions::{
    derive_seed, prefix_of, random_suffix_subset, rng_from_seed, sample_family_with,
    CharacterFamily, DistributionMode, DistributionParams,
};
use crate::error::{Error, Result};
use crate::exact::ExactFraction;
use crate::protocol::Verdict;

/// Query points fixed in advance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPlan {
    n: usize,
    points: Vec<u64>,
}

impl QueryPlan {
    pub fn new(n: usize, points: Vec<u64>) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidArity(n));
        }
        if let Some(p) = points.iter().find(|p| **p & !full_mask(n) != 0) {
            return Err(Error::InvalidParameters(format!("point {p:#x} has arity above {n}")));
        }
        Ok(QueryPlan { n, points })
    }

    /// `d` uniform points.
    pub fn random<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Self> {
        let points = (0..d).map(|_| rng.random::<u64>() & full_mask(n)).collect();
        Self::new(n, points)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `f` at every plan point, in order.
    pub fn answers(&self, f: &CharacterFamily) -> Vec<i8> {
        self.points.iter().map(|&x| f.value_at(x)).collect()
    }
}

/// Distinct `l`-bit prefixes among the plan's points.
pub fn covered_prefixes(plan: &QueryPlan, l: usize) -> Result<BTreeSet<u64>> {
    if l > plan.n {
        return Err(Error::InvalidParameters(format!("l = {l} exceeds n = {}", plan.n)));
    }
    Ok(plan.points.iter().map(|&x| prefix_of(x, l)).collect())
}

/// `½ · (2^l - |covered|) / 2^l`: mixture mass of `D_n` draws whose heavy
/// prefix the plan never touches.
pub fn undistinguished_mass(plan: &QueryPlan, l: usize) -> Result<ExactFraction> {
    let covered = covered_prefixes(plan, l)?.len() as i128;
    Ok(ExactFraction::new((1i128 << l) - covered, l as u32 + 1))
}

/// `½ · (1 - d / 2^l)`, the floor in terms of the query count alone.
pub fn analytic_floor(d: usize, l: usize) -> ExactFraction {
    ExactFraction::new((1i128 << l) - d as i128, l as u32 + 1)
}

/// `value ≥ 5/12`, compared exactly.
pub fn at_least_five_twelfths(value: ExactFraction) -> bool {
    12 * value.numerator() >= 5 * value.denominator()
}

/// `⌊2^l / 6⌋`.
pub fn query_threshold(l: usize) -> usize {
    (1usize << l) / 6
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered_prefixes: BTreeSet<u64>,
    pub undistinguished_mass: ExactFraction,
}

pub fn coverage_report(plan: &QueryPlan, l: usize) -> Result<CoverageReport> {
    Ok(CoverageReport {
        covered_prefixes: covered_prefixes(plan, l)?,
        undistinguished_mass: undistinguished_mass(plan, l)?,
    })
}

/// A `D_n` draw and its coupled `D_p` partner: identical except that the
/// heavy set is replaced by a fresh light one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledDraw {
    pub negative: CharacterFamily,
    pub positive: CharacterFamily,
    pub heavy_prefix: u64,
    pub heavy_covered: bool,
    pub views_equal: bool,
}

fn negative_params(params: &DistributionParams) -> DistributionParams {
    DistributionParams {
        mode: DistributionMode::Negative,
        ..*params
    }
}

pub fn coupled_draw(plan: &QueryPlan, params: &DistributionParams, seed: u64) -> Result<CoupledDraw> {
    if plan.n != params.n {
        return Err(Error::ArityMismatch {
            left: plan.n,
            right: params.n,
        });
    }
    let mut rng = rng_from_seed(seed);
    let neg = sample_family_with(&negative_params(params), &mut rng)?;
    let b = neg.heavy_prefix.expect("negative draws have a heavy prefix");
    let mut sets = neg.family.sets().to_vec();
    sets[b as usize] = random_suffix_subset(&mut rng, params.n, params.l, params.light_size());
    let positive = CharacterFamily::new(params.n, params.l, sets)?;
    let heavy_covered = covered_prefixes(plan, params.l)?.contains(&b);
    let views_equal = plan.answers(&neg.family) == plan.answers(&positive);
    Ok(CoupledDraw {
        negative: neg.family,
        positive,
        heavy_prefix: b,
        heavy_covered,
        views_equal,
    })
}

/// Whether the coupled pair gives identical answers on the plan. Always true
/// when the heavy prefix is uncovered.
pub fn coupled_views_equal(plan: &QueryPlan, params: &DistributionParams, seed: u64) -> Result<bool> {
    Ok(coupled_draw(plan, params, seed)?.views_equal)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub samples: usize,
    pub errors: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
    pub analytic_floor: ExactFraction,
}

impl ErrorEstimate {
    /// The estimate lies above `floor - 3σ`.
    pub fn consistent_with_floor(&self) -> bool {
        self.estimate > self.analytic_floor.to_f64() - 3.0 * self.std_error
    }
}

const CHUNK: usize = 4096;

/// Monte Carlo error of `decision` on the half/half mixture. Samples are split
/// into fixed chunks with derived seeds, so the result does not depend on the
/// thread count.
pub fn estimate_tester_error(
    plan: &QueryPlan,
    decision: &(dyn Fn(&[i8]) -> Verdict + Sync),
    params: &DistributionParams,
    samples: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameters("samples must be positive".into()));
    }
    if plan.n != params.n {
        return Err(Error::ArityMismatch {
            left: plan.n,
            right: params.n,
        });
    }
    negative_params(params).validate()?;
    let chunks = samples.div_ceil(CHUNK);
    let errors = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<usize> {
            let mut rng = rng_from_seed(derive_seed(seed, c as u64));
            let count = CHUNK.min(samples - c * CHUNK);
            let mut errors = 0;
            for _ in 0..count {
                let mode = if rng.random::<bool>() {
                    DistributionMode::Positive
                } else {
                    DistributionMode::Negative
                };
                let draw = sample_family_with(&DistributionParams { mode, ..*params }, &mut rng)?;
                let verdict = decision(&plan.answers(&draw.family));
                let wrong = match mode {
                    DistributionMode::Positive => verdict == Verdict::Reject,
                    DistributionMode::Negative => verdict == Verdict::Accept,
                };
                errors += wrong as usize;
            }
            Ok(errors)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    let p = errors as f64 / samples as f64;
    let std_error = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(ErrorEstimate {
        samples,
        errors,
        estimate: p,
        std_error,
        ci95: crate::protocol::wilson_interval(errors, samples),
        analytic_floor: undistinguished_mass(plan, params.l)?,
    })
}

/// Answer vectors encoded as masks: bit `i` set iff answer `i` is `-1`.
pub type AnswerDistribution = HashMap<u64, BigRational>;

/// Exact distributions of the plan's answer vector under `D_p` and `D_n`,
/// by enumerating every admissible set for each covered prefix.
pub fn exact_answer_distributions(
    plan: &QueryPlan,
    params: &DistributionParams,
) -> Result<(AnswerDistribution, AnswerDistribution)> {
    negative_params(params).validate()?;
    if plan.len() > 64 {
        return Err(Error::InvalidParameters("at most 64 plan points".into()));
    }
    let (n, l) = (params.n, params.l);
    if n - l > 24 {
        return Err(Error::InvalidParameters("enumeration needs n - l ≤ 24".into()));
    }
    let mut by_prefix: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, &x) in plan.points.iter().enumerate() {
        by_prefix.entry(prefix_of(x, l)).or_default().push(i);
    }
    let mut prefixes: Vec<u64> = by_prefix.keys().copied().collect();
    prefixes.sort_unstable();

    // Distribution of the answers at one prefix's points when its set is a
    // uniform `size`-subset of {l+1..n}.
    let local = |a: u64, size: usize| -> AnswerDistribution {
        let idx = &by_prefix[&a];
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut total = 0u64;
        for_each_subset_of_size(n - l, size, |rel| {
            let set = rel << l;
            let mask = idx.iter().fold(0u64, |m, &i| {
                m | (((set & plan.points[i]).count_ones() as u64 & 1) << i)
            });
            *counts.entry(mask).or_default() += 1;
            total += 1;
        });
        counts
            .into_iter()
            .map(|(m, c)| (m, BigRational::new(BigInt::from(c), BigInt::from(total))))
            .collect()
    };
    let product = |parts: Vec<AnswerDistribution>| -> AnswerDistribution {
        let mut acc: AnswerDistribution = HashMap::from([(0u64, BigRational::one())]);
        for part in parts {
            let mut next = HashMap::new();
            for (m1, p1) in &acc {
                for (m2, p2) in &part {
                    *next.entry(m1 | m2).or_insert_with(BigRational::zero) += p1 * p2;
                }
            }
            acc = next;
        }
        acc
    };

    let light: HashMap<u64, AnswerDistribution> = prefixes
        .iter()
        .map(|&a| (a, local(a, params.light_size())))
        .collect();
    let positive = product(prefixes.iter().map(|a| light[a].clone()).collect());

    let prefix_weight = BigRational::new(BigInt::one(), BigInt::one() << l);
    let uncovered = (1u64 << l) - prefixes.len() as u64;
    let mut negative: AnswerDistribution = positive
        .iter()
        .map(|(m, p)| (*m, p * &prefix_weight * BigRational::from_integer(uncovered.into())))
        .collect();
    for &b in &prefixes {
        let heavy = local(b, params.heavy_size());
        let parts = prefixes
            .iter()
            .map(|&a| if a == b { heavy.clone() } else { light[&a].clone() })
            .collect();
        for (m, p) in product(parts) {
            *negative.entry(m).or_insert_with(BigRational::zero) += p * &prefix_weight;
        }
    }
    Ok((positive, negative))
}

/// Exact mixture error of a decision rule.
pub fn exact_decision_error(
    plan: &QueryPlan,
    params: &DistributionParams,
    decision: &dyn Fn(&[i8]) -> Verdict,
) -> Result<BigRational> {
    let (pos, neg) = exact_answer_distributions(plan, params)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let d = plan.len();
    let verdict = |mask: u64| {
        let answers: Vec<i8> = (0..d).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        decision(&answers)
    };
    let mut err = BigRational::zero();
    for (m, p) in &pos {
        if verdict(*m) == Verdict::Reject {
            err += p * &half;
        }
    }
    for (m, p) in &neg {
        if verdict(*m) == Verdict::Accept {
            err += p * &half;
        }
    }
    Ok(err)
}

/// Error of the Bayes-optimal decision: `Σ_v ½ min(P_p(v), P_n(v))`.
pub fn bayes_optimal_error(plan: &QueryPlan, params: &DistributionParams) -> Result<BigRational> {
    let (pos, neg) = exact_answer_distributions(plan, params)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let zero = BigRational::zero();
    let keys: BTreeSet<u64> = pos.keys().chain(neg.keys()).copied().collect();
    Ok(keys
        .into_iter()
        .map(|m| {
            let p = pos.get(&m).unwrap_or(&zero);
            let q = neg.get(&m).unwrap_or(&zero);
            p.min(q) * &half
        })
        .fold(BigRational::zero(), |a, b| a + b))
}

/// Calls `f` on every `size`-subset of `{0..universe}` (Gosper's hack).
fn for_each_subset_of_size(universe: usize, size: usize, mut f: impl FnMut(u64)) {
    if size > universe {
        return;
    }
    if size == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << universe;
    let mut s = (1u64 << size) - 1;
    while s < limit {
        f(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

pub fn fraction_to_rational(f: ExactFraction) -> BigRational {
    BigRational::new(BigInt::from(f.numerator()), BigInt::one() << f.exponent())
}
