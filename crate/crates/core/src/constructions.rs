//! Block-character functions `f(x) = χ_{C_{x_[l]}}(x)`: the character applied
//! to `x` is selected by the first `l` coordinates of `x`.
//!
//! A prefix `a ∈ {-1,1}^l` is encoded as the `l`-bit mask with bit `j-1` set
//! iff `a_j = +1`. This is the opposite polarity of the point encoding, so the
//! prefix of a point `x` is `!x & [l]`. Prefix 0 is the all-`(-1)` prefix.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{character_bit, full_mask, BooleanFunction, MAX_ARITY};
use crate::error::{Error, Result};
use crate::exact::ExactFraction;

/// Largest ambient arity for pointwise evaluation of a family.
pub const MAX_FAMILY_ARITY: usize = 63;

/// Prefix mask of a point: bit `j-1` set iff `x_j = +1`, for `j ≤ l`.
#[inline]
pub fn prefix_of(point: u64, l: usize) -> u64 {
    !point & full_mask(l)
}

/// `∏_{i ∈ U} a_i` for a prefix mask `a` and `U ⊆ [l]`.
#[inline]
pub fn prefix_sign(subset: u64, prefix: u64, l: usize) -> i8 {
    if (subset & !prefix & full_mask(l)).count_ones() & 1 == 1 {
        -1
    } else {
        1
    }
}

/// The sets `C_a ⊆ {l+1, ..., n}`, one per prefix `a ∈ {-1,1}^l`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterFamily {
    n: usize,
    l: usize,
    sets: Vec<u64>,
}

impl CharacterFamily {
    pub fn new(n: usize, l: usize, sets: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_FAMILY_ARITY {
            return Err(Error::InvalidFamily(format!("arity {n} out of range")));
        }
        if l > n || l > 20 {
            return Err(Error::InvalidFamily(format!("prefix dimension {l} invalid for n = {n}")));
        }
        if sets.len() != 1 << l {
            return Err(Error::InvalidFamily(format!(
                "expected {} sets, got {}",
                1usize << l,
                sets.len()
            )));
        }
        let allowed = full_mask(n) & !full_mask(l);
        for (a, &c) in sets.iter().enumerate() {
            if c & !allowed != 0 {
                return Err(Error::InvalidFamily(format!(
                    "set {c:#b} for prefix {a} leaves {{{}..{n}}}",
                    l + 1
                )));
            }
        }
        Ok(CharacterFamily { n, l, sets })
    }

    /// The degenerate `l = 0` family `{C}`, i.e. `f = χ_C`.
    pub fn single(n: usize, set: u64) -> Result<Self> {
        Self::new(n, 0, vec![set])
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn prefix_dim(&self) -> usize {
        self.l
    }

    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn set(&self, prefix: u64) -> u64 {
        self.sets[prefix as usize]
    }

    /// Mask of `{l+1, ..., n}`.
    pub fn suffix_mask(&self) -> u64 {
        full_mask(self.n) & !full_mask(self.l)
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(|c| c.count_ones() as usize).max().unwrap_or(0)
    }

    /// Whether `f(x) = -1`, evaluated without materialising a table.
    #[inline]
    pub fn bit_at(&self, point: u64) -> bool {
        character_bit(self.sets[prefix_of(point, self.l) as usize], point)
    }

    pub fn value_at(&self, point: u64) -> i8 {
        if self.bit_at(point) {
            -1
        } else {
            1
        }
    }

    /// The prefix whose set is strictly larger than every other, if unique.
    pub fn heavy_prefix(&self) -> Result<u64> {
        let sizes: Vec<u32> = self.sets.iter().map(|c| c.count_ones()).collect();
        let max = *sizes.iter().max().expect("at least one set");
        let mut at_max = sizes.iter().enumerate().filter(|(_, s)| **s == max);
        let (b, _) = at_max.next().expect("max is attained");
        if at_max.next().is_some() {
            return Err(Error::AmbiguousHeavyBlock(format!(
                "several prefixes share the largest size {max}"
            )));
        }
        Ok(b as u64)
    }
}

impl fmt::Display for CharacterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} l={} sets=[", self.n, self.l)?;
        for (i, c) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c:#x}")?;
        }
        f.write_str("]")
    }
}

/// Materialises `f^[l]` as a truth table.
pub fn build_block_function(fam: &CharacterFamily) -> Result<BooleanFunction> {
    if fam.n > MAX_ARITY {
        return Err(Error::InvalidArity(fam.n));
    }
    BooleanFunction::from_bits(fam.n, |x| fam.bit_at(x))
}

/// Whether the exact Fourier degree of `f^[l]` is at most `m + l`, given that
/// every `|C_a| ≤ m`.
pub fn verify_degree_bound(fam: &CharacterFamily, m: usize) -> Result<bool> {
    if fam.max_set_size() > m {
        return Err(Error::RejectedInput(format!(
            "a set has size {} > m = {m}",
            fam.max_set_size()
        )));
    }
    let degree = build_block_function(fam)?.fourier_degree();
    Ok(degree <= m + fam.l)
}

/// One of the `2^l` coefficients `f̂(U ∪ C_b) = 2^{-l} ∏_{i∈U} b_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeavyCoefficient {
    pub subset: u64,
    pub predicted: ExactFraction,
    pub observed: ExactFraction,
}

impl HeavyCoefficient {
    pub fn matches(&self) -> bool {
        self.predicted == self.observed
    }
}

/// Predicted heavy coefficients for every `U ⊆ [l]`, each paired with the
/// value read off the exact spectrum.
pub fn heavy_coefficients(fam: &CharacterFamily) -> Result<Vec<HeavyCoefficient>> {
    let b = fam.heavy_prefix()?;
    let heavy = fam.set(b);
    let spectrum = build_block_function(fam)?.walsh_hadamard();
    let l = fam.l;
    Ok((0..1u64 << l)
        .map(|u| {
            let subset = u | heavy;
            let predicted =
                ExactFraction::new(prefix_sign(u, b, l) as i128, l as u32);
            HeavyCoefficient {
                subset,
                predicted,
                observed: spectrum.coefficient(subset),
            }
        })
        .collect())
}

/// Which farness statement a certificate instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FarnessMode {
    /// All `2^l` heavy coefficients, threshold `m - 1`, tail `≥ 2^{-l}`.
    Prop2,
    /// The single coefficient at `[l] ∪ C_b`, threshold `m + l - 1`,
    /// tail `≥ 2^{-2l}`.
    Prop3,
}

impl fmt::Display for FarnessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FarnessMode::Prop2 => "prop2",
            FarnessMode::Prop3 => "prop3",
        })
    }
}

impl FromStr for FarnessMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop2" => Ok(FarnessMode::Prop2),
            "prop3" => Ok(FarnessMode::Prop3),
            other => Err(Error::parse("mode", format!("unknown farness mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarnessCertificate {
    pub mode: FarnessMode,
    pub l: usize,
    pub m: usize,
    pub heavy_prefix: u64,
    pub heavy_set: u64,
    pub degree_threshold: usize,
    /// Tail mass the construction guarantees above the threshold.
    pub claimed_tail: ExactFraction,
    /// `claimed_tail / 4`.
    pub claimed_distance_lb: ExactFraction,
    /// `2^{-l-1}` or `2^{-2l-1}`, the constant from the literature (half-factor).
    pub paper_claimed: ExactFraction,
    /// Exact tail from the spectrum.
    pub observed_tail: ExactFraction,
}

impl FarnessCertificate {
    pub fn holds(&self) -> bool {
        self.observed_tail >= self.claimed_tail
    }

    pub fn observed_distance_lb(&self) -> ExactFraction {
        self.observed_tail.div_pow2(2)
    }
}

/// Checks the cardinality hypothesis: exactly one `|C_b| ≥ m`, all others
/// `≤ m - 1`.
fn check_farness_hypothesis(fam: &CharacterFamily, m: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::RejectedInput("m must be at least 1".into()));
    }
    let b = fam
        .heavy_prefix()
        .map_err(|e| Error::RejectedInput(e.to_string()))?;
    if (fam.set(b).count_ones() as usize) < m {
        return Err(Error::RejectedInput(format!(
            "largest set has size {} < m = {m}",
            fam.set(b).count_ones()
        )));
    }
    if let Some((a, c)) = fam
        .sets
        .iter()
        .enumerate()
        .find(|(a, c)| *a as u64 != b && c.count_ones() as usize > m - 1)
    {
        return Err(Error::RejectedInput(format!(
            "prefix {a} has size {} > m - 1",
            c.count_ones()
        )));
    }
    Ok(b)
}

pub fn farness_certificate(
    fam: &CharacterFamily,
    m: usize,
    mode: FarnessMode,
) -> Result<FarnessCertificate> {
    let b = check_farness_hypothesis(fam, m)?;
    let l = fam.l as u32;
    let (degree_threshold, claimed_tail, paper_claimed) = match mode {
        FarnessMode::Prop2 => (
            m - 1,
            ExactFraction::pow2_inv(l),
            ExactFraction::pow2_inv(l + 1),
        ),
        FarnessMode::Prop3 => (
            m + fam.l - 1,
            ExactFraction::pow2_inv(2 * l),
            ExactFraction::pow2_inv(2 * l + 1),
        ),
    };
    let spectrum = build_block_function(fam)?.walsh_hadamard();
    Ok(FarnessCertificate {
        mode,
        l: fam.l,
        m,
        heavy_prefix: b,
        heavy_set: fam.set(b),
        degree_threshold,
        claimed_tail,
        claimed_distance_lb: claimed_tail.div_pow2(2),
        paper_claimed,
        observed_tail: spectrum.parseval_tail(degree_threshold),
    })
}

/// A positive rational `ε = numerator / denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon {
    numerator: u64,
    denominator: u64,
}

impl Epsilon {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        let eps = Epsilon {
            numerator,
            denominator,
        };
        // 0 < ε ≤ 1/2
        if numerator == 0 || denominator == 0 || 2 * numerator as u128 > denominator as u128 {
            return Err(Error::EpsilonOutOfRange(format!("{numerator}/{denominator}")));
        }
        Ok(eps)
    }

    /// `ε < 2^{-j}`.
    pub fn below_pow2_inv(&self, j: u32) -> bool {
        if j >= 64 {
            return false;
        }
        ((self.numerator as u128) << j) < self.denominator as u128
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    /// Accepts `p/q`, `p/2^e`, or a decimal such as `0.1` (read exactly).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse("epsilon", format!("cannot read {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: u64 = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim();
            let q: u64 = match q.strip_prefix("2^") {
                Some(e) => 1u64
                    .checked_shl(e.parse().map_err(|_| bad())?)
                    .filter(|v| *v != 0)
                    .ok_or_else(bad)?,
                None => q.parse().map_err(|_| bad())?,
            };
            return Epsilon::new(p, q);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_v: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac_v)).ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremVariant {
    /// Largest `l` with `ε < 2^{-2l-1}`.
    Thm1,
    /// Largest `l` with `ε < 2^{-l-1}`.
    Thm2,
}

/// The block dimension `l` a farness parameter `ε` supports.
pub fn epsilon_to_l(eps: Epsilon, variant: TheoremVariant) -> Result<usize> {
    let exponent = |l: u32| match variant {
        TheoremVariant::Thm1 => 2 * l + 1,
        TheoremVariant::Thm2 => l + 1,
    };
    if !eps.below_pow2_inv(exponent(0)) {
        return Err(Error::NoValidL(eps.to_string()));
    }
    let mut l = 0u32;
    while eps.below_pow2_inv(exponent(l + 1)) {
        l += 1;
    }
    Ok(l as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionMode {
    /// `D_p`: every `C_a` a uniform `k/2`-subset of `{l+1..n}`.
    Positive,
    /// `D_n`: a uniform heavy prefix `b` with a uniform `(n-k+1)`-subset,
    /// all other prefixes as in `D_p`.
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DistributionParams {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub mode: DistributionMode,
    pub seed: u64,
}

impl DistributionParams {
    pub fn validate(&self) -> Result<()> {
        let DistributionParams { n, k, l, mode, .. } = *self;
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if n == 0 || n > MAX_FAMILY_ARITY {
            return bad(format!("n = {n} out of range"));
        }
        if k % 2 == 1 {
            return bad(format!("k = {k} is odd"));
        }
        if l > k / 2 {
            return bad(format!("l = {l} exceeds k/2 = {}", k / 2));
        }
        if l > n || k / 2 > n - l {
            return bad(format!("sets of size k/2 = {} do not fit in n - l = {}", k / 2, n - l));
        }
        if mode == DistributionMode::Negative {
            if k > n + 1 || self.heavy_size() > n - l {
                return bad(format!("heavy set of size n-k+1 does not fit in n - l = {}", n - l));
            }
            if self.heavy_size() <= k / 2 {
                return bad(format!(
                    "heavy size n-k+1 = {} must exceed k/2 = {}",
                    self.heavy_size(),
                    k / 2
                ));
            }
        }
        Ok(())
    }

    /// `l ≤ k/2 - 1`, the range in which the minimax experiment is stated.
    pub fn minimax_admissible(&self) -> bool {
        self.k >= 2 && self.l < self.k / 2
    }

    pub fn light_size(&self) -> usize {
        self.k / 2
    }

    pub fn heavy_size(&self) -> usize {
        (self.n + 1).saturating_sub(self.k)
    }

    /// The degree threshold `D_n` draws are far from.
    pub fn far_threshold(&self) -> usize {
        self.n - self.k
    }
}

/// Generator for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `stream`-th independent child of `seed` (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A uniform `size`-subset of `{l+1, ..., n}` (partial Fisher–Yates).
pub fn random_suffix_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, l: usize, size: usize) -> u64 {
    let mut coords: Vec<usize> = (l..n).collect();
    let (chosen, _) = coords.partial_shuffle(rng, size);
    chosen.iter().fold(0u64, |m, &i| m | 1 << i)
}

/// A family drawn from `D_p` or `D_n`, with the heavy prefix when negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledFamily {
    pub family: CharacterFamily,
    pub heavy_prefix: Option<u64>,
}

/// Draws from `D_p`/`D_n` using `rng`. The heavy prefix is drawn first, then
/// the sets in prefix order.
pub fn sample_family_with<R: Rng + ?Sized>(
    params: &DistributionParams,
    rng: &mut R,
) -> Result<SampledFamily> {
    params.validate()?;
    let DistributionParams { n, l, mode, .. } = *params;
    let heavy_prefix = match mode {
        DistributionMode::Positive => None,
        DistributionMode::Negative => Some(rng.random_range(0..1u64 << l)),
    };
    let sets = (0..1u64 << l)
        .map(|a| {
            let size = if Some(a) == heavy_prefix {
                params.heavy_size()
            } else {
                params.light_size()
            };
            random_suffix_subset(rng, n, l, size)
        })
        .collect();
    Ok(SampledFamily {
        family: CharacterFamily::new(n, l, sets)?,
        heavy_prefix,
    })
}

pub fn sample_family(params: &DistributionParams) -> Result<SampledFamily> {
    sample_family_with(params, &mut rng_from_seed(params.seed))
}

/// A function drawn from `D_p` or `D_n`, deterministic in `params.seed`.
pub fn sample_distribution(params: &DistributionParams) -> Result<BooleanFunction> {
    build_block_function(&sample_family(params)?.family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_family() -> CharacterFamily {
        // n = 3, l = 1: C_{-1} = {2,3} (prefix 0), C_{+1} = ∅ (prefix 1).
        CharacterFamily::new(3, 1, vec![0b110, 0b000]).unwrap()
    }

    #[test]
    fn family_validation() {
        assert!(CharacterFamily::new(3, 1, vec![0b001, 0]).is_err());
        assert!(CharacterFamily::new(3, 1, vec![0]).is_err());
        assert!(CharacterFamily::new(3, 1, vec![0b1000, 0]).is_err());
        assert!(CharacterFamily::new(3, 4, vec![0; 16]).is_err());
    }

    #[test]
    fn block_function_examples() {
        let one = CharacterFamily::single(3, 0).unwrap();
        assert_eq!(build_block_function(&one).unwrap(), BooleanFunction::constant(3, 1).unwrap());

        let f = build_block_function(&example_family()).unwrap();
        for x in 0..8u64 {
            let x1 = if x & 1 == 0 { 1 } else { -1 };
            let x2x3 = if (x >> 1).count_ones() % 2 == 0 { 1 } else { -1 };
            assert_eq!(f.value(x), if x1 == 1 { 1 } else { x2x3 });
        }
        let c = f.walsh_hadamard();
        assert_eq!(
            c.support().collect::<Vec<_>>(),
            vec![(0b000, 4), (0b001, 4), (0b110, 4), (0b111, -4)]
        );

        let same = CharacterFamily::new(3, 1, vec![0b010, 0b010]).unwrap();
        assert_eq!(
            build_block_function(&same).unwrap(),
            crate::boolfn::character(3, 0b010).unwrap()
        );
    }

    #[test]
    fn degree_bound_examples() {
        assert!(verify_degree_bound(&example_family(), 2).unwrap());
        assert_eq!(build_block_function(&example_family()).unwrap().fourier_degree(), 3);
        assert!(verify_degree_bound(&CharacterFamily::single(2, 0).unwrap(), 0).unwrap());
        assert!(matches!(
            verify_degree_bound(&example_family(), 1),
            Err(Error::RejectedInput(_))
        ));
    }

    #[test]
    fn heavy_coefficient_example() {
        let hc = heavy_coefficients(&example_family()).unwrap();
        assert_eq!(hc.len(), 2);
        assert_eq!(hc[0].subset, 0b110);
        assert_eq!(hc[0].predicted, ExactFraction::pow2_inv(1));
        assert_eq!(hc[1].subset, 0b111);
        assert_eq!(hc[1].predicted, -ExactFraction::pow2_inv(1));
        assert!(hc.iter().all(HeavyCoefficient::matches));

        let single = heavy_coefficients(&CharacterFamily::single(4, 0b1010).unwrap()).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!((single[0].subset, single[0].observed), (0b1010, ExactFraction::ONE));

        let tie = CharacterFamily::new(3, 1, vec![0b010, 0b100]).unwrap();
        assert!(matches!(heavy_coefficients(&tie), Err(Error::AmbiguousHeavyBlock(_))));
    }

    #[test]
    fn certificate_examples() {
        let c2 = farness_certificate(&example_family(), 2, FarnessMode::Prop2).unwrap();
        assert_eq!(c2.degree_threshold, 1);
        assert_eq!(c2.claimed_tail, ExactFraction::pow2_inv(1));
        assert_eq!(c2.claimed_distance_lb, ExactFraction::pow2_inv(3));
        assert_eq!(c2.paper_claimed, ExactFraction::pow2_inv(2));
        assert!(c2.holds());

        let c3 = farness_certificate(&example_family(), 2, FarnessMode::Prop3).unwrap();
        assert_eq!(c3.degree_threshold, 2);
        assert_eq!(c3.observed_tail, ExactFraction::pow2_inv(2));
        assert_eq!(c3.claimed_distance_lb, ExactFraction::pow2_inv(4));
        assert!(c3.holds());

        let top = CharacterFamily::single(4, 0b0111).unwrap();
        let c = farness_certificate(&top, 3, FarnessMode::Prop3).unwrap();
        assert_eq!(c.observed_tail, ExactFraction::ONE);
        assert_eq!(c.claimed_distance_lb, ExactFraction::pow2_inv(2));

        assert!(farness_certificate(&example_family(), 3, FarnessMode::Prop2).is_err());
        assert!(farness_certificate(&example_family(), 0, FarnessMode::Prop2).is_err());
    }

    #[test]
    fn epsilon_examples() {
        let eps = |s: &str| s.parse::<Epsilon>().unwrap();
        assert_eq!(epsilon_to_l(eps("1/8"), TheoremVariant::Thm1).unwrap(), 0);
        assert_eq!(epsilon_to_l(eps("1/10"), TheoremVariant::Thm1).unwrap(), 1);
        assert_eq!(epsilon_to_l(eps("0.1"), TheoremVariant::Thm2).unwrap(), 2);
        assert_eq!(epsilon_to_l(eps("1/2^5"), TheoremVariant::Thm2).unwrap(), 3);
        assert!(matches!(
            epsilon_to_l(eps("1/2"), TheoremVariant::Thm2),
            Err(Error::NoValidL(_))
        ));
        assert!("0.6".parse::<Epsilon>().is_err());
        assert!("0".parse::<Epsilon>().is_err());
    }

    #[test]
    fn distribution_parameters() {
        let p = |n, k, l, mode| DistributionParams { n, k, l, mode, seed: 0 };
        assert!(p(8, 4, 1, DistributionMode::Negative).validate().is_ok());
        assert!(p(8, 3, 1, DistributionMode::Positive).validate().is_err());
        assert!(p(8, 4, 3, DistributionMode::Positive).validate().is_err());
        assert!(p(4, 4, 2, DistributionMode::Negative).validate().is_err());
        assert!(p(8, 4, 1, DistributionMode::Positive).minimax_admissible());
        assert!(!p(8, 4, 2, DistributionMode::Positive).minimax_admissible());
    }

    #[test]
    fn positive_draws_have_low_degree() {
        for seed in 0..100 {
            let params = DistributionParams {
                n: 8,
                k: 4,
                l: 1,
                mode: DistributionMode::Positive,
                seed,
            };
            assert!(sample_distribution(&params).unwrap().fourier_degree() <= 3);
        }
    }

    #[test]
    fn negative_draws_are_far() {
        for seed in 0..100 {
            let params = DistributionParams {
                n: 8,
                k: 4,
                l: 1,
                mode: DistributionMode::Negative,
                seed,
            };
            let s = sample_family(&params).unwrap();
            assert_eq!(s.family.heavy_prefix().unwrap(), s.heavy_prefix.unwrap());
            let spec = build_block_function(&s.family).unwrap().walsh_hadamard();
            assert!(spec.parseval_tail(params.far_threshold()) >= ExactFraction::pow2_inv(2));
            assert!(spec.lowdeg_distance_lower_bound(4) >= ExactFraction::pow2_inv(3));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let params = DistributionParams {
            n: 10,
            k: 6,
            l: 2,
            mode: DistributionMode::Negative,
            seed: 99,
        };
        assert_eq!(sample_family(&params).unwrap(), sample_family(&params).unwrap());
    }
}
