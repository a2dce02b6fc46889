//! Boolean functions `f: {-1,1}^n -> {-1,1}` over bit-packed truth tables and
//! their exact integer Fourier spectra.
//!
//! Encodings:
//! - a point `x` is the integer whose bit `i-1` is `(1 - x_i) / 2`, so
//!   `x_i = -1` sets the bit;
//! - a subset `S ⊆ [n]` is the mask with bit `i-1` set iff `i ∈ S`;
//! - the table stores bit `x` set iff `f(x) = -1`.
//!
//! With these conventions `χ_S(x) = (-1)^{popcount(S & x)}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::ExactFraction;

pub const MAX_ARITY: usize = 24;

/// Mask of the subset `[n] = {1, ..., n}`.
pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `χ_S(x)` as a sign bit: `true` iff the value is `-1`.
#[inline]
pub fn character_bit(subset: u64, point: u64) -> bool {
    (subset & point).count_ones() & 1 == 1
}

#[inline]
fn sign_of(bit: bool) -> i8 {
    if bit {
        -1
    } else {
        1
    }
}

fn check_arity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ARITY {
        return Err(Error::InvalidArity(n));
    }
    Ok(())
}

fn check_subset(n: usize, mask: u64) -> Result<()> {
    if mask & !full_mask(n) != 0 {
        return Err(Error::InvalidSubset { mask, n });
    }
    Ok(())
}

/// A Boolean function on `n` variables with a bit-packed truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    n: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BooleanFunction")
            .field("n", &self.n)
            .field("table_hex", &crate::io::table_to_hex(self))
            .finish()
    }
}

impl BooleanFunction {
    fn zeroed(n: usize) -> Self {
        let len = (1usize << n).div_ceil(64);
        BooleanFunction {
            n,
            words: vec![0; len],
        }
    }

    fn clear_padding(&mut self) {
        if self.n < 6 {
            self.words[0] &= (1u64 << (1 << self.n)) - 1;
        }
    }

    /// Builds a function from a predicate returning `true` where `f(x) = -1`.
    pub fn from_bits(n: usize, mut minus_at: impl FnMut(u64) -> bool) -> Result<Self> {
        check_arity(n)?;
        let mut f = Self::zeroed(n);
        for x in 0..(1u64 << n) {
            if minus_at(x) {
                f.words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(f)
    }

    /// Builds a function from a list of `2^n` values in `{-1, +1}`.
    pub fn from_values(n: usize, values: &[i8]) -> Result<Self> {
        check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::parse(
                "values",
                format!("expected {} entries, got {}", 1usize << n, values.len()),
            ));
        }
        if let Some(bad) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::parse("values", format!("{bad} is not ±1")));
        }
        Self::from_bits(n, |x| values[x as usize] == -1)
    }

    /// Builds a function directly from packed words (little-endian bit order).
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_arity(n)?;
        let expected = (1usize << n).div_ceil(64);
        if words.len() != expected {
            return Err(Error::parse(
                "table",
                format!("expected {expected} words, got {}", words.len()),
            ));
        }
        let mut f = BooleanFunction { n, words };
        let before = f.words[0];
        f.clear_padding();
        if before != f.words[0] {
            return Err(Error::parse("table", "bits set beyond 2^n entries"));
        }
        Ok(f)
    }

    pub fn constant(n: usize, value: i8) -> Result<Self> {
        Self::from_bits(n, |_| value == -1)
    }

    /// A uniformly random function.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        let mut f = Self::zeroed(n);
        for w in f.words.iter_mut() {
            *w = rng.random();
        }
        f.clear_padding();
        Ok(f)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Whether `f(x) = -1`.
    #[inline]
    pub fn bit(&self, x: u64) -> bool {
        (self.words[(x >> 6) as usize] >> (x & 63)) & 1 == 1
    }

    /// `f(x)` as `±1`.
    #[inline]
    pub fn value(&self, x: u64) -> i8 {
        sign_of(self.bit(x))
    }

    pub fn values(&self) -> Vec<i8> {
        (0..1u64 << self.n).map(|x| self.value(x)).collect()
    }

    /// Number of points where `f(x) = -1`.
    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `-f`.
    pub fn negate(&self) -> Self {
        let mut g = self.clone();
        for w in g.words.iter_mut() {
            *w = !*w;
        }
        g.clear_padding();
        g
    }

    /// Pointwise product `f·g`: XOR of the tables.
    pub fn multiply(&self, other: &BooleanFunction) -> Result<BooleanFunction> {
        self.same_arity(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BooleanFunction { n: self.n, words })
    }

    fn same_arity(&self, other: &BooleanFunction) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ArityMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Exact integer spectrum `c_S = Σ_x f(x) χ_S(x)` by the in-place
    /// butterfly, `O(n 2^n)` additions.
    pub fn walsh_hadamard(&self) -> FourierSpectrum {
        let mut coeffs: Vec<i64> = (0..1u64 << self.n)
            .map(|x| self.value(x) as i64)
            .collect();
        butterfly(&mut coeffs);
        FourierSpectrum { n: self.n, coeffs }
    }

    /// Convenience: `fourier_degree(walsh_hadamard(f))`.
    pub fn fourier_degree(&self) -> usize {
        self.walsh_hadamard()
            .fourier_degree()
            .expect("a ±1-valued function has a non-zero spectrum")
    }
}

/// Unnormalised Walsh–Hadamard butterfly, in place.
fn butterfly(v: &mut [i64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// The parity `χ_S` on `n` variables.
pub fn character(n: usize, subset: u64) -> Result<BooleanFunction> {
    check_arity(n)?;
    check_subset(n, subset)?;
    BooleanFunction::from_bits(n, |x| character_bit(subset, x))
}

/// `Pr_x[f(x) ≠ g(x)]` under the uniform distribution.
pub fn hamming_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<ExactFraction> {
    f.same_arity(g)?;
    let disagreements: u64 = f
        .words
        .iter()
        .zip(&g.words)
        .map(|(a, b)| (a ^ b).count_ones() as u64)
        .sum();
    Ok(ExactFraction::new(disagreements as i128, f.n as u32))
}

/// Integer-scaled Fourier coefficients `c_S = 2^n f̂(S)`, indexed by subset mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<i64>,
}

impl FourierSpectrum {
    pub fn from_coeffs(n: usize, coeffs: Vec<i64>) -> Result<Self> {
        check_arity(n)?;
        if coeffs.len() != 1 << n {
            return Err(Error::parse(
                "spectrum",
                format!("expected {} coefficients, got {}", 1usize << n, coeffs.len()),
            ));
        }
        let bound = 1i64 << n;
        if let Some(c) = coeffs.iter().find(|c| c.abs() > bound) {
            return Err(Error::parse(
                "spectrum",
                format!("coefficient {c} exceeds 2^{n} in magnitude"),
            ));
        }
        Ok(FourierSpectrum { n, coeffs })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The integer `c_S`.
    pub fn scaled(&self, subset: u64) -> i64 {
        self.coeffs[subset as usize]
    }

    /// `f̂(S) = c_S / 2^n`.
    pub fn coefficient(&self, subset: u64) -> ExactFraction {
        ExactFraction::new(self.coeffs[subset as usize] as i128, self.n as u32)
    }

    /// `Σ_S c_S²`; equals `2^{2n}` for every ±1-valued function.
    pub fn sum_of_squares(&self) -> i128 {
        self.coeffs.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    /// Non-zero coefficients as `(mask, c_S)`, in mask order.
    pub fn support(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(s, c)| (s as u64, *c))
    }

    /// Largest `|S|` with `c_S ≠ 0`; constants have degree 0.
    pub fn fourier_degree(&self) -> Result<usize> {
        self.support()
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .ok_or(Error::ZeroSpectrum)
    }

    /// Reconstructs the function, failing if any value leaves `{-1, +1}`.
    pub fn inverse(&self) -> Result<BooleanFunction> {
        let mut values = self.coeffs.clone();
        butterfly(&mut values);
        let scale = 1i64 << self.n;
        for (x, &v) in values.iter().enumerate() {
            if v != scale && v != -scale {
                return Err(Error::NotBoolean {
                    point: x as u64,
                    value: v,
                    n: self.n,
                });
            }
        }
        BooleanFunction::from_bits(self.n, |x| values[x as usize] < 0)
    }

    /// `Σ_{|S| > d} f̂(S)²`, exactly. Thresholds `d ≥ n` give zero.
    pub fn parseval_tail(&self, d: usize) -> ExactFraction {
        let sum: i128 = self
            .support()
            .filter(|(s, _)| s.count_ones() as usize > d)
            .map(|(_, c)| (c as i128) * (c as i128))
            .sum();
        ExactFraction::new(sum, 2 * self.n as u32)
    }

    /// Lower bound on the distance from `f` to any Boolean function of degree
    /// at most `d`: a quarter of the Parseval tail above `d`, because
    /// `(f - g)^2 ∈ {0, 4}` for ±1-valued `f, g`.
    pub fn lowdeg_distance_lower_bound(&self, d: usize) -> ExactFraction {
        self.parseval_tail(d).div_pow2(2)
    }
}

/// Free-function form of [`BooleanFunction::walsh_hadamard`].
pub fn walsh_hadamard(f: &BooleanFunction) -> FourierSpectrum {
    f.walsh_hadamard()
}

/// Free-function form of [`FourierSpectrum::inverse`].
pub fn inverse_walsh_hadamard(spectrum: &FourierSpectrum) -> Result<BooleanFunction> {
    spectrum.inverse()
}

pub fn fourier_degree(spectrum: &FourierSpectrum) -> Result<usize> {
    spectrum.fourier_degree()
}

pub fn parseval_tail(spectrum: &FourierSpectrum, d: usize) -> Result<ExactFraction> {
    if d > spectrum.n {
        return Err(Error::InvalidThreshold { d, n: spectrum.n });
    }
    Ok(spectrum.parseval_tail(d))
}

pub fn lowdeg_distance_lower_bound(spectrum: &FourierSpectrum, d: usize) -> Result<ExactFraction> {
    Ok(parseval_tail(spectrum, d)?.div_pow2(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `c_S = Σ_x f(x) χ_S(x)` straight from the definition, `O(4^n)`.
    fn direct_spectrum(f: &BooleanFunction) -> Vec<i64> {
        let n = f.arity();
        (0..1u64 << n)
            .map(|s| {
                (0..1u64 << n)
                    .map(|x| f.value(x) as i64 * sign_of(character_bit(s, x)) as i64)
                    .sum()
            })
            .collect()
    }

    /// n = 3, f = +1 when x1 = +1, else x2 x3.
    fn block_example() -> BooleanFunction {
        BooleanFunction::from_bits(3, |x| x & 1 == 1 && character_bit(0b110, x)).unwrap()
    }

    #[test]
    fn characters() {
        let one = character(3, 0).unwrap();
        assert_eq!(one, BooleanFunction::constant(3, 1).unwrap());
        assert_eq!(character(2, 0b11).unwrap().values(), vec![1, -1, -1, 1]);
        let spec = character(3, 0b011).unwrap().walsh_hadamard();
        for s in 0..8u64 {
            assert_eq!(spec.scaled(s), if s == 0b011 { 8 } else { 0 });
        }
        assert_eq!(
            character(3, 0b1000),
            Err(Error::InvalidSubset { mask: 8, n: 3 })
        );
    }

    #[test]
    fn products() {
        let c = |s| character(3, s).unwrap();
        assert_eq!(c(0b001).multiply(&c(0b010)).unwrap(), c(0b011));
        assert_eq!(c(0b011).multiply(&c(0b110)).unwrap(), c(0b101));
        let f = block_example();
        assert_eq!(f.multiply(&f).unwrap(), c(0));
        let g = character(4, 1).unwrap();
        assert!(matches!(f.multiply(&g), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn block_example_spectrum_matches_definition() {
        let f = block_example();
        let spec = f.walsh_hadamard();
        assert_eq!(spec.coeffs(), direct_spectrum(&f).as_slice());
        let expect = [(0b000, 4), (0b001, 4), (0b110, 4), (0b111, -4)];
        for s in 0..8u64 {
            let want = expect.iter().find(|e| e.0 == s).map_or(0, |e| e.1);
            assert_eq!(spec.scaled(s), want, "subset {s:#b}");
        }
        assert_eq!(spec.fourier_degree().unwrap(), 3);
    }

    #[test]
    fn transform_matches_definition_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            for _ in 0..5 {
                let f = BooleanFunction::random(n, &mut rng).unwrap();
                assert_eq!(f.walsh_hadamard().coeffs(), direct_spectrum(&f).as_slice());
            }
        }
    }

    #[test]
    fn inverse_rejects_non_boolean() {
        let mut coeffs = vec![0; 2];
        coeffs[0] = 1;
        let spec = FourierSpectrum::from_coeffs(1, coeffs).unwrap();
        assert!(matches!(spec.inverse(), Err(Error::NotBoolean { .. })));

        let spec = FourierSpectrum::from_coeffs(3, {
            let mut c = vec![0; 8];
            c[0] = 8;
            c
        })
        .unwrap();
        assert_eq!(spec.inverse().unwrap(), BooleanFunction::constant(3, 1).unwrap());
    }

    #[test]
    fn roundtrip_seeded_n10() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..1000 {
            let f = BooleanFunction::random(10, &mut rng).unwrap();
            let spec = f.walsh_hadamard();
            assert_eq!(spec.sum_of_squares(), 1i128 << 20);
            assert_eq!(spec.inverse().unwrap(), f);
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(character(5, 0).unwrap().fourier_degree(), 0);
        assert_eq!(character(5, full_mask(5)).unwrap().fourier_degree(), 5);
        let zero = FourierSpectrum::from_coeffs(2, vec![0; 4]).unwrap();
        assert_eq!(zero.fourier_degree(), Err(Error::ZeroSpectrum));
    }

    #[test]
    fn distances() {
        let f = block_example();
        assert_eq!(hamming_distance(&f, &f).unwrap(), ExactFraction::ZERO);
        assert_eq!(hamming_distance(&f, &f.negate()).unwrap(), ExactFraction::ONE);
        let one = BooleanFunction::constant(3, 1).unwrap();
        assert_eq!(hamming_distance(&f, &one).unwrap(), ExactFraction::new(2, 3));
    }

    #[test]
    fn tails_and_bounds() {
        let spec = character(4, 0).unwrap().walsh_hadamard();
        assert_eq!(parseval_tail(&spec, 0).unwrap(), ExactFraction::ZERO);
        let top = character(4, full_mask(4)).unwrap().walsh_hadamard();
        assert_eq!(parseval_tail(&top, 3).unwrap(), ExactFraction::ONE);
        assert_eq!(
            lowdeg_distance_lower_bound(&top, 3).unwrap(),
            ExactFraction::pow2_inv(2)
        );
        assert_eq!(lowdeg_distance_lower_bound(&top, 4).unwrap(), ExactFraction::ZERO);
        assert!(parseval_tail(&top, 5).is_err());

        let block = block_example().walsh_hadamard();
        assert_eq!(block.parseval_tail(1), ExactFraction::pow2_inv(1));
        assert_eq!(block.lowdeg_distance_lower_bound(1), ExactFraction::pow2_inv(3));
    }

    #[test]
    fn arity_limits() {
        assert_eq!(BooleanFunction::constant(0, 1), Err(Error::InvalidArity(0)));
        assert_eq!(BooleanFunction::constant(25, 1), Err(Error::InvalidArity(25)));
    }
}
