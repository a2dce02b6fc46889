//! Dyadic rationals `p / 2^q`, the only non-integer quantity the Fourier
//! machinery ever produces (coefficients, distances, Parseval tails).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// A dyadic rational `numerator / 2^exponent`, always stored in lowest terms.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactFraction {
    numerator: i128,
    exponent: u32,
}

impl ExactFraction {
    pub const ZERO: ExactFraction = ExactFraction {
        numerator: 0,
        exponent: 0,
    };
    pub const ONE: ExactFraction = ExactFraction {
        numerator: 1,
        exponent: 0,
    };

    pub fn new(numerator: i128, exponent: u32) -> Self {
        let mut f = ExactFraction {
            numerator,
            exponent,
        };
        f.reduce();
        f
    }

    pub fn from_int(value: i128) -> Self {
        Self::new(value, 0)
    }

    /// `2^{-exponent}`.
    pub fn pow2_inv(exponent: u32) -> Self {
        Self::new(1, exponent)
    }

    pub fn numerator(&self) -> i128 {
        self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The denominator `2^exponent`.
    pub fn denominator(&self) -> i128 {
        1i128 << self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// Multiply by `2^{-k}`.
    pub fn div_pow2(self, k: u32) -> Self {
        Self::new(self.numerator, self.exponent + k)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.exponent as i32)
    }

    fn reduce(&mut self) {
        if self.numerator == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().min(self.exponent);
        self.numerator >>= tz;
        self.exponent -= tz;
    }

    /// Numerators of both operands rescaled to the larger exponent, or `None`
    /// when the rescaling overflows.
    fn aligned(self, other: Self) -> Option<(i128, i128, u32)> {
        let e = self.exponent.max(other.exponent);
        let a = shl_checked(self.numerator, e - self.exponent)?;
        let b = shl_checked(other.numerator, e - other.exponent)?;
        Some((a, b, e))
    }
}

fn shl_checked(v: i128, k: u32) -> Option<i128> {
    if v == 0 {
        return Some(0);
    }
    if k >= 127 || v.unsigned_abs().leading_zeros() < k + 1 {
        return None;
    }
    Some(v << k)
}

impl Ord for ExactFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.numerator.signum(), other.numerator.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        match self.aligned(*other) {
            Some((a, b, _)) => a.cmp(&b),
            // Only the operand with the smaller exponent can overflow when
            // shifted, and it is then the one of larger magnitude.
            None => {
                let self_larger = self.exponent < other.exponent;
                match (sa >= 0, self_larger) {
                    (true, true) | (false, false) => Ordering::Greater,
                    _ => Ordering::Less,
                }
            }
        }
    }
}

impl PartialOrd for ExactFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExactFraction {
    type Output = ExactFraction;
    fn add(self, rhs: Self) -> Self {
        let (a, b, e) = self.aligned(rhs).expect("dyadic addition overflow");
        ExactFraction::new(a + b, e)
    }
}

impl Sub for ExactFraction {
    type Output = ExactFraction;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for ExactFraction {
    type Output = ExactFraction;
    fn neg(self) -> Self {
        ExactFraction {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Mul for ExactFraction {
    type Output = ExactFraction;
    fn mul(self, rhs: Self) -> Self {
        let num = self
            .numerator
            .checked_mul(rhs.numerator)
            .expect("dyadic multiplication overflow");
        ExactFraction::new(num, self.exponent + rhs.exponent)
    }
}

impl std::iter::Sum for ExactFraction {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExactFraction::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for ExactFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for ExactFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactFraction {
    type Err = Error;

    /// Accepts `p/2^q`, plain `p/d` with `d` a power of two, or an integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |msg: &str| Error::parse("fraction", format!("{msg}: {s:?}"));
        let Some((num, den)) = s.split_once('/') else {
            let v: i128 = s.parse().map_err(|_| bad("not an integer"))?;
            return Ok(ExactFraction::from_int(v));
        };
        let num: i128 = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den = den.trim();
        let exponent = if let Some(q) = den.strip_prefix("2^") {
            q.parse::<u32>().map_err(|_| bad("bad exponent"))?
        } else {
            let d: u128 = den.parse().map_err(|_| bad("bad denominator"))?;
            if !d.is_power_of_two() {
                return Err(bad("denominator is not a power of two"));
            }
            d.trailing_zeros()
        };
        if exponent > 120 {
            return Err(bad("exponent too large"));
        }
        Ok(ExactFraction::new(num, exponent))
    }
}

impl serde::Serialize for ExactFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ExactFraction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        let f = ExactFraction::new(16, 6);
        assert_eq!((f.numerator(), f.exponent()), (1, 2));
        assert_eq!(ExactFraction::new(0, 9), ExactFraction::ZERO);
        assert_eq!(ExactFraction::new(-12, 2).to_string(), "-3/2^0");
    }

    #[test]
    fn arithmetic_and_order() {
        let half = ExactFraction::pow2_inv(1);
        let quarter = ExactFraction::pow2_inv(2);
        assert_eq!(half + quarter, ExactFraction::new(3, 2));
        assert_eq!(half - quarter, quarter);
        assert_eq!(half * half, quarter);
        assert!(quarter < half);
        assert!(-half < quarter);
        assert!(ExactFraction::pow2_inv(100) > ExactFraction::ZERO);
        assert!(ExactFraction::from_int(1 << 100) > ExactFraction::pow2_inv(100));
        assert!(ExactFraction::from_int(-(1 << 100)) < -ExactFraction::pow2_inv(100));
    }

    #[test]
    fn parse_forms() {
        assert_eq!("1/2^3".parse::<ExactFraction>().unwrap(), ExactFraction::new(1, 3));
        assert_eq!("2/8".parse::<ExactFraction>().unwrap(), ExactFraction::new(1, 2));
        assert_eq!("-5".parse::<ExactFraction>().unwrap(), ExactFraction::from_int(-5));
        assert!("1/10".parse::<ExactFraction>().is_err());
    }
}
