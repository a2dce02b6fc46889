//! Exhaustive distance oracle for `n ≤ 4`.
//!
//! Enumerates all `2^{2^n}` Boolean functions, computes each one's degree from
//! the defining sum `Σ_x g(x) χ_S(x)` (not the butterfly), and minimises the
//! Hamming distance over those of degree at most `d`.

use std::sync::OnceLock;

use crate::boolfn::{character_bit, BooleanFunction};
use crate::error::{Error, Result};
use crate::exact::ExactFraction;

pub const ORACLE_MAX_ARITY: usize = 4;

/// Degree of the function whose table is `table` (bit x set iff g(x) = -1).
fn degree_by_definition(n: usize, table: u32) -> usize {
    let size = 1u32 << n;
    (0..size)
        .filter(|&s| {
            let c: i32 = (0..size)
                .map(|x| {
                    let minus = ((table >> x) & 1 == 1) ^ character_bit(s as u64, x as u64);
                    if minus {
                        -1
                    } else {
                        1
                    }
                })
                .sum();
            c != 0
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// For each arity, the degree of every table.
fn degree_table(n: usize) -> &'static [u8] {
    static CACHE: [OnceLock<Vec<u8>>; ORACLE_MAX_ARITY + 1] =
        [const { OnceLock::new() }; ORACLE_MAX_ARITY + 1];
    CACHE[n].get_or_init(|| {
        (0..1u32 << (1 << n))
            .map(|t| degree_by_definition(n, t) as u8)
            .collect()
    })
}

/// Exact `min_g dist(f, g)` over Boolean `g` with Fourier degree at most `d`.
pub fn brute_force_min_distance(f: &BooleanFunction, d: usize) -> Result<ExactFraction> {
    let n = f.arity();
    if n > ORACLE_MAX_ARITY {
        return Err(Error::OracleTooLarge(n));
    }
    let table = f.words()[0] as u32;
    let best = degree_table(n)
        .iter()
        .enumerate()
        .filter(|(_, deg)| **deg as usize <= d)
        .map(|(g, _)| (g as u32 ^ table).count_ones())
        .min()
        .expect("constants always have degree 0");
    Ok(ExactFraction::new(best as i128, n as u32))
}

/// Number of Boolean functions on `n ≤ 4` variables with degree at most `d`.
pub fn count_low_degree(n: usize, d: usize) -> Result<usize> {
    if n > ORACLE_MAX_ARITY {
        return Err(Error::OracleTooLarge(n));
    }
    Ok(degree_table(n).iter().filter(|deg| **deg as usize <= d).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{character, full_mask};

    #[test]
    fn degree_one_functions_on_three_variables() {
        // ±1 and ±x_i.
        assert_eq!(count_low_degree(3, 1).unwrap(), 8);
        assert_eq!(count_low_degree(3, 0).unwrap(), 2);
        assert_eq!(count_low_degree(2, 2).unwrap(), 16);
    }

    #[test]
    fn block_example_is_quarter_far_from_degree_one() {
        let f = BooleanFunction::from_bits(3, |x| x & 1 == 1 && character_bit(0b110, x)).unwrap();
        assert_eq!(brute_force_min_distance(&f, 1).unwrap(), ExactFraction::new(1, 2));
        assert!(brute_force_min_distance(&f, 1).unwrap() >= f.walsh_hadamard().lowdeg_distance_lower_bound(1));
    }

    #[test]
    fn character_qualifies_for_its_own_degree() {
        let f = character(3, 0b111).unwrap();
        assert_eq!(brute_force_min_distance(&f, 3).unwrap(), ExactFraction::ZERO);
    }

    #[test]
    fn top_character_on_four_variables() {
        // ĝ([4]) = 1 - 2 dist(g, χ_[4]), so degree ≤ 3 forces distance 1/2.
        let f = character(4, full_mask(4)).unwrap();
        let d = brute_force_min_distance(&f, 3).unwrap();
        assert!(d >= f.walsh_hadamard().lowdeg_distance_lower_bound(3));
        assert_eq!(d, ExactFraction::pow2_inv(1));
    }

    #[test]
    fn refuses_large_arity() {
        let f = character(5, 1).unwrap();
        assert_eq!(brute_force_min_distance(&f, 1), Err(Error::OracleTooLarge(5)));
    }
}
