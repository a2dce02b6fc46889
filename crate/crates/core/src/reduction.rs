//! Set-disjointness promise instances, the balancing gadget that pads `l`
//! chunks of length `k` into blocks of length `m` with weight exactly `k`, and
//! the embedding of a block instance into a pair of character families whose
//! combined function `h = f·g·χ_{[n]∖[l]}` is low-degree iff the instance is
//! disjoint.
//!
//! Vectors over `{-1, 1}` are stored as `bool` with `true` meaning `+1`
//! (element present).

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{character, full_mask, BooleanFunction};
use crate::constructions::{build_block_function, CharacterFamily};
use crate::error::{Error, Result};
use crate::exact::ExactFraction;

fn weight(v: &[bool]) -> usize {
    v.iter().filter(|b| **b).count()
}

fn intersections(x: &[bool], y: &[bool]) -> usize {
    x.iter().zip(y).filter(|(a, b)| **a && **b).count()
}

/// A `DISJ_k^m` promise instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjInstance {
    k: usize,
    x: Vec<bool>,
    y: Vec<bool>,
}

impl DisjInstance {
    pub fn new(k: usize, x: Vec<bool>, y: Vec<bool>) -> Result<Self> {
        check_disj_promise(&x, &y, k)?;
        Ok(DisjInstance { k, x, y })
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn y(&self) -> &[bool] {
        &self.y
    }

    /// 1 iff some coordinate has `x_i = y_i = +1`.
    pub fn value(&self) -> bool {
        intersections(&self.x, &self.y) > 0
    }
}

fn check_disj_promise(x: &[bool], y: &[bool], k: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::PromiseViolation(format!(
            "lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let (wx, wy) = (weight(x), weight(y));
    if wx != k || wy != k {
        return Err(Error::PromiseViolation(format!(
            "weights |x| = {wx}, |y| = {wy}, expected {k}"
        )));
    }
    let common = intersections(x, y);
    if common > 1 {
        return Err(Error::PromiseViolation(format!("{common} common elements")));
    }
    Ok(())
}

/// `DISJ` on raw vectors: checks the promise, then evaluates.
pub fn disj_value(x: &[bool], y: &[bool], k: usize) -> Result<bool> {
    check_disj_promise(x, y, k)?;
    Ok(intersections(x, y) > 0)
}

/// OR of `l_blocks` disjoint `DISJ_k^m` copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDisjInstance {
    l_blocks: usize,
    m: usize,
    k: usize,
    x: Vec<bool>,
    y: Vec<bool>,
}

impl BlockDisjInstance {
    pub fn new(l_blocks: usize, m: usize, k: usize, x: Vec<bool>, y: Vec<bool>) -> Result<Self> {
        if x.len() != l_blocks * m || y.len() != l_blocks * m {
            return Err(Error::PromiseViolation(format!(
                "expected vectors of length {}·{} = {}, got {} and {}",
                l_blocks,
                m,
                l_blocks * m,
                x.len(),
                y.len()
            )));
        }
        for i in 0..l_blocks {
            let r = i * m..(i + 1) * m;
            check_disj_promise(&x[r.clone()], &y[r], k)
                .map_err(|e| Error::PromiseViolation(format!("block {i}: {e}")))?;
        }
        Ok(BlockDisjInstance {
            l_blocks,
            m,
            k,
            x,
            y,
        })
    }

    pub fn l_blocks(&self) -> usize {
        self.l_blocks
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn y(&self) -> &[bool] {
        &self.y
    }

    pub fn block_x(&self, i: usize) -> &[bool] {
        &self.x[i * self.m..(i + 1) * self.m]
    }

    pub fn block_y(&self, i: usize) -> &[bool] {
        &self.y[i * self.m..(i + 1) * self.m]
    }

    /// Indices of blocks containing a common element.
    pub fn intersecting_blocks(&self) -> Vec<usize> {
        (0..self.l_blocks)
            .filter(|&i| intersections(self.block_x(i), self.block_y(i)) > 0)
            .collect()
    }

    /// `∨_i DISJ(x^i, y^i)`.
    pub fn value(&self) -> bool {
        !self.intersecting_blocks().is_empty()
    }
}

/// Block instance from raw vectors; errors if the promise fails.
pub fn block_disj_value(x: &[bool], y: &[bool], l_blocks: usize, m: usize, k: usize) -> Result<bool> {
    Ok(BlockDisjInstance::new(l_blocks, m, k, x.to_vec(), y.to_vec())?.value())
}

/// Raw padded vectors, before any promise check.
fn pad_vectors(x: &[bool], y: &[bool], l: usize, k: usize, m: usize) -> (Vec<bool>, Vec<bool>) {
    let mut px = Vec::with_capacity(l * m);
    let mut py = Vec::with_capacity(l * m);
    for i in 0..l {
        let (xc, yc) = (&x[i * k..(i + 1) * k], &y[i * k..(i + 1) * k]);
        let (wx, wy) = (weight(xc), weight(yc));
        px.extend_from_slice(xc);
        px.extend(std::iter::repeat_n(true, k - wx));
        px.extend(std::iter::repeat_n(false, m - 2 * k + wx));
        py.extend_from_slice(yc);
        py.extend(std::iter::repeat_n(false, m - 2 * k + wy));
        py.extend(std::iter::repeat_n(true, k - wy));
    }
    (px, py)
}

fn check_pad_inputs(x: &[bool], y: &[bool], l: usize, k: usize) -> Result<()> {
    if x.len() != l * k || y.len() != l * k {
        return Err(Error::InvalidParameters(format!(
            "inputs must have length l·k = {}",
            l * k
        )));
    }
    let common = intersections(x, y);
    if common > 1 {
        return Err(Error::PromiseViolation(format!("{common} common elements")));
    }
    Ok(())
}

/// Number of pad positions where both padded vectors are `+1`. Requires only
/// `m ≥ 2k`, so it also measures collisions the safe path refuses to build.
pub fn padding_collisions(x: &[bool], y: &[bool], l: usize, k: usize, m: usize) -> Result<usize> {
    check_pad_inputs(x, y, l, k)?;
    if m < 2 * k {
        return Err(Error::PaddingFormulaInvalid { m, k });
    }
    let (px, py) = pad_vectors(x, y, l, k, m);
    Ok((0..l)
        .flat_map(|i| i * m + k..(i + 1) * m)
        .filter(|&j| px[j] && py[j])
        .count())
}

/// Balances each length-`k` chunk into a length-`m` block of weight `k`:
/// Alice appends `1^{k-|x^i|} (-1)^{m-2k+|x^i|}`, Bob appends
/// `(-1)^{m-2k+|y^i|} 1^{k-|y^i|}`.
pub fn pad_to_balanced_blocks(
    x: &[bool],
    y: &[bool],
    l: usize,
    k: usize,
    m: usize,
) -> Result<BlockDisjInstance> {
    check_pad_inputs(x, y, l, k)?;
    if m < 2 * k {
        return Err(Error::PaddingFormulaInvalid { m, k });
    }
    // Alice's pad ends at offset 2k - |x^i|, Bob's starts at m - k + |y^i|.
    if m < 3 * k {
        return Err(Error::UnsafePadding { m, k });
    }
    let (px, py) = pad_vectors(x, y, l, k, m);
    BlockDisjInstance::new(l, m, k, px, py)
}

/// Draws a promise instance; `intersecting` names the only block with a
/// common element, if any. Needs `m ≥ 2k` for disjoint blocks to exist.
pub fn random_block_instance<R: Rng + ?Sized>(
    rng: &mut R,
    l_blocks: usize,
    m: usize,
    k: usize,
    intersecting: Option<usize>,
) -> Result<BlockDisjInstance> {
    if m < 2 * k || (k == 0 && intersecting.is_some()) {
        return Err(Error::InvalidParameters(format!(
            "cannot draw block instance with m = {m}, k = {k}"
        )));
    }
    if intersecting.is_some_and(|i| i >= l_blocks) {
        return Err(Error::InvalidParameters("intersecting block out of range".into()));
    }
    let mut x = vec![false; l_blocks * m];
    let mut y = vec![false; l_blocks * m];
    for i in 0..l_blocks {
        let mut pos: Vec<usize> = (0..m).collect();
        pos.shuffle(rng);
        let (xs, rest) = pos.split_at(k);
        for &p in xs {
            x[i * m + p] = true;
        }
        if Some(i) == intersecting {
            y[i * m + xs[rng.random_range(0..k)]] = true;
            for &p in &rest[..k - 1] {
                y[i * m + p] = true;
            }
        } else {
            for &p in &rest[..k] {
                y[i * m + p] = true;
            }
        }
    }
    BlockDisjInstance::new(l_blocks, m, k, x, y)
}

/// Alice's family `{C_a}`, Bob's `{D_a}`, and the target degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedInstance {
    fam_f: CharacterFamily,
    fam_g: CharacterFamily,
    k: usize,
}

impl CombinedInstance {
    pub fn new(fam_f: CharacterFamily, fam_g: CharacterFamily, k: usize) -> Result<Self> {
        let (n, l) = (fam_f.arity(), fam_f.prefix_dim());
        if fam_g.arity() != n || fam_g.prefix_dim() != l {
            return Err(Error::PromiseViolation("families have different shapes".into()));
        }
        if k > n || (n - k) % 2 == 1 {
            return Err(Error::PromiseViolation(format!("n - k = {n} - {k} must be even and non-negative")));
        }
        let half = ((n - k) / 2) as u32;
        for (a, (c, d)) in fam_f.sets().iter().zip(fam_g.sets()).enumerate() {
            if c.count_ones() != half || d.count_ones() != half {
                return Err(Error::PromiseViolation(format!(
                    "prefix {a}: |C| = {}, |D| = {}, expected (n-k)/2 = {half}",
                    c.count_ones(),
                    d.count_ones()
                )));
            }
            if (c & d).count_ones() > 1 {
                return Err(Error::PromiseViolation(format!(
                    "prefix {a}: |C ∩ D| = {}",
                    (c & d).count_ones()
                )));
            }
        }
        Ok(CombinedInstance { fam_f, fam_g, k })
    }

    pub fn fam_f(&self) -> &CharacterFamily {
        &self.fam_f
    }

    pub fn fam_g(&self) -> &CharacterFamily {
        &self.fam_g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.fam_f.arity()
    }

    pub fn l(&self) -> usize {
        self.fam_f.prefix_dim()
    }

    /// `E_a = ([n]∖[l]) Δ C_a Δ D_a`.
    pub fn derived_sets(&self) -> Vec<u64> {
        let rest = self.fam_f.suffix_mask();
        self.fam_f
            .sets()
            .iter()
            .zip(self.fam_g.sets())
            .map(|(c, d)| rest ^ c ^ d)
            .collect()
    }

    /// The family `{E_a}` whose block function equals `h`.
    pub fn combined_family(&self) -> CharacterFamily {
        CharacterFamily::new(self.n(), self.l(), self.derived_sets())
            .expect("E_a stays inside {l+1..n}")
    }

    /// Prefixes with `C_a ∩ D_a ≠ ∅`.
    pub fn intersecting_prefixes(&self) -> Vec<u64> {
        self.fam_f
            .sets()
            .iter()
            .zip(self.fam_g.sets())
            .enumerate()
            .filter(|(_, (c, d))| *c & *d != 0)
            .map(|(a, _)| a as u64)
            .collect()
    }
}

/// Embeds block `i` of the instance as the sets for prefix `i`: block
/// coordinate `j` becomes ambient coordinate `l + j`.
pub fn families_from_block_instance(
    inst: &BlockDisjInstance,
    n: usize,
    k: usize,
    l: usize,
) -> Result<CombinedInstance> {
    if k > n || (n - k) % 2 == 1 {
        return Err(Error::InvalidParameters(format!("n - k = {n} - {k} must be even")));
    }
    if l > 20 || inst.l_blocks() != 1 << l {
        return Err(Error::InvalidParameters(format!(
            "instance has {} blocks, expected 2^{l}",
            inst.l_blocks()
        )));
    }
    if inst.m() != n - k || inst.k() != (n - k) / 2 {
        return Err(Error::InvalidParameters(format!(
            "blocks must have length n-k = {} and weight (n-k)/2 = {}",
            n - k,
            (n - k) / 2
        )));
    }
    if l + inst.m() > n {
        return Err(Error::InvalidParameters(format!(
            "block length {} exceeds the n - l = {} free coordinates",
            inst.m(),
            n - l
        )));
    }
    let to_mask = |block: &[bool]| {
        block
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .fold(0u64, |acc, (j, _)| acc | 1 << (l + j))
    };
    let c = (0..inst.l_blocks()).map(|i| to_mask(inst.block_x(i))).collect();
    let d = (0..inst.l_blocks()).map(|i| to_mask(inst.block_y(i))).collect();
    CombinedInstance::new(
        CharacterFamily::new(n, l, c)?,
        CharacterFamily::new(n, l, d)?,
        k,
    )
}

/// Inverse of [`families_from_block_instance`].
pub fn block_instance_from_families(ci: &CombinedInstance) -> Result<BlockDisjInstance> {
    let (n, k, l) = (ci.n(), ci.k(), ci.l());
    let m = n - k;
    let window = full_mask(m) << l;
    let unpack = |sets: &[u64]| -> Result<Vec<bool>> {
        let mut out = Vec::with_capacity(sets.len() * m);
        for &s in sets {
            if s & !window != 0 {
                return Err(Error::InvalidParameters(format!(
                    "set {s:#x} leaves coordinates {}..{}",
                    l + 1,
                    l + m
                )));
            }
            out.extend((0..m).map(|j| s >> (l + j) & 1 == 1));
        }
        Ok(out)
    };
    BlockDisjInstance::new(
        1 << l,
        m,
        m / 2,
        unpack(ci.fam_f.sets())?,
        unpack(ci.fam_g.sets())?,
    )
}

/// `h = f·g·χ_{[n]∖[l]}` by pointwise products.
pub fn combine_h(ci: &CombinedInstance) -> Result<BooleanFunction> {
    let f = build_block_function(&ci.fam_f)?;
    let g = build_block_function(&ci.fam_g)?;
    let chi = character(ci.n(), ci.fam_f.suffix_mask())?;
    f.multiply(&g)?.multiply(&chi)
}

/// `h` as the block function of `{E_a}`.
pub fn combine_h_via_derived_sets(ci: &CombinedInstance) -> Result<BooleanFunction> {
    build_block_function(&ci.combined_family())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    LowDegree,
    Far,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::LowDegree => "low_degree",
            Classification::Far => "far",
        })
    }
}

/// Classification of `h` with the exact quantities that back it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HVerdict {
    pub classification: Classification,
    pub degree: usize,
    /// `Σ_{|S| > k+1} ĥ(S)²`.
    pub tail: ExactFraction,
    pub intersecting_prefix: Option<u64>,
}

impl HVerdict {
    /// Whether the exact spectrum backs the classification: degree `≤ k`
    /// when low-degree, tail `≥ 2^{-2l}` above `k+1` when far.
    pub fn confirmed(&self, k: usize, l: usize) -> bool {
        match self.classification {
            Classification::LowDegree => self.degree <= k,
            Classification::Far => self.tail >= ExactFraction::pow2_inv(2 * l as u32),
        }
    }
}

pub fn classify_h(ci: &CombinedInstance) -> Result<HVerdict> {
    let hits = ci.intersecting_prefixes();
    if hits.len() > 1 {
        return Err(Error::PromiseViolation(format!(
            "{} intersecting blocks",
            hits.len()
        )));
    }
    let spectrum = combine_h(ci)?.walsh_hadamard();
    Ok(HVerdict {
        classification: if hits.is_empty() {
            Classification::LowDegree
        } else {
            Classification::Far
        },
        degree: spectrum.fourier_degree()?,
        tail: spectrum.parseval_tail(ci.k() + 1),
        intersecting_prefix: hits.first().copied(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::rng_from_seed;

    fn v(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '+').collect()
    }

    #[test]
    fn disj_examples() {
        assert!(!disj_value(&v("----"), &v("----"), 0).unwrap());
        assert!(disj_value(&v("+---"), &v("+---"), 1).unwrap());
        assert!(!disj_value(&v("++--"), &v("--++"), 2).unwrap());
        assert!(matches!(
            disj_value(&v("++--"), &v("++--"), 2),
            Err(Error::PromiseViolation(_))
        ));
        assert!(disj_value(&v("++--"), &v("+---"), 2).is_err());
        let d = DisjInstance::new(1, v("-+-"), v("--+")).unwrap();
        assert!(!d.value());
    }

    #[test]
    fn padding_formula() {
        let inst = pad_to_balanced_blocks(&v("+---"), &v("----"), 2, 2, 8).unwrap();
        assert_eq!(inst.block_x(0), v("+-+-----").as_slice());
        assert_eq!(inst.block_x(1), v("--++----").as_slice());
        assert_eq!(inst.block_y(0), v("------++").as_slice());
        assert!(!inst.value());
    }

    #[test]
    fn padding_guards() {
        let (x, y) = (v("----"), v("----"));
        assert_eq!(
            pad_to_balanced_blocks(&x, &y, 2, 2, 3),
            Err(Error::PaddingFormulaInvalid { m: 3, k: 2 })
        );
        assert_eq!(
            pad_to_balanced_blocks(&x, &y, 2, 2, 5),
            Err(Error::UnsafePadding { m: 5, k: 2 })
        );
        // Empty chunks with m = 5 < 3k: Alice pads offsets 2..4, Bob 3..5.
        assert_eq!(padding_collisions(&x, &y, 2, 2, 5).unwrap(), 2);
        assert_eq!(padding_collisions(&x, &y, 2, 2, 6).unwrap(), 0);
    }

    #[test]
    fn embedding_example() {
        // n = 4, k = 2, l = 1: blocks of length 2, weight 1.
        let inst = BlockDisjInstance::new(2, 2, 1, v("+--+"), v("-++-")).unwrap();
        let ci = families_from_block_instance(&inst, 4, 2, 1).unwrap();
        assert_eq!(ci.fam_f().sets(), &[0b0010, 0b0100]);
        assert_eq!(ci.fam_g().sets(), &[0b0100, 0b0010]);
        assert_eq!(block_instance_from_families(&ci).unwrap(), inst);
        assert!(families_from_block_instance(&inst, 4, 2, 0).is_err());
        assert!(families_from_block_instance(&inst, 5, 2, 1).is_err());
    }

    #[test]
    fn combine_examples() {
        // C_{+1} = {3}, D_{+1} = {4}, C_{-1} = {4}, D_{-1} = {3}.
        let f = CharacterFamily::new(4, 1, vec![0b1000, 0b0100]).unwrap();
        let g = CharacterFamily::new(4, 1, vec![0b0100, 0b1000]).unwrap();
        let ci = CombinedInstance::new(f, g, 2).unwrap();
        assert_eq!(ci.derived_sets(), vec![0b0010, 0b0010]);
        let h = combine_h(&ci).unwrap();
        assert_eq!(h, character(4, 0b0010).unwrap());
        assert_eq!(h, combine_h_via_derived_sets(&ci).unwrap());
        let verdict = classify_h(&ci).unwrap();
        assert_eq!(verdict.classification, Classification::LowDegree);
        assert_eq!(verdict.degree, 1);
        assert!(verdict.confirmed(2, 1));

        // C_{+1} = D_{+1} = {3}.
        let f = CharacterFamily::new(4, 1, vec![0b1000, 0b0100]).unwrap();
        let g = CharacterFamily::new(4, 1, vec![0b0100, 0b0100]).unwrap();
        let ci = CombinedInstance::new(f, g, 2).unwrap();
        assert_eq!(ci.derived_sets()[1], 0b1110);
        let spec = combine_h(&ci).unwrap().walsh_hadamard();
        assert_eq!(spec.coefficient(0b1111).to_f64().abs(), 0.5);
        let verdict = classify_h(&ci).unwrap();
        assert_eq!(verdict.classification, Classification::Far);
        assert_eq!(verdict.tail, ExactFraction::pow2_inv(2));
        assert_eq!(verdict.intersecting_prefix, Some(1));
        assert!(verdict.confirmed(2, 1));
    }

    #[test]
    fn full_intersection_is_rejected() {
        let f = CharacterFamily::single(4, 0b0011).unwrap();
        assert!(matches!(
            CombinedInstance::new(f.clone(), f, 0),
            Err(Error::PromiseViolation(_))
        ));
    }

    #[test]
    fn two_intersecting_blocks_violate_promise() {
        let f = CharacterFamily::new(4, 1, vec![0b0100, 0b0100]).unwrap();
        let ci = CombinedInstance::new(f.clone(), f, 2).unwrap();
        assert!(matches!(classify_h(&ci), Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn random_instances_respect_the_promise() {
        let mut rng = rng_from_seed(3);
        for i in 0..200 {
            let hit = if i % 2 == 0 { None } else { Some(i % 4) };
            let inst = random_block_instance(&mut rng, 4, 6, 3, hit).unwrap();
            assert_eq!(inst.intersecting_blocks(), hit.into_iter().collect::<Vec<_>>());
        }
    }
}
