//! Truncated Grassmann algebras `E_N` and their homogeneous `Z2`-gradings.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Zero};

use super::{AlgebraOrigin, Element, StructureConstantAlgebra};
use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::Q;

/// Degree assignment for the generators `e_1, e_2, ...`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrassmannGrading {
    /// Every generator odd.
    Natural,
    /// Odd-indexed generators odd, even-indexed even.
    Infty,
    /// `e_1..e_k` odd, the rest even.
    KStar(usize),
    /// Degrees of `e_1..e_N` listed explicitly.
    Explicit(Vec<u32>),
    /// Ungraded: the trivial group.
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrassmannSpec {
    pub n_generators: usize,
    pub grading: GrassmannGrading,
}

impl GrassmannSpec {
    pub fn new(n_generators: usize, grading: GrassmannGrading) -> Self {
        Self { n_generators, grading }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.n_generators > 24 {
            return Err(CoreError::Unsupported("Grassmann truncation above 24 generators".into()));
        }
        match &self.grading {
            GrassmannGrading::KStar(k) if *k > self.n_generators => Err(CoreError::InvalidAlgebra(
                alloc::format!("k = {k} exceeds the number of generators {}", self.n_generators),
            )),
            GrassmannGrading::Explicit(v) if v.len() != self.n_generators || v.iter().any(|&b| b > 1) => Err(
                CoreError::InvalidAlgebra("explicit grading needs one 0/1 value per generator".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn group(&self) -> GroupSpec {
        match self.grading {
            GrassmannGrading::Trivial => GroupSpec::trivial(),
            _ => GroupSpec::z2(),
        }
    }

    /// Parity of `deg(e_i)` (1-based); always 0 for the trivial grading.
    pub fn generator_bit(&self, i: usize) -> u32 {
        match &self.grading {
            GrassmannGrading::Natural => 1,
            GrassmannGrading::Infty => (i % 2) as u32,
            GrassmannGrading::KStar(k) => u32::from(i <= *k),
            GrassmannGrading::Explicit(v) => v[i - 1],
            GrassmannGrading::Trivial => 0,
        }
    }

    /// Degree of a basis monomial given as a generator bitmask (bit `i-1` is `e_i`).
    pub fn mask_bit(&self, mask: u64) -> u32 {
        let mut b = 0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize + 1;
            b ^= self.generator_bit(i);
            m &= m - 1;
        }
        b
    }

    pub fn mask_degree(&self, mask: u64) -> GroupElement {
        match self.grading {
            GrassmannGrading::Trivial => GroupElement::from_residues(Vec::new()),
            _ => GroupElement::z2(self.mask_bit(mask)),
        }
    }

    /// Number of (odd, even) generators among `e_1..e_N`.
    pub fn generator_counts(&self) -> (usize, usize) {
        let odd = (1..=self.n_generators).filter(|&i| self.generator_bit(i) == 1).count();
        (odd, self.n_generators - odd)
    }

    /// Number of (odd, even) generators of the untruncated algebra; `None` means unbounded.
    pub fn limit_generator_counts(&self) -> (Option<usize>, Option<usize>) {
        match &self.grading {
            GrassmannGrading::Natural => (None, Some(0)),
            GrassmannGrading::Infty => (None, None),
            GrassmannGrading::KStar(k) => (Some(*k), None),
            GrassmannGrading::Trivial => (Some(0), None),
            GrassmannGrading::Explicit(_) => {
                let (o, e) = self.generator_counts();
                (Some(o), Some(e))
            }
        }
    }

    pub fn with_generators(&self, n: usize) -> Self {
        Self { n_generators: n, grading: self.grading.clone() }
    }
}

/// Sign of `e_S * e_T` for disjoint generator sets, as `true` for negative.
/// Returns `None` when the sets intersect (product zero).
pub fn grassmann_product_sign(s: u64, t: u64) -> Option<bool> {
    if s & t != 0 {
        return None;
    }
    // inversions: pairs a in s, b in t with a > b
    let mut inv = 0u32;
    let mut m = t;
    while m != 0 {
        let b = m.trailing_zeros();
        inv += if b >= 63 { 0 } else { (s >> (b + 1)).count_ones() };
        m &= m - 1;
    }
    Some(inv % 2 == 1)
}

/// Subsets of `{1..n}` as bitmasks, ordered by size then lexicographically.
pub fn subset_order(n: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (0..(1u64 << n)).collect();
    masks.sort_by_key(|&m| {
        let mut idx: Vec<u32> = Vec::new();
        let mut x = m;
        while x != 0 {
            idx.push(x.trailing_zeros());
            x &= x - 1;
        }
        (m.count_ones(), idx)
    });
    masks
}

pub fn mask_label(mask: u64) -> String {
    if mask == 0 {
        return String::from("1");
    }
    let mut s = String::new();
    let mut m = mask;
    while m != 0 {
        let _ = write!(s, "e{}", m.trailing_zeros() + 1);
        m &= m - 1;
    }
    s
}

/// `E_N` as a structure-constant algebra; basis labels are `1`, `e1`, ..., `e1e2`, ...
pub fn build_grassmann(spec: &GrassmannSpec) -> Result<StructureConstantAlgebra, CoreError> {
    spec.validate()?;
    if spec.n_generators > 12 {
        return Err(CoreError::ResourceGuard {
            what: "structure-constant table of E_N".into(),
            estimate: 1u128 << (2 * spec.n_generators),
            limit: 1u128 << 24,
        });
    }
    let masks = subset_order(spec.n_generators);
    let mut index = alloc::vec![0usize; masks.len()];
    for (i, &m) in masks.iter().enumerate() {
        index[m as usize] = i;
    }
    let mut products = BTreeMap::new();
    for (i, &s) in masks.iter().enumerate() {
        for (j, &t) in masks.iter().enumerate() {
            if let Some(neg) = grassmann_product_sign(s, t) {
                let c = if neg { -Q::one() } else { Q::one() };
                products.insert((i, j), alloc::vec![(index[(s | t) as usize], c)]);
            }
        }
    }
    StructureConstantAlgebra::new(
        spec.group(),
        masks.iter().map(|&m| mask_label(m)).collect(),
        masks.iter().map(|&m| spec.mask_degree(m)).collect(),
        products,
        alloc::vec![(0, Q::one())],
        AlgebraOrigin::Grassmann(spec.clone()),
    )
}

/// An element of the Grassmann algebra on up to 64 generators, keyed by generator bitmask.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrassmannElement {
    terms: BTreeMap<u64, Q>,
}

impl GrassmannElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Q::one())
    }

    pub fn monomial(mask: u64, c: Q) -> Self {
        let mut e = Self::zero();
        if !c.is_zero() {
            e.terms.insert(mask, c);
        }
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign_scaled(&mut self, other: &Self, c: &Q) {
        for (m, x) in &other.terms {
            let e = self.terms.entry(*m).or_insert_with(Q::zero);
            *e += x * c;
            if e.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                if let Some(neg) = grassmann_product_sign(*s, *t) {
                    let c = if neg { -(a * b) } else { a * b };
                    let e = out.terms.entry(s | t).or_insert_with(Q::zero);
                    *e += c;
                    if e.is_zero() {
                        out.terms.remove(&(s | t));
                    }
                }
            }
        }
        out
    }

    /// Coordinates in `E_N` with labels ordered as in [`build_grassmann`].
    pub fn to_coordinates(&self, n: usize) -> Option<Element> {
        let masks = subset_order(n);
        let mut index = alloc::vec![0usize; masks.len()];
        for (i, &m) in masks.iter().enumerate() {
            index[m as usize] = i;
        }
        let mut v: Vec<(usize, Q)> = Vec::new();
        for (m, c) in &self.terms {
            if (*m >> n) != 0 {
                return None;
            }
            v.push((index[*m as usize], c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign_oracle(s: &[u32], t: &[u32]) -> Option<bool> {
        // count inversions of the concatenated index sequence
        let seq: Vec<u32> = s.iter().chain(t).copied().collect();
        let mut sorted = seq.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seq.len() {
            return None;
        }
        let mut inv = 0;
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i] > seq[j] {
                    inv += 1;
                }
            }
        }
        Some(inv % 2 == 1)
    }

    fn mask(ix: &[u32]) -> u64 {
        ix.iter().fold(0, |m, i| m | (1 << (i - 1)))
    }

    #[test]
    fn sign_examples() {
        // e2*e1 = -e1e2
        assert_eq!(grassmann_product_sign(mask(&[2]), mask(&[1])), Some(true));
        assert_eq!(grassmann_product_sign(mask(&[1]), mask(&[1])), None);
        // e3*(e1e2) = +e1e2e3
        assert_eq!(grassmann_product_sign(mask(&[3]), mask(&[1, 2])), Some(false));
        assert_eq!(sign_oracle(&[3], &[1, 2]), Some(false));
    }

    #[test]
    fn sign_matches_inversion_oracle() {
        for s in 0u64..64 {
            for t in 0u64..64 {
                let si: Vec<u32> = (0..6).filter(|b| s >> b & 1 == 1).map(|b| b + 1).collect();
                let ti: Vec<u32> = (0..6).filter(|b| t >> b & 1 == 1).map(|b| b + 1).collect();
                assert_eq!(grassmann_product_sign(s, t), sign_oracle(&si, &ti));
            }
        }
    }

    #[test]
    fn degrees() {
        let ks = GrassmannSpec::new(4, GrassmannGrading::KStar(2));
        assert_eq!(ks.generator_bit(3), 0);
        assert_eq!(ks.generator_bit(2), 1);
        let nat = GrassmannSpec::new(4, GrassmannGrading::Natural);
        assert_eq!(nat.mask_bit(mask(&[1, 2])), 0);
        let inf = GrassmannSpec::new(4, GrassmannGrading::Infty);
        assert_eq!((1..=4).map(|i| inf.generator_bit(i)).collect::<Vec<_>>(), alloc::vec![1, 0, 1, 0]);
        assert!(GrassmannSpec::new(1, GrassmannGrading::KStar(2)).validate().is_err());
    }

    #[test]
    fn table_products() {
        let e = build_grassmann(&GrassmannSpec::new(3, GrassmannGrading::Natural)).unwrap();
        let ix = |l: &str| e.label_index(l).unwrap();
        assert_eq!(e.basis_product(ix("e2"), ix("e1")), &[(ix("e1e2"), -Q::one())]);
        assert!(e.basis_product(ix("e1"), ix("e1")).is_empty());
        assert_eq!(e.basis_product(ix("e3"), ix("e1e2")), &[(ix("e1e2e3"), Q::one())]);
        assert_eq!(e.labels()[..4], ["1", "e1", "e2", "e3"]);
        assert_eq!(e.labels()[4..7], ["e1e2", "e1e3", "e2e3"]);
    }

    #[test]
    fn element_arithmetic_agrees_with_table() {
        let spec = GrassmannSpec::new(4, GrassmannGrading::Infty);
        let e = build_grassmann(&spec).unwrap();
        let a = GrassmannElement::monomial(mask(&[2, 4]), Q::from_integer(3.into()));
        let mut b = GrassmannElement::monomial(mask(&[1]), Q::one());
        b.add_assign_scaled(&GrassmannElement::monomial(mask(&[3]), Q::one()), &Q::from_integer(2.into()));
        let direct = a.mul(&b).to_coordinates(4).unwrap();
        let via_table = e.mul(&a.to_coordinates(4).unwrap(), &b.to_coordinates(4).unwrap());
        assert_eq!(direct, via_table);
    }
}
