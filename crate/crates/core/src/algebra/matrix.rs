//! Matrix algebras: elementary gradings, block-triangular shapes, matrices over a graded algebra.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use super::{AlgebraOrigin, Element, StructureConstantAlgebra};
use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::Q;

/// The map `|.| : {1..n} -> G` inducing `deg(e_ij) = |j| |i|^{-1}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradingMap {
    targets: Vec<GroupElement>,
}

impl GradingMap {
    pub fn new(targets: Vec<GroupElement>) -> Result<Self, CoreError> {
        if targets.is_empty() {
            return Err(CoreError::InvalidAlgebra("grading map needs length >= 1".into()));
        }
        Ok(Self { targets })
    }

    /// Map into `Z2` from parity bits. Panics on an empty slice.
    pub fn z2(bits: &[u32]) -> Self {
        Self::new(bits.iter().map(|&b| GroupElement::z2(b)).collect()).expect("non-empty grading map")
    }

    /// Constant map to the identity of `group`.
    pub fn trivial(group: &GroupSpec, n: usize) -> Self {
        Self { targets: alloc::vec![group.identity(); n.max(1)] }
    }

    pub fn targets(&self) -> &[GroupElement] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Diagonal block sizes `(d_1, ..., d_m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockShape {
    sizes: Vec<usize>,
}

impl BlockShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self, CoreError> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(CoreError::InvalidAlgebra("block shape needs m >= 1 positive sizes".into()));
        }
        Ok(Self { sizes })
    }

    /// A single `n x n` block.
    pub fn single(n: usize) -> Self {
        Self { sizes: alloc::vec![n.max(1)] }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Matrix size `d_1 + ... + d_m`.
    pub fn size(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Block index of a 0-based row/column position.
    pub fn block_of(&self, pos: usize) -> usize {
        let mut acc = 0;
        for (b, &d) in self.sizes.iter().enumerate() {
            acc += d;
            if pos < acc {
                return b;
            }
        }
        self.sizes.len()
    }

    /// Whether `(r, s)` (0-based) lies inside or above the diagonal blocks.
    pub fn allows(&self, r: usize, s: usize) -> bool {
        r < self.size() && s < self.size() && self.block_of(r) <= self.block_of(s)
    }

    /// Admissible positions in `(row, column)` order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).filter(|&(r, s)| self.allows(r, s)).collect()
    }

    /// First 0-based index of block `b`.
    pub fn offset(&self, b: usize) -> usize {
        self.sizes[..b].iter().sum()
    }
}

fn unit_label(n: usize, r: usize, s: usize) -> String {
    if n <= 9 {
        format!("e{}{}", r + 1, s + 1)
    } else {
        format!("e{},{}", r + 1, s + 1)
    }
}

fn matrix_units(
    shape: &BlockShape,
    grading: &GradingMap,
    group: &GroupSpec,
    origin: AlgebraOrigin,
) -> Result<StructureConstantAlgebra, CoreError> {
    let n = shape.size();
    if grading.len() != n {
        return Err(CoreError::InvalidAlgebra(format!(
            "grading map has length {} but the matrix size is {n}",
            grading.len()
        )));
    }
    for t in grading.targets() {
        group.check(t)?;
    }
    let positions = shape.positions();
    let index: BTreeMap<(usize, usize), usize> = positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut degrees = Vec::with_capacity(positions.len());
    for &(r, s) in &positions {
        let inv = group.inverse(&grading.targets()[r])?;
        degrees.push(group.op(&grading.targets()[s], &inv)?);
    }
    let mut products = BTreeMap::new();
    for (i, &(r, s)) in positions.iter().enumerate() {
        for (j, &(t, u)) in positions.iter().enumerate() {
            if s == t {
                products.insert((i, j), alloc::vec![(index[&(r, u)], Q::one())]);
            }
        }
    }
    let unit = (0..n).map(|r| (index[&(r, r)], Q::one())).collect::<Vec<_>>();
    let mut unit = unit;
    unit.sort_by_key(|(i, _)| *i);
    StructureConstantAlgebra::new(
        group.clone(),
        positions.iter().map(|&(r, s)| unit_label(n, r, s)).collect(),
        degrees,
        products,
        unit,
        origin,
    )
}

/// `M_n(F)` with the elementary grading induced by `grading`.
pub fn build_matrix_algebra(
    n: usize,
    grading: &GradingMap,
    group: &GroupSpec,
) -> Result<StructureConstantAlgebra, CoreError> {
    matrix_units(&BlockShape::single(n), grading, group, AlgebraOrigin::Matrix { grading: grading.clone() })
}

/// Block upper-triangular `UT(d_1, ..., d_m; F)` with an elementary grading.
pub fn build_block_triangular(
    shape: &BlockShape,
    grading: &GradingMap,
    group: &GroupSpec,
) -> Result<StructureConstantAlgebra, CoreError> {
    matrix_units(
        shape,
        grading,
        group,
        AlgebraOrigin::BlockTriangular { shape: shape.clone(), grading: grading.clone() },
    )
}

/// `UT(d_1, ..., d_m; A)` graded by entries: `deg(e_rs (x) b) = deg(b)`.
pub fn build_matrix_over(
    inner: &StructureConstantAlgebra,
    shape: &BlockShape,
) -> Result<StructureConstantAlgebra, CoreError> {
    let n = shape.size();
    let positions = shape.positions();
    let dim_a = inner.dim();
    let index = |p: usize, b: usize| p * dim_a + b;
    let pos_index: BTreeMap<(usize, usize), usize> = positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut labels = Vec::with_capacity(positions.len() * dim_a);
    let mut degrees = Vec::with_capacity(positions.len() * dim_a);
    for &(r, s) in &positions {
        for b in 0..dim_a {
            labels.push(format!("{}({})", unit_label(n, r, s), inner.labels()[b]));
            degrees.push(inner.degree_of(b).clone());
        }
    }
    let mut products = BTreeMap::new();
    for (pi, &(r, s)) in positions.iter().enumerate() {
        for (pj, &(t, u)) in positions.iter().enumerate() {
            if s != t {
                continue;
            }
            let pk = pos_index[&(r, u)];
            for a in 0..dim_a {
                for &(b, ref prod) in &inner.table[a] {
                    let v: Element = prod.iter().map(|(k, c)| (index(pk, *k), c.clone())).collect();
                    products.insert((index(pi, a), index(pj, b)), v);
                }
            }
        }
    }
    let mut unit: Element = Vec::new();
    for r in 0..n {
        let pr = pos_index[&(r, r)];
        for (k, c) in inner.unit() {
            unit.push((index(pr, *k), c.clone()));
        }
    }
    unit.sort_by_key(|(i, _)| *i);
    StructureConstantAlgebra::new(
        inner.group().clone(),
        labels,
        degrees,
        products,
        unit,
        AlgebraOrigin::MatrixOver { inner: Box::new(inner.origin().clone()), shape: shape.clone() },
    )
}

/// Fiber table of a grading map, with the regularity verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub regular: bool,
    pub surjective: bool,
    pub fibers: Vec<(GroupElement, usize)>,
}

/// Regular iff the map hits every group element and all fibers have equal size.
pub fn is_g_regular(grading: &GradingMap, group: &GroupSpec) -> Result<RegularityReport, CoreError> {
    for t in grading.targets() {
        group.check(t)?;
    }
    let fibers: Vec<(GroupElement, usize)> = group
        .elements()
        .into_iter()
        .map(|g| {
            let c = grading.targets().iter().filter(|t| **t == g).count();
            (g, c)
        })
        .collect();
    let surjective = fibers.iter().all(|(_, c)| *c > 0);
    let regular = surjective && fibers.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(RegularityReport { regular, surjective, fibers })
}

#[cfg(test)]
mod tests {
    use super::super::{build_grassmann, GrassmannGrading, GrassmannSpec};
    use super::*;

    #[test]
    fn elementary_degrees() {
        let g = GroupSpec::z2();
        let m = build_matrix_algebra(2, &GradingMap::z2(&[0, 1]), &g).unwrap();
        assert_eq!(m.degree_of(m.label_index("e12").unwrap()), &GroupElement::z2(1));
        assert_eq!(m.degree_of(m.label_index("e11").unwrap()), &GroupElement::z2(0));
        assert_eq!(m.dim(), 4);
        assert!(build_matrix_algebra(3, &GradingMap::z2(&[0, 1]), &g).is_err());
    }

    #[test]
    fn block_triangular_dimensions() {
        let g = GroupSpec::z2();
        let ut = build_block_triangular(&BlockShape::new(alloc::vec![2, 2]).unwrap(), &GradingMap::z2(&[0, 1, 0, 1]), &g)
            .unwrap();
        assert_eq!(ut.dim(), 12);
        assert!(ut.label_index("e31").is_none());
        assert!(ut.label_index("e14").is_some());
    }

    #[test]
    fn matrix_over_grassmann() {
        let e = build_grassmann(&GrassmannSpec::new(2, GrassmannGrading::Natural)).unwrap();
        let r = build_matrix_over(&e, &BlockShape::new(alloc::vec![1, 1]).unwrap()).unwrap();
        assert_eq!(r.dim(), 3 * 4);
        let x = r.label_index("e12(e1)").unwrap();
        assert_eq!(r.degree_of(x), &GroupElement::z2(1));
        let a = r.label_index("e12(1)").unwrap();
        let b = r.label_index("e11(1)").unwrap();
        assert!(r.basis_product(a, b).is_empty());
        let full = build_matrix_over(&e, &BlockShape::single(2)).unwrap();
        assert_eq!(full.dim(), 4 * e.dim());
    }

    #[test]
    fn regularity_examples() {
        let g = GroupSpec::z2();
        assert!(is_g_regular(&GradingMap::z2(&[0, 1]), &g).unwrap().regular);
        let r = is_g_regular(&GradingMap::z2(&[0, 0, 1]), &g).unwrap();
        assert!(!r.regular);
        assert_eq!(r.fibers, alloc::vec![(GroupElement::z2(0), 2), (GroupElement::z2(1), 1)]);
        assert!(is_g_regular(&GradingMap::z2(&[0, 1, 0, 1]), &g).unwrap().regular);
        let r = is_g_regular(&GradingMap::z2(&[0]), &g).unwrap();
        assert!(!r.regular && !r.surjective);
        assert!(is_g_regular(&GradingMap::trivial(&GroupSpec::trivial(), 3), &GroupSpec::trivial()).unwrap().regular);
    }
}
