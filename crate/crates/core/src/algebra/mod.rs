//! Finite-dimensional graded algebras given by structure constants.

mod grassmann;
mod matrix;

pub use grassmann::{
    build_grassmann, grassmann_product_sign, mask_label, subset_order, GrassmannElement, GrassmannGrading, GrassmannSpec,
};
pub use matrix::{
    build_block_triangular, build_matrix_algebra, build_matrix_over, is_g_regular, BlockShape, GradingMap,
    RegularityReport,
};

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::poly::NcPolynomial;
use crate::Q;

/// Sparse coordinate vector over an algebra's basis labels.
pub type Element = Vec<(usize, Q)>;

/// Algebras up to this dimension get an exhaustive associativity check on construction.
pub const EXHAUSTIVE_CHECK_DIM: usize = 64;
/// Number of sampled basis triples checked above [`EXHAUSTIVE_CHECK_DIM`].
pub const SAMPLED_CHECKS: usize = 10_000;

/// How an algebra was built; lets routines pick specialized evaluation paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraOrigin {
    Matrix { grading: GradingMap },
    BlockTriangular { shape: BlockShape, grading: GradingMap },
    Grassmann(GrassmannSpec),
    MatrixOver { inner: Box<AlgebraOrigin>, shape: BlockShape },
    Custom,
}

impl AlgebraOrigin {
    /// The Grassmann data and block shape when this is `E_N` or a (block-triangular) matrix algebra over it.
    pub fn grassmann_handle(&self) -> Option<(GrassmannSpec, BlockShape)> {
        match self {
            AlgebraOrigin::Grassmann(spec) => Some((spec.clone(), BlockShape::single(1))),
            AlgebraOrigin::MatrixOver { inner, shape } => match inner.as_ref() {
                AlgebraOrigin::Grassmann(spec) => Some((spec.clone(), shape.clone())),
                _ => None,
            },
            _ => None,
        }
    }
}

/// A graded algebra with homogeneous basis, degree map and sparse multiplication table.
#[derive(Clone, Debug)]
pub struct StructureConstantAlgebra {
    group: GroupSpec,
    labels: Vec<String>,
    degrees: Vec<GroupElement>,
    // table[i] holds (j, b_i * b_j) sorted by j, nonzero products only
    table: Vec<Vec<(usize, Element)>>,
    unit: Element,
    origin: AlgebraOrigin,
}

fn add_scaled(acc: &mut BTreeMap<usize, Q>, v: &[(usize, Q)], c: &Q) {
    for (k, x) in v {
        let e = acc.entry(*k).or_insert_with(Q::zero);
        *e += c * x;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

impl StructureConstantAlgebra {
    /// Assembles an algebra and runs the construction checks.
    pub fn new(
        group: GroupSpec,
        labels: Vec<String>,
        degrees: Vec<GroupElement>,
        products: BTreeMap<(usize, usize), Element>,
        unit: Element,
        origin: AlgebraOrigin,
    ) -> Result<Self, CoreError> {
        let a = Self::new_unchecked(group, labels, degrees, products, unit, origin)?;
        a.validate(EXHAUSTIVE_CHECK_DIM, SAMPLED_CHECKS)?;
        Ok(a)
    }

    pub(crate) fn new_unchecked(
        group: GroupSpec,
        labels: Vec<String>,
        degrees: Vec<GroupElement>,
        products: BTreeMap<(usize, usize), Element>,
        unit: Element,
        origin: AlgebraOrigin,
    ) -> Result<Self, CoreError> {
        let dim = labels.len();
        if degrees.len() != dim {
            return Err(CoreError::InvalidAlgebra("one degree per basis label required".into()));
        }
        for d in &degrees {
            group.check(d)?;
        }
        let mut table = alloc::vec![Vec::new(); dim];
        for ((i, j), v) in products {
            if i >= dim || j >= dim || v.iter().any(|(k, _)| *k >= dim) {
                return Err(CoreError::InvalidAlgebra("structure constant index out of range".into()));
            }
            let v: Element = v.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            if !v.is_empty() {
                table[i].push((j, v));
            }
        }
        Ok(Self { group, labels, degrees, table, unit, origin })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn degree_of(&self, i: usize) -> &GroupElement {
        &self.degrees[i]
    }

    pub fn unit(&self) -> &Element {
        &self.unit
    }

    /// Grassmann support of each basis element, for algebras built over `E_N`.
    /// Products of elements with overlapping supports vanish.
    pub fn support_masks(&self) -> Option<Vec<u64>> {
        let (spec, shape) = self.origin.grassmann_handle()?;
        let inner = subset_order(spec.n_generators);
        let blocks = match &self.origin {
            AlgebraOrigin::Grassmann(_) => 1,
            _ => shape.positions().len(),
        };
        if inner.len() * blocks != self.dim() {
            return None;
        }
        Some((0..blocks).flat_map(|_| inner.iter().copied()).collect())
    }

    pub fn origin(&self) -> &AlgebraOrigin {
        &self.origin
    }

    /// Basis vector `b_i`.
    pub fn basis_element(&self, i: usize) -> Element {
        alloc::vec![(i, Q::one())]
    }

    /// `b_i * b_j`, or an empty slice when zero.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, Q)] {
        let row = &self.table[i];
        match row.binary_search_by_key(&j, |(k, _)| *k) {
            Ok(p) => &row[p].1,
            Err(_) => &[],
        }
    }

    pub fn mul(&self, a: &[(usize, Q)], b: &[(usize, Q)]) -> Element {
        let mut acc = BTreeMap::new();
        for (i, x) in a {
            for (j, y) in b {
                let p = self.basis_product(*i, *j);
                if !p.is_empty() {
                    add_scaled(&mut acc, p, &(x * y));
                }
            }
        }
        acc.into_iter().collect()
    }

    pub fn add(&self, a: &[(usize, Q)], b: &[(usize, Q)]) -> Element {
        let mut acc: BTreeMap<usize, Q> = a.iter().cloned().collect();
        add_scaled(&mut acc, b, &Q::one());
        acc.into_iter().collect()
    }

    /// The degree of a nonzero homogeneous element; `None` if inhomogeneous or zero.
    pub fn element_degree(&self, a: &[(usize, Q)]) -> Option<&GroupElement> {
        let mut it = a.iter().filter(|(_, x)| !x.is_zero()).map(|(i, _)| &self.degrees[*i]);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Checks unit laws on every basis element, grading compatibility of every
    /// structure constant, and associativity on all basis triples (when
    /// `dim <= exhaustive_dim`) or on `samples` deterministic random triples.
    pub fn validate(&self, exhaustive_dim: usize, samples: usize) -> Result<(), CoreError> {
        let dim = self.dim();
        for i in 0..dim {
            let b = self.basis_element(i);
            if self.mul(&self.unit, &b) != b || self.mul(&b, &self.unit) != b {
                return Err(CoreError::InvalidAlgebra(format!("unit law fails on {}", self.labels[i])));
            }
        }
        for (i, row) in self.table.iter().enumerate() {
            for (j, v) in row {
                let want = self.group.op(&self.degrees[i], &self.degrees[*j])?;
                if v.iter().any(|(k, _)| self.degrees[*k] != want) {
                    return Err(CoreError::InvalidAlgebra(format!(
                        "product {}*{} leaves degree ({want})",
                        self.labels[i], self.labels[*j]
                    )));
                }
            }
        }
        let check = |i: usize, j: usize, k: usize| -> Result<(), CoreError> {
            let left = self.mul(self.basis_product(i, j), &self.basis_element(k));
            let right = self.mul(&self.basis_element(i), self.basis_product(j, k));
            if left != right {
                return Err(CoreError::InvalidAlgebra(format!(
                    "associativity fails on ({}, {}, {})",
                    self.labels[i], self.labels[j], self.labels[k]
                )));
            }
            Ok(())
        };
        if dim <= exhaustive_dim {
            for i in 0..dim {
                for j in 0..dim {
                    for k in 0..dim {
                        check(i, j, k)?;
                    }
                }
            }
        } else if dim > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1ab1e);
            for _ in 0..samples {
                check(rng.gen_range(0..dim), rng.gen_range(0..dim), rng.gen_range(0..dim))?;
            }
        }
        Ok(())
    }

    /// Basis labels of degree `g`, as coordinate vectors.
    pub fn homogeneous_basis(&self, g: &GroupElement) -> Vec<Element> {
        self.homogeneous_indices(g).into_iter().map(|i| self.basis_element(i)).collect()
    }

    pub fn homogeneous_indices(&self, g: &GroupElement) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == *g).collect()
    }

    /// `{g : A^g != 0}`.
    pub fn support(&self) -> Vec<GroupElement> {
        self.group.elements().into_iter().filter(|g| self.degrees.contains(g)).collect()
    }

    /// Pretty-prints an element as `c*label + ...`.
    pub fn format_element(&self, a: &[(usize, Q)]) -> String {
        if a.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = a.iter().map(|(i, c)| format!("{c}*{}", self.labels[*i])).collect();
        parts.join(" + ")
    }
}

/// Image of `f` under the graded homomorphism sending `x_id` to `assignment[id]`.
pub fn evaluate(
    f: &NcPolynomial,
    assignment: &BTreeMap<u32, Element>,
    algebra: &StructureConstantAlgebra,
) -> Result<Element, CoreError> {
    for id in f.variables() {
        let deg = f.universe().get(&id).ok_or(CoreError::UnknownVariable(id))?;
        let a = assignment
            .get(&id)
            .ok_or_else(|| CoreError::GradedEvaluation(format!("no value assigned to x{id}")))?;
        if a.iter().any(|(k, _)| *k >= algebra.dim()) {
            return Err(CoreError::GradedEvaluation(format!("value of x{id} has out-of-range coordinates")));
        }
        if a.iter().any(|(k, x)| !x.is_zero() && algebra.degree_of(*k) != deg) {
            return Err(CoreError::GradedEvaluation(format!(
                "value of x{id} is not homogeneous of degree ({deg})"
            )));
        }
    }
    let mut acc = BTreeMap::new();
    for (w, c) in f.terms() {
        let mut prod = algebra.unit().clone();
        for l in w.letters() {
            prod = algebra.mul(&prod, &assignment[l]);
            if prod.is_empty() {
                break;
            }
        }
        add_scaled(&mut acc, &prod, c);
    }
    Ok(acc.into_iter().collect())
}

/// Degree-`g` part of the basis as coordinate vectors.
pub fn homogeneous_basis(algebra: &StructureConstantAlgebra, g: &GroupElement) -> Vec<Element> {
    algebra.homogeneous_basis(g)
}
