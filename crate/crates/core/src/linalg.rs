//! Exact sparse linear algebra over the rationals.
//!
//! Elimination runs on primitive integer rows (fraction-free: rows are
//! cross-multiplied and divided by their content), and only the final
//! reduced row-echelon form is normalized to rationals. Reduced row-echelon
//! form is unique, so [`Subspace`] values compare equal exactly when they
//! span the same space.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;
use crate::Q;

/// A sparse row: strictly increasing column indices, no stored zeros.
pub type SparseRow = Vec<(usize, Q)>;

/// Limits that turn runaway computations into [`CoreError::ResourceGuard`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuardLimits {
    /// Maximum `rows * cols` of a matrix the caller is about to build.
    pub max_cells: u128,
    /// Maximum bit length of any intermediate integer during elimination.
    pub max_coeff_bits: u64,
}

impl Default for GuardLimits {
    fn default() -> Self {
        Self { max_cells: 1 << 36, max_coeff_bits: 4096 }
    }
}

impl GuardLimits {
    pub fn unlimited() -> Self {
        Self { max_cells: u128::MAX, max_coeff_bits: u64::MAX }
    }

    pub fn check_cells(&self, what: &str, rows: u128, cols: u128) -> Result<(), CoreError> {
        let estimate = rows.saturating_mul(cols);
        if estimate > self.max_cells {
            return Err(CoreError::ResourceGuard { what: what.into(), estimate, limit: self.max_cells });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<SparseRow>,
}

impl SparseMatrix {
    pub fn new(n_cols: usize) -> Self {
        Self { n_rows: 0, n_cols, rows: Vec::new() }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, rows: alloc::vec![Vec::new(); n_rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { n_rows: n, n_cols: n, rows: (0..n).map(|i| alloc::vec![(i, Q::one())]).collect() }
    }

    /// Builds from dense rows; every row must have `n_cols` entries.
    pub fn from_dense(n_cols: usize, dense: &[Vec<Q>]) -> Result<Self, CoreError> {
        let mut m = Self::new(n_cols);
        for r in dense {
            if r.len() != n_cols {
                return Err(CoreError::AmbientMismatch { left: n_cols, right: r.len() });
            }
            m.push_row(r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())?;
        }
        Ok(m)
    }

    /// Appends a row given as `(column, value)` pairs in any order; duplicates are summed.
    pub fn push_row(&mut self, entries: Vec<(usize, Q)>) -> Result<(), CoreError> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, v) in entries {
            if c >= self.n_cols {
                return Err(CoreError::OutOfRange { index: c, bound: self.n_cols.saturating_sub(1) });
            }
            *acc.entry(c).or_insert_with(Q::zero) += v;
        }
        self.rows.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        self.n_rows += 1;
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `self * v` for a dense vector `v`.
    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        self.rows.iter().map(|r| r.iter().fold(Q::zero(), |acc, (c, x)| acc + x * &v[*c])).collect()
    }
}

/// A subspace of `Q^ambient_dim`, stored as its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseRow>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        rref(&SparseMatrix::identity(ambient_dim))
    }

    /// Span of arbitrary rows.
    pub fn span(ambient_dim: usize, rows: &[SparseRow]) -> Result<Self, CoreError> {
        let mut e = Echelon::new(ambient_dim, GuardLimits::unlimited());
        for r in rows {
            e.insert_rational(r)?;
        }
        Ok(e.into_subspace())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseRow] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r[0].0).collect()
    }

    /// Residual of `v` after eliminating every pivot column; zero iff `v` lies in the space.
    pub fn reduce(&self, v: &[(usize, Q)]) -> SparseRow {
        let mut dense: BTreeMap<usize, Q> = v.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        for row in &self.basis {
            let p = row[0].0;
            if let Some(c) = dense.get(&p).cloned() {
                for (col, x) in row {
                    let e = dense.entry(*col).or_insert_with(Q::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        dense.remove(col);
                    }
                }
            }
        }
        dense.into_iter().collect()
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> Result<bool, CoreError> {
        if let Some((c, _)) = v.iter().find(|(c, _)| *c >= self.ambient_dim) {
            return Err(CoreError::OutOfRange { index: *c, bound: self.ambient_dim.saturating_sub(1) });
        }
        Ok(self.reduce(v).is_empty())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool, CoreError> {
        check_ambient(self, other)?;
        Ok(other.basis.iter().all(|r| self.reduce(r).is_empty()))
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        SparseMatrix { n_rows: self.basis.len(), n_cols: self.ambient_dim, rows: self.basis.clone() }
    }
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<(), CoreError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(CoreError::AmbientMismatch { left: a.ambient_dim, right: b.ambient_dim });
    }
    Ok(())
}

/// Row space of `m` in canonical reduced row-echelon form.
pub fn rref(m: &SparseMatrix) -> Subspace {
    let mut e = Echelon::new(m.n_cols, GuardLimits::unlimited());
    for r in &m.rows {
        // unlimited guard cannot fail
        e.insert_rational(r).expect("unguarded elimination");
    }
    e.into_subspace()
}

/// Row space of `m`, aborting if intermediate integers exceed the guard.
pub fn rref_guarded(m: &SparseMatrix, guard: GuardLimits) -> Result<Subspace, CoreError> {
    guard.check_cells("matrix size", m.n_rows as u128, m.n_cols as u128)?;
    let mut e = Echelon::new(m.n_cols, guard);
    for r in &m.rows {
        e.insert_rational(r)?;
    }
    Ok(e.into_subspace())
}

/// Canonical basis of `{v : m v = 0}`.
pub fn kernel_basis(m: &SparseMatrix) -> Subspace {
    kernel_of_rref(&rref(m))
}

/// Kernel of the row space `s`, i.e. its orthogonal complement under the standard pairing.
pub fn kernel_of_rref(s: &Subspace) -> Subspace {
    let n = s.ambient_dim;
    let pivots = s.pivots();
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut rows = Vec::new();
    for free in (0..n).filter(|c| !pivot_set.contains(c)) {
        let mut v: BTreeMap<usize, Q> = BTreeMap::new();
        v.insert(free, Q::one());
        for row in &s.basis {
            if let Ok(i) = row.binary_search_by_key(&free, |(c, _)| *c) {
                v.insert(row[0].0, -row[i].1.clone());
            }
        }
        rows.push(v.into_iter().collect::<SparseRow>());
    }
    // rows are already in RREF up to ordering by pivot = free column
    let mut e = Echelon::new(n, GuardLimits::unlimited());
    for r in &rows {
        e.insert_rational(r).expect("unguarded elimination");
    }
    e.into_subspace()
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace, CoreError> {
    check_ambient(a, b)?;
    let mut e = Echelon::new(a.ambient_dim, GuardLimits::unlimited());
    for r in a.basis.iter().chain(&b.basis) {
        e.insert_rational(r)?;
    }
    Ok(e.into_subspace())
}

/// Relative position of two subspaces of the same ambient space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubspaceRelation {
    Equal,
    AStrictlyInsideB,
    BStrictlyInsideA,
    Incomparable,
}

pub fn subspace_cmp(a: &Subspace, b: &Subspace) -> Result<SubspaceRelation, CoreError> {
    check_ambient(a, b)?;
    if a == b {
        return Ok(SubspaceRelation::Equal);
    }
    let a_in_b = b.contains_subspace(a)?;
    let b_in_a = a.contains_subspace(b)?;
    Ok(match (a_in_b, b_in_a) {
        (true, true) => SubspaceRelation::Equal,
        (true, false) => SubspaceRelation::AStrictlyInsideB,
        (false, true) => SubspaceRelation::BStrictlyInsideA,
        (false, false) => SubspaceRelation::Incomparable,
    })
}

pub type IntRow = Vec<(usize, BigInt)>;

/// Incremental fraction-free echelon form.
///
/// Rows are inserted one at a time and reduced against the current pivot
/// rows on their leading entry only; [`Echelon::into_subspace`] finishes the
/// back-substitution. Duplicate rows (up to scaling) are dropped before
/// elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    n_cols: usize,
    guard: GuardLimits,
    pivots: BTreeMap<usize, IntRow>,
    seen: BTreeSet<IntRow>,
}

fn primitive(mut row: IntRow) -> IntRow {
    if row.is_empty() {
        return row;
    }
    let mut g = BigInt::zero();
    for (_, x) in &row {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x = &*x / &g;
        }
    }
    row
}

fn to_int_row(r: &[(usize, Q)]) -> IntRow {
    let mut l = BigInt::one();
    for (_, x) in r {
        l = l.lcm(x.denom());
    }
    r.iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (*c, x.numer() * (&l / x.denom())))
        .collect()
}

impl Echelon {
    pub fn new(n_cols: usize, guard: GuardLimits) -> Self {
        Self { n_cols, guard, pivots: BTreeMap::new(), seen: BTreeSet::new() }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.n_cols
    }

    pub fn insert_rational(&mut self, r: &[(usize, Q)]) -> Result<bool, CoreError> {
        self.insert_int(to_int_row(r))
    }

    /// Inserts an integer row given as sorted `(column, value)` pairs.
    /// Returns whether the rank grew.
    pub fn insert_int(&mut self, row: IntRow) -> Result<bool, CoreError> {
        if let Some((c, _)) = row.last() {
            if *c >= self.n_cols {
                return Err(CoreError::OutOfRange { index: *c, bound: self.n_cols.saturating_sub(1) });
            }
        }
        let mut row = primitive(row.into_iter().filter(|(_, x)| !x.is_zero()).collect());
        if row.is_empty() || self.is_full() {
            return Ok(false);
        }
        if !self.seen.insert(row.clone()) {
            return Ok(false);
        }
        loop {
            let Some(&(lead, _)) = row.first() else { return Ok(false) };
            let Some(piv) = self.pivots.get(&lead) else {
                self.pivots.insert(lead, row);
                return Ok(true);
            };
            row = primitive(eliminate(&row, piv, self.guard.max_coeff_bits)?);
        }
    }

    /// Finishes back-substitution and normalizes pivots to one.
    pub fn into_subspace(self) -> Subspace {
        let n_cols = self.n_cols;
        let mut done: Vec<(usize, IntRow)> = Vec::with_capacity(self.pivots.len());
        // last pivot first, so each row is reduced against finished rows
        for (lead, mut row) in self.pivots.into_iter().rev() {
            for (plead, prow) in &done {
                if row.binary_search_by_key(plead, |(k, _)| *k).is_ok() {
                    row = primitive(eliminate(&row, prow, u64::MAX).expect("unguarded elimination"));
                }
            }
            done.push((lead, row));
        }
        done.reverse();
        let basis = done
            .into_iter()
            .map(|(_, row)| {
                let lead = row[0].1.clone();
                row.into_iter().map(|(c, x)| (c, Q::new(x, lead.clone()))).collect()
            })
            .collect();
        Subspace { ambient_dim: n_cols, basis }
    }
}

/// `p*row - c*piv` where `p` is `piv`'s leading value and `c` is `row`'s entry there.
fn eliminate(row: &IntRow, piv: &IntRow, max_bits: u64) -> Result<IntRow, CoreError> {
        let p = &piv[0].1;
        let col = piv[0].0;
        let c = match row.binary_search_by_key(&col, |(k, _)| *k) {
            Ok(i) => row[i].1.clone(),
            Err(_) => return Ok(row.clone()),
        };
        let g = p.gcd(&c);
        let (p, c) = (p / &g, &c / &g);
        let mut out = Vec::with_capacity(row.len() + piv.len());
        let (mut i, mut j) = (0, 0);
        while i < row.len() || j < piv.len() {
            let (col, val) = match (row.get(i), piv.get(j)) {
                (Some(a), Some(b)) if a.0 == b.0 => {
                    i += 1;
                    j += 1;
                    (a.0, &p * &a.1 - &c * &b.1)
                }
                (Some(a), Some(b)) if a.0 < b.0 => {
                    i += 1;
                    (a.0, &p * &a.1)
                }
                (Some(_), Some(b)) | (None, Some(b)) => {
                    j += 1;
                    (b.0, -(&c * &b.1))
                }
                (Some(a), None) => {
                    i += 1;
                    (a.0, &p * &a.1)
                }
                (None, None) => unreachable!(),
            };
            if !val.is_zero() {
                if val.bits() > max_bits {
                    return Err(CoreError::ResourceGuard {
                        what: format!("coefficient bit length at column {col}"),
                        estimate: val.bits() as u128,
                        limit: max_bits as u128,
                    });
                }
                out.push((col, val));
            }
        }
        Ok(out)
}
