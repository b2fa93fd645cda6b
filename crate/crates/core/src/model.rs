//! Generic matrices of `UT(d_1, ..., d_m; A)` with entries in a relatively free algebra of `A`.
//!
//! Entry variable `x_{ij,k}^{(g)}` (1-based `i`, `j`, `k`) of an `n x n` model is the flat id
//! `((k - 1) |G| + index(g)) n^2 + (i - 1) n + (j - 1) + 1`, see [`GenericModel::variable_id`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::BlockShape;
use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::identities::{coordinates, polynomial_from_coordinates, ComponentProvider};
use crate::linalg::{Echelon, GuardLimits};
use crate::poly::{MultidegreeSignature, NcPolynomial, Universe, Word};
use crate::relfree::{GradingMode, RelFreeElement, RelFreeEngine, RelFreeWord};
use crate::Q;

/// Arithmetic in a relatively free algebra `U_G(A)`.
pub trait Backend {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display;
    /// Coordinate index of a normal-form basis element.
    type Key: Ord + Clone;

    fn group(&self) -> &GroupSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn variable(&self, id: u32, degree: &GroupElement) -> Result<Self::Elem, CoreError>;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, CoreError>;
    fn scale(&self, a: &Self::Elem, c: &Q) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, CoreError>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn coordinates(&self, a: &Self::Elem) -> Vec<(Self::Key, Q)>;
    /// Renames variables (degrees preserved) and re-normalizes.
    fn rename(&self, a: &Self::Elem, f: &dyn Fn(u32) -> u32) -> Result<Self::Elem, CoreError>;
    /// Total degree up to which normal forms are exact; `None` for all degrees.
    fn degree_bound(&self) -> Option<usize>;
}

/// Exact backend for `E` through the relatively free normal forms.
#[derive(Debug)]
pub struct RelFreeBackend {
    engine: RelFreeEngine,
    group: GroupSpec,
}

impl RelFreeBackend {
    /// `group` is `Z2`, or trivial with the `infty` mode (all variables even).
    pub fn new(mode: GradingMode, group: GroupSpec) -> Result<Self, CoreError> {
        let ok = group.is_z2() || (group.is_trivial() && mode == GradingMode::Infty);
        if !ok {
            return Err(CoreError::ModeMismatch(format!("mode {mode} needs the group Z2")));
        }
        Ok(Self { engine: RelFreeEngine::new(mode), group })
    }

    pub fn mode(&self) -> GradingMode {
        self.engine.mode()
    }
}

impl Backend for RelFreeBackend {
    type Elem = RelFreeElement;
    type Key = RelFreeWord;

    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn zero(&self) -> RelFreeElement {
        RelFreeElement::zero(self.engine.mode())
    }

    fn one(&self) -> RelFreeElement {
        RelFreeElement::one(self.engine.mode())
    }

    fn variable(&self, id: u32, degree: &GroupElement) -> Result<RelFreeElement, CoreError> {
        self.group.check(degree)?;
        let bit = if self.group.is_trivial() { 0 } else { degree.z2_bit().ok_or(CoreError::NonZ2Variable(id))? };
        Ok(self.engine.var(id, bit))
    }

    fn add(&self, a: &RelFreeElement, b: &RelFreeElement) -> Result<RelFreeElement, CoreError> {
        a.add(b)
    }

    fn scale(&self, a: &RelFreeElement, c: &Q) -> RelFreeElement {
        a.scale(c)
    }

    fn mul(&self, a: &RelFreeElement, b: &RelFreeElement) -> Result<RelFreeElement, CoreError> {
        self.engine.mul(a, b)
    }

    fn is_zero(&self, a: &RelFreeElement) -> bool {
        a.is_zero()
    }

    fn coordinates(&self, a: &RelFreeElement) -> Vec<(RelFreeWord, Q)> {
        a.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
    }

    fn rename(&self, a: &RelFreeElement, f: &dyn Fn(u32) -> u32) -> Result<RelFreeElement, CoreError> {
        let map = a.bits().keys().map(|&id| (id, f(id))).collect();
        self.engine.rename(a, &map)
    }

    fn degree_bound(&self) -> Option<usize> {
        None
    }
}

/// Backend for an arbitrary `A`: multilinear polynomials reduced modulo the
/// multilinear components of `T_G(A)` supplied by a provider.
///
/// Only polynomials that are multilinear in each of their variable sets are
/// supported, and only up to `bound` total degree.
pub struct QuotientBackend<'a> {
    provider: &'a dyn ComponentProvider,
    group: GroupSpec,
    bound: usize,
}

impl<'a> QuotientBackend<'a> {
    pub fn new(provider: &'a dyn ComponentProvider, group: GroupSpec, bound: usize) -> Self {
        Self { provider, group, bound }
    }

    /// Canonical representative: each multilinear component reduced against the identity space.
    pub fn reduce(&self, f: &NcPolynomial) -> Result<NcPolynomial, CoreError> {
        let mut parts: BTreeMap<Vec<u32>, Vec<(Word, Q)>> = BTreeMap::new();
        for (w, c) in f.terms() {
            let mut vars = w.letters().to_vec();
            vars.sort_unstable();
            let len = vars.len();
            vars.dedup();
            if vars.len() != len {
                return Err(CoreError::Unsupported("the quotient backend handles multilinear words only".into()));
            }
            if len > self.bound {
                return Err(CoreError::Unsupported(format!(
                    "degree {len} exceeds the quotient backend bound {}",
                    self.bound
                )));
            }
            parts.entry(vars).or_default().push((w.clone(), c.clone()));
        }
        let universe = f.universe().clone();
        let mut out: Vec<(Word, Q)> = Vec::new();
        for (vars, terms) in parts {
            if vars.is_empty() {
                out.extend(terms);
                continue;
            }
            let degrees: Vec<GroupElement> = vars
                .iter()
                .map(|v| universe.get(v).cloned().ok_or(CoreError::UnknownVariable(*v)))
                .collect::<Result<_, _>>()?;
            let sig = MultidegreeSignature::new(degrees)?;
            let to_local: BTreeMap<u32, u32> = vars.iter().enumerate().map(|(i, v)| (*v, i as u32 + 1)).collect();
            let local = NcPolynomial::from_terms(
                terms.into_iter().map(|(w, c)| (Word(w.letters().iter().map(|l| to_local[l]).collect()), c)),
                sig.universe(),
            )?;
            let space = self.provider.component(&sig)?;
            let residual = space.space().reduce(&coordinates(&local, &sig)?);
            let reduced = polynomial_from_coordinates(&residual, &sig)?;
            for (w, c) in reduced.terms() {
                out.push((Word(w.letters().iter().map(|l| vars[*l as usize - 1]).collect()), c.clone()));
            }
        }
        let used: Universe = universe.into_iter().filter(|(id, _)| out.iter().any(|(w, _)| w.letters().contains(id))).collect();
        NcPolynomial::from_terms(out, used)
    }
}

impl Backend for QuotientBackend<'_> {
    type Elem = NcPolynomial;
    type Key = Word;

    fn group(&self) -> &GroupSpec {
        &self.group
    }

    fn zero(&self) -> NcPolynomial {
        NcPolynomial::zero()
    }

    fn one(&self) -> NcPolynomial {
        NcPolynomial::one()
    }

    fn variable(&self, id: u32, degree: &GroupElement) -> Result<NcPolynomial, CoreError> {
        self.group.check(degree)?;
        self.reduce(&NcPolynomial::var(id, degree.clone()))
    }

    fn add(&self, a: &NcPolynomial, b: &NcPolynomial) -> Result<NcPolynomial, CoreError> {
        a.add(b)
    }

    fn scale(&self, a: &NcPolynomial, c: &Q) -> NcPolynomial {
        a.scale(c)
    }

    fn mul(&self, a: &NcPolynomial, b: &NcPolynomial) -> Result<NcPolynomial, CoreError> {
        self.reduce(&a.mul(b)?)
    }

    fn is_zero(&self, a: &NcPolynomial) -> bool {
        a.is_zero()
    }

    fn coordinates(&self, a: &NcPolynomial) -> Vec<(Word, Q)> {
        a.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
    }

    fn rename(&self, a: &NcPolynomial, f: &dyn Fn(u32) -> u32) -> Result<NcPolynomial, CoreError> {
        let map = a.universe().keys().map(|&id| (id, f(id))).collect();
        self.reduce(&a.rename(&map)?)
    }

    fn degree_bound(&self) -> Option<usize> {
        Some(self.bound)
    }
}

/// Square matrix over a backend, zero below the diagonal blocks of `shape`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericMatrix<E> {
    shape: BlockShape,
    entries: Vec<Vec<E>>,
}

impl<E: Clone> GenericMatrix<E> {
    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Entry at 1-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &E {
        &self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<E>] {
        &self.entries
    }
}

impl<E: fmt::Display> fmt::Display for GenericMatrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|e| format!("{e}")).collect();
            writeln!(f, "[{}]", cells.join(" | "))?;
        }
        Ok(())
    }
}

/// The three views of a generic matrix used when peeling off the last diagonal block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockViews<E> {
    /// Blocks `1..m-1`.
    pub leading: GenericMatrix<E>,
    /// The last diagonal block.
    pub corner: GenericMatrix<E>,
    /// The `(n - d_m) x d_m` strip above the corner.
    pub strip: Vec<Vec<E>>,
}

/// Decoded entry variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryVariable {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub degree: GroupElement,
}

impl fmt::Display for EntryVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x_{{{},{};{}}}^({})", self.i, self.j, self.k, self.degree)
    }
}

/// `U(d_1, ..., d_m; A)` over a backend.
pub struct GenericModel<B: Backend> {
    shape: BlockShape,
    backend: B,
}

impl<B: Backend> GenericModel<B> {
    pub fn new(shape: BlockShape, backend: B) -> Self {
        Self { shape, backend }
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn group(&self) -> &GroupSpec {
        self.backend.group()
    }

    fn n(&self) -> usize {
        self.shape.size()
    }

    pub fn variable_id(&self, i: usize, j: usize, k: usize, g: &GroupElement) -> Result<u32, CoreError> {
        let n = self.n();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(CoreError::OutOfRange { index: i.max(j), bound: n });
        }
        if k == 0 {
            return Err(CoreError::OutOfRange { index: 0, bound: usize::MAX });
        }
        self.group().check(g)?;
        let order = self.group().order();
        let slot = (k - 1) * order + self.group().index_of(g);
        let id = slot
            .checked_mul(n * n)
            .and_then(|x| x.checked_add((i - 1) * n + j))
            .filter(|&x| x <= u32::MAX as usize)
            .ok_or(CoreError::OutOfRange { index: k, bound: u32::MAX as usize })?;
        Ok(id as u32)
    }

    pub fn decode_variable(&self, id: u32) -> Result<EntryVariable, CoreError> {
        if id == 0 {
            return Err(CoreError::UnknownVariable(0));
        }
        let n = self.n();
        let x = id as usize - 1;
        let slot = x / (n * n);
        let pos = x % (n * n);
        let order = self.group().order();
        let elems = self.group().elements();
        Ok(EntryVariable { i: pos / n + 1, j: pos % n + 1, k: slot / order + 1, degree: elems[slot % order].clone() })
    }

    pub fn zero_matrix(&self) -> GenericMatrix<B::Elem> {
        let n = self.n();
        GenericMatrix { shape: self.shape.clone(), entries: alloc::vec![alloc::vec![self.backend.zero(); n]; n] }
    }

    pub fn identity_matrix(&self) -> GenericMatrix<B::Elem> {
        let mut m = self.zero_matrix();
        for i in 0..self.n() {
            m.entries[i][i] = self.backend.one();
        }
        m
    }

    /// `xi_k^{(g)}`: fresh variables inside and above the diagonal blocks.
    pub fn make_generator(&self, k: usize, g: &GroupElement) -> Result<GenericMatrix<B::Elem>, CoreError> {
        let mut m = self.zero_matrix();
        for (r, s) in self.shape.positions() {
            let id = self.variable_id(r + 1, s + 1, k, g)?;
            m.entries[r][s] = self.backend.variable(id, g)?;
        }
        Ok(m)
    }

    fn check_same(&self, a: &GenericMatrix<B::Elem>, b: &GenericMatrix<B::Elem>) -> Result<(), CoreError> {
        if a.shape != self.shape || b.shape != self.shape {
            return Err(CoreError::AmbientMismatch { left: a.size(), right: b.size() });
        }
        Ok(())
    }

    pub fn add(&self, a: &GenericMatrix<B::Elem>, b: &GenericMatrix<B::Elem>) -> Result<GenericMatrix<B::Elem>, CoreError> {
        self.check_same(a, b)?;
        let mut m = self.zero_matrix();
        for (r, s) in self.shape.positions() {
            m.entries[r][s] = self.backend.add(&a.entries[r][s], &b.entries[r][s])?;
        }
        Ok(m)
    }

    pub fn scale(&self, a: &GenericMatrix<B::Elem>, c: &Q) -> GenericMatrix<B::Elem> {
        let mut m = a.clone();
        for row in m.entries.iter_mut() {
            for e in row.iter_mut() {
                *e = self.backend.scale(e, c);
            }
        }
        m
    }

    pub fn mul(&self, a: &GenericMatrix<B::Elem>, b: &GenericMatrix<B::Elem>) -> Result<GenericMatrix<B::Elem>, CoreError> {
        self.check_same(a, b)?;
        let n = self.n();
        let mut m = self.zero_matrix();
        for (r, s) in self.shape.positions() {
            let mut acc = self.backend.zero();
            for t in 0..n {
                if !self.shape.allows(r, t) || !self.shape.allows(t, s) {
                    continue;
                }
                let (x, y) = (&a.entries[r][t], &b.entries[t][s]);
                if self.backend.is_zero(x) || self.backend.is_zero(y) {
                    continue;
                }
                acc = self.backend.add(&acc, &self.backend.mul(x, y)?)?;
            }
            m.entries[r][s] = acc;
        }
        Ok(m)
    }

    pub fn is_zero(&self, m: &GenericMatrix<B::Elem>) -> bool {
        m.entries.iter().flatten().all(|e| self.backend.is_zero(e))
    }

    /// `f(xi)`, sending `x_l` of degree `g` to `xi_l^{(g)}`.
    pub fn model_eval(&self, f: &NcPolynomial) -> Result<GenericMatrix<B::Elem>, CoreError> {
        let mut gens: BTreeMap<u32, GenericMatrix<B::Elem>> = BTreeMap::new();
        for id in f.variables() {
            let g = f.universe().get(&id).ok_or(CoreError::UnknownVariable(id))?;
            if let Err(e) = self.group().check(g) {
                return Err(CoreError::GradedEvaluation(format!("x{id}: {e}")));
            }
            gens.insert(id, self.make_generator(id as usize, g)?);
        }
        let mut acc = self.zero_matrix();
        for (w, c) in f.terms() {
            let mut prod = self.identity_matrix();
            for l in w.letters() {
                prod = self.mul(&prod, &gens[l])?;
            }
            acc = self.add(&acc, &self.scale(&prod, c))?;
        }
        Ok(acc)
    }

    /// `phi`: `x_{ij,k}^{(g)} -> x_{i+1,j+1,k}^{(g)}`, indices mod `n`. Single-block models only.
    pub fn shift_automorphism(&self, m: &GenericMatrix<B::Elem>) -> Result<GenericMatrix<B::Elem>, CoreError> {
        if self.shape.num_blocks() != 1 {
            return Err(CoreError::Unsupported("the shift automorphism needs a single-block model".into()));
        }
        let n = self.n();
        let shift = |id: u32| -> u32 {
            let v = self.decode_variable(id).expect("model variable");
            self.variable_id(v.i % n + 1, v.j % n + 1, v.k, &v.degree).expect("in range")
        };
        let mut out = self.zero_matrix();
        for r in 0..n {
            for s in 0..n {
                out.entries[r][s] = self.backend.rename(&m.entries[r][s], &shift)?;
            }
        }
        Ok(out)
    }

    /// `pi_k`: the `k`-th column (1-based).
    pub fn column_projection(&self, m: &GenericMatrix<B::Elem>, k: usize) -> Result<Vec<B::Elem>, CoreError> {
        if k == 0 || k > m.size() {
            return Err(CoreError::OutOfRange { index: k, bound: m.size() });
        }
        Ok(m.entries.iter().map(|row| row[k - 1].clone()).collect())
    }

    fn independent_by(
        &self,
        set: &[GenericMatrix<B::Elem>],
        cells: &[(usize, usize)],
    ) -> Result<bool, CoreError> {
        if set.iter().any(|m| m.shape != self.shape) {
            return Err(CoreError::Unsupported("matrices from different models".into()));
        }
        let mut index: BTreeMap<(usize, usize, B::Key), usize> = BTreeMap::new();
        let mut rows = Vec::with_capacity(set.len());
        for m in set {
            let mut row = Vec::new();
            for &(r, s) in cells {
                for (key, c) in self.backend.coordinates(&m.entries[r][s]) {
                    let next = index.len();
                    let col = *index.entry((r, s, key)).or_insert(next);
                    row.push((col, c));
                }
            }
            rows.push(row);
        }
        let mut e = Echelon::new(index.len().max(1), GuardLimits::unlimited());
        for mut row in rows {
            row.sort_by_key(|(c, _)| *c);
            if !e.insert_rational(&row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Linear independence of the `k`-th columns.
    pub fn independent_by_columns(&self, set: &[GenericMatrix<B::Elem>], k: usize) -> Result<bool, CoreError> {
        let n = self.n();
        if k == 0 || k > n {
            return Err(CoreError::OutOfRange { index: k, bound: n });
        }
        let cells: Vec<(usize, usize)> = (0..n).map(|r| (r, k - 1)).collect();
        self.independent_by(set, &cells)
    }

    /// Linear independence of the whole matrices.
    pub fn independent(&self, set: &[GenericMatrix<B::Elem>]) -> Result<bool, CoreError> {
        let n = self.n();
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |s| (r, s))).collect();
        self.independent_by(set, &cells)
    }

    pub fn extract_blocks(&self, m: &GenericMatrix<B::Elem>) -> Result<BlockViews<B::Elem>, CoreError> {
        let sizes = self.shape.sizes();
        if sizes.len() < 2 {
            return Err(CoreError::Unsupported("block extraction needs at least two diagonal blocks".into()));
        }
        let dm = sizes[sizes.len() - 1];
        let lead = self.n() - dm;
        let leading = GenericMatrix {
            shape: BlockShape::new(sizes[..sizes.len() - 1].to_vec())?,
            entries: m.entries[..lead].iter().map(|row| row[..lead].to_vec()).collect(),
        };
        let corner = GenericMatrix {
            shape: BlockShape::single(dm),
            entries: m.entries[lead..].iter().map(|row| row[lead..].to_vec()).collect(),
        };
        let strip = m.entries[..lead].iter().map(|row| row[lead..].to_vec()).collect();
        Ok(BlockViews { leading, corner, strip })
    }

    pub fn reassemble(&self, v: &BlockViews<B::Elem>) -> Result<GenericMatrix<B::Elem>, CoreError> {
        let lead = v.leading.size();
        let dm = v.corner.size();
        if lead + dm != self.n() || v.strip.len() != lead || v.strip.iter().any(|r| r.len() != dm) {
            return Err(CoreError::AmbientMismatch { left: lead + dm, right: self.n() });
        }
        let mut m = self.zero_matrix();
        for r in 0..lead {
            m.entries[r][..lead].clone_from_slice(&v.leading.entries[r]);
            m.entries[r][lead..].clone_from_slice(&v.strip[r]);
        }
        for r in 0..dm {
            m.entries[lead + r][lead..].clone_from_slice(&v.corner.entries[r]);
        }
        Ok(m)
    }
}

/// `true` iff all entries vanish; `model_eval` plus this decides identities for exact backends.
pub fn is_identity_via_model<B: Backend>(model: &GenericModel<B>, f: &NcPolynomial) -> Result<bool, CoreError> {
    Ok(model.is_zero(&model.model_eval(f)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_matrix_algebra, GradingMap};
    use crate::identities::EvaluationProvider;
    use alloc::vec;

    fn relfree(mode: GradingMode, shape: &[usize]) -> GenericModel<RelFreeBackend> {
        GenericModel::new(BlockShape::new(shape.to_vec()).unwrap(), RelFreeBackend::new(mode, GroupSpec::z2()).unwrap())
    }

    #[test]
    fn generator_pattern() {
        let m = relfree(GradingMode::Infty, &[1, 1]);
        let g0 = GroupElement::z2(0);
        let xi = m.make_generator(1, &g0).unwrap();
        assert!(xi.entry(2, 1).is_zero());
        assert!(!xi.entry(1, 2).is_zero());
        let xi2 = m.make_generator(2, &g0).unwrap();
        let vars = |x: &GenericMatrix<RelFreeElement>| -> Vec<u32> {
            x.rows().iter().flatten().flat_map(|e| e.bits().keys().copied().collect::<Vec<_>>()).collect()
        };
        assert!(vars(&xi).iter().all(|v| !vars(&xi2).contains(v)));
        let full = relfree(GradingMode::Infty, &[2]);
        let xi = full.make_generator(1, &g0).unwrap();
        assert!(xi.rows().iter().flatten().all(|e| !e.is_zero()));
    }

    #[test]
    fn id_pairing_round_trip() {
        let m = relfree(GradingMode::Natural, &[2, 1]);
        for k in 1..4 {
            for b in 0..2 {
                let g = GroupElement::z2(b);
                for i in 1..=3 {
                    for j in 1..=3 {
                        let id = m.variable_id(i, j, k, &g).unwrap();
                        assert_eq!(m.decode_variable(id).unwrap(), EntryVariable { i, j, k, degree: g.clone() });
                    }
                }
            }
        }
    }

    #[test]
    fn eval_examples() {
        let m = relfree(GradingMode::Natural, &[1, 1]);
        let r = m.model_eval(&NcPolynomial::parse("[y1,y2]").unwrap()).unwrap();
        assert!(r.entry(1, 1).is_zero() && r.entry(2, 2).is_zero());
        assert!(!r.entry(1, 2).is_zero());
        let k1 = relfree(GradingMode::KStar(1), &[1, 1]);
        assert!(k1.is_zero(&k1.model_eval(&NcPolynomial::parse("z1*z2").unwrap()).unwrap()));
        assert!(m.is_zero(&m.model_eval(&NcPolynomial::parse("x1^(0) - x1^(0)").unwrap()).unwrap()));
        assert!(m.model_eval(&NcPolynomial::parse("x1^(1,0)").unwrap()).is_err());
    }

    #[test]
    fn shift_examples() {
        let m = relfree(GradingMode::Natural, &[2]);
        let g = GroupElement::z2(0);
        let xi = m.make_generator(1, &g).unwrap();
        let phi = m.shift_automorphism(&xi).unwrap();
        assert_eq!(phi.entry(1, 1), xi.entry(2, 2));
        assert_eq!(phi.entry(1, 2), xi.entry(2, 1));
        let twice = m.shift_automorphism(&phi).unwrap();
        assert_eq!(twice, xi);
        let ut = relfree(GradingMode::Natural, &[1, 1]);
        assert!(ut.shift_automorphism(&ut.make_generator(1, &g).unwrap()).is_err());
    }

    #[test]
    fn columns_and_independence() {
        let m = relfree(GradingMode::Natural, &[2]);
        let g = GroupElement::z2(1);
        let a = m.make_generator(1, &g).unwrap();
        let b = m.make_generator(2, &g).unwrap();
        let col = m.column_projection(&a, 1).unwrap();
        assert_eq!(&col[0], a.entry(1, 1));
        assert_eq!(&col[1], a.entry(2, 1));
        assert!(m.column_projection(&a, 3).is_err());
        assert!(m.independent_by_columns(&[a.clone(), b.clone()], 1).unwrap());
        assert!(!m.independent_by_columns(&[a.clone(), a.clone()], 1).unwrap());
        let s = m.add(&a, &b).unwrap();
        assert!(!m.independent_by_columns(&[s, a, b], 2).unwrap());
    }

    #[test]
    fn block_views() {
        let m = relfree(GradingMode::Infty, &[1, 1]);
        let xi = m.make_generator(1, &GroupElement::z2(0)).unwrap();
        let v = m.extract_blocks(&xi).unwrap();
        assert_eq!(v.leading.entry(1, 1), xi.entry(1, 1));
        assert_eq!(v.corner.entry(1, 1), xi.entry(2, 2));
        assert_eq!(&v.strip[0][0], xi.entry(1, 2));
        assert_eq!(m.reassemble(&v).unwrap(), xi);
        assert!(relfree(GradingMode::Infty, &[2]).extract_blocks(&xi).is_err());
    }

    #[test]
    fn quotient_backend_over_field() {
        let t = GroupSpec::trivial();
        let f = build_matrix_algebra(1, &GradingMap::trivial(&t, 1), &t).unwrap();
        let provider = EvaluationProvider::new(f, GuardLimits::default(), "F");
        let m = GenericModel::new(BlockShape::new(vec![1, 1]).unwrap(), QuotientBackend::new(&provider, t, 4));
        let p = |s: &str| NcPolynomial::parse(s).unwrap();
        assert!(!is_identity_via_model(&m, &p("[x1,x2]")).unwrap());
        assert!(is_identity_via_model(&m, &p("[x1,x2]*[x3,x4]")).unwrap());
        assert!(m.model_eval(&p("x1*x1")).is_err());
    }
}
