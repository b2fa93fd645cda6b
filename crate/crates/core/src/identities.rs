//! Multilinear graded identities: evaluation kernels, consequence spans,
//! products of T-ideals and factoring checks.
//!
//! Every space lives in the `n!` coordinates of the multilinear words in
//! `x_1..x_n`, ordered lexicographically by permutation.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{AlgebraOrigin, BlockShape, GrassmannSpec, StructureConstantAlgebra};
use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::linalg::{kernel_of_rref, subspace_cmp, Echelon, GuardLimits, IntRow, SparseRow, Subspace, SubspaceRelation};
use crate::poly::{factorial, multilinear_rank, permutations, MultidegreeSignature, NcPolynomial, Word};
use crate::relfree::GradingMode;
use crate::Q;

/// Tag for the row, column and subset enumeration orders used here.
pub const ENUMERATION_ORDER_VERSION: &str = "gpi-order-1";

/// The multilinear identities of one signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentitySubspace {
    signature: MultidegreeSignature,
    space: Subspace,
}

impl IdentitySubspace {
    pub fn new(signature: MultidegreeSignature, space: Subspace) -> Result<Self, CoreError> {
        let n = factorial(signature.len());
        if space.ambient_dim() != n {
            return Err(CoreError::AmbientMismatch { left: space.ambient_dim(), right: n });
        }
        Ok(Self { signature, space })
    }

    pub fn signature(&self) -> &MultidegreeSignature {
        &self.signature
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn contains(&self, f: &NcPolynomial) -> Result<bool, CoreError> {
        membership(f, self)
    }

    /// RREF basis vectors as polynomials.
    pub fn basis_polynomials(&self) -> Result<Vec<NcPolynomial>, CoreError> {
        self.space.basis().iter().map(|v| polynomial_from_coordinates(v, &self.signature)).collect()
    }
}

/// Coordinates of a polynomial multilinear in `x_1..x_n` with the signature's degrees.
pub fn coordinates(f: &NcPolynomial, sig: &MultidegreeSignature) -> Result<SparseRow, CoreError> {
    let n = sig.len();
    for (id, g) in f.universe() {
        if *id == 0 || *id as usize > n {
            return Err(CoreError::SignatureMismatch(format!("x{id} is outside x1..x{n}")));
        }
        if g != sig.degree(*id) {
            return Err(CoreError::SignatureMismatch(format!(
                "x{id} has degree ({g}) but the signature says ({})",
                sig.degree(*id)
            )));
        }
    }
    let mut row: SparseRow = Vec::with_capacity(f.num_terms());
    for (w, c) in f.terms() {
        let col = multilinear_rank(w.letters(), n)
            .ok_or_else(|| CoreError::SignatureMismatch(format!("a term is not multilinear in x1..x{n}")))?;
        row.push((col, c.clone()));
    }
    row.sort_by_key(|(c, _)| *c);
    Ok(row)
}

pub fn polynomial_from_coordinates(v: &[(usize, Q)], sig: &MultidegreeSignature) -> Result<NcPolynomial, CoreError> {
    let perms = permutations(sig.len());
    let terms = v.iter().map(|(c, x)| {
        let w = Word(perms[*c].iter().map(|&i| i as u32 + 1).collect());
        (w, x.clone())
    });
    NcPolynomial::from_terms(terms, sig.universe())
}

/// Whether the multilinear polynomial `f` lies in `s`.
pub fn membership(f: &NcPolynomial, s: &IdentitySubspace) -> Result<bool, CoreError> {
    let v = coordinates(f, &s.signature)?;
    s.space.contains(&v)
}

fn check_sig_group(sig: &MultidegreeSignature, group: &GroupSpec) -> Result<(), CoreError> {
    for g in sig.degrees() {
        group.check(g)?;
    }
    Ok(())
}

fn kernel_from_rows(sig: &MultidegreeSignature, rows: Echelon) -> Result<IdentitySubspace, CoreError> {
    IdentitySubspace::new(sig.clone(), kernel_of_rref(&rows.into_subspace()))
}

/// Identities of `a` at `sig`: the kernel of the evaluation matrix over all
/// tuples of homogeneous basis elements, under the default guard.
pub fn identities_by_evaluation(
    a: &StructureConstantAlgebra,
    sig: &MultidegreeSignature,
) -> Result<IdentitySubspace, CoreError> {
    identities_by_evaluation_guarded(a, sig, GuardLimits::default())
}

pub fn identities_by_evaluation_guarded(
    a: &StructureConstantAlgebra,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<IdentitySubspace, CoreError> {
    check_sig_group(sig, a.group())?;
    let n = sig.len();
    let n_cols = factorial(n);
    let choices: Vec<Vec<usize>> = sig.degrees().iter().map(|g| a.homogeneous_indices(g)).collect();
    let mut echelon = Echelon::new(n_cols, guard);
    if choices.iter().any(Vec::is_empty) {
        return kernel_from_rows(sig, echelon);
    }
    let tuples: u128 = choices.iter().map(|c| c.len() as u128).product();
    guard.check_cells("evaluation matrix", tuples.saturating_mul(a.dim() as u128), n_cols as u128)?;
    let perms = permutations(n);
    let masks = a.support_masks();
    let mut prefix: Vec<Vec<(usize, Q)>> = vec![Vec::new(); n];
    // depth-first over tuples in lexicographic order; over E_N, branches with
    // overlapping supports are cut since all their products vanish
    let mut idx = vec![0usize; n];
    let mut used = vec![0u64; n + 1];
    let mut depth = 0usize;
    loop {
        if depth == n {
            let tuple: Vec<usize> = (0..n).map(|i| choices[i][idx[i]]).collect();
            let mut by_coord: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
            let mut prev: Option<&Vec<usize>> = None;
            for (col, p) in perms.iter().enumerate() {
                let lcp = prev.map_or(0, |q| q.iter().zip(p).take_while(|(a, b)| a == b).count());
                for t in lcp..n {
                    let b = tuple[p[t]];
                    prefix[t] = if t == 0 {
                        a.basis_element(b)
                    } else if prefix[t - 1].is_empty() {
                        Vec::new()
                    } else {
                        a.mul(&prefix[t - 1], &a.basis_element(b))
                    };
                }
                for (k, c) in &prefix[n - 1] {
                    by_coord.entry(*k).or_default().push((col, c.clone()));
                }
                prev = Some(p);
            }
            for (_, row) in by_coord {
                echelon.insert_rational(&row)?;
            }
            if echelon.is_full() {
                break;
            }
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        if idx[depth] >= choices[depth].len() {
            if depth == 0 {
                break;
            }
            idx[depth] = 0;
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        if let Some(m) = &masks {
            let mask = m[choices[depth][idx[depth]]];
            if mask & used[depth] != 0 {
                idx[depth] += 1;
                continue;
            }
            used[depth + 1] = used[depth] | mask;
        }
        depth += 1;
    }
    kernel_from_rows(sig, echelon)
}

/// `E_N`, or block-triangular matrices of the given shape over `E_N` graded by entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannHandle {
    pub spec: GrassmannSpec,
    pub shape: BlockShape,
}

impl GrassmannHandle {
    pub fn plain(spec: GrassmannSpec) -> Self {
        Self { spec, shape: BlockShape::single(1) }
    }

    pub fn matrix(spec: GrassmannSpec, shape: BlockShape) -> Self {
        Self { spec, shape }
    }

    pub fn from_origin(origin: &AlgebraOrigin) -> Option<Self> {
        origin.grassmann_handle().map(|(spec, shape)| Self { spec, shape })
    }

    pub fn with_generators(&self, n: usize) -> Self {
        Self { spec: self.spec.with_generators(n), shape: self.shape.clone() }
    }
}

// Generators of degree (1, 0) needed by a monomial of parity `p` and degree `d`.
fn generator_needs(p: u32, d: u32) -> (usize, usize) {
    match (p, d) {
        (1, 1) => (1, 0),
        (0, 1) => (1, 1),
        (1, 0) => (0, 1),
        _ => (0, 0),
    }
}

fn fits(need: usize, have: Option<usize>) -> bool {
    have.map_or(true, |h| need <= h)
}

/// Sign of `x_{p(1)}..x_{p(n)}` evaluated at disjoint monomials with the given parities,
/// relative to the identity order.
fn parity_sign(perm: &[usize], parities: &[u32]) -> bool {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        if parities[perm[i]] == 0 {
            continue;
        }
        for j in i + 1..perm.len() {
            if parities[perm[j]] == 1 && perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 1
}

/// Reduced evaluation rows for Grassmann-based algebras.
///
/// A product of basis monomials with overlapping supports vanishes, and a
/// product of disjoint ones depends only on their parities up to one common
/// monomial. So a row is determined by a parity pattern (crossed with matrix
/// unit positions). A pattern is used iff `E_N` has enough generators of each
/// degree to realize it with monomials of length at most 2.
///
/// Returns the row space.
pub fn grassmann_fast_rows(
    handle: &GrassmannHandle,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<Subspace, CoreError> {
    let spec = &handle.spec;
    spec.validate()?;
    let group = spec.group();
    check_sig_group(sig, &group)?;
    let n = sig.len();
    let n_cols = factorial(n);
    let degs: Vec<u32> = sig.degrees().iter().map(|g| g.z2_bit().unwrap_or(0)).collect();
    let (have_odd, have_even) = spec.generator_counts();
    let (lim_odd, lim_even) = spec.limit_generator_counts();
    let positions = handle.shape.positions();
    let n_pos = positions.len();
    let groups = (n_pos as u128).saturating_pow(n as u32) << n.min(64);
    guard.check_cells("fast evaluation rows", groups.saturating_mul(n_pos as u128), n_cols as u128)?;
    let perms = permutations(n);
    let mut echelon = Echelon::new(n_cols, guard);
    for pattern in 0u32..(1 << n) {
        let parities: Vec<u32> = (0..n).map(|i| (pattern >> i) & 1).collect();
        let (need_odd, need_even) = parities
            .iter()
            .zip(&degs)
            .map(|(&p, &d)| generator_needs(p, d))
            .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
        let in_limit = fits(need_odd, lim_odd) && fits(need_even, lim_even);
        let in_truncation = need_odd <= have_odd && need_even <= have_even;
        if in_limit && !in_truncation {
            return Err(CoreError::TruncationTooSmall(format!(
                "E_{} cannot realize parity pattern {parities:?} at signature {sig}; \
                 it needs {need_odd} generators of degree 1 and {need_even} of degree 0, use a larger N",
                spec.n_generators
            )));
        }
        if !in_truncation {
            continue;
        }
        let signs: Vec<bool> = perms.iter().map(|p| parity_sign(p, &parities)).collect();
        let mut idx = vec![0usize; n];
        loop {
            let units: Vec<(usize, usize)> = idx.iter().map(|&i| positions[i]).collect();
            let mut by_out: BTreeMap<(usize, usize), IntRow> = BTreeMap::new();
            for (col, p) in perms.iter().enumerate() {
                if (1..n).all(|t| units[p[t - 1]].1 == units[p[t]].0) {
                    let out = (units[p[0]].0, units[p[n - 1]].1);
                    let v = if signs[col] { -BigInt::one() } else { BigInt::one() };
                    by_out.entry(out).or_default().push((col, v));
                }
            }
            for (_, row) in by_out {
                echelon.insert_int(row)?;
            }
            if echelon.is_full() {
                return Ok(echelon.into_subspace());
            }
            let mut i = n;
            let mut done = true;
            while i > 0 {
                i -= 1;
                idx[i] += 1;
                if idx[i] < n_pos {
                    done = false;
                    break;
                }
                idx[i] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(echelon.into_subspace())
}

/// Identities of a Grassmann handle at `sig`, via [`grassmann_fast_rows`].
pub fn identities_by_fast_rows(
    handle: &GrassmannHandle,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<IdentitySubspace, CoreError> {
    let rows = grassmann_fast_rows(handle, sig, guard)?;
    IdentitySubspace::new(sig.clone(), kernel_of_rref(&rows))
}

/// Generators of a T-ideal, each multilinear in its own graded variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TIdealPresentation {
    group: GroupSpec,
    generators: Vec<NcPolynomial>,
}

impl TIdealPresentation {
    pub fn new(group: GroupSpec, generators: Vec<NcPolynomial>) -> Result<Self, CoreError> {
        for f in &generators {
            let vars = f.variables();
            if f.is_zero() || !f.is_multilinear_in(&vars) {
                return Err(CoreError::Unsupported(format!("generator {f} is not multilinear")));
            }
            for id in &vars {
                let g = f.universe().get(id).ok_or(CoreError::UnknownVariable(*id))?;
                group.check(g)?;
            }
        }
        Ok(Self { group, generators })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn generators(&self) -> &[NcPolynomial] {
        &self.generators
    }

    /// Copies of `f` under every assignment of group degrees to its variables.
    pub fn degree_variants(f: &NcPolynomial, group: &GroupSpec) -> Result<Vec<NcPolynomial>, CoreError> {
        let vars = f.variables();
        let elems = group.elements();
        let mut out = Vec::new();
        let mut idx = vec![0usize; vars.len()];
        loop {
            let universe = vars.iter().zip(&idx).map(|(v, &i)| (*v, elems[i].clone())).collect();
            out.push(NcPolynomial::from_terms(f.terms().map(|(w, c)| (w.clone(), c.clone())), universe)?);
            let mut i = vars.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < elems.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Known generators of `T(E)`: ungraded, or `Z2`-graded in one of the modes.
    pub fn grassmann(mode: Option<GradingMode>) -> Self {
        let triple = NcPolynomial::parse("[x1,x2,x3]").expect("literal");
        let Some(mode) = mode else {
            return Self { group: GroupSpec::trivial(), generators: vec![triple] };
        };
        let z2 = GroupSpec::z2();
        let p = |s: &str| NcPolynomial::parse(s).expect("literal");
        let generators = match mode {
            GradingMode::Natural => vec![p("[y1,y2]"), p("[y1,z2]"), p("z1*z2 + z2*z1")],
            GradingMode::Infty => Self::degree_variants(&triple, &z2).expect("Z2 variants"),
            GradingMode::KStar(k) => {
                let mut g = Self::degree_variants(&triple, &z2).expect("Z2 variants");
                let mut w = NcPolynomial::one();
                for i in 1..=k as u32 + 1 {
                    w = w.mul(&NcPolynomial::var(i, GroupElement::z2(1))).expect("fresh variables");
                }
                g.push(w);
                g
            }
        };
        Self { group: z2, generators }
    }
}

/// Compositions of `total` into `parts` positive parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Multilinear component of the T-ideal generated by `t`: the span of all
/// `u0 f(m_1, ..., m_k) u1` with `m_i` monomials of the right degrees.
pub fn identities_by_consequences(
    t: &TIdealPresentation,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<IdentitySubspace, CoreError> {
    check_sig_group(sig, &t.group)?;
    let n = sig.len();
    let n_cols = factorial(n);
    let perms = permutations(n);
    let mut echelon = Echelon::new(n_cols, guard);
    for f in &t.generators {
        let vars = f.variables();
        let k = vars.len();
        if k > n {
            continue;
        }
        let slot: BTreeMap<u32, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let want: Vec<&GroupElement> = vars.iter().map(|v| &f.universe()[v]).collect();
        let terms: Vec<(Vec<usize>, &Q)> =
            f.terms().map(|(w, c)| (w.letters().iter().map(|l| slot[l]).collect(), c)).collect();
        let comps: Vec<Vec<Vec<usize>>> = (0..=n).map(|len| compositions(len, k)).collect();
        guard.check_cells(
            "consequence rows",
            (perms.len() as u128) * (n as u128 + 1).pow(2) * (comps[n].len().max(1) as u128),
            n_cols as u128,
        )?;
        for perm in &perms {
            let word: Vec<u32> = perm.iter().map(|&i| i as u32 + 1).collect();
            for a in 0..=n - k {
                for b in a + k..=n {
                    for comp in &comps[b - a] {
                        let mut blocks: Vec<&[u32]> = Vec::with_capacity(k);
                        let mut start = a;
                        let mut ok = true;
                        for (i, &len) in comp.iter().enumerate() {
                            let block = &word[start..start + len];
                            let mut d = t.group.identity();
                            for &l in block {
                                d = t.group.op(&d, sig.degree(l))?;
                            }
                            if &d != want[i] {
                                ok = false;
                                break;
                            }
                            blocks.push(block);
                            start += len;
                        }
                        if !ok {
                            continue;
                        }
                        let mut row: BTreeMap<usize, Q> = BTreeMap::new();
                        for (letters, c) in &terms {
                            let mut w: Vec<u32> = word[..a].to_vec();
                            for &s in letters {
                                w.extend_from_slice(blocks[s]);
                            }
                            w.extend_from_slice(&word[b..]);
                            let col = multilinear_rank(&w, n)
                                .ok_or_else(|| CoreError::Inconsistent("consequence is not multilinear".into()))?;
                            *row.entry(col).or_insert_with(Q::zero) += *c;
                        }
                        let row: Vec<(usize, Q)> = row.into_iter().filter(|(_, x)| !x.is_zero()).collect();
                        echelon.insert_rational(&row)?;
                        if echelon.is_full() {
                            return IdentitySubspace::new(sig.clone(), Subspace::full(n_cols));
                        }
                    }
                }
            }
        }
    }
    IdentitySubspace::new(sig.clone(), echelon.into_subspace())
}

/// Anything that can produce the multilinear component of a T-ideal at any signature.
pub trait ComponentProvider {
    fn component(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError>;
    /// Short description for reports.
    fn label(&self) -> String;
}

#[derive(Debug, Default)]
struct Memo(RefCell<BTreeMap<MultidegreeSignature, IdentitySubspace>>);

impl Memo {
    fn get_or(
        &self,
        sig: &MultidegreeSignature,
        f: impl FnOnce() -> Result<IdentitySubspace, CoreError>,
    ) -> Result<IdentitySubspace, CoreError> {
        if let Some(s) = self.0.borrow().get(sig) {
            return Ok(s.clone());
        }
        let s = f()?;
        self.0.borrow_mut().insert(sig.clone(), s.clone());
        Ok(s)
    }
}

/// `T(A)` by full evaluation.
#[derive(Debug)]
pub struct EvaluationProvider {
    algebra: StructureConstantAlgebra,
    guard: GuardLimits,
    label: String,
    memo: Memo,
}

impl EvaluationProvider {
    pub fn new(algebra: StructureConstantAlgebra, guard: GuardLimits, label: impl Into<String>) -> Self {
        Self { algebra, guard, label: label.into(), memo: Memo::default() }
    }

    pub fn algebra(&self) -> &StructureConstantAlgebra {
        &self.algebra
    }
}

impl ComponentProvider for EvaluationProvider {
    fn component(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError> {
        self.memo.get_or(sig, || identities_by_evaluation_guarded(&self.algebra, sig, self.guard))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// How a [`FastRowsProvider`] picks the truncation `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncationPolicy {
    /// The handle's own `N` for every signature.
    Fixed,
    /// [`default_truncation`] per signature.
    Default,
    /// Default `N` and `N + 2`; differing spaces are an error.
    Confirmed,
}

/// `T(E)` or `T(UT(d_1..d_m; E))` by fast rows.
#[derive(Debug)]
pub struct FastRowsProvider {
    handle: GrassmannHandle,
    policy: TruncationPolicy,
    guard: GuardLimits,
    memo: Memo,
}

impl FastRowsProvider {
    pub fn new(handle: GrassmannHandle, policy: TruncationPolicy, guard: GuardLimits) -> Self {
        Self { handle, policy, guard, memo: Memo::default() }
    }

    pub fn fixed(handle: GrassmannHandle, guard: GuardLimits) -> Self {
        Self::new(handle, TruncationPolicy::Fixed, guard)
    }

    pub fn handle(&self) -> &GrassmannHandle {
        &self.handle
    }

    /// The truncations used at a signature.
    pub fn truncations(&self, sig: &MultidegreeSignature) -> Vec<usize> {
        let d = default_truncation(&self.handle.spec, sig.len());
        match self.policy {
            TruncationPolicy::Fixed => vec![self.handle.spec.n_generators],
            TruncationPolicy::Default => vec![d],
            TruncationPolicy::Confirmed => vec![d, d + 2],
        }
    }

    fn compute(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError> {
        let mut out: Option<(usize, IdentitySubspace)> = None;
        for n in self.truncations(sig) {
            let s = identities_by_fast_rows(&self.handle.with_generators(n), sig, self.guard)?;
            if let Some((m, prev)) = &out {
                if prev != &s {
                    return Err(CoreError::Inconsistent(format!(
                        "identities at {sig} not stabilized: dim {} at N={m}, dim {} at N={n}",
                        prev.dim(),
                        s.dim()
                    )));
                }
            }
            out = Some((n, s));
        }
        out.map(|(_, s)| s).ok_or_else(|| CoreError::Inconsistent("no truncation".into()))
    }
}

impl ComponentProvider for FastRowsProvider {
    fn component(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError> {
        self.memo.get_or(sig, || self.compute(sig))
    }

    fn label(&self) -> String {
        let shape = self.handle.shape.sizes();
        if shape == [1] {
            format!("E[{:?}]", self.handle.spec.grading)
        } else {
            format!("UT({shape:?}; E[{:?}])", self.handle.spec.grading)
        }
    }
}

/// Components of a presented T-ideal.
#[derive(Debug)]
pub struct ConsequenceProvider {
    presentation: TIdealPresentation,
    guard: GuardLimits,
    memo: Memo,
}

impl ConsequenceProvider {
    pub fn new(presentation: TIdealPresentation, guard: GuardLimits) -> Self {
        Self { presentation, guard, memo: Memo::default() }
    }
}

impl ComponentProvider for ConsequenceProvider {
    fn component(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError> {
        self.memo.get_or(sig, || identities_by_consequences(&self.presentation, sig, self.guard))
    }

    fn label(&self) -> String {
        format!("<{} generators>", self.presentation.generators.len())
    }
}

/// Left-associated product `((T_1 T_2) T_3) ...` of other providers.
pub struct ProductProvider<'a> {
    factors: Vec<&'a dyn ComponentProvider>,
    guard: GuardLimits,
    memo: Memo,
}

impl<'a> ProductProvider<'a> {
    pub fn new(factors: Vec<&'a dyn ComponentProvider>, guard: GuardLimits) -> Result<Self, CoreError> {
        if factors.is_empty() {
            return Err(CoreError::Unsupported("a product needs at least one factor".into()));
        }
        Ok(Self { factors, guard, memo: Memo::default() })
    }
}

impl ComponentProvider for ProductProvider<'_> {
    fn component(&self, sig: &MultidegreeSignature) -> Result<IdentitySubspace, CoreError> {
        self.memo.get_or(sig, || match self.factors.split_last() {
            Some((last, [])) => last.component(sig),
            Some((last, init)) => {
                let left = ProductProvider::new(init.to_vec(), self.guard)?;
                tideal_product(&left, *last, sig, self.guard)
            }
            None => Err(CoreError::Unsupported("empty product".into())),
        })
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(|f| f.label()).collect();
        parts.join(" * ")
    }
}

/// `k`-subsets of `1..=n` in lexicographic order.
fn combinations(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::with_capacity(k);
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(1, n, k, &mut cur, &mut out);
    out
}

/// Basis of a component on the variables `positions`, as (global word, coefficient) lists.
fn lifted_basis(
    provider: &dyn ComponentProvider,
    sig: &MultidegreeSignature,
    positions: &[u32],
) -> Result<Vec<Vec<(Vec<u32>, Q)>>, CoreError> {
    let comp = provider.component(&sig.restrict(positions)?)?;
    let perms = permutations(positions.len());
    Ok(comp
        .space()
        .basis()
        .iter()
        .map(|v| {
            v.iter().map(|(c, x)| (perms[*c].iter().map(|&i| positions[i]).collect(), x.clone())).collect()
        })
        .collect())
}

fn product_row(n: usize, parts: &[&[(Vec<u32>, Q)]]) -> Result<Vec<(usize, Q)>, CoreError> {
    let mut acc: Vec<(Vec<u32>, Q)> = vec![(Vec::new(), Q::one())];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for (w, c) in &acc {
            for (u, x) in part.iter() {
                let mut word = w.clone();
                word.extend_from_slice(u);
                next.push((word, c * x));
            }
        }
        acc = next;
    }
    let mut row: BTreeMap<usize, Q> = BTreeMap::new();
    for (w, c) in acc {
        let col = multilinear_rank(&w, n).ok_or_else(|| CoreError::Inconsistent("product is not multilinear".into()))?;
        *row.entry(col).or_insert_with(Q::zero) += c;
    }
    Ok(row.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}

/// Multilinear component of `T_1 T_2`: the span of `f g` with `f` in `T_1`'s
/// component on a nonempty proper subset `S` of the variables and `g` in
/// `T_2`'s component on the complement.
pub fn tideal_product(
    t1: &dyn ComponentProvider,
    t2: &dyn ComponentProvider,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<IdentitySubspace, CoreError> {
    let n = sig.len();
    let n_cols = factorial(n);
    let mut echelon = Echelon::new(n_cols, guard);
    for size in 1..n {
        for s in combinations(n as u32, size) {
            let rest: Vec<u32> = (1..=n as u32).filter(|v| !s.contains(v)).collect();
            let left = lifted_basis(t1, sig, &s)?;
            if left.is_empty() {
                continue;
            }
            let right = lifted_basis(t2, sig, &rest)?;
            for f in &left {
                for g in &right {
                    echelon.insert_rational(&product_row(n, &[f, g])?)?;
                }
            }
            if echelon.is_full() {
                return IdentitySubspace::new(sig.clone(), Subspace::full(n_cols));
            }
        }
    }
    IdentitySubspace::new(sig.clone(), echelon.into_subspace())
}

/// Same space as [`tideal_product`], built from `u0 f u1 g u2` with bordering
/// monomials in the leftover variables. Kept as an independent cross-check.
pub fn tideal_product_bordered(
    t1: &dyn ComponentProvider,
    t2: &dyn ComponentProvider,
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<IdentitySubspace, CoreError> {
    let n = sig.len();
    let n_cols = factorial(n);
    let mut echelon = Echelon::new(n_cols, guard);
    // each variable goes to f (1), g (2) or the border (0)
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut r = Vec::new();
        for v in 1..=n as u32 {
            match c % 3 {
                1 => a.push(v),
                2 => b.push(v),
                _ => r.push(v),
            }
            c /= 3;
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let left = lifted_basis(t1, sig, &a)?;
        if left.is_empty() {
            continue;
        }
        let right = lifted_basis(t2, sig, &b)?;
        if right.is_empty() {
            continue;
        }
        for p in permutations(r.len()) {
            let border: Vec<u32> = p.iter().map(|&i| r[i]).collect();
            for i in 0..=border.len() {
                for j in i..=border.len() {
                    let u0 = [(border[..i].to_vec(), Q::one())];
                    let u1 = [(border[i..j].to_vec(), Q::one())];
                    let u2 = [(border[j..].to_vec(), Q::one())];
                    for f in &left {
                        for g in &right {
                            echelon.insert_rational(&product_row(n, &[&u0, f, &u1, g, &u2])?)?;
                        }
                    }
                }
            }
        }
    }
    IdentitySubspace::new(sig.clone(), echelon.into_subspace())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactoringRelation {
    Equal,
    ProductStrictlyInside,
}

impl FactoringRelation {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactoringRelation::Equal => "equal",
            FactoringRelation::ProductStrictlyInside => "product_strictly_inside",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoringVerdict {
    pub signature: MultidegreeSignature,
    pub dim_r: usize,
    pub dim_product: usize,
    pub relation: FactoringRelation,
    /// First RREF basis vector of `T(R)`'s component outside the product.
    pub witness: Option<NcPolynomial>,
    pub r_space: IdentitySubspace,
    pub product_space: IdentitySubspace,
}

/// Compares `T(R)` with the left-associated product of the factors at `sig`.
///
/// The product always lies inside `T(R)` for block-triangular `R`; a
/// violation is reported as [`CoreError::Inconsistent`].
pub fn check_factoring(
    r: &dyn ComponentProvider,
    factors: &[&dyn ComponentProvider],
    sig: &MultidegreeSignature,
    guard: GuardLimits,
) -> Result<FactoringVerdict, CoreError> {
    let r_space = r.component(sig)?;
    let product = ProductProvider::new(factors.to_vec(), guard)?;
    let product_space = product.component(sig)?;
    let relation = match subspace_cmp(product_space.space(), r_space.space())? {
        SubspaceRelation::Equal => FactoringRelation::Equal,
        SubspaceRelation::AStrictlyInsideB => FactoringRelation::ProductStrictlyInside,
        other => {
            return Err(CoreError::Inconsistent(format!(
                "product of T-ideals is not contained in T(R) at {sig} ({other:?})"
            )))
        }
    };
    let witness = match relation {
        FactoringRelation::Equal => None,
        FactoringRelation::ProductStrictlyInside => {
            let v = r_space
                .space()
                .basis()
                .iter()
                .find(|v| !product_space.space().reduce(v).is_empty())
                .ok_or_else(|| CoreError::Inconsistent("strict inclusion without a witness".into()))?;
            Some(polynomial_from_coordinates(v, sig)?)
        }
    };
    Ok(FactoringVerdict {
        signature: sig.clone(),
        dim_r: r_space.dim(),
        dim_product: product_space.dim(),
        relation,
        witness,
        r_space,
        product_space,
    })
}

/// Default truncation `N = 2n + k` (`k` only for `k*` gradings).
pub fn default_truncation(spec: &GrassmannSpec, n: usize) -> usize {
    let k = match spec.grading {
        crate::algebra::GrassmannGrading::KStar(k) => k,
        _ => 0,
    };
    (2 * n + k).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationEntry {
    pub n_generators: usize,
    /// `None` when `E_N` is too small for the signature.
    pub space: Option<IdentitySubspace>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport {
    pub entries: Vec<StabilizationEntry>,
    /// The last two computed spaces coincide.
    pub stabilized: bool,
}

impl StabilizationReport {
    pub fn dims(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.space.as_ref().map(IdentitySubspace::dim)).collect()
    }

    pub fn final_space(&self) -> Option<&IdentitySubspace> {
        self.entries.last().and_then(|e| e.space.as_ref())
    }
}

/// Computes the identities of `family(N)` for each `N` in the increasing list.
pub fn stabilization_scan<F>(family: F, n_list: &[usize]) -> Result<StabilizationReport, CoreError>
where
    F: Fn(usize) -> Result<IdentitySubspace, CoreError>,
{
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::Unsupported("the N list must be strictly increasing".into()));
    }
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let space = match family(n) {
            Ok(s) => Some(s),
            Err(CoreError::TruncationTooSmall(_)) => None,
            Err(e) => return Err(e),
        };
        entries.push(StabilizationEntry { n_generators: n, space });
    }
    let stabilized = match entries.as_slice() {
        [.., a, b] => a.space.is_some() && a.space == b.space,
        _ => false,
    };
    Ok(StabilizationReport { entries, stabilized })
}

/// All signatures of length `n` over `group`, degrees in group-element order.
pub fn all_signatures(group: &GroupSpec, n: usize) -> Vec<MultidegreeSignature> {
    let elems = group.elements();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if n == 0 {
        return out;
    }
    loop {
        out.push(MultidegreeSignature::new(idx.iter().map(|&i| elems[i].clone()).collect()).expect("n >= 1"));
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Boxed provider, for building heterogeneous factor lists.
pub type BoxedProvider = Box<dyn ComponentProvider>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        build_block_triangular, build_grassmann, build_matrix_algebra, build_matrix_over, GradingMap, GrassmannGrading,
    };

    fn z2sig(bits: &[u32]) -> MultidegreeSignature {
        MultidegreeSignature::z2(bits).unwrap()
    }

    fn trivial_sig(n: usize) -> MultidegreeSignature {
        MultidegreeSignature::uniform(&GroupSpec::trivial(), n).unwrap()
    }

    #[test]
    fn grassmann_ungraded_small() {
        let e = build_grassmann(&GrassmannSpec::new(6, GrassmannGrading::Trivial)).unwrap();
        assert_eq!(identities_by_evaluation(&e, &trivial_sig(2)).unwrap().dim(), 0);
        let s3 = identities_by_evaluation(&e, &trivial_sig(3)).unwrap();
        assert_eq!(s3.dim(), 2);
        assert!(s3.contains(&NcPolynomial::parse("[x1,x2,x3]").unwrap()).unwrap());
    }

    #[test]
    fn matrix_degree_zero_commutator() {
        let g = GroupSpec::z2();
        let m = build_matrix_algebra(2, &GradingMap::z2(&[0, 1]), &g).unwrap();
        let s = identities_by_evaluation(&m, &z2sig(&[0, 0])).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&NcPolynomial::parse("[y1,y2]").unwrap()).unwrap());
    }

    #[test]
    fn kstar_pair_vanishes() {
        let e = build_grassmann(&GrassmannSpec::new(6, GrassmannGrading::KStar(1))).unwrap();
        assert_eq!(identities_by_evaluation(&e, &z2sig(&[1, 1])).unwrap().dim(), 2);
        let h = GrassmannHandle::plain(GrassmannSpec::new(6, GrassmannGrading::KStar(1)));
        assert_eq!(identities_by_fast_rows(&h, &z2sig(&[1, 1]), GuardLimits::default()).unwrap().dim(), 2);
    }

    #[test]
    fn natural_membership() {
        let e = build_grassmann(&GrassmannSpec::new(6, GrassmannGrading::Natural)).unwrap();
        let s = identities_by_evaluation(&e, &z2sig(&[0, 0])).unwrap();
        assert!(s.contains(&NcPolynomial::parse("[y1,y2]").unwrap()).unwrap());
        assert!(!s.contains(&NcPolynomial::parse("y1*y2").unwrap()).unwrap());
        assert!(s.contains(&NcPolynomial::zero()).unwrap());
        assert!(matches!(
            s.contains(&NcPolynomial::parse("z1*y2").unwrap()),
            Err(CoreError::SignatureMismatch(_))
        ));
    }

    #[test]
    fn fast_rows_match_full_enumeration() {
        for grading in [GrassmannGrading::Trivial, GrassmannGrading::Natural, GrassmannGrading::Infty, GrassmannGrading::KStar(1)]
        {
            let spec = GrassmannSpec::new(6, grading.clone());
            let e = build_grassmann(&spec).unwrap();
            let group = spec.group();
            for n in 1..=3 {
                for sig in all_signatures(&group, n) {
                    let full = identities_by_evaluation(&e, &sig).unwrap();
                    let fast = identities_by_fast_rows(&GrassmannHandle::plain(spec.clone()), &sig, GuardLimits::default());
                    match fast {
                        Ok(fast) => assert_eq!(full, fast, "{grading:?} {sig}"),
                        Err(CoreError::TruncationTooSmall(_)) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn fast_rows_too_small_n() {
        let h = GrassmannHandle::plain(GrassmannSpec::new(2, GrassmannGrading::Infty));
        let r = identities_by_fast_rows(&h, &z2sig(&[0, 0, 0]), GuardLimits::default());
        assert!(matches!(r, Err(CoreError::TruncationTooSmall(_))));
    }

    #[test]
    fn consequence_examples() {
        let t = TIdealPresentation::new(GroupSpec::trivial(), vec![NcPolynomial::parse("[[x1,x2],x3]").unwrap()]).unwrap();
        assert_eq!(identities_by_consequences(&t, &trivial_sig(3), GuardLimits::default()).unwrap().dim(), 2);
        let t = TIdealPresentation::new(GroupSpec::trivial(), vec![NcPolynomial::parse("[x1,x2]").unwrap()]).unwrap();
        assert_eq!(identities_by_consequences(&t, &trivial_sig(2), GuardLimits::default()).unwrap().dim(), 1);
        let t = TIdealPresentation::new(GroupSpec::z2(), vec![NcPolynomial::parse("z1*z2").unwrap()]).unwrap();
        assert_eq!(identities_by_consequences(&t, &z2sig(&[1, 1]), GuardLimits::default()).unwrap().dim(), 2);
    }

    #[test]
    fn product_examples() {
        let g = GuardLimits::default();
        let comm = ConsequenceProvider::new(
            TIdealPresentation::new(GroupSpec::trivial(), vec![NcPolynomial::parse("[x1,x2]").unwrap()]).unwrap(),
            g,
        );
        assert_eq!(tideal_product(&comm, &comm, &trivial_sig(2), g).unwrap().dim(), 0);
        let p4 = tideal_product(&comm, &comm, &trivial_sig(4), g).unwrap();
        assert_eq!(p4.dim(), 6);
        let ut = build_block_triangular(
            &BlockShape::new(vec![1, 1]).unwrap(),
            &GradingMap::trivial(&GroupSpec::trivial(), 2),
            &GroupSpec::trivial(),
        )
        .unwrap();
        assert_eq!(identities_by_evaluation(&ut, &trivial_sig(4)).unwrap(), p4);
        assert_eq!(tideal_product_bordered(&comm, &comm, &trivial_sig(4), g).unwrap(), p4);
    }

    #[test]
    fn kstar_proposition() {
        let g = GuardLimits::default();
        for k in [1usize, 2] {
            let spec = GrassmannSpec::new(2 * (k + 1) + k, GrassmannGrading::KStar(k));
            let r = FastRowsProvider::fixed(GrassmannHandle::matrix(spec.clone(), BlockShape::new(vec![1, 1]).unwrap()), g);
            let e = FastRowsProvider::fixed(GrassmannHandle::plain(spec), g);
            let sig = z2sig(&vec![1; k + 1]);
            let v = check_factoring(&r, &[&e, &e], &sig, g).unwrap();
            assert_eq!(v.relation, FactoringRelation::ProductStrictlyInside);
            assert_eq!(v.dim_product, 0);
            let expected: Vec<String> = (1..=k + 1).map(|i| format!("z{i}")).collect();
            assert_eq!(v.witness.unwrap().to_shorthand(), expected.join("*"));
        }
    }

    #[test]
    fn matrix_over_evaluation_agrees_with_fast_rows() {
        let spec = GrassmannSpec::new(4, GrassmannGrading::Infty);
        let e = build_grassmann(&spec).unwrap();
        let shape = BlockShape::new(vec![1, 1]).unwrap();
        let r = build_matrix_over(&e, &shape).unwrap();
        let h = GrassmannHandle::from_origin(r.origin()).unwrap();
        for sig in all_signatures(&GroupSpec::z2(), 2) {
            let full = identities_by_evaluation(&r, &sig).unwrap();
            let fast = identities_by_fast_rows(&h, &sig, GuardLimits::default()).unwrap();
            assert_eq!(full, fast, "{sig}");
        }
    }

    #[test]
    fn stabilization_examples() {
        let fam = |n: usize| {
            let e = build_grassmann(&GrassmannSpec::new(n, GrassmannGrading::Trivial))?;
            identities_by_evaluation(&e, &trivial_sig(3))
        };
        let r = stabilization_scan(fam, &[4, 6, 8]).unwrap();
        assert_eq!(r.dims(), vec![Some(2), Some(2), Some(2)]);
        assert!(r.stabilized);
        let r = stabilization_scan(fam, &[4]).unwrap();
        assert!(!r.stabilized);
        assert!(stabilization_scan(fam, &[6, 4]).is_err());
        let fam = |n: usize| {
            let e = build_grassmann(&GrassmannSpec::new(n, GrassmannGrading::KStar(1)))?;
            identities_by_evaluation(&e, &z2sig(&[1, 1]))
        };
        assert_eq!(stabilization_scan(fam, &[2, 4]).unwrap().dims(), vec![Some(2), Some(2)]);
    }

    #[test]
    fn guard_trips() {
        let e = build_grassmann(&GrassmannSpec::new(8, GrassmannGrading::Trivial)).unwrap();
        let tiny = GuardLimits { max_cells: 1000, ..GuardLimits::default() };
        assert!(matches!(
            identities_by_evaluation_guarded(&e, &trivial_sig(3), tiny),
            Err(CoreError::ResourceGuard { .. })
        ));
    }
}
