//! Normal forms in the relatively free `Z2`-graded Grassmann algebras.
//!
//! Elements are combinations of basis words
//! `y_{i_1}..y_{i_n} z_{j_1}..z_{j_m} [x_{l_1},x_{l_2}]..[x_{l_{2s-1}},x_{l_{2s}}]`
//! with nondecreasing `i`, nondecreasing `j` and strictly increasing `l`.
//!
//! Rewriting rules, applied to an arbitrary word:
//! 1. an adjacent descent `ab` (ordering letters by degree, then id) becomes
//!    `ba + [a,b]`;
//! 2. commutators are central and move to the tail;
//! 3. the tail is alternating in all its slots: a transposition flips the sign
//!    and a repeated letter kills the word;
//! 4. `natural` grading only: even letters are central and odd letters
//!    anticommute, so words reduce to a signed sorted word with distinct odd
//!    letters and no commutators;
//! 5. `k*` grading only: words with more than `k` odd letters (counting those
//!    inside commutators) vanish.
//!
//! Rule 1 strictly lowers the inversion count or the length, so the recursion
//! terminates; results are memoized per word.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GrassmannElement, GrassmannGrading, GrassmannSpec};
use crate::error::CoreError;
use crate::group::GroupElement;
use crate::linalg::{kernel_basis, Echelon, GuardLimits, SparseMatrix};
use crate::poly::{NcPolynomial, Universe};
use crate::Q;

/// The homogeneous `Z2`-gradings of `E` with a closed-form relatively free basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GradingMode {
    Natural,
    Infty,
    KStar(usize),
}

impl GradingMode {
    pub fn grassmann(&self, n_generators: usize) -> GrassmannSpec {
        let grading = match self {
            GradingMode::Natural => GrassmannGrading::Natural,
            GradingMode::Infty => GrassmannGrading::Infty,
            GradingMode::KStar(k) => GrassmannGrading::KStar(*k),
        };
        GrassmannSpec::new(n_generators, grading)
    }

    /// Parses `natural`, `infty` or `kstar:<k>`.
    pub fn parse(s: &str) -> Result<Self, CoreError> {
        let s = s.trim();
        match s {
            "natural" => return Ok(GradingMode::Natural),
            "infty" | "inf" | "infinity" => return Ok(GradingMode::Infty),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("kstar:").or_else(|| s.strip_prefix("kstar=")) {
            return k
                .parse()
                .map(GradingMode::KStar)
                .map_err(|_| CoreError::Parse { pos: 6, msg: format!("bad k in '{s}'") });
        }
        if s.starts_with("k:") || s.starts_with("k=") || s == "k" || s.starts_with("deg_k") {
            // deg_k has no closed-form basis
            return Err(CoreError::Unsupported("generators g_m unspecified in source".into()));
        }
        Err(CoreError::Parse { pos: 0, msg: format!("unknown grading mode '{s}'") })
    }
}

impl fmt::Display for GradingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradingMode::Natural => f.write_str("natural"),
            GradingMode::Infty => f.write_str("infty"),
            GradingMode::KStar(k) => write!(f, "kstar:{k}"),
        }
    }
}

/// A basis word of the relatively free algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RelFreeWord {
    pub evens: Vec<u32>,
    pub odds: Vec<u32>,
    /// Slots of the commutator tail, paired consecutively.
    pub commutators: Vec<u32>,
}

impl RelFreeWord {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn degree(&self) -> usize {
        self.evens.len() + self.odds.len() + self.commutators.len()
    }

    /// All letters, with multiplicity.
    pub fn letters(&self) -> impl Iterator<Item = u32> + '_ {
        self.evens.iter().chain(&self.odds).chain(&self.commutators).copied()
    }

    fn odd_count(&self, bits: &BTreeMap<u32, u32>) -> usize {
        self.odds.len() + self.commutators.iter().filter(|l| bits.get(l) == Some(&1)).count()
    }

    /// Expands the word back into the free algebra.
    pub fn to_polynomial(&self, bits: &BTreeMap<u32, u32>) -> Result<NcPolynomial, CoreError> {
        let var = |id: u32| -> Result<NcPolynomial, CoreError> {
            let b = bits.get(&id).ok_or(CoreError::UnknownVariable(id))?;
            Ok(NcPolynomial::var(id, GroupElement::z2(*b)))
        };
        let mut acc = NcPolynomial::one();
        for &l in self.evens.iter().chain(&self.odds) {
            acc = acc.mul(&var(l)?)?;
        }
        for pair in self.commutators.chunks(2) {
            let c = match pair {
                [a, b] => var(*a)?.commutator(&var(*b)?)?,
                _ => return Err(CoreError::Inconsistent("odd-length commutator tail".into())),
            };
            acc = acc.mul(&c)?;
        }
        Ok(acc)
    }

    fn fmt_with(&self, bits: &BTreeMap<u32, u32>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |id: u32| if bits.get(&id) == Some(&1) { format!("z{id}") } else { format!("y{id}") };
        let mut parts: Vec<String> = self.evens.iter().chain(&self.odds).map(|&l| name(l)).collect();
        for pair in self.commutators.chunks(2) {
            match pair {
                [a, b] => parts.push(format!("[{},{}]", name(*a), name(*b))),
                [a] => parts.push(format!("[{}]", name(*a))),
                _ => {}
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl Ord for RelFreeWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.commutators.len().cmp(&other.commutators.len()))
            .then_with(|| self.evens.cmp(&other.evens))
            .then_with(|| self.odds.cmp(&other.odds))
            .then_with(|| self.commutators.cmp(&other.commutators))
    }
}

impl PartialOrd for RelFreeWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Terms = BTreeMap<RelFreeWord, Q>;

fn add_into(acc: &mut Terms, w: RelFreeWord, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(w.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&w);
    }
}

/// Element of the relatively free algebra `U_{Z2}(E)` for one grading mode.
///
/// Equality compares the mode and the terms only.
#[derive(Clone, Debug)]
pub struct RelFreeElement {
    mode: GradingMode,
    terms: Terms,
    // parity of every variable the element may mention
    bits: BTreeMap<u32, u32>,
}

impl PartialEq for RelFreeElement {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.terms == other.terms
    }
}

impl Eq for RelFreeElement {}

impl RelFreeElement {
    pub fn zero(mode: GradingMode) -> Self {
        Self { mode, terms: Terms::new(), bits: BTreeMap::new() }
    }

    pub fn one(mode: GradingMode) -> Self {
        let mut e = Self::zero(mode);
        e.terms.insert(RelFreeWord::unit(), Q::one());
        e
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    pub fn terms(&self) -> impl Iterator<Item = (&RelFreeWord, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn bits(&self) -> &BTreeMap<u32, u32> {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &RelFreeWord) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    /// Maximal basis-word degree.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(RelFreeWord::degree).max().unwrap_or(0)
    }

    fn check_mode(&self, other: &Self) -> Result<(), CoreError> {
        if self.mode != other.mode {
            return Err(CoreError::ModeMismatch(format!("{} vs {}", self.mode, other.mode)));
        }
        Ok(())
    }

    fn merged_bits(&self, other: &Self) -> Result<BTreeMap<u32, u32>, CoreError> {
        let mut bits = self.bits.clone();
        for (id, b) in &other.bits {
            match bits.get(id) {
                Some(x) if x != b => {
                    return Err(CoreError::DegreeConflict { id: *id, first: x.to_string(), second: b.to_string() })
                }
                _ => {
                    bits.insert(*id, *b);
                }
            }
        }
        Ok(bits)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.check_mode(other)?;
        let mut out = Self { mode: self.mode, terms: self.terms.clone(), bits: self.merged_bits(other)? };
        for (w, c) in &other.terms {
            add_into(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        let terms = if c.is_zero() {
            Terms::new()
        } else {
            self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect()
        };
        Self { mode: self.mode, terms, bits: self.bits.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        relfree_mul(self, other)
    }

    /// Expands into the free algebra.
    pub fn to_polynomial(&self) -> Result<NcPolynomial, CoreError> {
        let universe: Universe = self.bits.iter().map(|(id, b)| (*id, GroupElement::z2(*b))).collect();
        let mut acc = NcPolynomial::zero().with_universe(&universe)?;
        for (w, c) in &self.terms {
            acc = acc.add(&w.to_polynomial(&self.bits)?.scale(c))?;
        }
        Ok(acc)
    }

    /// Parses a polynomial (core text format, `y`/`z` shorthand allowed) and normalizes it.
    pub fn parse(text: &str, mode: GradingMode) -> Result<Self, CoreError> {
        normal_form(&NcPolynomial::parse(text)?, mode)
    }
}

impl fmt::Display for RelFreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if !a.is_one() {
                if a.is_integer() {
                    write!(f, "{}*", a.numer())?;
                } else {
                    write!(f, "{}/{}*", a.numer(), a.denom())?;
                }
            }
            w.fmt_with(&self.bits, f)?;
        }
        Ok(())
    }
}

/// Switches for individual rewrite rules; only used to inject faults in tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteRules {
    /// Sign flips of the alternating commutator tail.
    pub alternating_tail: bool,
}

impl Default for RewriteRules {
    fn default() -> Self {
        Self { alternating_tail: true }
    }
}

/// Sorts `seq` into a strictly increasing tail; `None` on a repeated letter.
/// The flag is the sign of the sorting permutation (`true` = negative).
fn sort_alternating(seq: &[u32], rules: RewriteRules) -> Option<(Vec<u32>, bool)> {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            match seq[i].cmp(&seq[j]) {
                Ordering::Greater => inv += 1,
                Ordering::Equal if rules.alternating_tail => return None,
                _ => {}
            }
        }
    }
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    let neg = rules.alternating_tail && inv % 2 == 1;
    Some((sorted, neg))
}

/// Normal-form engine for one mode, with a memo table shared across calls.
#[derive(Debug)]
pub struct RelFreeEngine {
    mode: GradingMode,
    rules: RewriteRules,
    memo: RefCell<BTreeMap<Vec<(u32, u32)>, Terms>>,
}

impl RelFreeEngine {
    pub fn new(mode: GradingMode) -> Self {
        Self::with_rules(mode, RewriteRules::default())
    }

    pub fn with_rules(mode: GradingMode, rules: RewriteRules) -> Self {
        Self { mode, rules, memo: RefCell::new(BTreeMap::new()) }
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    /// Normal form of a word whose letters are `(parity, id)` pairs.
    fn nf_letters(&self, w: &[(u32, u32)]) -> Terms {
        if let GradingMode::KStar(k) = self.mode {
            if w.iter().filter(|(b, _)| *b == 1).count() > k {
                return Terms::new();
            }
        }
        if let Some(t) = self.memo.borrow().get(w) {
            return t.clone();
        }
        let out = match self.mode {
            GradingMode::Natural => self.nf_supercommutative(w),
            _ => self.nf_rewrite(w),
        };
        self.memo.borrow_mut().insert(w.to_vec(), out.clone());
        out
    }

    fn nf_supercommutative(&self, w: &[(u32, u32)]) -> Terms {
        let mut out = Terms::new();
        let mut odds: Vec<u32> = w.iter().filter(|(b, _)| *b == 1).map(|(_, id)| *id).collect();
        let mut inv = 0usize;
        for i in 0..odds.len() {
            for j in i + 1..odds.len() {
                match odds[i].cmp(&odds[j]) {
                    Ordering::Greater => inv += 1,
                    Ordering::Equal => return out,
                    Ordering::Less => {}
                }
            }
        }
        odds.sort_unstable();
        let mut evens: Vec<u32> = w.iter().filter(|(b, _)| *b == 0).map(|(_, id)| *id).collect();
        evens.sort_unstable();
        let c = if inv % 2 == 1 { -Q::one() } else { Q::one() };
        out.insert(RelFreeWord { evens, odds, commutators: Vec::new() }, c);
        out
    }

    fn nf_rewrite(&self, w: &[(u32, u32)]) -> Terms {
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i] > w[i + 1]) else {
            let evens = w.iter().filter(|(b, _)| *b == 0).map(|(_, id)| *id).collect();
            let odds = w.iter().filter(|(b, _)| *b == 1).map(|(_, id)| *id).collect();
            let mut t = Terms::new();
            t.insert(RelFreeWord { evens, odds, commutators: Vec::new() }, Q::one());
            return t;
        };
        // u a b v = u b a v + u v [a, b]
        let mut swapped = w.to_vec();
        swapped.swap(i, i + 1);
        let mut out = self.nf_letters(&swapped);
        let mut shorter = w.to_vec();
        shorter.drain(i..i + 2);
        let (a, b) = (w[i].1, w[i + 1].1);
        for (word, c) in self.nf_letters(&shorter) {
            let mut seq = word.commutators.clone();
            seq.push(a);
            seq.push(b);
            if let Some((tail, neg)) = sort_alternating(&seq, self.rules) {
                let c = if neg { -c } else { c };
                add_into(&mut out, RelFreeWord { commutators: tail, ..word }, c);
            }
        }
        out
    }

    fn finish(&self, terms: Terms, bits: &BTreeMap<u32, u32>) -> Terms {
        match self.mode {
            GradingMode::KStar(k) => terms.into_iter().filter(|(w, _)| w.odd_count(bits) <= k).collect(),
            _ => terms,
        }
    }

    pub fn normal_form(&self, f: &NcPolynomial) -> Result<RelFreeElement, CoreError> {
        let mut bits = BTreeMap::new();
        for (id, g) in f.universe() {
            let b = g.z2_bit().ok_or(CoreError::NonZ2Variable(*id))?;
            bits.insert(*id, b);
        }
        let mut acc = Terms::new();
        for (w, c) in f.terms() {
            let letters: Vec<(u32, u32)> = w.letters().iter().map(|l| (bits[l], *l)).collect();
            for (word, x) in self.nf_letters(&letters) {
                add_into(&mut acc, word, x * c);
            }
        }
        Ok(RelFreeElement { mode: self.mode, terms: self.finish(acc, &bits), bits })
    }

    pub fn mul(&self, a: &RelFreeElement, b: &RelFreeElement) -> Result<RelFreeElement, CoreError> {
        a.check_mode(b)?;
        if a.mode != self.mode {
            return Err(CoreError::ModeMismatch(format!("engine {} vs element {}", self.mode, a.mode)));
        }
        let bits = a.merged_bits(b)?;
        let mut acc = Terms::new();
        for (w1, c1) in &a.terms {
            for (w2, c2) in &b.terms {
                let letters: Vec<(u32, u32)> = w1
                    .evens
                    .iter()
                    .chain(&w1.odds)
                    .chain(&w2.evens)
                    .chain(&w2.odds)
                    .map(|l| (bits[l], *l))
                    .collect();
                let c12 = c1 * c2;
                for (word, x) in self.nf_letters(&letters) {
                    let mut seq = word.commutators.clone();
                    seq.extend_from_slice(&w1.commutators);
                    seq.extend_from_slice(&w2.commutators);
                    if let Some((tail, neg)) = sort_alternating(&seq, self.rules) {
                        let c = if neg { -(&x * &c12) } else { &x * &c12 };
                        add_into(&mut acc, RelFreeWord { commutators: tail, ..word }, c);
                    }
                }
            }
        }
        Ok(RelFreeElement { mode: self.mode, terms: self.finish(acc, &bits), bits })
    }

    /// The generator `x_id` of parity `bit`.
    pub fn var(&self, id: u32, bit: u32) -> RelFreeElement {
        let mut e = RelFreeElement::zero(self.mode);
        e.bits.insert(id, bit);
        let w = if bit == 1 {
            RelFreeWord { odds: alloc::vec![id], ..Default::default() }
        } else {
            RelFreeWord { evens: alloc::vec![id], ..Default::default() }
        };
        if let GradingMode::KStar(0) = self.mode {
            if bit == 1 {
                return e;
            }
        }
        e.terms.insert(w, Q::one());
        e
    }

    /// Renames variables (keeping parities) and re-normalizes.
    pub fn rename(&self, a: &RelFreeElement, map: &BTreeMap<u32, u32>) -> Result<RelFreeElement, CoreError> {
        let p = a.to_polynomial()?.rename(map)?;
        self.normal_form(&p)
    }
}

/// Class of `f` modulo the mode's T-ideal, in basis words.
pub fn normal_form(f: &NcPolynomial, mode: GradingMode) -> Result<RelFreeElement, CoreError> {
    RelFreeEngine::new(mode).normal_form(f)
}

/// Product in the relatively free algebra.
pub fn relfree_mul(a: &RelFreeElement, b: &RelFreeElement) -> Result<RelFreeElement, CoreError> {
    RelFreeEngine::new(a.mode).mul(a, b)
}

/// Evaluates `f` in the Grassmann algebra at the given values.
pub fn eval_grassmann(
    f: &NcPolynomial,
    values: &BTreeMap<u32, GrassmannElement>,
) -> Result<GrassmannElement, CoreError> {
    let mut acc = GrassmannElement::zero();
    for (w, c) in f.terms() {
        let mut prod = GrassmannElement::one();
        for l in w.letters() {
            let v = values.get(l).ok_or(CoreError::UnknownVariable(*l))?;
            prod = prod.mul(v);
            if prod.is_zero() {
                break;
            }
        }
        acc.add_assign_scaled(&prod, c);
    }
    Ok(acc)
}

/// Outcome of [`soundness_probe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessReport {
    pub mode: GradingMode,
    pub n_generators: usize,
    pub trials: usize,
    pub discrepancies: usize,
    /// First failing substitution, rendered as `x_id -> element` pairs.
    pub witness: Option<String>,
}

fn random_homogeneous(rng: &mut ChaCha8Rng, spec: &GrassmannSpec, bit: u32) -> GrassmannElement {
    let n = spec.n_generators;
    let mut out = GrassmannElement::zero();
    let terms = rng.gen_range(1..=3);
    for _ in 0..terms {
        for _attempt in 0..64 {
            let size = rng.gen_range(0..=3usize.min(n));
            let mut mask = 0u64;
            while (mask.count_ones() as usize) < size {
                mask |= 1 << rng.gen_range(0..n);
            }
            if spec.mask_bit(mask) == bit {
                let mut c: i64 = rng.gen_range(-3..=3);
                if c == 0 {
                    c = 1;
                }
                out.add_assign_scaled(&GrassmannElement::monomial(mask, Q::one()), &Q::from_integer(c.into()));
                break;
            }
        }
    }
    out
}

fn render_grassmann(e: &GrassmannElement) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let parts: Vec<String> =
        e.terms().map(|(m, c)| format!("{c}*{}", crate::algebra::mask_label(*m))).collect();
    parts.join(" + ")
}

/// Checks `f - nf(f) = 0` on `trials` pseudo-random graded substitutions into `E_N`.
pub fn soundness_probe(
    f: &NcPolynomial,
    mode: GradingMode,
    n_generators: usize,
    trials: usize,
    seed: u64,
) -> Result<SoundnessReport, CoreError> {
    soundness_probe_with(f, &RelFreeEngine::new(mode), n_generators, trials, seed)
}

/// [`soundness_probe`] against a specific engine (e.g. one with a disabled rule).
pub fn soundness_probe_with(
    f: &NcPolynomial,
    engine: &RelFreeEngine,
    n_generators: usize,
    trials: usize,
    seed: u64,
) -> Result<SoundnessReport, CoreError> {
    let mode = engine.mode();
    let k = match mode {
        GradingMode::KStar(k) => k,
        _ => 0,
    };
    let need = 2 * f.total_degree() + k;
    if n_generators < need || n_generators > 64 {
        return Err(CoreError::TruncationTooSmall(format!(
            "soundness probe needs {need} <= N <= 64 generators, got {n_generators}"
        )));
    }
    let nf = engine.normal_form(f)?.to_polynomial()?;
    let diff = f.sub(&nf)?;
    let spec = mode.grassmann(n_generators);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<(u32, u32)> = diff
        .universe()
        .iter()
        .map(|(id, g)| g.z2_bit().map(|b| (*id, b)).ok_or(CoreError::NonZ2Variable(*id)))
        .collect::<Result<_, _>>()?;
    let mut discrepancies = 0;
    let mut witness = None;
    for _ in 0..trials {
        let values: BTreeMap<u32, GrassmannElement> =
            vars.iter().map(|&(id, b)| (id, random_homogeneous(&mut rng, &spec, b))).collect();
        let v = eval_grassmann(&diff, &values)?;
        if !v.is_zero() {
            discrepancies += 1;
            if witness.is_none() {
                let parts: Vec<String> =
                    values.iter().map(|(id, e)| format!("x{id} -> {}", render_grassmann(e))).collect();
                witness = Some(format!("{} gives {}", parts.join(", "), render_grassmann(&v)));
            }
        }
    }
    Ok(SoundnessReport { mode, n_generators, trials, discrepancies, witness })
}

/// Verdict of [`partial_multiplicativity_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiplicativityVerdict {
    HoldsOnSamples,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativityReport {
    pub mode: GradingMode,
    pub verdict: MultiplicativityVerdict,
    /// Pairs of word sets tested, probes included.
    pub pairs_checked: usize,
    /// A vanishing combination `sum c * s1 * s2 = 0`, when the check fails.
    pub witness: Option<String>,
}

// Disjoint alphabets: the left side uses odd ids, the right side even ids.
// Ids 1,2 and 5,6 are odd letters, 3,4 and 7,8 even letters.
const LEFT: [u32; 4] = [1, 3, 5, 7];
const RIGHT: [u32; 4] = [2, 4, 6, 8];

fn alphabet_bit(id: u32) -> u32 {
    u32::from(matches!((id - 1) % 4, 0 | 1))
}

fn random_basis_word(rng: &mut ChaCha8Rng, mode: GradingMode, alphabet: &[u32], bound: usize) -> RelFreeWord {
    loop {
        let deg = rng.gen_range(1..=bound.max(1));
        let letters: Vec<u32> = (0..deg).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        let mut tail: Vec<u32> = Vec::new();
        if mode != GradingMode::Natural && rng.gen_bool(0.5) {
            let mut distinct = letters.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let pairs = rng.gen_range(0..=distinct.len() / 2);
            for _ in 0..2 * pairs {
                let i = rng.gen_range(0..distinct.len());
                tail.push(distinct.remove(i));
            }
            tail.sort_unstable();
        }
        let mut rest = letters.clone();
        for t in &tail {
            let i = rest.iter().position(|x| x == t).unwrap();
            rest.remove(i);
        }
        let mut evens: Vec<u32> = rest.iter().copied().filter(|&l| alphabet_bit(l) == 0).collect();
        let mut odds: Vec<u32> = rest.iter().copied().filter(|&l| alphabet_bit(l) == 1).collect();
        evens.sort_unstable();
        odds.sort_unstable();
        if mode == GradingMode::Natural {
            let before = odds.len();
            odds.dedup();
            if odds.len() != before {
                continue;
            }
        }
        let w = RelFreeWord { evens, odds, commutators: tail };
        if let GradingMode::KStar(k) = mode {
            let bits: BTreeMap<u32, u32> = w.letters().map(|l| (l, alphabet_bit(l))).collect();
            if w.odd_count(&bits) > k {
                continue;
            }
        }
        return w;
    }
}

fn word_element(w: &RelFreeWord, mode: GradingMode) -> RelFreeElement {
    let mut e = RelFreeElement::zero(mode);
    for l in w.letters() {
        e.bits.insert(l, alphabet_bit(l));
    }
    e.terms.insert(w.clone(), Q::one());
    e
}

fn display_word(w: &RelFreeWord) -> String {
    let bits: BTreeMap<u32, u32> = w.letters().map(|l| (l, alphabet_bit(l))).collect();
    struct D<'a>(&'a RelFreeWord, &'a BTreeMap<u32, u32>);
    impl fmt::Display for D<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            self.0.fmt_with(self.1, f)
        }
    }
    D(w, &bits).to_string()
}

/// Tests whether products of basis words in disjoint alphabets stay linearly independent.
/// Returns the dependency coefficients when they do not.
fn products_independent(
    engine: &RelFreeEngine,
    s1: &[RelFreeWord],
    s2: &[RelFreeWord],
) -> Result<Option<Vec<(usize, usize, Q)>>, CoreError> {
    let mode = engine.mode();
    let mut products = Vec::new();
    for (i, a) in s1.iter().enumerate() {
        for (j, b) in s2.iter().enumerate() {
            products.push(((i, j), engine.mul(&word_element(a, mode), &word_element(b, mode))?));
        }
    }
    let mut coords: BTreeMap<RelFreeWord, usize> = BTreeMap::new();
    for (_, p) in &products {
        for (w, _) in p.terms() {
            let n = coords.len();
            coords.entry(w.clone()).or_insert(n);
        }
    }
    let mut e = Echelon::new(coords.len().max(1), GuardLimits::unlimited());
    let mut rank = 0;
    for (_, p) in &products {
        let mut row: Vec<(usize, Q)> = p.terms().map(|(w, c)| (coords[w], c.clone())).collect();
        row.sort_by_key(|(c, _)| *c);
        if e.insert_rational(&row)? {
            rank += 1;
        }
    }
    if rank == products.len() {
        return Ok(None);
    }
    // dependency: kernel of the matrix whose columns are the products
    let mut m = SparseMatrix::new(products.len());
    let mut by_word: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
    for (col, (_, p)) in products.iter().enumerate() {
        for (w, c) in p.terms() {
            by_word.entry(coords[w]).or_default().push((col, c.clone()));
        }
    }
    for (_, r) in by_word {
        m.push_row(r)?;
    }
    let k = kernel_basis(&m);
    let v = k.basis().first().cloned().unwrap_or_default();
    Ok(Some(v.into_iter().map(|(col, c)| (products[col].0 .0, products[col].0 .1, c)).collect()))
}

fn render_dependency(s1: &[RelFreeWord], s2: &[RelFreeWord], dep: &[(usize, usize, Q)]) -> String {
    let parts: Vec<String> = dep
        .iter()
        .map(|(i, j, c)| {
            let a = display_word(&s1[*i]);
            let b = display_word(&s2[*j]);
            let wrap = |s: String| if s.contains(['*', '[']) { format!("({s})") } else { s };
            if c.is_one() {
                format!("{}·{}", wrap(a), wrap(b))
            } else {
                format!("{c}*{}·{}", wrap(a), wrap(b))
            }
        })
        .collect();
    format!("{} = 0", parts.join(" + "))
}

/// Samples pairs of basis-word sets in disjoint alphabets and tests the
/// linear independence of all their products.
///
/// Before sampling, every pair of single letters is probed deterministically.
pub fn partial_multiplicativity_check(
    mode: GradingMode,
    degree_bound: usize,
    sample_count: usize,
    seed: u64,
) -> Result<MultiplicativityReport, CoreError> {
    let engine = RelFreeEngine::new(mode);
    let mut checked = 0;
    let letter_word = |id: u32| {
        if alphabet_bit(id) == 1 {
            RelFreeWord { odds: alloc::vec![id], ..Default::default() }
        } else {
            RelFreeWord { evens: alloc::vec![id], ..Default::default() }
        }
    };
    let mut probes: Vec<(u32, u32)> = Vec::new();
    for &a in &LEFT {
        for &b in &RIGHT {
            probes.push((a, b));
        }
    }
    // odd letters first, so the smallest failing probe is reported
    probes.sort_by_key(|&(a, b)| (1 - alphabet_bit(a), 1 - alphabet_bit(b), a, b));
    for (a, b) in probes {
        let s1 = [letter_word(a)];
        let s2 = [letter_word(b)];
        if let GradingMode::KStar(k) = mode {
            if (alphabet_bit(a) == 1 && k == 0) || (alphabet_bit(b) == 1 && k == 0) {
                continue;
            }
        }
        checked += 1;
        if let Some(dep) = products_independent(&engine, &s1, &s2)? {
            return Ok(MultiplicativityReport {
                mode,
                verdict: MultiplicativityVerdict::Fails,
                pairs_checked: checked,
                witness: Some(render_dependency(&s1, &s2, &dep)),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sample_count {
        let mut s1: Vec<RelFreeWord> =
            (0..rng.gen_range(1..=3)).map(|_| random_basis_word(&mut rng, mode, &LEFT, degree_bound)).collect();
        let mut s2: Vec<RelFreeWord> =
            (0..rng.gen_range(1..=3)).map(|_| random_basis_word(&mut rng, mode, &RIGHT, degree_bound)).collect();
        s1.sort();
        s1.dedup();
        s2.sort();
        s2.dedup();
        checked += 1;
        if let Some(dep) = products_independent(&engine, &s1, &s2)? {
            return Ok(MultiplicativityReport {
                mode,
                verdict: MultiplicativityVerdict::Fails,
                pairs_checked: checked,
                witness: Some(render_dependency(&s1, &s2, &dep)),
            });
        }
    }
    Ok(MultiplicativityReport { mode, verdict: MultiplicativityVerdict::HoldsOnSamples, pairs_checked: checked, witness: None })
}

/// Number of mode-basis words that are multilinear in `x_1..x_n` with the given parities.
pub fn multilinear_basis_count(mode: GradingMode, bits: &[u32]) -> usize {
    let n = bits.len();
    if n == 0 {
        return 1;
    }
    let odd = bits.iter().filter(|&&b| b == 1).count();
    match mode {
        GradingMode::Natural => 1,
        GradingMode::Infty => 1 << (n - 1),
        GradingMode::KStar(k) if odd <= k => 1 << (n - 1),
        GradingMode::KStar(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nf(s: &str, mode: GradingMode) -> RelFreeElement {
        normal_form(&NcPolynomial::parse(s).unwrap(), mode).unwrap()
    }

    #[test]
    fn transposition_rule() {
        let e = nf("y2*y1", GradingMode::Infty);
        assert_eq!(e, nf("y1*y2 - [y1,y2]", GradingMode::Infty));
        assert_eq!(e.to_string(), "y1*y2 - [y1,y2]");
    }

    #[test]
    fn commutator_products() {
        assert!(nf("[y1,y2]*[y1,y3]", GradingMode::Infty).is_zero());
        let a = nf("[y3,y4]*[y1,y2]", GradingMode::Infty);
        assert_eq!(a.to_string(), "[y1,y2]*[y3,y4]");
        let b = nf("[y1,y3]*[y2,y4]", GradingMode::Infty);
        assert_eq!(b.to_string(), "-[y1,y2]*[y3,y4]");
    }

    #[test]
    fn mode_specific_squares() {
        assert!(nf("z1*z1", GradingMode::Natural).is_zero());
        assert_eq!(nf("z1*z1", GradingMode::Infty).to_string(), "z1*z1");
        assert!(nf("z1*z2", GradingMode::KStar(1)).is_zero());
        assert!(nf("[z1,z2]", GradingMode::KStar(1)).is_zero());
        assert!(!nf("[z1,y2]", GradingMode::KStar(1)).is_zero());
        assert_eq!(nf("z2*z1", GradingMode::Natural).to_string(), "-z1*z2");
        assert!(nf("[y1,z2]", GradingMode::Natural).is_zero());
    }

    #[test]
    fn multiplication_examples() {
        let m = GradingMode::Infty;
        let y1 = nf("y1", m);
        let y2 = nf("y2", m);
        assert_eq!(relfree_mul(&y1, &y2).unwrap().to_string(), "y1*y2");
        let z1 = nf("z1", m);
        let z2 = nf("z2", m);
        assert_eq!(relfree_mul(&z2, &z1).unwrap(), nf("z1*z2 - [z1,z2]", m));
        let k1 = GradingMode::KStar(1);
        assert!(relfree_mul(&nf("z1", k1), &nf("z1", k1)).unwrap().is_zero());
        assert!(matches!(relfree_mul(&y1, &nf("y1", GradingMode::Natural)), Err(CoreError::ModeMismatch(_))));
    }

    #[test]
    fn kstar_square_oracle() {
        // every degree-1 monomial of E_6 under deg_{1*} contains e_1
        let spec = GradingMode::KStar(1).grassmann(6);
        let odd: Vec<u64> = (0u64..64).filter(|&m| spec.mask_bit(m) == 1).collect();
        for &a in &odd {
            for &b in &odd {
                let x = GrassmannElement::monomial(a, Q::one());
                let y = GrassmannElement::monomial(b, Q::one());
                assert!(x.mul(&y).is_zero());
            }
        }
    }

    #[test]
    fn non_z2_variable_rejected() {
        let f = NcPolynomial::parse("x1^(1,0)").unwrap();
        assert!(matches!(normal_form(&f, GradingMode::Infty), Err(CoreError::NonZ2Variable(1))));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(GradingMode::parse("kstar:2").unwrap(), GradingMode::KStar(2));
        assert_eq!(GradingMode::parse("infty").unwrap(), GradingMode::Infty);
        assert!(matches!(GradingMode::parse("k:3"), Err(CoreError::Unsupported(_))));
        assert!(GradingMode::parse("bogus").is_err());
    }

    #[test]
    fn printer_parser_round_trip() {
        for mode in [GradingMode::Natural, GradingMode::Infty, GradingMode::KStar(2)] {
            let e = nf("3*z2*y1*[y3,z4] - 1/2*y5*z7*z6 + y8*y8", mode);
            let back = RelFreeElement::parse(&e.to_string(), mode).unwrap();
            assert_eq!(back, e, "{mode}");
        }
    }

    #[test]
    fn probe_examples() {
        for mode in [GradingMode::Natural, GradingMode::Infty, GradingMode::KStar(1)] {
            let f = NcPolynomial::parse("[x1^(0),x2^(1),x3^(0)]").unwrap();
            let r = soundness_probe(&f, mode, 8, 50, 1).unwrap();
            assert_eq!(r.discrepancies, 0, "{mode}");
            let f = NcPolynomial::parse("z1*y2").unwrap();
            assert_eq!(soundness_probe(&f, mode, 8, 50, 2).unwrap().discrepancies, 0);
        }
        assert!(soundness_probe(&NcPolynomial::parse("y1*y2*y3").unwrap(), GradingMode::Infty, 4, 1, 0).is_err());
    }

    #[test]
    fn injected_fault_is_detected() {
        let broken = RelFreeEngine::with_rules(GradingMode::Infty, RewriteRules { alternating_tail: false });
        let f = NcPolynomial::parse("[y1,y3]*[y2,y4]").unwrap();
        let r = soundness_probe_with(&f, &broken, 12, 50, 3).unwrap();
        assert!(r.discrepancies > 0);
        assert!(r.witness.is_some());
        let ok = soundness_probe(&f, GradingMode::Infty, 12, 50, 3).unwrap();
        assert_eq!(ok.discrepancies, 0);
    }

    #[test]
    fn multiplicativity_examples() {
        let r = partial_multiplicativity_check(GradingMode::KStar(1), 4, 10, 7).unwrap();
        assert_eq!(r.verdict, MultiplicativityVerdict::Fails);
        assert_eq!(r.witness.as_deref(), Some("z1·z2 = 0"));
        let r = partial_multiplicativity_check(GradingMode::Infty, 4, 30, 7).unwrap();
        assert_eq!(r.verdict, MultiplicativityVerdict::HoldsOnSamples);
        let r = partial_multiplicativity_check(GradingMode::Natural, 4, 30, 7).unwrap();
        assert_eq!(r.verdict, MultiplicativityVerdict::HoldsOnSamples);
    }

    #[test]
    fn basis_counts() {
        assert_eq!(multilinear_basis_count(GradingMode::Infty, &[0, 1, 1]), 4);
        assert_eq!(multilinear_basis_count(GradingMode::Natural, &[0, 1, 1]), 1);
        assert_eq!(multilinear_basis_count(GradingMode::KStar(1), &[1, 1]), 0);
        assert_eq!(multilinear_basis_count(GradingMode::KStar(2), &[1, 1, 0]), 4);
    }
}
