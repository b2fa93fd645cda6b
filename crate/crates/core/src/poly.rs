//! Graded variables, words and exact noncommutative polynomials.
//!
//! Terms iterate in the canonical order: shorter words first, then
//! lexicographically by variable id.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::CoreError;
use crate::group::{GroupElement, GroupSpec};
use crate::Q;

/// A variable `x_id` of homogeneous degree `degree`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GradedVariable {
    pub id: u32,
    pub degree: GroupElement,
}

/// A monomial, as the sequence of its letters. The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u32>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Declared degrees of the variables a polynomial may mention.
pub type Universe = BTreeMap<u32, GroupElement>;

/// Degree sequence of a multilinear component: `x_i` has degree `degrees[i-1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultidegreeSignature {
    degrees: Vec<GroupElement>,
}

impl MultidegreeSignature {
    pub fn new(degrees: Vec<GroupElement>) -> Result<Self, CoreError> {
        if degrees.is_empty() {
            return Err(CoreError::SignatureMismatch("signature must have n >= 1".into()));
        }
        Ok(Self { degrees })
    }

    /// Signature over `Z2` from parity bits.
    pub fn z2(bits: &[u32]) -> Result<Self, CoreError> {
        Self::new(bits.iter().map(|&b| GroupElement::z2(b)).collect())
    }

    /// All-identity signature of length `n` over `group`.
    pub fn uniform(group: &GroupSpec, n: usize) -> Result<Self, CoreError> {
        Self::new(alloc::vec![group.identity(); n])
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degrees(&self) -> &[GroupElement] {
        &self.degrees
    }

    pub fn degree(&self, var: u32) -> &GroupElement {
        &self.degrees[var as usize - 1]
    }

    /// Universe declaring `x_1..x_n` with the signature's degrees.
    pub fn universe(&self) -> Universe {
        self.degrees
            .iter()
            .enumerate()
            .map(|(i, g)| (i as u32 + 1, g.clone()))
            .collect()
    }

    /// The signature restricted to the given (1-based, increasing) positions.
    pub fn restrict(&self, positions: &[u32]) -> Result<Self, CoreError> {
        Self::new(positions.iter().map(|&p| self.degree(p).clone()).collect())
    }
}

impl fmt::Display for MultidegreeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            if g.residues().is_empty() {
                f.write_str("e")?;
            } else {
                write!(f, "{g}")?;
            }
        }
        f.write_str(")")
    }
}

/// An element of the free graded algebra with rational coefficients.
///
/// Equality compares terms only; the universe is bookkeeping for degrees.
#[derive(Clone, Debug, Default)]
pub struct NcPolynomial {
    terms: BTreeMap<Word, Q>,
    universe: Universe,
}

impl PartialEq for NcPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for NcPolynomial {}

fn merge_universe(into: &mut Universe, from: &Universe) -> Result<(), CoreError> {
    for (id, deg) in from {
        match into.get(id) {
            Some(existing) if existing != deg => {
                return Err(CoreError::DegreeConflict {
                    id: *id,
                    first: existing.to_string(),
                    second: deg.to_string(),
                })
            }
            Some(_) => {}
            None => {
                into.insert(*id, deg.clone());
            }
        }
    }
    Ok(())
}

impl NcPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Word::unit(), c);
        p
    }

    pub fn var(id: u32, degree: GroupElement) -> Self {
        let mut p = Self::zero();
        p.universe.insert(id, degree);
        p.add_term(Word(alloc::vec![id]), Q::one());
        p
    }

    /// A single monomial with the given coefficient; every letter must be declared in `universe`.
    pub fn monomial(word: Word, coeff: Q, universe: Universe) -> Result<Self, CoreError> {
        for l in word.letters() {
            if !universe.contains_key(l) {
                return Err(CoreError::UnknownVariable(*l));
            }
        }
        let mut p = Self { terms: BTreeMap::new(), universe };
        p.add_term(word, coeff);
        Ok(p)
    }

    /// Builds a polynomial from coefficients over `words`, skipping zeros.
    pub fn from_terms<I>(terms: I, universe: Universe) -> Result<Self, CoreError>
    where
        I: IntoIterator<Item = (Word, Q)>,
    {
        let mut p = Self { terms: BTreeMap::new(), universe };
        for (w, c) in terms {
            for l in w.letters() {
                if !p.universe.contains_key(l) {
                    return Err(CoreError::UnknownVariable(*l));
                }
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    /// Declares further variables, rejecting conflicting degrees.
    pub fn with_universe(mut self, universe: &Universe) -> Result<Self, CoreError> {
        merge_universe(&mut self.universe, universe)?;
        Ok(self)
    }

    fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length; 0 for constants and the zero polynomial.
    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        let mut out = self.clone();
        merge_universe(&mut out.universe, &other.universe)?;
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self { terms: BTreeMap::new(), universe: self.universe.clone() };
        }
        Self {
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
            universe: self.universe.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        poly_mul(self, other)
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Result<Self, CoreError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Left-normed commutator `[p_1, p_2, ..., p_r]`.
    pub fn commutator_chain(parts: &[Self]) -> Result<Self, CoreError> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| CoreError::Parse { pos: 0, msg: "empty commutator".into() })?;
        let mut acc = first.clone();
        for p in rest {
            acc = acc.commutator(p)?;
        }
        Ok(acc)
    }

    /// The G-degree if all terms share one, `None` for inhomogeneous polynomials.
    /// The zero polynomial yields `Some(None)`: homogeneous of every degree.
    pub fn homogeneous_degree(&self, group: &GroupSpec) -> Result<Option<Option<GroupElement>>, CoreError> {
        let mut deg: Option<GroupElement> = None;
        for w in self.terms.keys() {
            let d = word_degree(w, &self.universe, group)?;
            match &deg {
                None => deg = Some(d),
                Some(prev) if *prev != d => return Ok(None),
                Some(_) => {}
            }
        }
        Ok(Some(deg))
    }

    /// Ids occurring in at least one term, sorted.
    pub fn variables(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.terms.keys().flat_map(|w| w.0.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// True when each term contains each of `ids` exactly once and nothing else.
    pub fn is_multilinear_in(&self, ids: &[u32]) -> bool {
        let mut want: Vec<u32> = ids.to_vec();
        want.sort_unstable();
        self.terms.keys().all(|w| {
            let mut l = w.0.clone();
            l.sort_unstable();
            l == want
        })
    }

    /// Renames variables by `map`, keeping degrees. Ids absent from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<u32, u32>) -> Result<Self, CoreError> {
        let mut universe = Universe::new();
        for (id, g) in &self.universe {
            let new = *map.get(id).unwrap_or(id);
            merge_universe(&mut universe, &[(new, g.clone())].into_iter().collect())?;
        }
        let mut out = Self { terms: BTreeMap::new(), universe };
        for (w, c) in &self.terms {
            let nw = Word(w.0.iter().map(|l| *map.get(l).unwrap_or(l)).collect());
            out.add_term(nw, c.clone());
        }
        Ok(out)
    }

    /// Parses the text format; see [`NcPolynomial::to_string`] for the canonical form.
    pub fn parse(text: &str) -> Result<Self, CoreError> {
        Parser::new(text).parse_all()
    }
}

/// Degree of `w` as the group sum of its letter degrees.
pub fn word_degree(w: &Word, universe: &Universe, group: &GroupSpec) -> Result<GroupElement, CoreError> {
    let mut acc = group.identity();
    for l in w.letters() {
        let d = universe.get(l).ok_or(CoreError::UnknownVariable(*l))?;
        acc = group.op(&acc, d)?;
    }
    Ok(acc)
}

/// Distributive concatenation product.
pub fn poly_mul(f: &NcPolynomial, g: &NcPolynomial) -> Result<NcPolynomial, CoreError> {
    let mut universe = f.universe.clone();
    merge_universe(&mut universe, &g.universe)?;
    let mut out = NcPolynomial { terms: BTreeMap::new(), universe };
    for (u, a) in &f.terms {
        for (v, b) in &g.terms {
            out.add_term(u.concat(v), a * b);
        }
    }
    Ok(out)
}

/// Graded endomorphism image of `f`: each `x_id` in `map` is replaced by its image.
///
/// Every image must be homogeneous of the replaced variable's degree.
pub fn substitute(
    f: &NcPolynomial,
    map: &BTreeMap<u32, NcPolynomial>,
    group: &GroupSpec,
) -> Result<NcPolynomial, CoreError> {
    for (id, image) in map {
        let Some(deg) = f.universe.get(id) else { continue };
        match image.homogeneous_degree(group)? {
            Some(None) => {}
            Some(Some(d)) if d == *deg => {}
            _ => {
                return Err(CoreError::GradedSubstitution { id: *id, expected: deg.to_string() })
            }
        }
    }
    let mut universe = Universe::new();
    for (id, deg) in &f.universe {
        match map.get(id) {
            Some(image) => merge_universe(&mut universe, &image.universe)?,
            None => merge_universe(&mut universe, &[(*id, deg.clone())].into_iter().collect())?,
        }
    }
    let mut out = NcPolynomial { terms: BTreeMap::new(), universe: universe.clone() };
    for (w, c) in &f.terms {
        let mut acc = NcPolynomial::constant(c.clone());
        for l in w.letters() {
            let factor = match map.get(l) {
                Some(image) => image.clone(),
                None => NcPolynomial::var(*l, f.universe[l].clone()),
            };
            acc = poly_mul(&acc, &factor)?;
            if acc.is_zero() {
                break;
            }
        }
        for (w2, c2) in acc.terms {
            out.add_term(w2, c2);
        }
    }
    Ok(out)
}

/// The `n!` multilinear words in `x_1..x_n`, lexicographic in the permutation.
pub fn multilinear_monomials(sig: &MultidegreeSignature) -> Vec<Word> {
    permutations(sig.len()).into_iter().map(|p| Word(p.into_iter().map(|i| i as u32 + 1).collect())).collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Lexicographic rank of a multilinear word in `x_1..x_n`, or `None` if it is not one.
pub fn multilinear_rank(word: &[u32], n: usize) -> Option<usize> {
    if word.len() != n {
        return None;
    }
    let mut seen = alloc::vec![false; n + 1];
    let mut rank = 0usize;
    let mut fact: usize = (1..n).product();
    for (pos, &l) in word.iter().enumerate() {
        let l = l as usize;
        if l == 0 || l > n || seen[l] {
            return None;
        }
        let smaller_unused = (1..l).filter(|&m| !seen[m]).count();
        rank += smaller_unused * fact;
        seen[l] = true;
        let remaining = n - pos - 1;
        if remaining > 0 {
            fact /= remaining;
        }
    }
    Some(rank)
}

/// `n!`, saturating.
pub fn factorial(n: usize) -> usize {
    (1..=n).fold(1usize, |a, b| a.saturating_mul(b))
}

fn fmt_coeff(c: &Q) -> String {
    if c.is_integer() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl NcPolynomial {
    /// Printer using `y<id>`/`z<id>` for `Z2` degrees 0/1 and bare `x<id>` for
    /// the trivial degree, e.g. `z1*z2 - y3`. The parser reads it back.
    pub fn to_shorthand(&self) -> String {
        let mut s = String::new();
        let _ = self.write_terms(&mut s, true);
        s
    }

    fn write_terms(&self, f: &mut dyn fmt::Write, shorthand: bool) -> fmt::Result {
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
            let mut first = true;
            if !a.is_one() || w.is_empty() {
                f.write_str(&fmt_coeff(&a))?;
                first = false;
            }
            for l in w.letters() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                match (self.universe.get(l), shorthand) {
                    (Some(g), true) if g.residues() == [0] => write!(f, "y{l}")?,
                    (Some(g), true) if g.residues() == [1] => write!(f, "z{l}")?,
                    (Some(g), true) if g.residues().is_empty() => write!(f, "x{l}")?,
                    (Some(g), _) => write!(f, "x{l}^({g})")?,
                    (None, _) => write!(f, "x{l}")?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for NcPolynomial {
    /// Canonical form, e.g. `3/2*x1^(1)*x2^(0) - x2^(0)*x1^(1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f, false)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: &str) -> Result<T, CoreError> {
        Err(CoreError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), CoreError> {
        if self.eat(b) {
            Ok(())
        } else {
            self.err(&format!("expected '{}'", b as char))
        }
    }

    fn parse_all(mut self) -> Result<NcPolynomial, CoreError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<NcPolynomial, CoreError> {
        let mut negate = false;
        if self.eat(b'-') {
            negate = true;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some(b'x' | b'y' | b'z' | b'[' | b'('))
    }

    fn term(&mut self) -> Result<NcPolynomial, CoreError> {
        let mut acc = if matches!(self.peek(), Some(b'0'..=b'9')) {
            let c = self.coefficient()?;
            if !self.eat(b'*') && !self.starts_factor() {
                return Ok(NcPolynomial::constant(c));
            }
            NcPolynomial::constant(c).mul(&self.factor()?)?
        } else {
            self.factor()?
        };
        loop {
            if self.eat(b'*') || self.starts_factor() {
                acc = acc.mul(&self.factor()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn number(&mut self) -> Result<num_bigint::BigInt, CoreError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        num_bigint::BigInt::parse_bytes(s.as_bytes(), 10)
            .ok_or(CoreError::Parse { pos: start, msg: "bad number".into() })
    }

    fn coefficient(&mut self) -> Result<Q, CoreError> {
        let n = self.number()?;
        if self.eat(b'/') {
            let d = self.number()?;
            if d.is_zero() {
                return self.err("zero denominator");
            }
            Ok(Q::new(n, d))
        } else {
            Ok(Q::from_integer(n))
        }
    }

    fn factor(&mut self) -> Result<NcPolynomial, CoreError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.expr()?;
                self.expect(b')')?;
                Ok(p)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut parts = alloc::vec![self.expr()?];
                while self.eat(b',') {
                    parts.push(self.expr()?);
                }
                self.expect(b']')?;
                if parts.len() < 2 {
                    return self.err("commutator needs at least two entries");
                }
                NcPolynomial::commutator_chain(&parts)
            }
            Some(b @ (b'x' | b'y' | b'z')) => {
                self.pos += 1;
                let id = self.number()?;
                let id: u32 = u32::try_from(id)
                    .ok()
                    .filter(|&i| i > 0)
                    .ok_or(CoreError::Parse { pos: self.pos, msg: "variable id must be a positive u32".into() })?;
                let degree = match b {
                    b'y' => GroupElement::z2(0),
                    b'z' => GroupElement::z2(1),
                    _ => self.degree_suffix()?,
                };
                Ok(NcPolynomial::var(id, degree))
            }
            _ => self.err("expected a variable, '[' or '('"),
        }
    }

    fn degree_suffix(&mut self) -> Result<GroupElement, CoreError> {
        if !self.eat(b'^') {
            return Ok(GroupElement::from_residues(Vec::new()));
        }
        self.expect(b'(')?;
        let mut residues = Vec::new();
        if !self.eat(b')') {
            loop {
                let r = self.number()?;
                residues.push(u32::try_from(r).map_err(|_| CoreError::Parse {
                    pos: self.pos,
                    msg: "residue too large".into(),
                })?);
                if self.eat(b')') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        Ok(GroupElement::from_residues(residues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(s: &str) -> NcPolynomial {
        NcPolynomial::parse(s).unwrap()
    }

    #[test]
    fn word_degree_examples() {
        let g = GroupSpec::z2();
        let u: Universe =
            [(1, GroupElement::z2(0)), (2, GroupElement::z2(1)), (3, GroupElement::z2(1))].into_iter().collect();
        assert_eq!(word_degree(&Word(vec![1, 2, 3]), &u, &g).unwrap(), GroupElement::z2(0));
        assert_eq!(word_degree(&Word::unit(), &u, &g).unwrap(), g.identity());
        assert_eq!(word_degree(&Word(vec![2, 2]), &u, &g).unwrap(), GroupElement::z2(0));
        assert_eq!(word_degree(&Word(vec![9]), &u, &g), Err(CoreError::UnknownVariable(9)));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("(y1 + y2)*y1"), p("y1*y1 + y2*y1"));
        assert_eq!(p("z3*y2").mul(&NcPolynomial::one()).unwrap(), p("z3*y2"));
        assert_eq!(p("[x1,x2]*x3"), p("x1*x2*x3 - x2*x1*x3"));
    }

    #[test]
    fn conflicting_degrees_rejected() {
        let a = NcPolynomial::var(1, GroupElement::z2(0));
        let b = NcPolynomial::var(1, GroupElement::z2(1));
        assert!(matches!(a.mul(&b), Err(CoreError::DegreeConflict { id: 1, .. })));
    }

    #[test]
    fn substitution_examples() {
        let g = GroupSpec::z2();
        let f = p("z1");
        let map: BTreeMap<u32, NcPolynomial> = [(1, p("y1"))].into_iter().collect();
        // y1 shares id 1 with z1 but the degree check fires first
        assert!(matches!(substitute(&f, &map, &g), Err(CoreError::GradedSubstitution { .. })));

        let c = p("[y1,y2]");
        let swap: BTreeMap<u32, NcPolynomial> = [(1, p("y2")), (2, p("y1"))].into_iter().collect();
        assert_eq!(substitute(&c, &swap, &g).unwrap(), c.neg());

        let zz = p("z1*z2");
        let m: BTreeMap<u32, NcPolynomial> = [(2, p("z1"))].into_iter().collect();
        assert_eq!(substitute(&zz, &m, &g).unwrap(), p("z1*z1"));
    }

    #[test]
    fn monomial_listing() {
        let s2 = MultidegreeSignature::z2(&[0, 0]).unwrap();
        assert_eq!(multilinear_monomials(&s2), vec![Word(vec![1, 2]), Word(vec![2, 1])]);
        let s3 = MultidegreeSignature::z2(&[0, 1, 0]).unwrap();
        let m3 = multilinear_monomials(&s3);
        assert_eq!(m3.len(), 6);
        assert_eq!(m3[0], Word(vec![1, 2, 3]));
        assert_eq!(m3[5], Word(vec![3, 2, 1]));
        for (i, w) in m3.iter().enumerate() {
            assert_eq!(multilinear_rank(w.letters(), 3), Some(i));
        }
        assert_eq!(multilinear_monomials(&MultidegreeSignature::z2(&[1]).unwrap()), vec![Word(vec![1])]);
        assert_eq!(multilinear_rank(&[1, 1], 2), None);
    }

    #[test]
    fn print_parse_round_trip() {
        let f = p("3/2*x1^(1)*x2^(0) - x2^(0)*x1^(1)");
        let s = f.to_string();
        assert_eq!(s, "3/2*x1^(1)*x2^(0) - x2^(0)*x1^(1)");
        let back = p(&s);
        assert_eq!(back, f);
        assert_eq!(back.to_string(), s);
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("-2 + x1^()").to_string(), "-2 + x1^()");
        assert_eq!(p("  x1^( 1 , 2 ) ").universe()[&1].residues(), &[1, 2]);
    }

    #[test]
    fn parse_errors() {
        assert!(NcPolynomial::parse("x1 +").is_err());
        assert!(NcPolynomial::parse("1/0*x1").is_err());
        assert!(NcPolynomial::parse("[x1]").is_err());
        assert!(NcPolynomial::parse("x0").is_err());
    }
}
