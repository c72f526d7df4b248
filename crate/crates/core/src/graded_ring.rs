//! Finitely presented graded-commutative algebras over F₂.
//!
//! In characteristic two graded commutativity is plain commutativity, so a
//! [`Presentation`] is a weighted polynomial ring modulo a homogeneous ideal.
//! Normal forms come from a Gröbner basis in graded-lexicographic order
//! (weighted degree first, then lexicographic in declared generator order),
//! completed only up to `degree_bound`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2linalg::{rank, F2Matrix, F2Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("degree {degree} exceeds the degree bound {bound}")]
    DegreeOverflow { degree: u32, bound: u32 },
    #[error("ring is not finite-dimensional below degree bound {bound}: rank {rank} in degree {degree}")]
    NotFiniteDimensional { bound: u32, degree: u32, rank: usize },
    #[error("polynomial is not homogeneous: {0}")]
    Inhomogeneous(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("cannot parse polynomial `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// Exponent vector indexed by generator position.
///
/// The derived order is lexicographic with the first generator most
/// significant, which is the tie-break inside a single degree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize, power: u32) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = power;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_into(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }
}

/// A polynomial over F₂: a set of monomials, duplicates cancel.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Polynomial {
    terms: BTreeSet<Monomial>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_monomial(Monomial::one(nvars))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Polynomial { terms }
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(ms: I) -> Self {
        let mut p = Polynomial::zero();
        for m in ms {
            p.add_monomial(m);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = &Monomial> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    /// Largest term; for homogeneous polynomials this is the grlex leading term.
    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.last()
    }

    pub fn add_monomial(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for m in &other.terms {
            self.add_monomial(m.clone());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        // multiplication by a monomial is injective on monomials: no cancellation
        Polynomial {
            terms: self.terms.iter().map(|t| t.mul(m)).collect(),
        }
    }

    /// Product in the free polynomial ring (no reduction).
    pub fn mul_free(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for a in &self.terms {
            for b in &other.terms {
                out.add_monomial(a.mul(b));
            }
        }
        out
    }

    /// Weighted degree if homogeneous; `None` for the zero polynomial.
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Result<Option<u32>, RingError> {
        let mut degs = self.terms.iter().map(|m| m.weighted_degree(weights));
        let Some(first) = degs.next() else {
            return Ok(None);
        };
        if degs.any(|d| d != first) {
            return Err(RingError::Inhomogeneous(format!("{self:?}")));
        }
        Ok(Some(first))
    }

    pub fn max_degree(&self, weights: &[u32]) -> u32 {
        self.terms
            .iter()
            .map(|m| m.weighted_degree(weights))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

/// The irreducible monomials of one degree, in descending monomial order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBasis {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
}

impl DegreeBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// A finitely presented graded-commutative F₂-algebra, completed once at
/// construction and immutable afterwards.
#[derive(Clone)]
pub struct Presentation {
    generators: Vec<Generator>,
    weights: Vec<u32>,
    relations: Vec<Polynomial>,
    degree_bound: u32,
    groebner: Vec<Polynomial>,
    bases: Vec<DegreeBasis>,
    index: Vec<BTreeMap<Monomial, usize>>,
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| format!("{}:{}", g.name, g.degree))
            .collect();
        let rels: Vec<String> = self.relations.iter().map(|r| self.format(r)).collect();
        write!(f, "Z2[{}]/<{}>", gens.join(", "), rels.join(", "))
    }
}

impl Presentation {
    pub fn new(
        generators: Vec<Generator>,
        relations: Vec<Polynomial>,
        degree_bound: u32,
    ) -> Result<Self, RingError> {
        let mut names = BTreeSet::new();
        for g in &generators {
            if g.degree == 0 {
                return Err(RingError::InvalidPresentation(format!(
                    "generator `{}` has degree 0",
                    g.name
                )));
            }
            if !is_identifier(&g.name) {
                return Err(RingError::InvalidPresentation(format!(
                    "`{}` is not a valid generator name",
                    g.name
                )));
            }
            if !names.insert(g.name.clone()) {
                return Err(RingError::InvalidPresentation(format!(
                    "duplicate generator `{}`",
                    g.name
                )));
            }
        }
        let weights: Vec<u32> = generators.iter().map(|g| g.degree).collect();
        let nvars = generators.len();
        let mut kept = Vec::new();
        for r in relations {
            if r.terms().any(|m| m.0.len() != nvars) {
                return Err(RingError::InvalidPresentation(
                    "relation uses the wrong number of variables".into(),
                ));
            }
            match r.homogeneous_degree(&weights)? {
                None => continue,
                Some(0) => {
                    return Err(RingError::InvalidPresentation(
                        "a nonzero constant relation collapses the ring".into(),
                    ))
                }
                Some(d) if d > degree_bound => {
                    return Err(RingError::InvalidPresentation(format!(
                        "relation of degree {d} exceeds degree bound {degree_bound}"
                    )))
                }
                Some(_) => kept.push(r),
            }
        }
        let groebner = truncated_groebner(&kept, &weights, degree_bound);
        let mut p = Presentation {
            generators,
            weights,
            relations: kept,
            degree_bound,
            groebner,
            bases: Vec::new(),
            index: Vec::new(),
        };
        p.build_bases();
        Ok(p)
    }

    /// Convenience constructor from `(name, degree)` pairs and relation strings.
    pub fn parse(
        generators: &[(&str, u32)],
        relations: &[&str],
        degree_bound: u32,
    ) -> Result<Self, RingError> {
        let gens: Vec<Generator> = generators
            .iter()
            .map(|(n, d)| Generator::new(*n, *d))
            .collect();
        let shell = Presentation::new(gens.clone(), Vec::new(), degree_bound)?;
        let rels = relations
            .iter()
            .map(|r| shell.parse_polynomial(r))
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::new(gens, rels, degree_bound)
    }

    /// Same generators and relations with another degree bound.
    pub fn with_degree_bound(&self, degree_bound: u32) -> Result<Self, RingError> {
        Presentation::new(self.generators.clone(), self.relations.clone(), degree_bound)
    }

    fn build_bases(&mut self) {
        let leads: Vec<Monomial> = self
            .groebner
            .iter()
            .filter_map(|g| g.leading().cloned())
            .collect();
        let nvars = self.generators.len();
        for d in 0..=self.degree_bound {
            let mut monos = Vec::new();
            enumerate_monomials(&self.weights, d, &mut vec![0; nvars], 0, &mut monos);
            let mut standard: Vec<Monomial> = monos
                .into_iter()
                .filter(|m| !leads.iter().any(|l| l.divides(m)))
                .collect();
            standard.sort_unstable_by(|a, b| b.cmp(a));
            let index = standard
                .iter()
                .enumerate()
                .map(|(i, m)| (m.clone(), i))
                .collect();
            self.bases.push(DegreeBasis {
                degree: d,
                monomials: standard,
            });
            self.index.push(index);
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.generators.len()
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn groebner_basis(&self) -> &[Polynomial] {
        &self.groebner
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn generator(&self, name: &str) -> Option<Polynomial> {
        self.generator_index(name)
            .map(|i| Polynomial::from_monomial(Monomial::var(self.nvars(), i, 1)))
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::one(self.nvars())
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.weighted_degree(&self.weights)
    }

    pub fn degree(&self, p: &Polynomial) -> Result<Option<u32>, RingError> {
        p.homogeneous_degree(&self.weights)
    }

    fn check_degree(&self, p: &Polynomial) -> Result<(), RingError> {
        let d = p.max_degree(&self.weights);
        if d > self.degree_bound {
            return Err(RingError::DegreeOverflow {
                degree: d,
                bound: self.degree_bound,
            });
        }
        Ok(())
    }

    /// Unique reduced representative of `p` modulo the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, RingError> {
        self.check_degree(p)?;
        Ok(reduce(p, &self.groebner))
    }

    pub fn mul(&self, a: &Polynomial, b: &Polynomial) -> Result<Polynomial, RingError> {
        let da = a.max_degree(&self.weights);
        let db = b.max_degree(&self.weights);
        if !a.is_zero() && !b.is_zero() && da + db > self.degree_bound {
            return Err(RingError::DegreeOverflow {
                degree: da + db,
                bound: self.degree_bound,
            });
        }
        Ok(reduce(&a.mul_free(b), &self.groebner))
    }

    pub fn pow(&self, a: &Polynomial, e: u32) -> Result<Polynomial, RingError> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a)?;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    pub fn basis(&self, degree: u32) -> Result<&DegreeBasis, RingError> {
        self.bases
            .get(degree as usize)
            .ok_or(RingError::DegreeOverflow {
                degree,
                bound: self.degree_bound,
            })
    }

    pub fn rank_in_degree(&self, degree: u32) -> Result<usize, RingError> {
        Ok(self.basis(degree)?.len())
    }

    /// Coordinates of the degree-`degree` part of `p` (reduced first) in
    /// `basis(degree)`. Terms of other degrees must be absent.
    pub fn coordinates(&self, p: &Polynomial, degree: u32) -> Result<F2Vector, RingError> {
        let nf = self.normal_form(p)?;
        let idx = &self.index[degree as usize];
        let mut v = F2Vector::zeros(idx.len());
        for m in nf.terms() {
            match idx.get(m) {
                Some(&i) => v.flip(i),
                None => {
                    return Err(RingError::Inhomogeneous(format!(
                        "{} has a term outside degree {degree}",
                        self.format(p)
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn from_coordinates(&self, degree: u32, v: &F2Vector) -> Polynomial {
        let basis = &self.bases[degree as usize];
        Polynomial::from_monomials(v.support().into_iter().map(|i| basis.monomials[i].clone()))
    }

    /// Ranks in degrees `0..=degree_bound`.
    pub fn poincare_series(&self) -> Vec<usize> {
        self.bases.iter().map(DegreeBasis::len).collect()
    }

    // Every monomial above the bound factors through a monomial in the last
    // max-generator-degree degrees, so a zero window means zero beyond it.
    fn finite_series(&self) -> Result<Vec<usize>, RingError> {
        let series = self.poincare_series();
        let window = self.weights.iter().copied().max().unwrap_or(1);
        let lo = (self.degree_bound + 1).saturating_sub(window);
        for d in lo..=self.degree_bound {
            let r = series[d as usize];
            if r != 0 {
                return Err(RingError::NotFiniteDimensional {
                    bound: self.degree_bound,
                    degree: d,
                    rank: r,
                });
            }
        }
        Ok(series)
    }

    pub fn total_rank(&self) -> Result<usize, RingError> {
        Ok(self.finite_series()?.iter().sum())
    }

    pub fn formal_dimension(&self) -> Result<u32, RingError> {
        let series = self.finite_series()?;
        Ok(series.iter().rposition(|&r| r > 0).unwrap_or(0) as u32)
    }

    /// Mod-2 Poincaré duality: top class of rank one and every cup-product
    /// pairing into it nondegenerate.
    pub fn check_poincare_duality(&self) -> Result<bool, RingError> {
        let top = self.formal_dimension()?;
        let top_basis = self.basis(top)?;
        if top_basis.len() != 1 {
            return Ok(false);
        }
        let top_monomial = &top_basis.monomials[0];
        for i in 0..=top {
            let left = &self.basis(i)?.monomials;
            let right = &self.basis(top - i)?.monomials;
            if left.len() != right.len() {
                return Ok(false);
            }
            let mut pairing = F2Matrix::zeros(left.len(), right.len());
            for (r, u) in left.iter().enumerate() {
                for (c, v) in right.iter().enumerate() {
                    let prod = reduce(&Polynomial::from_monomial(u.mul(v)), &self.groebner);
                    pairing.set(r, c, prod.contains(top_monomial));
                }
            }
            if rank(&pairing) != left.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        format_monomial(m, &self.generators)
    }

    pub fn format(&self, p: &Polynomial) -> String {
        format_polynomial(p, &self.generators)
    }

    pub fn parse_polynomial(&self, s: &str) -> Result<Polynomial, RingError> {
        parse_polynomial(s, &self.generators)
    }

    pub fn parse_monomial(&self, s: &str) -> Result<Monomial, RingError> {
        let p = self.parse_polynomial(s)?;
        if p.len() != 1 {
            return Err(RingError::Parse {
                input: s.into(),
                reason: "expected a single monomial".into(),
            });
        }
        Ok(p.leading().cloned().expect("one term"))
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            generators: self.generators.clone(),
            relations: self
                .relations
                .iter()
                .map(|r| r.terms().rev().map(|m| self.format_monomial(m)).collect())
                .collect(),
            degree_bound: self.degree_bound,
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self, RingError> {
        let shell = Presentation::new(json.generators.clone(), Vec::new(), json.degree_bound)?;
        let mut rels = Vec::new();
        for terms in &json.relations {
            let mut p = Polynomial::zero();
            for t in terms {
                p.add_assign(&shell.parse_polynomial(t)?);
            }
            rels.push(p);
        }
        Presentation::new(json.generators.clone(), rels, json.degree_bound)
    }
}

/// Serialized form of a presentation; each relation is a list of monomial
/// strings whose sum is zero in the ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub generators: Vec<Generator>,
    pub relations: Vec<Vec<String>>,
    pub degree_bound: u32,
}

fn enumerate_monomials(
    weights: &[u32],
    remaining: u32,
    current: &mut Vec<u32>,
    var: usize,
    out: &mut Vec<Monomial>,
) {
    if var == weights.len() {
        if remaining == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    let w = weights[var];
    let mut e = 0;
    while e * w <= remaining {
        current[var] = e;
        enumerate_monomials(weights, remaining - e * w, current, var + 1, out);
        e += 1;
    }
    current[var] = 0;
}

/// All monomials of the given weighted degree, descending.
pub fn monomials_of_degree(weights: &[u32], degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    enumerate_monomials(weights, degree, &mut vec![0; weights.len()], 0, &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Full reduction of `p` by `basis` (leading terms are the largest terms).
pub(crate) fn reduce(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let mut work = p.clone();
    let mut done = Polynomial::zero();
    while let Some(top) = work.terms.last().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.leading().is_some_and(|l| l.divides(&top)));
        match divisor {
            Some(g) => {
                let factor = g.leading().expect("nonzero").quotient_into(&top);
                work.add_assign(&g.mul_monomial(&factor));
            }
            None => {
                work.terms.remove(&top);
                done.terms.insert(top);
            }
        }
    }
    done
}

fn truncated_groebner(relations: &[Polynomial], weights: &[u32], bound: u32) -> Vec<Polynomial> {
    let mut basis: Vec<Polynomial> = Vec::new();
    for r in relations {
        let red = reduce(r, &basis);
        if !red.is_zero() {
            basis.push(red);
        }
    }
    let mut pairs: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let pair_degree = |a: &Polynomial, b: &Polynomial| {
        a.leading()
            .expect("nonzero")
            .lcm(b.leading().expect("nonzero"))
            .weighted_degree(weights)
    };
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((pair_degree(&basis[i], &basis[j]), i, j));
        }
    }
    while let Some((deg, i, j)) = pairs.pop_first() {
        if deg > bound {
            continue;
        }
        let (li, lj) = (
            basis[i].leading().expect("nonzero").clone(),
            basis[j].leading().expect("nonzero").clone(),
        );
        if li.coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let s = basis[i]
            .mul_monomial(&li.quotient_into(&l))
            .add(&basis[j].mul_monomial(&lj.quotient_into(&l)));
        let red = reduce(&s, &basis);
        if red.is_zero() {
            continue;
        }
        let k = basis.len();
        basis.push(red);
        for i in 0..k {
            pairs.insert((pair_degree(&basis[i], &basis[k]), i, k));
        }
    }
    // minimal, then interreduced
    let mut minimal: Vec<Polynomial> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let lg = g.leading().expect("nonzero");
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let lh = h.leading().expect("nonzero");
            j != i && lh.divides(lg) && (lh != lg || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let lead = minimal[i].leading().expect("nonzero").clone();
        let mut tail = minimal[i].clone();
        tail.terms.remove(&lead);
        let mut g = reduce(&tail, &others);
        g.terms.insert(lead);
        reduced.push(g);
    }
    reduced.sort_by(|a, b| a.leading().cmp(&b.leading()));
    reduced
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn format_monomial(m: &Monomial, gens: &[Generator]) -> String {
    if m.is_one() {
        return "1".into();
    }
    m.0.iter()
        .zip(gens)
        .filter(|(e, _)| **e > 0)
        .map(|(e, g)| {
            if *e == 1 {
                g.name.clone()
            } else {
                format!("{}^{}", g.name, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub fn format_polynomial(p: &Polynomial, gens: &[Generator]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms()
        .rev()
        .map(|m| format_monomial(m, gens))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Parses sums of products like `a^2*b + c + 1` over the given generators.
/// Parenthesised sums may be raised to powers: `(a + b)^3`.
pub fn parse_polynomial(s: &str, gens: &[Generator]) -> Result<Polynomial, RingError> {
    let mut parser = Parser {
        input: s,
        chars: s.char_indices().peekable(),
        gens,
    };
    let p = parser.sum()?;
    parser.skip_ws();
    if let Some(&(i, c)) = parser.chars.peek() {
        return Err(parser.err(format!("unexpected `{c}` at offset {i}")));
    }
    Ok(p)
}

struct Parser<'a> {
    input: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    gens: &'a [Generator],
}

impl Parser<'_> {
    fn err(&self, reason: String) -> RingError {
        RingError::Parse {
            input: self.input.to_string(),
            reason,
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn sum(&mut self) -> Result<Polynomial, RingError> {
        let mut acc = self.product()?;
        while self.peek() == Some('+') {
            self.chars.next();
            acc.add_assign(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Polynomial, RingError> {
        let mut acc = self.power()?;
        while self.peek() == Some('*') {
            self.chars.next();
            acc = acc.mul_free(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, RingError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.chars.next();
            let e = self.integer()?;
            let mut acc = Polynomial::one(self.gens.len());
            for _ in 0..e {
                acc = acc.mul_free(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u32, RingError> {
        self.skip_ws();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.chars.next();
            } else {
                break;
            }
        }
        digits
            .parse()
            .map_err(|_| self.err("expected a nonnegative integer".into()))
    }

    fn atom(&mut self) -> Result<Polynomial, RingError> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let inner = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing `)`".into()));
                }
                self.chars.next();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => match self.integer()? % 2 {
                0 => Ok(Polynomial::zero()),
                _ => Ok(Polynomial::one(self.gens.len())),
            },
            Some(c) if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let i = self
                    .gens
                    .iter()
                    .position(|g| g.name == name)
                    .ok_or_else(|| self.err(format!("unknown generator `{name}`")))?;
                Ok(Polynomial::from_monomial(Monomial::var(self.gens.len(), i, 1)))
            }
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input".into())),
        }
    }
}
