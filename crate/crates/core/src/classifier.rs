//! Candidate fixed-point rings, orbit-space presentations and Borsuk–Ulam
//! bounds.
//!
//! Fixed-point candidates come in two flavours: the closed families
//! ([`theorem_families_fixed`]) and a brute-force search over two-generator
//! quotients ([`enumerate_fixed_candidates`]). Both are compared up to a small
//! substitution group through [`canonical_key`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivariant::{ActionKind, Field, InvolutionAction};
use crate::f2linalg::{F2Vector, Span};
use crate::graded_ring::{monomials_of_degree, Generator, Monomial, Polynomial, Presentation, RingError};
use crate::spectral::{volovikov_index, DifferentialSpec, Page, SpectralError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifierError {
    #[error("inadmissible case: {0}")]
    InadmissibleCase(String),
    #[error("search space too large: more than {limit} nodes visited")]
    SearchSpaceTooLarge { limit: usize },
    #[error("presentation has no degree-one generator")]
    NoDegreeOneClass,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Node budget of [`enumerate_fixed_candidates`].
pub const SEARCH_LIMIT: usize = 1_000_000;

fn mono(exps: &[u32]) -> Polynomial {
    Polynomial::from_monomial(Monomial(exps.to_vec()))
}

fn sum(terms: &[Polynomial]) -> Polynomial {
    terms.iter().fold(Polynomial::zero(), |acc, t| acc.add(t))
}

fn name_of(degree: u32) -> &'static str {
    if degree == 1 {
        "R"
    } else {
        "C"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FixedFamily {
    /// `FP^n × S^q`
    ProductWithSphere,
    /// `FP^{n+1} # FP^{n+1}`
    ConnectedSum,
    /// `c^{n+1} = d² + c^q = d^{2L+2} = 0`, `deg c = 2`, `q` odd
    OddSquareRoot,
    /// `c^{r+1} = c^r + d^{r/q} = cd = 0`, `deg c = 1`
    SplitTop,
    /// `c^{r+1} = c^{qj} + d^j = c^{r-qj+1} d = 0`, `deg c = 1`
    MixedTop,
}

#[derive(Clone, Debug)]
pub struct FixedCandidate {
    pub presentation: Presentation,
    pub family: FixedFamily,
    pub parameters: BTreeMap<String, u32>,
    pub description: String,
}

impl FixedCandidate {
    fn new(
        family: FixedFamily,
        degrees: (u32, u32),
        relations: Vec<Polynomial>,
        parameters: &[(&str, u32)],
        description: String,
        bound: u32,
    ) -> Result<Self, RingError> {
        let gens = vec![Generator::new("c", degrees.0), Generator::new("d", degrees.1)];
        Ok(FixedCandidate {
            presentation: Presentation::new(gens, relations, bound)?,
            family,
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            description,
        })
    }

    /// `total_rank = 2(n+1)` and Poincaré duality.
    pub fn satisfies_invariants(&self, n: u32) -> bool {
        matches!(self.presentation.total_rank(), Ok(r) if r == 2 * n as usize + 2)
            && self.presentation.check_poincare_duality().unwrap_or(false)
    }
}

/// Every parameter tuple allowed by the side conditions of the closed
/// families, before checking rank and duality.
pub fn theorem_families_fixed_raw(field: Field, n: u32, m: u32) -> Result<Vec<FixedCandidate>, ClassifierError> {
    let mut out = Vec::new();
    let c_degrees: &[u32] = match field {
        Field::R => &[1],
        Field::C => &[1, 2],
    };
    for &e in c_degrees {
        let f = name_of(e);
        for q in 1..=m {
            let bound = e * n + q + e.max(q) + 1;
            out.push(FixedCandidate::new(
                FixedFamily::ProductWithSphere,
                (e, q),
                vec![mono(&[n + 1, 0]), mono(&[0, 2])],
                &[("deg_c", e), ("q", q)],
                format!("{f}P^{n} x S^{q}"),
                bound,
            )?);
        }
        out.push(FixedCandidate::new(
            FixedFamily::ConnectedSum,
            (e, e),
            vec![
                mono(&[1, 1]),
                mono(&[n + 2, 0]),
                sum(&[mono(&[n + 1, 0]), mono(&[0, n + 1])]),
                mono(&[0, n + 2]),
            ],
            &[("deg_c", e)],
            format!("{f}P^{0} # {f}P^{0}", n + 1),
            e * (n + 3),
        )?);
    }
    if field == Field::C {
        for q in (1..=n.min(m)).filter(|q| q % 2 == 1) {
            let height = n / q;
            let description = if q == 1 {
                format!("RP^{}", 2 * n + 1)
            } else {
                format!("c^{} = d^2 + c^{q} = d^{} = 0", n + 1, 2 * height + 2)
            };
            out.push(FixedCandidate::new(
                FixedFamily::OddSquareRoot,
                (2, q),
                vec![
                    mono(&[n + 1, 0]),
                    sum(&[mono(&[0, 2]), mono(&[q, 0])]),
                    mono(&[0, 2 * height + 2]),
                ],
                &[("q", q), ("height", height)],
                description,
                2 * n + q + 2 * q.max(2) + 2,
            )?);
        }
        for q in 1..=n.min(m) {
            if !(2 * n + 2).is_multiple_of(q + 1) {
                continue;
            }
            let r = q * (2 * n + 2) / (q + 1);
            out.push(FixedCandidate::new(
                FixedFamily::SplitTop,
                (1, q),
                vec![
                    mono(&[r + 1, 0]),
                    sum(&[mono(&[r, 0]), mono(&[0, r / q])]),
                    mono(&[1, 1]),
                ],
                &[("q", q), ("r", r), ("k", (2 * n + 2) / (q + 1))],
                format!("c^{} = c^{r} + d^{} = cd = 0", r + 1, r / q),
                r + q + 2,
            )?);
        }
        for q in (1..n).filter(|&q| q <= m) {
            for j in 2..=(2 * n + 2) {
                if !((n + 1).is_multiple_of(j) || j == 2) {
                    continue;
                }
                let r = ((2 * n + 2) / j + q * j) as i64 - (q as i64 + 1);
                if r <= (q * j) as i64 || 2 * (n + 1) <= (q + 1) * j {
                    continue;
                }
                let r = r as u32;
                out.push(FixedCandidate::new(
                    FixedFamily::MixedTop,
                    (1, q),
                    vec![
                        mono(&[r + 1, 0]),
                        sum(&[mono(&[q * j, 0]), mono(&[0, j])]),
                        mono(&[r - q * j + 1, 1]),
                    ],
                    &[("q", q), ("j", j), ("r", r)],
                    format!("c^{} = c^{} + d^{j} = c^{}d = 0", r + 1, q * j, r - q * j + 1),
                    r + q + 2,
                )?);
            }
        }
    }
    Ok(out)
}

/// The closed families, keeping candidates with rank `2(n+1)` and duality,
/// deduplicated by [`canonical_key`].
pub fn theorem_families_fixed(field: Field, n: u32, m: u32) -> Result<Vec<FixedCandidate>, ClassifierError> {
    if n < 1 || m < 1 {
        return Ok(Vec::new());
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for cand in theorem_families_fixed_raw(field, n, m)? {
        if cand.satisfies_invariants(n) && seen.insert(canonical_key(&cand.presentation)?) {
            out.push(cand);
        }
    }
    Ok(out)
}

fn substitute(p: &Polynomial, images: &[Polynomial]) -> Polynomial {
    let nvars = images.len();
    let mut out = Polynomial::zero();
    for m in p.terms() {
        let mut term = Polynomial::one(nvars);
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                term = term.mul_free(&images[i]);
            }
        }
        out.add_assign(&term);
    }
    out
}

/// Generator substitutions used for deduplication: `GL₂(F₂)` on two
/// generators of equal degree, `d ↦ d + c^k` when `deg d = k·deg c`.
fn substitutions(degrees: &[u32]) -> Vec<Vec<Polynomial>> {
    let var = |i: usize, e: u32| {
        let mut v = vec![0; degrees.len()];
        v[i] = e;
        mono(&v)
    };
    let mut out = Vec::new();
    match degrees {
        [e1, e2] if e1 == e2 => {
            for bits in 0u8..16 {
                let (a, b, c, d) = (bits & 1, bits >> 1 & 1, bits >> 2 & 1, bits >> 3 & 1);
                if (a & d) ^ (b & c) == 0 {
                    continue;
                }
                let pick = |x: u8, y: u8| {
                    let mut p = Polynomial::zero();
                    if x == 1 {
                        p.add_assign(&var(0, 1));
                    }
                    if y == 1 {
                        p.add_assign(&var(1, 1));
                    }
                    p
                };
                out.push(vec![pick(a, b), pick(c, d)]);
            }
        }
        [e1, e2] => {
            out.push(vec![var(0, 1), var(1, 1)]);
            if e2 % e1 == 0 {
                out.push(vec![var(0, 1), var(1, 1).add(&var(0, e2 / e1))]);
            }
        }
        _ => out.push((0..degrees.len()).map(|i| var(i, 1)).collect()),
    }
    out
}

/// Drops generators that some relation writes as a polynomial in the others.
fn eliminate_redundant(mut weights: Vec<u32>, mut relations: Vec<Polynomial>) -> (Vec<u32>, Vec<Polynomial>) {
    loop {
        let nv = weights.len();
        let found = relations.iter().find_map(|r| {
            (0..nv).find_map(|i| {
                let x = Monomial::var(nv, i, 1);
                let alone = r.contains(&x)
                    && r.terms().filter(|m| m.exponents()[i] > 0).count() == 1;
                alone.then(|| (i, r.add(&Polynomial::from_monomial(x))))
            })
        });
        let Some((i, rest)) = found else {
            return (weights, relations);
        };
        let images: Vec<Polynomial> = (0..nv)
            .map(|j| if j == i { rest.clone() } else { Polynomial::from_monomial(Monomial::var(nv, j, 1)) })
            .collect();
        relations = relations
            .iter()
            .map(|r| substitute(r, &images))
            .filter(|r| !r.is_zero())
            .map(|r| {
                Polynomial::from_monomials(r.terms().map(|m| {
                    let mut e = m.exponents().to_vec();
                    e.remove(i);
                    Monomial(e)
                }))
            })
            .collect();
        weights.remove(i);
    }
}

/// A string invariant under the substitution group: generators sorted by
/// degree and renamed, then the least reduced Gröbner basis over all
/// substitutions.
pub fn canonical_key(p: &Presentation) -> Result<String, RingError> {
    let (weights, relations) = eliminate_redundant(p.weights().to_vec(), p.relations().to_vec());
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| (weights[i], i));
    let degrees: Vec<u32> = order.iter().map(|&i| weights[i]).collect();
    let permute = |r: &Polynomial| {
        Polynomial::from_monomials(
            r.terms()
                .map(|m| Monomial(order.iter().map(|&i| m.exponents()[i]).collect())),
        )
    };
    let relations: Vec<Polynomial> = relations.iter().map(permute).collect();
    let names = ["c", "d", "e", "f", "g", "h"];
    let gens: Vec<Generator> = degrees
        .iter()
        .enumerate()
        .map(|(i, &d)| Generator::new(names.get(i).copied().unwrap_or("z"), d))
        .collect();
    let mut best: Option<String> = None;
    for images in substitutions(&degrees) {
        let rels = relations.iter().map(|r| substitute(r, &images)).collect();
        let q = Presentation::new(gens.clone(), rels, p.degree_bound())?;
        let gb: Vec<String> = q.groebner_basis().iter().map(|g| q.format(g)).collect();
        let key = format!("{degrees:?} {}", gb.join(", "));
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    Ok(best.expect("at least the identity substitution"))
}

/// All RREF bases of `s`-dimensional subspaces of `F₂^k`, rows as bitmasks.
fn subspaces(k: usize, s: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut pivots = Vec::new();
    fn choose(start: usize, k: usize, s: usize, pivots: &mut Vec<usize>, out: &mut Vec<Vec<u64>>) {
        if pivots.len() == s {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(row, &p)| {
                    (p + 1..k)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (row, c))
                })
                .collect();
            for bits in 0u64..(1u64 << free.len()) {
                let mut rows: Vec<u64> = pivots.iter().map(|&p| 1u64 << p).collect();
                for (i, &(row, c)) in free.iter().enumerate() {
                    if bits >> i & 1 == 1 {
                        rows[row] |= 1 << c;
                    }
                }
                out.push(rows);
            }
            return;
        }
        for p in start..k {
            pivots.push(p);
            choose(p + 1, k, s, pivots, out);
            pivots.pop();
        }
    }
    choose(0, k, s, &mut pivots, &mut out);
    out
}

struct Search {
    weights: Vec<u32>,
    target_rank: usize,
    max_rel_degree: u32,
    bound: u32,
    visited: usize,
    leaves: Vec<Vec<Polynomial>>,
}

impl Search {
    fn run(&mut self, degree: u32, relations: &mut Vec<Polynomial>, rank: usize) -> Result<(), ClassifierError> {
        self.visited += 1;
        if self.visited > SEARCH_LIMIT {
            return Err(ClassifierError::SearchSpaceTooLarge { limit: SEARCH_LIMIT });
        }
        if degree > self.max_rel_degree {
            self.leaves.push(relations.clone());
            return Ok(());
        }
        let monos = monomials_of_degree(&self.weights, degree);
        let pos: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut span = Span::new(monos.len());
        for r in relations.iter() {
            let rd = r.homogeneous_degree(&self.weights)?.expect("nonzero relation");
            for mult in monomials_of_degree(&self.weights, degree - rd) {
                let prod = r.mul_monomial(&mult);
                let support: Vec<usize> = prod.terms().map(|m| pos[m]).collect();
                span.insert(&F2Vector::from_support(monos.len(), &support));
            }
        }
        let generated = span.dim();
        let mut complement = Vec::new();
        for (i, m) in monos.iter().enumerate() {
            let is_generator = m.exponents().iter().sum::<u32>() == 1;
            if !is_generator && span.insert(&F2Vector::unit(monos.len(), i)) {
                complement.push(m.clone());
            }
        }
        let free = monos.len() - generated;
        let budget = self.target_rank - rank;
        let k = complement.len();
        let min_s = free.saturating_sub(budget);
        for s in min_s..=k {
            for rows in subspaces(k, s) {
                let new: Vec<Polynomial> = rows
                    .iter()
                    .map(|&bits| {
                        Polynomial::from_monomials(
                            (0..k).filter(|i| bits >> i & 1 == 1).map(|i| complement[i].clone()),
                        )
                    })
                    .collect();
                let before = relations.len();
                relations.extend(new);
                self.run(degree + 1, relations, rank + free - s)?;
                relations.truncate(before);
            }
        }
        Ok(())
    }
}

fn real_projective_class(p: &Presentation, n: u32) -> bool {
    let Ok(basis) = p.basis(1) else { return false };
    let k = basis.len();
    (1u32..(1 << k)).any(|bits| {
        let w = Polynomial::from_monomials(
            (0..k)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| basis.monomials[i].clone()),
        );
        let wn = p.pow(&w, n);
        let wn1 = p.pow(&w, n + 1);
        matches!((wn, wn1), (Ok(a), Ok(b)) if !a.is_zero() && b.is_zero())
    })
}

/// Brute-force search over graded quotients with at most two generators of
/// degree `≤ min(max_gen_degree, max(l, m))` and relations of degree
/// `≤ max_rel_degree`, keeping rank `2(n+1)`, Poincaré duality and, for
/// `F = R`, a degree-one class `w` with `w^n ≠ 0 = w^{n+1}`. Output is
/// deduplicated by [`canonical_key`] and sorted by it.
pub fn enumerate_fixed_candidates(
    field: Field,
    n: u32,
    m: u32,
    max_gen_degree: u32,
    max_rel_degree: u32,
) -> Result<Vec<Presentation>, ClassifierError> {
    let cap = max_gen_degree.min(field.l().max(m));
    let target = 2 * n as usize + 2;
    let mut degree_sets: Vec<Vec<u32>> = (1..=cap).map(|e| vec![e]).collect();
    for e1 in 1..=cap {
        for e2 in e1..=cap {
            degree_sets.push(vec![e1, e2]);
        }
    }
    let bound = (target as u32 + 1) * cap.max(1);
    let mut found: BTreeMap<String, Presentation> = BTreeMap::new();
    let mut visited = 0;
    for weights in degree_sets {
        let mut search = Search {
            weights: weights.clone(),
            target_rank: target,
            max_rel_degree,
            bound,
            visited,
            leaves: Vec::new(),
        };
        search.run(1, &mut Vec::new(), 0)?;
        visited = search.visited;
        let names = ["c", "d"];
        let gens: Vec<Generator> = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Generator::new(names[i], w))
            .collect();
        for rels in search.leaves {
            let p = Presentation::new(gens.clone(), rels, search.bound)?;
            if !matches!(p.total_rank(), Ok(r) if r == target) {
                continue;
            }
            if !p.check_poincare_duality()? {
                continue;
            }
            if field == Field::R && !real_projective_class(&p, n) {
                continue;
            }
            found.entry(canonical_key(&p)?).or_insert(p);
        }
    }
    Ok(found.into_values().collect())
}

/// The differential/action patterns with a closed orbit-ring presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitClause {
    /// swap action `g(a) = a + b`
    Swap,
    /// shift action `g(b) = a^{m/l} + b`
    Shift,
    /// trivial action, `d_{l+1}(a) ≠ 0`, `d(b) = 0`
    BaseDifferential,
    /// trivial action, `d_{l+1}(a) = d_{l+1}(b) ≠ 0`
    BothDifferentials,
    /// trivial action, `d(a) = 0`, `d_{m+1}(b) ≠ 0`
    SphereDifferential,
}

impl fmt::Display for OrbitClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitClause::Swap => "swap",
            OrbitClause::Shift => "shift",
            OrbitClause::BaseDifferential => "base-differential",
            OrbitClause::BothDifferentials => "both-differentials",
            OrbitClause::SphereDifferential => "sphere-differential",
        })
    }
}

impl OrbitClause {
    pub const ALL: [OrbitClause; 5] = [
        OrbitClause::Swap,
        OrbitClause::Shift,
        OrbitClause::BaseDifferential,
        OrbitClause::BothDifferentials,
        OrbitClause::SphereDifferential,
    ];

    /// Clause selected by an action and the generators carrying a nonzero
    /// differential.
    pub fn from_pattern(action: ActionKind, d_a: bool, d_b: bool) -> Option<Self> {
        match (action, d_a, d_b) {
            (ActionKind::Swap, _, _) => Some(OrbitClause::Swap),
            (ActionKind::Shift, _, _) => Some(OrbitClause::Shift),
            (ActionKind::Identity, true, false) => Some(OrbitClause::BaseDifferential),
            (ActionKind::Identity, true, true) => Some(OrbitClause::BothDifferentials),
            (ActionKind::Identity, false, true) => Some(OrbitClause::SphereDifferential),
            (ActionKind::Identity, false, false) => None,
        }
    }

    /// Number of free coefficients `a_i` of the clause.
    pub fn coefficient_count(self, field: Field, n: u32, m: u32) -> usize {
        let l = field.l();
        match self {
            OrbitClause::Swap => 3,
            OrbitClause::Shift => 1 + shift_pairs(l, n, m).len(),
            OrbitClause::BaseDifferential => 5,
            OrbitClause::BothDifferentials => 2,
            OrbitClause::SphereDifferential => sphere_terms(l, n, m).len(),
        }
    }

    /// Admissibility of the clause for `(field, n, m)`.
    pub fn check(self, field: Field, n: u32, m: u32) -> Result<(), ClassifierError> {
        let l = field.l();
        let fail = |why: String| Err(ClassifierError::InadmissibleCase(format!("{self}: {why}")));
        if n < 1 || m < 1 {
            return fail(format!("n = {n}, m = {m} must be positive"));
        }
        match self {
            OrbitClause::Swap if !(m == l && l < l * n && n % 2 == 1) => {
                fail(format!("needs m = l < ln and n odd (l = {l}, n = {n}, m = {m})"))
            }
            OrbitClause::Shift
                if !(l < m && m < l * n && l * n < 2 * m && m.is_multiple_of(2 * l) && n % 2 == 1) =>
            {
                fail(format!(
                    "needs l < m < ln < 2m, m = 0 mod 2l, n odd (l = {l}, n = {n}, m = {m})"
                ))
            }
            OrbitClause::BaseDifferential if n.is_multiple_of(2) => fail(format!("needs n odd, got {n}")),
            OrbitClause::BothDifferentials if !(m == l && n.is_multiple_of(2)) => {
                fail(format!("needs m = l and n even (l = {l}, n = {n}, m = {m})"))
            }
            _ => Ok(()),
        }
    }
}

/// The differential pattern that selects the clause: `d(a²) = d(ab)` for
/// the swap, `d_{l+1}(a)` and/or `d_{l+1}(b)`, or `d_{m+1}(b)`.
pub fn clause_differentials(
    clause: OrbitClause,
    field: Field,
    fiber: &Presentation,
) -> Result<DifferentialSpec, ClassifierError> {
    let l = field.l();
    let m = fiber.weights()[1];
    let mut spec = DifferentialSpec::new();
    let lines: Vec<(u32, &str)> = match clause {
        OrbitClause::Swap => vec![(2 * l + 1, "a^2"), (2 * l + 1, "a*b")],
        OrbitClause::Shift | OrbitClause::BaseDifferential => vec![(l + 1, "a")],
        OrbitClause::BothDifferentials => vec![(l + 1, "a"), (l + 1, "b")],
        OrbitClause::SphereDifferential => vec![(m + 1, "b")],
    };
    for (r, lhs) in lines {
        spec.assign(fiber, r, lhs, &format!("t^{r}"))?;
    }
    Ok(spec)
}

/// `(k, i, d, q)` for the stated `w_k w_{k+i}` relations.
fn shift_pairs(l: u32, n: u32, m: u32) -> Vec<(u32, u32, u32, i64)> {
    if !(l * n > m && (l * n - m + l).is_multiple_of(l)) {
        return Vec::new();
    }
    let kmax = (l * n - m + l) / l;
    let imax = (l * n - m) / l;
    let qmax = (l as i64 * n as i64 - m as i64 - 2 * l as i64) / l as i64;
    let mut out = Vec::new();
    for k in 1..=kmax {
        for i in 0..=imax {
            if k + i > kmax {
                continue;
            }
            let d = i % 2;
            let q = 2 * k as i64 + i as i64 - 3 - d as i64;
            if q >= -1 && q <= qmax && q.rem_euclid(2) == 1 {
                out.push((k, i, d, q));
            }
        }
    }
    out
}

fn sphere_terms(l: u32, n: u32, m: u32) -> Vec<u32> {
    (1..=(l * (n + 1)).min(m)).filter(|i| i % l == 0).collect()
}

#[derive(Clone, Debug)]
pub struct OrbitCandidate {
    pub presentation: Presentation,
    pub clause: OrbitClause,
    /// Coefficients after forced zeros.
    pub coefficients: Vec<bool>,
    /// Indices of coefficients forced to zero by the clause's side conditions.
    pub forced_zero: Vec<usize>,
}

/// Exponent `num / den` when it is a nonnegative integer.
fn exact(num: i64, den: i64) -> Option<u32> {
    (num >= 0 && num % den == 0).then(|| (num / den) as u32)
}

/// The clause's presentation with the given coefficients. Coefficients the
/// clause forces to zero are zeroed and listed in `forced_zero`.
pub fn theorem_families_orbit(
    field: Field,
    n: u32,
    m: u32,
    clause: OrbitClause,
    coefficients: &[bool],
    degree_bound: u32,
) -> Result<OrbitCandidate, ClassifierError> {
    clause.check(field, n, m)?;
    let expected = clause.coefficient_count(field, n, m);
    if coefficients.len() != expected {
        return Err(ClassifierError::CoefficientCount {
            expected,
            got: coefficients.len(),
        });
    }
    let l = field.l();
    let (li, ni, mi) = (l as i64, n as i64, m as i64);
    let mut a = coefficients.to_vec();
    let mut forced = Vec::new();
    let mut force = |a: &mut Vec<bool>, i: usize, cond: bool| {
        if cond {
            if !forced.contains(&i) {
                forced.push(i);
            }
            a[i] = false;
        }
    };
    let term = |on: bool, exps: &[u32]| if on { mono(exps) } else { Polynomial::zero() };
    let (gens, rels): (Vec<Generator>, Vec<Polynomial>) = match clause {
        OrbitClause::Swap => {
            let gens = vec![Generator::new("x", 1), Generator::new("y", l), Generator::new("z", 2 * l)];
            let rels = vec![
                mono(&[2 * l + 1, 0, 0]),
                sum(&[mono(&[0, 2, 0]), term(a[0], &[0, 0, 1]), term(a[1], &[2 * l, 0, 0])]),
                sum(&[
                    mono(&[0, 0, n.div_ceil(2)]),
                    term(a[2], &[2 * l, 0, (n - 1) / 2]),
                ]),
                mono(&[1, 1, 0]),
            ];
            (gens, rels)
        }
        OrbitClause::Shift => {
            let kmax = (l * n - m + l) / l;
            let mut gens = vec![
                Generator::new("x", 1),
                Generator::new("y", 2 * l),
                Generator::new("z", l * n + l),
            ];
            for k in 1..=kmax {
                gens.push(Generator::new(format!("w{k}"), m + l * (k - 1)));
            }
            let nv = gens.len();
            let var = |i: usize, e: u32| {
                let mut v = vec![0; nv];
                v[i] = e;
                v
            };
            let mut rels = vec![
                mono(&var(0, l + 1)),
                sum(&[mono(&var(1, m / (2 * l))), term(a[0], &var(3, 1))]),
                mono(&var(2, 2)),
            ];
            for k in 1..=kmax {
                let mut v = var(0, 1);
                v[2 + k as usize] = 1;
                rels.push(mono(&v));
            }
            for (idx, (k, i, d, q)) in shift_pairs(l, n, m).into_iter().enumerate() {
                let slot = idx + 1;
                force(&mut a, slot, (l * (n + 2) - m) < l * (2 * k + i));
                let yexp = exact(2 * mi - li * ni + li * q, 2 * li);
                force(&mut a, slot, yexp.is_none());
                let mut lhs = vec![0; nv];
                lhs[2 + k as usize] += 1;
                lhs[2 + (k + i) as usize] += 1;
                let mut rhs = vec![0; nv];
                rhs[0] = d * l;
                rhs[1] = yexp.unwrap_or(0);
                rhs[2] = 1;
                rels.push(sum(&[mono(&lhs), term(a[slot], &rhs)]));
            }
            (gens, rels)
        }
        OrbitClause::BaseDifferential => {
            let gens = vec![Generator::new("x", 1), Generator::new("y", 2 * l), Generator::new("z", m)];
            let i = m % l;
            let ip = m % (2 * l);
            force(&mut a, 0, !m.is_multiple_of(2 * l) || m > l * n + l);
            force(&mut a, 1, m.is_multiple_of(2 * l) || m > l * n);
            force(&mut a, 2, m != l * (n + 1));
            force(&mut a, 3, 2 * i > l || (i == 0 && 2 * m > l * (n - 1)));
            force(&mut a, 4, ip > l || m > l * n);
            let e0 = exact(li * (ni + 1) - mi, 2 * li);
            let e1 = exact(li * ni - mi, 2 * li);
            let e3 = exact(mi - i as i64, li);
            let e4 = exact(mi - ip as i64, 2 * li);
            force(&mut a, 0, e0.is_none());
            force(&mut a, 1, e1.is_none());
            force(&mut a, 3, e3.is_none());
            force(&mut a, 4, e4.is_none());
            let rels = vec![
                mono(&[l + 1, 0, 0]),
                sum(&[
                    mono(&[0, n.div_ceil(2), 0]),
                    term(a[0], &[0, e0.unwrap_or(0), 1]),
                    term(a[1], &[l, e1.unwrap_or(0), 1]),
                    term(a[2], &[0, 0, 1]),
                ]),
                sum(&[
                    mono(&[0, 0, 2]),
                    term(a[3], &[2 * i, e3.unwrap_or(0), 0]),
                    term(a[4], &[ip, e4.unwrap_or(0), 1]),
                ]),
            ];
            (gens, rels)
        }
        OrbitClause::BothDifferentials => {
            let gens = vec![Generator::new("x", 1), Generator::new("y", 2 * l), Generator::new("z", m)];
            let rels = vec![
                mono(&[l + 1, 0, 0]),
                mono(&[0, n / 2 + 1, 0]),
                sum(&[mono(&[0, 0, 2]), term(a[0], &[0, 1, 0]), term(a[1], &[l, 0, 1])]),
            ];
            (gens, rels)
        }
        OrbitClause::SphereDifferential => {
            let gens = vec![Generator::new("x", 1), Generator::new("y", l)];
            let mut top = vec![mono(&[0, n + 1])];
            for (idx, i) in sphere_terms(l, n, m).into_iter().enumerate() {
                top.push(term(a[idx], &[i, (l * (n + 1) - i) / l]));
            }
            (gens, vec![mono(&[m + 1, 0]), sum(&top)])
        }
    };
    forced.sort_unstable();
    let max_gen = gens.iter().map(|g| g.degree).max().unwrap_or(1);
    let bound = degree_bound.max(l * n + m + max_gen);
    Ok(OrbitCandidate {
        presentation: Presentation::new(gens, rels, bound)?,
        clause,
        coefficients: a,
        forced_zero: forced,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitVerification {
    pub ok: bool,
    pub first_mismatch: Option<u32>,
    pub presentation_series: Vec<usize>,
    pub page_totals: Vec<usize>,
}

/// Compares the candidate's Poincaré series with `E_∞` totals through the
/// page's truncation degree.
pub fn verify_orbit_presentation(
    candidate: &OrbitCandidate,
    e_inf: &Page,
) -> Result<OrbitVerification, ClassifierError> {
    let n = e_inf.max_total_degree();
    let pres = if candidate.presentation.degree_bound() < n {
        candidate.presentation.with_degree_bound(n)?
    } else {
        candidate.presentation.clone()
    };
    let series: Vec<usize> = pres.poincare_series()[..=n as usize].to_vec();
    let totals = e_inf.total_ranks();
    let first_mismatch = series
        .iter()
        .zip(&totals)
        .position(|(a, b)| a != b)
        .map(|j| j as u32);
    Ok(OrbitVerification {
        ok: first_mismatch.is_none(),
        first_mismatch,
        presentation_series: series,
        page_totals: totals,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexBounds {
    /// Largest `s` with `x^s ≠ 0` for the degree-one generator `x`.
    pub s: u32,
    /// Volovikov index `i(X)`.
    pub volovikov: u32,
    pub coindex_lower: u32,
    pub index_upper: u32,
    pub statements: Vec<String>,
}

/// Height of the characteristic class and the Volovikov index, with the
/// nonexistence statements they certify.
pub fn index_bounds(
    candidate: &OrbitCandidate,
    spec: &DifferentialSpec,
    fiber: &Presentation,
    action: &InvolutionAction,
) -> Result<IndexBounds, ClassifierError> {
    let p = &candidate.presentation;
    let xi = p
        .generators()
        .iter()
        .position(|g| g.degree == 1)
        .ok_or(ClassifierError::NoDegreeOneClass)?;
    let x = Polynomial::from_monomial(Monomial::var(p.nvars(), xi, 1));
    let mut s = 0;
    let mut power = p.one();
    while s < p.degree_bound() {
        let next = p.mul(&power, &x)?;
        if next.is_zero() {
            break;
        }
        power = next;
        s += 1;
    }
    let volovikov = volovikov_index(spec, fiber, action)?;
    let coindex_lower = volovikov - 1;
    let mut statements = vec![format!(
        "no equivariant map S^k -> X for k > {s} (w^{s} != 0, w^{} = 0)",
        s + 1
    )];
    if coindex_lower > 1 {
        statements.push(format!(
            "no equivariant map X -> S^k for 1 <= k < {coindex_lower} (i(X) = {volovikov})"
        ));
    }
    Ok(IndexBounds {
        s,
        volovikov,
        coindex_lower,
        index_upper: s,
        statements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn keys(ps: &[Presentation]) -> BTreeSet<String> {
        ps.iter().map(|p| canonical_key(p).unwrap()).collect()
    }

    #[test]
    fn real_families_n2_m2() {
        let fams = theorem_families_fixed(Field::R, 2, 2).unwrap();
        let names: Vec<&str> = fams.iter().map(|c| c.description.as_str()).collect();
        assert_eq!(names, vec!["RP^2 x S^1", "RP^2 x S^2", "RP^3 # RP^3"]);
    }

    #[test]
    fn complex_families_n1() {
        let fams = theorem_families_fixed(Field::C, 1, 2).unwrap();
        let names: BTreeSet<&str> = fams.iter().map(|c| c.description.as_str()).collect();
        let expected: BTreeSet<&str> = [
            "RP^1 x S^1",
            "RP^1 x S^2",
            "CP^1 x S^2",
            "RP^2 # RP^2",
            "CP^2 # CP^2",
            "RP^3",
        ]
        .into_iter()
        .collect();
        assert_eq!(names, expected);
    }

    #[test]
    fn split_top_q2() {
        // n = 3k - 1 with k = 1
        let fams = theorem_families_fixed(Field::C, 2, 2).unwrap();
        let split = fams
            .iter()
            .find(|c| c.family == FixedFamily::SplitTop && c.parameters["q"] == 2)
            .expect("present");
        let p = &split.presentation;
        assert_eq!(p.formal_dimension().unwrap(), 4);
        assert!(p.check_poincare_duality().unwrap());
    }

    #[test]
    fn canonical_key_identifies_substitutions() {
        let a = Presentation::parse(&[("c", 1), ("d", 1)], &["c*d", "c^3", "c^2 + d^2", "d^3"], 6).unwrap();
        // image under d -> c + d
        let b = Presentation::parse(
            &[("c", 1), ("d", 1)],
            &["c^2 + c*d", "c^3", "d^2", "(c + d)^3"],
            6,
        )
        .unwrap();
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
        let c = Presentation::parse(&[("c", 1), ("d", 2)], &["c^3", "d^2 + c^4"], 8).unwrap();
        let d = Presentation::parse(&[("c", 1), ("d", 2)], &["c^3", "d^2"], 8).unwrap();
        assert_eq!(canonical_key(&c).unwrap(), canonical_key(&d).unwrap());
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        assert_eq!(subspaces(3, 0).len(), 1);
        assert_eq!(subspaces(3, 1).len(), 7);
        assert_eq!(subspaces(3, 2).len(), 7);
        assert_eq!(subspaces(4, 2).len(), 35);
    }

    #[test]
    fn enumeration_n1_contains_the_families() {
        let found = enumerate_fixed_candidates(Field::R, 1, 1, 4, 4).unwrap();
        let fams: Vec<Presentation> = theorem_families_fixed(Field::R, 1, 1)
            .unwrap()
            .into_iter()
            .map(|c| c.presentation)
            .collect();
        assert!(keys(&fams).is_subset(&keys(&found)));
        for p in &found {
            assert_eq!(p.total_rank().unwrap(), 4);
            assert!(p.check_poincare_duality().unwrap());
        }
    }

    #[test]
    fn orbit_presentations() {
        let swap = theorem_families_orbit(Field::R, 3, 1, OrbitClause::Swap, &[false; 3], 6).unwrap();
        assert_eq!(&swap.presentation.poincare_series()[..6], &[1, 2, 2, 2, 1, 0]);

        let count = OrbitClause::SphereDifferential.coefficient_count(Field::C, 2, 3);
        let dold = theorem_families_orbit(Field::C, 2, 3, OrbitClause::SphereDifferential, &vec![false; count], 9)
            .unwrap();
        assert_eq!(dold.presentation.to_string(), "Z2[x:1, y:2]/<x^4, y^3>");

        let both = theorem_families_orbit(Field::R, 2, 1, OrbitClause::BothDifferentials, &[false; 2], 6).unwrap();
        assert_eq!(both.presentation.to_string(), "Z2[x:1, y:2, z:1]/<x^2, y^2, z^2>");

        assert!(matches!(
            theorem_families_orbit(Field::R, 2, 1, OrbitClause::Swap, &[false; 3], 6),
            Err(ClassifierError::InadmissibleCase(_))
        ));
    }

    #[test]
    fn base_differential_forced_zeros() {
        // R, n = 3, m = 1: i = 0, i' = 1
        let c = theorem_families_orbit(Field::R, 3, 1, OrbitClause::BaseDifferential, &[true; 5], 8).unwrap();
        assert_eq!(c.forced_zero, vec![0, 2]);
        assert_eq!(c.coefficients, vec![false, true, false, true, true]);
        // R, n = 3, m = 5: every term forced
        let c = theorem_families_orbit(Field::R, 3, 5, OrbitClause::BaseDifferential, &[true; 5], 10).unwrap();
        assert_eq!(c.forced_zero, vec![0, 1, 2, 3, 4]);
        assert_eq!(&c.presentation.poincare_series()[..9], &[1, 1, 1, 1, 0, 1, 1, 1, 1]);
    }
}
