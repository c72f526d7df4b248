//! Pages of the Borel spectral sequence over `H*(B_G) = Z₂[t]`.
//!
//! `E₂^{p,q}` is `ker τ` in column 0 and `ker τ / im τ` in positive columns,
//! with `τ = 1 + g*` on `H^q` of the fiber. Every page stores, per bidegree,
//! representatives and boundaries as vectors in `E₂^{p,q}` coordinates.
//!
//! Differentials are specified on finitely many fiber classes ("keys") and
//! extended to all of `E_r` by the Leibniz rule with `d_r(t) = 0`. At page `r`
//! the keys are
//! - the norm classes `x·g*(x)` of the generators, which are permanent cocycles,
//! - the left-hand sides assigned at page `r`,
//! - the invariant generators without an assignment at page `r` (value 0),
//! - any further invariant class not reachable as a product of the above
//!   (value 0, reported as a diagnostic).
//!
//! Key products that coincide in the fiber must have equal differentials
//! modulo boundaries; otherwise the specification is rejected.
//!
//! Pages are computed for `p + q ≤ N + 1`. The extra layer only receives
//! differentials, so boundaries there are exact and ranks through `N` are
//! exact as well.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::equivariant::{EquivariantError, InvolutionAction};
use crate::f2linalg::{kernel_basis, subquotient_basis, F2Matrix, F2Vector, LinalgError, Span};
use crate::graded_ring::{self, Generator, Monomial, Polynomial, Presentation, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Equivariant(#[from] EquivariantError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid differential assignment: {0}")]
    InvalidAssignment(String),
    #[error("d_{page} o d_{page} != 0 at E_{page}^{{{p},{q}}}: {detail}")]
    NotASquareZero { page: u32, p: u32, q: u32, detail: String },
    #[error("differential d_{page} is not well defined at E_{page}^{{{p},{q}}}: {relation} = 0 but its image is {image}")]
    IllFormedOnRelations {
        page: u32,
        p: u32,
        q: u32,
        relation: String,
        image: String,
    },
    #[error("permanent cocycle {class} would support d_{page} = {image}")]
    PermanentCocycleViolated { page: u32, class: String, image: String },
    #[error("a line survives above the fiber dimension: E_inf^{{{p},{q}}} != 0 in total degree {degree}")]
    SurvivingLine { degree: u32, p: u32, q: u32 },
    #[error("ranks still change at page {page}")]
    NonStabilizing { page: u32 },
    #[error("no nontrivial differential into the bottom row")]
    NoNontrivialDifferential,
}

/// `d_page(lhs) = t^page ⊗ value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub page: u32,
    pub lhs: Monomial,
    pub value: Polynomial,
}

/// Differentials on fiber monomials, grouped by page.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DifferentialSpec {
    assignments: Vec<Assignment>,
}

impl DifferentialSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `d[page](lhs) = rhs`, where `rhs` is a polynomial in `t` and the
    /// fiber generators whose terms all carry `t^page`.
    pub fn assign(
        &mut self,
        fiber: &Presentation,
        page: u32,
        lhs: &str,
        rhs: &str,
    ) -> Result<(), SpectralError> {
        let lhs = fiber.parse_monomial(lhs)?;
        if fiber.generator_index("t").is_some() {
            return Err(SpectralError::InvalidAssignment(
                "the fiber ring may not use the name t".into(),
            ));
        }
        let mut gens = vec![Generator::new("t", 1)];
        gens.extend(fiber.generators().iter().cloned());
        let parsed = graded_ring::parse_polynomial(rhs, &gens)?;
        let mut value = Polynomial::zero();
        for term in parsed.terms() {
            let (tpow, rest) = term.exponents().split_first().expect("t is first");
            if *tpow != page {
                return Err(SpectralError::InvalidAssignment(format!(
                    "term of `{rhs}` has t^{tpow}, expected t^{page}"
                )));
            }
            value.add_monomial(Monomial(rest.to_vec()));
        }
        self.push(fiber, Assignment { page, lhs, value })
    }

    pub fn push(&mut self, fiber: &Presentation, a: Assignment) -> Result<(), SpectralError> {
        if a.page < 2 {
            return Err(SpectralError::InvalidAssignment(format!(
                "page {} is below 2",
                a.page
            )));
        }
        if a.lhs.is_one() {
            return Err(SpectralError::InvalidAssignment(
                "the unit is a permanent cocycle".into(),
            ));
        }
        let src = fiber.monomial_degree(&a.lhs);
        if let Some(d) = fiber.degree(&a.value)? {
            if d + a.page != src + 1 {
                return Err(SpectralError::InvalidAssignment(format!(
                    "d_{}({}) must have fiber degree {}, got {d}",
                    a.page,
                    fiber.format_monomial(&a.lhs),
                    (src + 1).saturating_sub(a.page)
                )));
            }
        }
        if self
            .assignments
            .iter()
            .any(|b| b.page == a.page && b.lhs == a.lhs)
        {
            return Err(SpectralError::InvalidAssignment(format!(
                "d_{}({}) assigned twice",
                a.page,
                fiber.format_monomial(&a.lhs)
            )));
        }
        self.assignments.push(a);
        Ok(())
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn at_page(&self, r: u32) -> impl Iterator<Item = &Assignment> {
        self.assignments.iter().filter(move |a| a.page == r)
    }

    pub fn max_page(&self) -> Option<u32> {
        self.assignments.iter().map(|a| a.page).max()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// True when some assignment has a nonzero value.
    pub fn has_nonzero(&self) -> bool {
        self.assignments.iter().any(|a| !a.value.is_zero())
    }

    /// DSL lines `d[r](lhs) = rhs` in insertion order.
    pub fn to_lines(&self, fiber: &Presentation) -> Vec<String> {
        self.assignments
            .iter()
            .map(|a| {
                format!(
                    "d[{}]({}) = {}",
                    a.page,
                    fiber.format_monomial(&a.lhs),
                    format_rhs(fiber, a.page, &a.value)
                )
            })
            .collect()
    }
}

fn format_rhs(fiber: &Presentation, page: u32, value: &Polynomial) -> String {
    if value.is_zero() {
        return "0".into();
    }
    value
        .terms()
        .rev()
        .map(|m| {
            if m.is_one() {
                format!("t^{page}")
            } else {
                format!("t^{page}*{}", fiber.format_monomial(m))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `E₂` coordinates of one fiber degree.
#[derive(Debug)]
struct Column {
    kernel: Vec<F2Vector>,
    image: Vec<F2Vector>,
    quotient: Vec<F2Vector>,
    kernel_span: Span,
    quotient_span: Span,
}

impl Column {
    fn new(action: &InvolutionAction, q: u32) -> Result<Self, SpectralError> {
        let tau = action.tau_matrix(q)?;
        let kernel = kernel_basis(&tau);
        let (quotient, _) = subquotient_basis(&tau, &tau)?;
        let image: Vec<F2Vector> = tau.columns().into_iter().filter(|c| !c.is_zero()).collect();
        let kernel_span = Span::from_vectors(tau.cols(), &kernel);
        let mut quotient_span = Span::new(tau.cols());
        for v in image.iter().chain(&quotient) {
            quotient_span.insert(v);
        }
        Ok(Column {
            kernel,
            image,
            quotient,
            kernel_span,
            quotient_span,
        })
    }

    fn dim(&self, p: u32) -> usize {
        if p == 0 {
            self.kernel.len()
        } else {
            self.quotient.len()
        }
    }

    /// Fiber coordinates to `E₂^{p,q}` coordinates; `None` off `ker τ`.
    fn to_e2(&self, p: u32, f: &F2Vector) -> Option<F2Vector> {
        if p == 0 {
            self.kernel_span.coordinates(f)
        } else {
            let skip = self.image.len();
            self.quotient_span
                .coordinates(f)
                .map(|c| F2Vector::from_bits((skip..c.len()).map(|i| c.get(i))))
        }
    }

    fn lift_e2(&self, p: u32, v: &F2Vector) -> F2Vector {
        let basis = if p == 0 { &self.kernel } else { &self.quotient };
        let len = self.kernel_span.ambient();
        let mut out = F2Vector::zeros(len);
        for i in v.support() {
            out.add_assign(&basis[i]);
        }
        out
    }
}

#[derive(Debug)]
struct E2Data {
    fiber: Presentation,
    action: InvolutionAction,
    fiber_dimension: u32,
    columns: Vec<Column>,
}

impl E2Data {
    fn format_class(&self, p: u32, q: u32, f: &F2Vector) -> String {
        let poly = self.fiber.from_coordinates(q, f);
        let body = self.fiber.format(&poly);
        match (p, poly.len()) {
            (0, _) => body,
            (_, 1) if body == "1" => format!("t^{p}"),
            (_, 1) => format!("t^{p}*{body}"),
            _ => format!("t^{p}*({body})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    reps: Vec<F2Vector>,
    boundaries: Vec<F2Vector>,
}

/// One page `E_r`, truncated to total degree `max_total_degree`.
#[derive(Clone)]
pub struct Page {
    r: u32,
    max_total_degree: u32,
    data: Arc<E2Data>,
    entries: BTreeMap<(u32, u32), Entry>,
    diagnostics: Vec<String>,
}

impl fmt::Debug for Page {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Page")
            .field("r", &self.r)
            .field("max_total_degree", &self.max_total_degree)
            .field("ranks", &self.rank_table())
            .finish()
    }
}

impl Page {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn max_total_degree(&self) -> u32 {
        self.max_total_degree
    }

    pub fn fiber(&self) -> &Presentation {
        &self.data.fiber
    }

    pub fn action(&self) -> &InvolutionAction {
        &self.data.action
    }

    /// Formal dimension of the fiber ring.
    pub fn fiber_dimension(&self) -> u32 {
        self.data.fiber_dimension
    }

    /// Notes collected while turning pages, e.g. invariant classes given a
    /// zero differential by default.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Rank of `E_r^{p,q}`; zero outside the stored range.
    pub fn rank(&self, p: u32, q: u32) -> usize {
        if p + q > self.max_total_degree {
            return 0;
        }
        self.entries.get(&(p, q)).map_or(0, |e| e.reps.len())
    }

    /// `table[q][p]` for `p + q ≤ max_total_degree`, rows up to the fiber
    /// dimension.
    pub fn rank_table(&self) -> Vec<Vec<usize>> {
        let n = self.max_total_degree;
        (0..=self.data.fiber_dimension.min(n))
            .map(|q| (0..=n - q).map(|p| self.rank(p, q)).collect())
            .collect()
    }

    /// Ranks by total degree `0..=max_total_degree`.
    pub fn total_ranks(&self) -> Vec<usize> {
        (0..=self.max_total_degree)
            .map(|j| (0..=j).map(|p| self.rank(p, j - p)).sum())
            .collect()
    }

    /// Representatives of `E_r^{p,q}` as `(t-power, fiber polynomial)`.
    pub fn representatives(&self, p: u32, q: u32) -> Vec<(u32, Polynomial)> {
        let Some(entry) = self.entries.get(&(p, q)) else {
            return Vec::new();
        };
        let col = &self.data.columns[q as usize];
        entry
            .reps
            .iter()
            .map(|v| (p, self.data.fiber.from_coordinates(q, &col.lift_e2(p, v))))
            .collect()
    }

    fn internal_degree(&self) -> u32 {
        self.max_total_degree + 1
    }
}

/// `E₂` of the Borel fibration with fiber ring `fiber` and action `action`.
pub fn build_e2(
    fiber: &Presentation,
    action: &InvolutionAction,
    max_total_degree: u32,
) -> Result<Page, SpectralError> {
    let action = action.clone().verified()?;
    let fiber_dimension = fiber.formal_dimension()?;
    let top = max_total_degree + 1;
    if fiber.degree_bound() < top.min(fiber_dimension) {
        return Err(RingError::DegreeOverflow {
            degree: top.min(fiber_dimension),
            bound: fiber.degree_bound(),
        }
        .into());
    }
    let columns = (0..=fiber_dimension.min(top))
        .map(|q| Column::new(&action, q))
        .collect::<Result<Vec<_>, _>>()?;
    let mut entries = BTreeMap::new();
    for (q, col) in columns.iter().enumerate() {
        let q = q as u32;
        for p in 0..=top - q {
            let dim = col.dim(p);
            entries.insert(
                (p, q),
                Entry {
                    reps: (0..dim).map(|i| F2Vector::unit(dim, i)).collect(),
                    boundaries: Vec::new(),
                },
            );
        }
    }
    Ok(Page {
        r: 2,
        max_total_degree,
        data: Arc::new(E2Data {
            fiber: fiber.clone(),
            action,
            fiber_dimension,
            columns,
        }),
        entries,
        diagnostics: Vec::new(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum KeyKind {
    Norm,
    Assigned,
    Generator,
    Implicit,
}

#[derive(Clone, Debug)]
struct Key {
    element: Polynomial,
    degree: u32,
    value: Polynomial,
    kind: KeyKind,
    label: String,
}

#[derive(Clone, Debug)]
struct Product {
    element: Polynomial,
    image: Polynomial,
    last_key: Option<usize>,
    single_norm: bool,
    label: String,
}

/// Key products by fiber degree with their Leibniz differentials.
struct KeyTable {
    products: Vec<Vec<Product>>,
    implicit: Vec<String>,
}

impl KeyTable {
    fn build(data: &E2Data, spec: &DifferentialSpec, r: u32, top: u32) -> Result<Self, SpectralError> {
        let fiber = &data.fiber;
        let action = &data.action;
        let mut keys = Vec::new();
        for (i, g) in fiber.generators().iter().enumerate() {
            let x = Polynomial::from_monomial(Monomial::var(fiber.nvars(), i, 1));
            let norm = fiber.mul(&x, action.image(i))?;
            if !norm.is_zero() {
                keys.push(Key {
                    degree: 2 * g.degree,
                    element: norm,
                    value: Polynomial::zero(),
                    kind: KeyKind::Norm,
                    label: format!("{0}*g({0})", g.name),
                });
            }
        }
        for a in spec.at_page(r) {
            let element = fiber.normal_form(&Polynomial::from_monomial(a.lhs.clone()))?;
            let label = fiber.format_monomial(&a.lhs);
            if action.apply(&element)? != element {
                return Err(SpectralError::InvalidAssignment(format!(
                    "{label} is not invariant under the action"
                )));
            }
            let value = fiber.normal_form(&a.value)?;
            if action.apply(&value)? != value {
                return Err(SpectralError::InvalidAssignment(format!(
                    "d_{r}({label}) = {} is not invariant under the action",
                    format_rhs(fiber, r, &value)
                )));
            }
            keys.push(Key {
                degree: fiber.monomial_degree(&a.lhs),
                element,
                value,
                kind: KeyKind::Assigned,
                label,
            });
        }
        for (i, g) in fiber.generators().iter().enumerate() {
            let x = Polynomial::from_monomial(Monomial::var(fiber.nvars(), i, 1));
            let assigned = spec
                .at_page(r)
                .any(|a| a.lhs == Monomial::var(fiber.nvars(), i, 1));
            if !assigned && action.image(i) == &x {
                keys.push(Key {
                    degree: g.degree,
                    element: x,
                    value: Polynomial::zero(),
                    kind: KeyKind::Generator,
                    label: g.name.clone(),
                });
            }
        }

        let top = top.min(data.fiber_dimension);
        let mut products: Vec<Vec<Product>> = vec![vec![Product {
            element: fiber.one(),
            image: Polynomial::zero(),
            last_key: None,
            single_norm: false,
            label: "1".into(),
        }]];
        let mut implicit = Vec::new();
        for q in 1..=top {
            let mut level = Vec::new();
            for (i, k) in keys.iter().enumerate() {
                if k.degree > q {
                    continue;
                }
                for e in &products[(q - k.degree) as usize] {
                    if e.last_key.is_some_and(|last| last > i) {
                        continue;
                    }
                    let element = fiber.mul(&e.element, &k.element)?;
                    let image = if q + 1 < r {
                        Polynomial::zero()
                    } else {
                        fiber
                            .mul(&e.image, &k.element)?
                            .add(&fiber.mul(&e.element, &k.value)?)
                    };
                    if element.is_zero() && image.is_zero() {
                        continue;
                    }
                    level.push(Product {
                        element,
                        image,
                        last_key: Some(i),
                        single_norm: e.last_key.is_none() && k.kind == KeyKind::Norm,
                        label: if e.last_key.is_none() {
                            k.label.clone()
                        } else {
                            format!("{}*{}", e.label, k.label)
                        },
                    });
                }
            }
            let col = &data.columns[q as usize];
            let mut span = Span::new(col.kernel_span.ambient());
            for e in &level {
                span.insert(&fiber.coordinates(&e.element, q)?);
            }
            for v in &col.kernel {
                if span.insert(v) {
                    let element = fiber.from_coordinates(q, v);
                    let label = fiber.format(&element);
                    implicit.push(label.clone());
                    keys.push(Key {
                        element: element.clone(),
                        degree: q,
                        value: Polynomial::zero(),
                        kind: KeyKind::Implicit,
                        label: label.clone(),
                    });
                    level.push(Product {
                        element,
                        image: Polynomial::zero(),
                        last_key: Some(keys.len() - 1),
                        single_norm: false,
                        label,
                    });
                }
            }
            products.push(level);
        }
        Ok(KeyTable { products, implicit })
    }
}

/// A nonzero `d_r` found while turning a page.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonzeroDifferential {
    pub page: u32,
    pub source: (u32, u32),
    pub target: (u32, u32),
    pub rank: usize,
}

fn lift(reps: &[F2Vector], coords: &F2Vector, len: usize) -> F2Vector {
    let mut out = F2Vector::zeros(len);
    for i in coords.support() {
        out.add_assign(&reps[i]);
    }
    out
}

fn turn(page: &Page, spec: &DifferentialSpec) -> Result<(Page, Vec<NonzeroDifferential>), SpectralError> {
    let r = page.r;
    let data = &page.data;
    let top = page.internal_degree();
    let table = KeyTable::build(data, spec, r, top)?;
    let mut outgoing: BTreeMap<(u32, u32), F2Matrix> = BTreeMap::new();
    let mut nonzero = Vec::new();

    for (&(p, q), entry) in &page.entries {
        if p + q >= top || q + 1 < r || entry.reps.is_empty() {
            continue;
        }
        let (tp, tq) = (p + r, q + 1 - r);
        let Some(target) = page.entries.get(&(tp, tq)) else {
            continue;
        };
        if target.reps.is_empty() {
            continue;
        }
        let src_col = &data.columns[q as usize];
        let tgt_col = &data.columns[tq as usize];
        let products = &table.products[q as usize];
        let fiber = &data.fiber;

        let elements = products
            .iter()
            .map(|e| fiber.coordinates(&e.element, q))
            .collect::<Result<Vec<_>, _>>()?;
        let images = products
            .iter()
            .map(|e| fiber.coordinates(&e.image, tq))
            .collect::<Result<Vec<_>, _>>()?;
        let extra: &[F2Vector] = if p > 0 { &src_col.image } else { &[] };

        let ambient = tgt_col.dim(tp);
        let boundary = Span::from_vectors(ambient, &target.boundaries);
        let nb = boundary.inserted();
        let mut cycles = boundary.clone();
        for v in &target.reps {
            cycles.insert(v);
        }
        let to_e2 = |f: &F2Vector| -> Result<F2Vector, SpectralError> {
            tgt_col.to_e2(tp, f).ok_or_else(|| {
                SpectralError::InvalidAssignment(format!(
                    "d_{r} lands outside the invariant classes: {}",
                    data.format_class(tp, tq, f)
                ))
            })
        };

        // well-definedness on relations among key products
        let mut columns: Vec<F2Vector> = elements.clone();
        columns.extend(extra.iter().cloned());
        let relation_matrix = F2Matrix::from_columns(src_col.kernel_span.ambient(), &columns);
        for rel in kernel_basis(&relation_matrix) {
            let mut value = F2Vector::zeros(tgt_col.kernel_span.ambient());
            for i in rel.support().into_iter().filter(|&i| i < products.len()) {
                value.add_assign(&images[i]);
            }
            let v = to_e2(&value)?;
            if boundary.contains(&v) {
                continue;
            }
            let image = data.format_class(tp, tq, &value);
            let used: Vec<usize> = rel.support().into_iter().filter(|&i| i < products.len()).collect();
            if let Some(&i) = used.iter().find(|&&i| products[i].single_norm) {
                return Err(SpectralError::PermanentCocycleViolated {
                    page: r,
                    class: products[i].label.clone(),
                    image,
                });
            }
            let mut relation: Vec<String> = used.iter().map(|&i| products[i].label.clone()).collect();
            if rel.support().iter().any(|&i| i >= products.len()) {
                relation.push("(1+g*)(...)".into());
            }
            return Err(SpectralError::IllFormedOnRelations {
                page: r,
                p,
                q,
                relation: relation.join(" + "),
                image,
            });
        }

        let mut source_span = Span::new(src_col.kernel_span.ambient());
        for v in elements.iter().chain(extra) {
            source_span.insert(v);
        }
        let mut matrix = F2Matrix::zeros(target.reps.len(), entry.reps.len());
        for (j, x) in entry.reps.iter().enumerate() {
            let f = src_col.lift_e2(p, x);
            let coords = source_span.coordinates(&f).ok_or_else(|| {
                SpectralError::InvalidAssignment(format!(
                    "{} is not reachable from the differential keys",
                    data.format_class(p, q, &f)
                ))
            })?;
            let mut value = F2Vector::zeros(tgt_col.kernel_span.ambient());
            for i in coords.support().into_iter().filter(|&i| i < products.len()) {
                value.add_assign(&images[i]);
            }
            let v = to_e2(&value)?;
            let c = cycles.coordinates(&v).ok_or_else(|| SpectralError::NotASquareZero {
                page: r,
                p,
                q,
                detail: format!(
                    "d_{r}({}) = {} is not a cycle of the earlier differentials",
                    data.format_class(p, q, &f),
                    data.format_class(tp, tq, &value)
                ),
            })?;
            for i in 0..target.reps.len() {
                matrix.set(i, j, c.get(nb + i));
            }
        }
        let rk = crate::f2linalg::rank(&matrix);
        if rk > 0 {
            nonzero.push(NonzeroDifferential {
                page: r,
                source: (p, q),
                target: (tp, tq),
                rank: rk,
            });
        }
        outgoing.insert((p, q), matrix);
    }

    let mut entries = BTreeMap::new();
    for (&(p, q), entry) in &page.entries {
        let n = entry.reps.len();
        let ambient = data.columns[q as usize].dim(p);
        let out = outgoing
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| F2Matrix::zeros(0, n));
        let incoming = if p >= r {
            outgoing.get(&(p - r, q + r - 1)).cloned()
        } else {
            None
        }
        .unwrap_or_else(|| F2Matrix::zeros(n, 0));
        let (coords, _) = subquotient_basis(&out, &incoming).map_err(|e| match e {
            LinalgError::CompositionNonzero { column } => {
                let (sp, sq) = (p - r, q + r - 1);
                let src = &page.entries[&(sp, sq)].reps[column];
                let col = &data.columns[sq as usize];
                SpectralError::NotASquareZero {
                    page: r,
                    p: sp,
                    q: sq,
                    detail: format!(
                        "d_{r}(d_{r}({})) != 0",
                        data.format_class(sp, sq, &col.lift_e2(sp, src))
                    ),
                }
            }
            other => other.into(),
        })?;
        let reps = coords.iter().map(|c| lift(&entry.reps, c, ambient)).collect();
        let mut span = Span::new(ambient);
        let mut boundaries = Vec::new();
        let hits = incoming.columns().into_iter().map(|c| lift(&entry.reps, &c, ambient));
        for v in entry.boundaries.iter().cloned().chain(hits) {
            if span.insert(&v) {
                boundaries.push(v);
            }
        }
        entries.insert((p, q), Entry { reps, boundaries });
    }
    let mut diagnostics = page.diagnostics.clone();
    for class in table.implicit {
        let note = format!("d_{r}({class}) = 0 by default (not a product of differential keys)");
        if !diagnostics.contains(&note) {
            diagnostics.push(note);
        }
    }
    Ok((
        Page {
            r: r + 1,
            max_total_degree: page.max_total_degree,
            data: Arc::clone(&page.data),
            entries,
            diagnostics,
        },
        nonzero,
    ))
}

/// `d_r(x)` for an invariant class `x ∈ E_r^{0,q}`: the fiber part of
/// `t^r ⊗ d_r(x)`, evaluated through the key products of page `r`. By
/// `t`-linearity this also gives `d_r(t^p x)`.
pub fn differential(page: &Page, spec: &DifferentialSpec, x: &Polynomial) -> Result<Polynomial, SpectralError> {
    let data = &page.data;
    let fiber = &data.fiber;
    let r = page.r;
    let x = fiber.normal_form(x)?;
    let Some(q) = fiber.degree(&x)? else {
        return Ok(Polynomial::zero());
    };
    if q + 1 < r {
        return Ok(Polynomial::zero());
    }
    let top = page.internal_degree();
    if q > top.min(data.fiber_dimension) {
        return Err(RingError::DegreeOverflow { degree: q, bound: top }.into());
    }
    let table = KeyTable::build(data, spec, r, top)?;
    let products = &table.products[q as usize];
    let mut span = Span::new(data.columns[q as usize].kernel_span.ambient());
    for e in products {
        span.insert(&fiber.coordinates(&e.element, q)?);
    }
    let coords = span.coordinates(&fiber.coordinates(&x, q)?).ok_or_else(|| {
        SpectralError::InvalidAssignment(format!("{} is not invariant", fiber.format(&x)))
    })?;
    let mut value = Polynomial::zero();
    for i in coords.support() {
        value.add_assign(&products[i].image);
    }
    Ok(value)
}

/// `E_{r+1}` from `E_r` and the page-`r` part of `spec`.
pub fn apply_differential(page: &Page, spec: &DifferentialSpec) -> Result<Page, SpectralError> {
    turn(page, spec).map(|(next, _)| next)
}

/// All pages from `E₂` through `E_∞`, plus every nonzero differential met.
pub fn run_pages(
    fiber: &Presentation,
    action: &InvolutionAction,
    spec: &DifferentialSpec,
    max_total_degree: u32,
) -> Result<(Vec<Page>, Vec<NonzeroDifferential>), SpectralError> {
    let mut pages = vec![build_e2(fiber, action, max_total_degree)?];
    let mut found = Vec::new();
    let last = spec.max_page().unwrap_or(1);
    let limit = max_total_degree + 2;
    loop {
        let page = pages.last().expect("nonempty");
        if page.r > last {
            break;
        }
        let (next, nonzero) = turn(page, spec)?;
        if next.r > limit && !nonzero.is_empty() {
            return Err(SpectralError::NonStabilizing { page: next.r });
        }
        found.extend(nonzero);
        pages.push(next);
    }
    Ok((pages, found))
}

/// `E_∞`: the page after the last assigned differential.
pub fn run_to_infinity(
    fiber: &Presentation,
    action: &InvolutionAction,
    spec: &DifferentialSpec,
    max_total_degree: u32,
) -> Result<Page, SpectralError> {
    let (mut pages, _) = run_pages(fiber, action, spec, max_total_degree)?;
    Ok(pages.pop().expect("nonempty"))
}

/// Under a free action nothing survives above the fiber dimension.
pub fn check_free(e_inf: &Page) -> Result<(), SpectralError> {
    let dim = e_inf.fiber_dimension();
    for (j, &rank) in e_inf.total_ranks().iter().enumerate() {
        let j = j as u32;
        if j > dim && rank > 0 {
            let p = (0..=j)
                .find(|&p| e_inf.rank(p, j - p) > 0)
                .expect("nonzero total");
            return Err(SpectralError::SurvivingLine {
                degree: j,
                p,
                q: j - p,
            });
        }
    }
    Ok(())
}

/// `x·g*(x) ≠ 0`; such classes are never allowed to support a differential.
pub fn permanent_cocycle_check(action: &InvolutionAction, x: &Polynomial) -> Result<bool, SpectralError> {
    let gx = action.apply(x)?;
    Ok(!action.base().mul(x, &gx)?.is_zero())
}

/// Least `r` with a nonzero `d_r` into the bottom row `q = 0`.
pub fn volovikov_index(
    spec: &DifferentialSpec,
    fiber: &Presentation,
    action: &InvolutionAction,
) -> Result<u32, SpectralError> {
    let last = spec
        .max_page()
        .ok_or(SpectralError::NoNontrivialDifferential)?;
    // sources (0, r-1) and (1, r-1) for every r ≤ last fit in this truncation
    let (_, nonzero) = run_pages(fiber, action, spec, last)?;
    nonzero
        .iter()
        .filter(|d| d.target.1 == 0)
        .map(|d| d.page)
        .min()
        .ok_or(SpectralError::NoNontrivialDifferential)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{fiber_ring, ActionKind, Field};

    fn setup(field: Field, n: u32, m: u32, kind: ActionKind, bound: u32) -> (Presentation, InvolutionAction) {
        let fiber = fiber_ring(field, n, m, bound + 1).unwrap();
        let action = kind.build(&fiber).unwrap();
        (fiber, action)
    }

    fn spec(fiber: &Presentation, lines: &[(u32, &str, &str)]) -> DifferentialSpec {
        let mut s = DifferentialSpec::new();
        for (r, l, v) in lines {
            s.assign(fiber, *r, l, v).unwrap();
        }
        s
    }

    #[test]
    fn trivial_e2_is_tensor_product() {
        let (fiber, id) = setup(Field::R, 2, 2, ActionKind::Identity, 6);
        let e2 = build_e2(&fiber, &id, 6).unwrap();
        for q in 0..=4 {
            for p in 0..=6 - q {
                assert_eq!(e2.rank(p, q), fiber.rank_in_degree(q).unwrap());
            }
        }
        assert_eq!(e2.total_ranks(), vec![1, 2, 4, 5, 6, 6, 6]);
    }

    #[test]
    fn swap_case_kills_all_lines() {
        let (fiber, g) = setup(Field::R, 3, 1, ActionKind::Swap, 8);
        let s = spec(&fiber, &[(3, "a^2", "t^3"), (3, "a*b", "t^3")]);
        let e_inf = run_to_infinity(&fiber, &g, &s, 8).unwrap();
        assert_eq!(e_inf.r(), 4);
        assert_eq!(e_inf.total_ranks(), vec![1, 2, 2, 2, 1, 0, 0, 0, 0]);
        check_free(&e_inf).unwrap();
    }

    #[test]
    fn shift_case_even_ratio_dies() {
        let (fiber, g) = setup(Field::R, 3, 2, ActionKind::Shift, 8);
        let s = spec(&fiber, &[(2, "a", "t^2")]);
        let e_inf = run_to_infinity(&fiber, &g, &s, 8).unwrap();
        assert_eq!(e_inf.total_ranks(), vec![1, 1, 1, 1, 1, 1, 0, 0, 0]);
    }

    #[test]
    fn trivial_sphere_differential() {
        let (fiber, id) = setup(Field::R, 2, 2, ActionKind::Identity, 7);
        let s = spec(&fiber, &[(3, "b", "t^3")]);
        let e_inf = run_to_infinity(&fiber, &id, &s, 7).unwrap();
        assert_eq!(e_inf.total_ranks(), vec![1, 2, 3, 2, 1, 0, 0, 0]);
        // E_∞^{k,i} = Z₂ for k ≤ m, i ≤ ln
        for q in 0..=2 {
            for p in 0..=5 - q {
                assert_eq!(e_inf.rank(p, q), usize::from(p <= 2), "({p},{q})");
            }
        }
    }

    #[test]
    fn zero_spec_keeps_e2() {
        let (fiber, id) = setup(Field::C, 1, 3, ActionKind::Identity, 6);
        let e2 = build_e2(&fiber, &id, 6).unwrap();
        let e_inf = run_to_infinity(&fiber, &id, &DifferentialSpec::new(), 6).unwrap();
        assert_eq!(e2.total_ranks(), e_inf.total_ranks());
        let next = apply_differential(&e2, &DifferentialSpec::new()).unwrap();
        assert_eq!(next.rank_table(), e2.rank_table());
        assert!(matches!(check_free(&e_inf), Err(SpectralError::SurvivingLine { .. })));
    }

    #[test]
    fn permanent_cocycles() {
        let (fiber, id) = setup(Field::R, 3, 2, ActionKind::Identity, 6);
        let a = fiber.generator("a").unwrap();
        let b = fiber.generator("b").unwrap();
        assert!(permanent_cocycle_check(&id, &a).unwrap());
        assert!(!permanent_cocycle_check(&id, &b).unwrap());
        let (f1, swap) = setup(Field::R, 3, 1, ActionKind::Swap, 6);
        assert!(permanent_cocycle_check(&swap, &f1.generator("a").unwrap()).unwrap());

        let s = spec(&fiber, &[(3, "a^2", "t^3")]);
        let err = run_to_infinity(&fiber, &id, &s, 6).unwrap_err();
        assert!(matches!(err, SpectralError::PermanentCocycleViolated { .. }), "{err}");
    }

    #[test]
    fn rejects_bad_assignments() {
        let (fiber, g) = setup(Field::R, 3, 1, ActionKind::Swap, 6);
        let mut s = DifferentialSpec::new();
        assert!(s.assign(&fiber, 3, "a^2", "t^2").is_err());
        assert!(s.assign(&fiber, 3, "a^2", "t^3*a").is_err());
        assert!(s.assign(&fiber, 1, "a", "t").is_err());
        s.assign(&fiber, 2, "a", "t^2").unwrap();
        assert!(matches!(
            run_to_infinity(&fiber, &g, &s, 6),
            Err(SpectralError::InvalidAssignment(_))
        ));
    }

    #[test]
    fn leibniz_inconsistency_is_reported() {
        // a^3 = 0 but d(a^3) = t^2 a^2 under Leibniz
        let (fiber, id) = setup(Field::R, 2, 1, ActionKind::Identity, 6);
        let s = spec(&fiber, &[(2, "a", "t^2")]);
        let err = run_to_infinity(&fiber, &id, &s, 6).unwrap_err();
        assert!(matches!(err, SpectralError::IllFormedOnRelations { .. }), "{err}");
    }

    #[test]
    fn square_zero_violation_is_reported() {
        // d2(d2(b)) = d2(t^2 a) = t^4
        let (fiber, id) = setup(Field::R, 3, 2, ActionKind::Identity, 7);
        let s = spec(&fiber, &[(2, "a", "t^2"), (2, "b", "t^2*a")]);
        let err = run_to_infinity(&fiber, &id, &s, 7).unwrap_err();
        assert!(matches!(err, SpectralError::NotASquareZero { .. }), "{err}");
    }

    #[test]
    fn volovikov_examples() {
        let (fiber, g) = setup(Field::R, 3, 1, ActionKind::Swap, 6);
        let s = spec(&fiber, &[(3, "a^2", "t^3"), (3, "a*b", "t^3")]);
        assert_eq!(volovikov_index(&s, &fiber, &g).unwrap(), 3);
        let (fiber, id) = setup(Field::C, 2, 3, ActionKind::Identity, 8);
        let s = spec(&fiber, &[(4, "b", "t^4")]);
        assert_eq!(volovikov_index(&s, &fiber, &id).unwrap(), 4);
        assert_eq!(
            volovikov_index(&DifferentialSpec::new(), &fiber, &id),
            Err(SpectralError::NoNontrivialDifferential)
        );
    }

    #[test]
    fn spec_lines_round_trip() {
        let (fiber, _) = setup(Field::R, 3, 1, ActionKind::Swap, 6);
        let s = spec(&fiber, &[(3, "a^2", "t^3"), (3, "a^2*b", "t^3*a + t^3*b")]);
        assert_eq!(s.to_lines(&fiber), vec!["d[3](a^2) = t^3", "d[3](a^2*b) = t^3*a + t^3*b"]);
    }
}
