//! Involutions on cohomology rings, the twisted E₂ columns and the
//! action-triviality analysis for `FP^n × S^m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2linalg::{kernel_basis, subquotient_basis, F2Matrix, LinalgError};
use crate::graded_ring::{Generator, Monomial, Polynomial, Presentation, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivariantError {
    #[error("invalid dimensions: n = {n}, m = {m} (both must be at least 1)")]
    InvalidDimensions { n: u32, m: u32 },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("not an involution: {}", .0.join("; "))]
    NotAnInvolution(Vec<String>),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The projective-space field: `R` gives `deg a = 1`, `C` gives `deg a = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    R,
    C,
}

impl Field {
    /// Degree of the projective-space generator.
    pub fn l(self) -> u32 {
        match self {
            Field::R => 1,
            Field::C => 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::R => "R",
            Field::C => "C",
        })
    }
}

impl FromStr for Field {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" => Ok(Field::R),
            "C" => Ok(Field::C),
            other => Err(format!("field must be R or C, got `{other}`")),
        }
    }
}

/// Smallest degree bound at which the fiber ring of `(field, n, m)` is
/// provably finite: formal dimension plus one window of the largest generator.
pub fn fiber_degree_bound(field: Field, n: u32, m: u32) -> u32 {
    field.l() * n + m + field.l().max(m)
}

/// `Z₂[a,b]/<a^{n+1}, b²>` with `deg a = l`, `deg b = m`. The bound is raised
/// to [`fiber_degree_bound`] when smaller.
pub fn fiber_ring(field: Field, n: u32, m: u32, bound: u32) -> Result<Presentation, EquivariantError> {
    if n < 1 || m < 1 {
        return Err(EquivariantError::InvalidDimensions { n, m });
    }
    let bound = bound.max(fiber_degree_bound(field, n, m));
    let gens = vec![Generator::new("a", field.l()), Generator::new("b", m)];
    let rels = vec![
        Polynomial::from_monomial(Monomial(vec![n + 1, 0])),
        Polynomial::from_monomial(Monomial(vec![0, 2])),
    ];
    Ok(Presentation::new(gens, rels, bound)?)
}

/// Ring endomorphism `g*` given by generator images.
#[derive(Clone, Debug)]
pub struct InvolutionAction {
    base: Presentation,
    images: Vec<Polynomial>,
}

/// Outcome of [`InvolutionAction::verify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

impl InvolutionAction {
    pub fn identity(base: &Presentation) -> Self {
        let images = (0..base.nvars())
            .map(|i| Polynomial::from_monomial(Monomial::var(base.nvars(), i, 1)))
            .collect();
        InvolutionAction {
            base: base.clone(),
            images,
        }
    }

    /// Generators absent from `images` are fixed.
    pub fn from_images(
        base: &Presentation,
        images: &[(String, Polynomial)],
    ) -> Result<Self, EquivariantError> {
        let mut action = Self::identity(base);
        for (name, image) in images {
            let i = base
                .generator_index(name)
                .ok_or_else(|| EquivariantError::UnknownGenerator(name.clone()))?;
            action.images[i] = base.normal_form(image)?;
        }
        Ok(action)
    }

    pub fn parse(base: &Presentation, images: &[(&str, &str)]) -> Result<Self, EquivariantError> {
        let parsed = images
            .iter()
            .map(|(g, p)| Ok((g.to_string(), base.parse_polynomial(p)?)))
            .collect::<Result<Vec<_>, EquivariantError>>()?;
        Self::from_images(base, &parsed)
    }

    pub fn base(&self) -> &Presentation {
        &self.base
    }

    pub fn image(&self, generator: usize) -> &Polynomial {
        &self.images[generator]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(&self.base)
    }

    /// Generator images that differ from the identity, in generator order.
    pub fn nontrivial_images(&self) -> Vec<(String, String)> {
        let id = Self::identity(&self.base);
        self.base
            .generators()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.images[*i] != id.images[*i])
            .map(|(i, g)| (g.name.clone(), self.base.format(&self.images[i])))
            .collect()
    }

    fn apply_monomial(&self, m: &Monomial) -> Result<Polynomial, RingError> {
        let mut acc = self.base.one();
        for (i, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                acc = self.base.mul(&acc, &self.images[i])?;
            }
        }
        Ok(acc)
    }

    /// `g*(p)` in normal form.
    pub fn apply(&self, p: &Polynomial) -> Result<Polynomial, RingError> {
        let mut out = Polynomial::zero();
        for m in p.terms() {
            out.add_assign(&self.apply_monomial(m)?);
        }
        Ok(out)
    }

    /// Checks degree preservation, well-definedness on relations and
    /// `g*∘g* = id` on generators.
    pub fn verify(&self) -> Verification {
        let mut diagnostics = Vec::new();
        let base = &self.base;
        for (i, g) in base.generators().iter().enumerate() {
            match base.degree(&self.images[i]) {
                Ok(None) => diagnostics.push(format!("g({}) = 0 is not invertible", g.name)),
                Ok(Some(d)) if d != g.degree => diagnostics.push(format!(
                    "g({}) has degree {d}, expected {}",
                    g.name, g.degree
                )),
                Ok(Some(_)) => {}
                Err(e) => diagnostics.push(format!("g({}): {e}", g.name)),
            }
        }
        if !diagnostics.is_empty() {
            return Verification {
                ok: false,
                diagnostics,
            };
        }
        for r in base.relations() {
            match self.apply(r) {
                Ok(img) if img.is_zero() => {}
                Ok(img) => diagnostics.push(format!(
                    "relation {} maps to {} != 0",
                    base.format(r),
                    base.format(&img)
                )),
                Err(e) => diagnostics.push(format!("relation {}: {e}", base.format(r))),
            }
        }
        for (i, g) in base.generators().iter().enumerate() {
            match self.apply(&self.images[i]) {
                Ok(twice) => {
                    let gen = Polynomial::from_monomial(Monomial::var(base.nvars(), i, 1));
                    if twice != base.normal_form(&gen).unwrap_or(gen.clone()) {
                        diagnostics.push(format!(
                            "g(g({})) = {} != {}",
                            g.name,
                            base.format(&twice),
                            g.name
                        ));
                    }
                }
                Err(e) => diagnostics.push(format!("g(g({})): {e}", g.name)),
            }
        }
        Verification {
            ok: diagnostics.is_empty(),
            diagnostics,
        }
    }

    /// Fails with the diagnostics when [`verify`](Self::verify) does.
    pub fn verified(self) -> Result<Self, EquivariantError> {
        let v = self.verify();
        if v.ok {
            Ok(self)
        } else {
            Err(EquivariantError::NotAnInvolution(v.diagnostics))
        }
    }

    /// Matrix of `1 + g*` on `basis(q)`; column `j` is the image of the `j`-th
    /// basis monomial.
    pub fn tau_matrix(&self, q: u32) -> Result<F2Matrix, EquivariantError> {
        let basis = self.base.basis(q)?;
        let mut columns = Vec::with_capacity(basis.len());
        for m in &basis.monomials {
            let x = Polynomial::from_monomial(m.clone());
            let tau = x.add(&self.apply(&x)?);
            columns.push(self.base.coordinates(&tau, q)?);
        }
        Ok(F2Matrix::from_columns(basis.len(), &columns))
    }

    /// `E₂^{k,q}`: `ker τ` in column 0, `ker τ / im τ` in positive columns.
    pub fn e2_entry(&self, k: u32, q: u32) -> Result<E2Entry, EquivariantError> {
        let tau = self.tau_matrix(q)?;
        let vectors = if k == 0 {
            kernel_basis(&tau)
        } else {
            subquotient_basis(&tau, &tau)?.0
        };
        let representatives = vectors
            .iter()
            .map(|v| self.base.from_coordinates(q, v))
            .collect::<Vec<_>>();
        Ok(E2Entry {
            k,
            q,
            rank: representatives.len(),
            representatives,
        })
    }
}

impl PartialEq for InvolutionAction {
    fn eq(&self, other: &Self) -> bool {
        self.base.generators() == other.base.generators()
            && self.base.relations() == other.base.relations()
            && self.images == other.images
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E2Entry {
    pub k: u32,
    pub q: u32,
    pub rank: usize,
    pub representatives: Vec<Polynomial>,
}

/// The actions the analysis of `FP^n × S^m` can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Identity,
    /// `g(a) = a + b`, `g(b) = b`, for `m = l < ln`, `n` odd.
    Swap,
    /// `g(a) = a`, `g(b) = a^{m/l} + b`, for `l < m ≤ ln < 2m`, `l | m`.
    Shift,
}

impl ActionKind {
    pub fn build(self, fiber: &Presentation) -> Result<InvolutionAction, EquivariantError> {
        let action = match self {
            ActionKind::Identity => return Ok(InvolutionAction::identity(fiber)),
            ActionKind::Swap => InvolutionAction::parse(fiber, &[("a", "a + b")])?,
            ActionKind::Shift => {
                let (l, m) = (fiber.weights()[0], fiber.weights()[1]);
                if m % l != 0 {
                    return Err(EquivariantError::NotAnInvolution(vec![format!(
                        "deg b = {m} is not a multiple of deg a = {l}"
                    )]));
                }
                InvolutionAction::parse(fiber, &[("b", &format!("a^{} + b", m / l))])?
            }
        };
        Ok(action)
    }
}

/// Which triviality condition applied, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialityCondition {
    /// `ln ≤ m`
    SphereDominates,
    /// `F = C` and `m` odd
    OddSphereOverC,
    /// `m = l < ln` with `n` even
    EqualDegreesEvenN,
    /// `l < m`, `2m ≤ ln`, `l | m`
    ShiftOrderTooLarge,
}

impl TrivialityCondition {
    pub fn describe(self) -> &'static str {
        match self {
            TrivialityCondition::SphereDominates => "ln <= m",
            TrivialityCondition::OddSphereOverC => "F = C and m odd",
            TrivialityCondition::EqualDegreesEvenN => "m = l < ln and n even",
            TrivialityCondition::ShiftOrderTooLarge => "l < m, 2m <= ln, m = 0 mod l",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrivialityVerdict {
    pub condition: Option<TrivialityCondition>,
    pub actions: Vec<(ActionKind, InvolutionAction)>,
}

impl TrivialityVerdict {
    pub fn kinds(&self) -> Vec<ActionKind> {
        self.actions.iter().map(|(k, _)| *k).collect()
    }

    pub fn admits(&self, kind: ActionKind) -> bool {
        self.actions.iter().any(|(k, _)| *k == kind)
    }
}

/// Admissible actions on `H*(FP^n × S^m)`. Conditions are tried in the order
/// (1) ln ≤ m, (4) C with m odd, (2), (3); when none applies the catalogued
/// nontrivial actions are added if they verify.
pub fn triviality_verdict(field: Field, n: u32, m: u32) -> Result<TrivialityVerdict, EquivariantError> {
    let fiber = fiber_ring(field, n, m, 0)?;
    let l = field.l();
    let identity = (ActionKind::Identity, InvolutionAction::identity(&fiber));
    let condition = if l * n <= m {
        Some(TrivialityCondition::SphereDominates)
    } else if field == Field::C && m % 2 == 1 {
        Some(TrivialityCondition::OddSphereOverC)
    } else if m == l && n.is_multiple_of(2) {
        Some(TrivialityCondition::EqualDegreesEvenN)
    } else if l < m && 2 * m <= l * n && m.is_multiple_of(l) {
        Some(TrivialityCondition::ShiftOrderTooLarge)
    } else {
        None
    };
    let mut actions = vec![identity];
    if condition.is_none() {
        let mut candidates = Vec::new();
        if m == l && n % 2 == 1 {
            candidates.push(ActionKind::Swap);
        }
        if l < m && m.is_multiple_of(l) && 2 * m > l * n {
            candidates.push(ActionKind::Shift);
        }
        for kind in candidates {
            let action = kind.build(&fiber)?;
            if action.verify().ok {
                actions.push((kind, action));
            }
        }
    }
    Ok(TrivialityVerdict { condition, actions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn swap(n: u32, field: Field) -> InvolutionAction {
        let fiber = fiber_ring(field, n, field.l(), 0).unwrap();
        ActionKind::Swap.build(&fiber).unwrap()
    }

    #[test]
    fn identity_verifies_with_zero_tau() {
        let fiber = fiber_ring(Field::R, 3, 2, 0).unwrap();
        let id = InvolutionAction::identity(&fiber);
        assert!(id.verify().ok);
        assert!(id.is_identity());
        for q in 0..=fiber.degree_bound() {
            assert!(id.tau_matrix(q).unwrap().is_zero());
        }
        assert_eq!(id.tau_matrix(0).unwrap().rows(), 1);
    }

    #[test]
    fn swap_verifies_only_for_odd_n() {
        assert!(swap(3, Field::R).verify().ok);
        assert!(swap(1, Field::C).verify().ok);
        let bad = swap(2, Field::R).verify();
        assert!(!bad.ok);
        assert!(bad.diagnostics[0].contains("a^3"), "{:?}", bad.diagnostics);
    }

    #[test]
    fn rejects_degree_changing_and_non_involutive_maps() {
        let fiber = fiber_ring(Field::R, 3, 1, 0).unwrap();
        let wrong_degree = InvolutionAction::parse(&fiber, &[("a", "a^2")]).unwrap();
        assert!(!wrong_degree.verify().ok);
        // b ↦ a + b, a ↦ b has order 3 on degree one
        let order3 = InvolutionAction::parse(&fiber, &[("a", "b"), ("b", "a + b")]).unwrap();
        let v = order3.verify();
        assert!(!v.ok);
        assert!(v.diagnostics.iter().any(|d| d.contains("g(g(")));
    }

    #[test]
    fn tau_of_swap_in_degree_one() {
        let t = swap(3, Field::R).tau_matrix(1).unwrap();
        // basis order (a, b): τ(a) = b, τ(b) = 0
        assert_eq!(t, F2Matrix::from_rows(&[vec![0, 0], vec![1, 0]]));
        assert_eq!(crate::f2linalg::rank(&t), 1);
    }

    #[test]
    fn swap_e2_columns() {
        let g = swap(3, Field::R);
        let ranks = |k| (0..=5).map(|q| g.e2_entry(k, q).unwrap().rank).collect::<Vec<_>>();
        assert_eq!(ranks(0), vec![1, 1, 2, 1, 1, 0]);
        for k in 1..4 {
            assert_eq!(ranks(k), vec![1, 0, 2, 0, 1, 0]);
        }
        let reps = g.e2_entry(0, 3).unwrap().representatives;
        assert_eq!(g.base().format(&reps[0]), "a^2*b");
    }

    #[test]
    fn shift_e2_columns() {
        // R, n = 3, m = 2: l < m <= ln < 2m
        let fiber = fiber_ring(Field::R, 3, 2, 0).unwrap();
        let g = ActionKind::Shift.build(&fiber).unwrap();
        assert!(g.verify().ok);
        for q in 0..=5 {
            assert_eq!(g.e2_entry(0, q).unwrap().rank, 1, "q = {q}");
            let positive = g.e2_entry(1, q).unwrap().rank;
            assert_eq!(positive, usize::from(q <= 1 || q >= 4), "q = {q}");
        }
    }

    #[test]
    fn verdict_examples() {
        let v = triviality_verdict(Field::R, 2, 3).unwrap();
        assert_eq!(v.condition, Some(TrivialityCondition::SphereDominates));
        assert_eq!(v.kinds(), vec![ActionKind::Identity]);

        let v = triviality_verdict(Field::R, 3, 1).unwrap();
        assert_eq!(v.condition, None);
        assert_eq!(v.kinds(), vec![ActionKind::Identity, ActionKind::Swap]);

        let v = triviality_verdict(Field::C, 3, 4).unwrap();
        assert_eq!(v.kinds(), vec![ActionKind::Identity, ActionKind::Shift]);

        let v = triviality_verdict(Field::C, 3, 3).unwrap();
        assert_eq!(v.condition, Some(TrivialityCondition::OddSphereOverC));

        assert!(matches!(
            triviality_verdict(Field::R, 0, 2),
            Err(EquivariantError::InvalidDimensions { .. })
        ));
    }

    proptest! {
        #[test]
        fn catalogued_actions_square_to_zero(field in prop_oneof![Just(Field::R), Just(Field::C)], n in 1u32..7, m in 1u32..9) {
            let verdict = triviality_verdict(field, n, m).unwrap();
            for (_, action) in &verdict.actions {
                prop_assert!(action.verify().ok);
                let bound = action.base().degree_bound();
                for q in 0..=bound {
                    let t = action.tau_matrix(q).unwrap();
                    prop_assert!(t.mul(&t).unwrap().is_zero());
                }
                let positive = |k| (0..=bound).map(|q| action.e2_entry(k, q).unwrap().rank).sum::<usize>();
                prop_assert_eq!(positive(1), positive(2));
                prop_assert_eq!(positive(1), positive(5));
            }
        }

        #[test]
        fn identity_entries_equal_fiber_ranks(field in prop_oneof![Just(Field::R), Just(Field::C)], n in 1u32..6, m in 1u32..7, k in 0u32..4) {
            let fiber = fiber_ring(field, n, m, 0).unwrap();
            let id = InvolutionAction::identity(&fiber);
            for q in 0..=fiber.degree_bound() {
                prop_assert_eq!(id.e2_entry(k, q).unwrap().rank, fiber.rank_in_degree(q).unwrap());
            }
        }
    }
}
