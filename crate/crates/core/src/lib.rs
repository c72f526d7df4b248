//! Equivariant cohomology toolkit for free involutions on products of a
//! projective space and a sphere.
//!
//! The crate computes with F₂-cohomology rings, twisted E₂ pages of the
//! Leray–Serre spectral sequence of the Borel fibration, the resulting
//! orbit-space rings, fixed-point ring candidates and Borsuk–Ulam bounds.

pub mod f2linalg;
pub mod graded_ring;
pub mod equivariant;
pub mod spectral;
pub mod classifier;
pub mod cli;

use thiserror::Error;

use classifier::ClassifierError;
use cli::CliError;
use equivariant::EquivariantError;
use f2linalg::LinalgError;
use graded_ring::RingError;
use spectral::SpectralError;

/// Any failure surfaced by [`cli::run`].
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Cli(#[from] CliError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Equivariant(#[from] EquivariantError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

fn variant<T: std::fmt::Debug>(e: &T) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or_default()
        .to_string()
}

/// Innermost error as `(module, variant, exit code)`.
fn leaf(e: &Error) -> (&'static str, String, i32) {
    fn ring(e: &RingError) -> (&'static str, String, i32) {
        let code = match e {
            RingError::DegreeOverflow { .. } | RingError::NotFiniteDimensional { .. } => 3,
            _ => 2,
        };
        ("graded_ring", variant(e), code)
    }
    fn linalg(e: &LinalgError) -> (&'static str, String, i32) {
        ("f2linalg", variant(e), 3)
    }
    fn equivariant(e: &EquivariantError) -> (&'static str, String, i32) {
        match e {
            EquivariantError::Ring(r) => ring(r),
            EquivariantError::Linalg(l) => linalg(l),
            _ => ("equivariant", variant(e), 2),
        }
    }
    fn spectral(e: &SpectralError) -> (&'static str, String, i32) {
        match e {
            SpectralError::Ring(r) => ring(r),
            SpectralError::Equivariant(q) => equivariant(q),
            SpectralError::Linalg(l) => linalg(l),
            SpectralError::InvalidAssignment(_) => ("spectral", variant(e), 2),
            _ => ("spectral", variant(e), 3),
        }
    }
    match e {
        Error::Cli(c) => ("cli", variant(c), 2),
        Error::Linalg(l) => linalg(l),
        Error::Ring(r) => ring(r),
        Error::Equivariant(q) => equivariant(q),
        Error::Spectral(s) => spectral(s),
        Error::Classifier(c) => match c {
            ClassifierError::Ring(r) => ring(r),
            ClassifierError::Spectral(s) => spectral(s),
            ClassifierError::InadmissibleCase(_) | ClassifierError::CoefficientCount { .. } => {
                ("classifier", variant(c), 2)
            }
            _ => ("classifier", variant(c), 3),
        },
        Error::Io(_) => ("io", "Io".into(), 1),
    }
}

impl Error {
    /// Module-qualified code such as `spectral::NotASquareZero`.
    pub fn code(&self) -> String {
        let (module, name, _) = leaf(self);
        format!("{module}::{name}")
    }

    /// Process exit code: 1 for I/O, 2 for parse and validation errors, 3 for
    /// mathematical inconsistencies.
    pub fn exit_code(&self) -> i32 {
        leaf(self).2
    }
}
