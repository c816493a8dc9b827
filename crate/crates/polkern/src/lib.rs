//! Numerical laboratory for the positive-operator-valued localization
//! (POL) kernels of a massive scalar boson.
//!
//! The crate builds the kernel families in momentum representation (the
//! Newton-Wigner kernel, two finite kernels with causal time evolution,
//! the causal family with its energy prefactor, Lorentz-invariant profile
//! kernels and their mixtures), expands rotation-invariant kernels in
//! Legendre coefficient kernels, decides positive definiteness on samples,
//! checks the necessary causality condition with its equality cases and
//! the conserved/timelike-definite current criteria, inverts principal
//! series profiles to their weight functions, evaluates ball localization
//! probabilities, and solves the one-dimensional theory completely.
//!
//! The core is `no_std`-compatible (`default-features = false`); it only
//! needs `alloc`. Everything is deterministic given explicit seeds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod fp;
mod linalg;
mod rng;

pub mod causality;
pub mod expansion;
pub mod inversion;
pub mod kernels;
pub mod localization;
pub mod onedim;
pub mod pd;
pub mod specfun;

pub use kernels::{CurrentKernel, Kernel, MixtureSpec, RadialProfile, SymmetryClass};
pub use specfun::{Energy, Momentum3, Rapidity};

use core::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument left the mathematical domain of an operation.
    Domain(&'static str),
    /// A documented precondition was not met.
    Precondition(&'static str),
    /// Coefficient kernels exceed the diagonal normalization budget.
    NormalizationExcess { excess: f64 },
    /// Mixture weights do not sum to one.
    WeightSum { total: f64 },
    /// A check that needs an attached current was called without one.
    MissingCurrent,
    /// Sample points for a Gram test must be distinct (and nonzero).
    DuplicatePoints,
    /// A kernel handed to the expansion machinery failed the rotation
    /// invariance spot check.
    NonRotationInvariant { residual: f64 },
    /// The integrand did not decay at the truncation point.
    TruncationFailure { at: f64, value: f64 },
    /// A recovered weight function went negative beyond tolerance.
    NegativeWeight { lambda: f64, value: f64 },
    /// A normalizing constant is degenerate (zero norm).
    Degenerate(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
            Error::NormalizationExcess { excess } => {
                write!(f, "diagonal normalization exceeded by {excess:.3e}")
            }
            Error::WeightSum { total } => {
                write!(f, "mixture weights sum to {total}, expected 1")
            }
            Error::MissingCurrent => write!(f, "kernel has no attached current"),
            Error::DuplicatePoints => write!(f, "sample points must be distinct and nonzero"),
            Error::NonRotationInvariant { residual } => {
                write!(f, "kernel is not rotation invariant (residual {residual:.3e})")
            }
            Error::TruncationFailure { at, value } => {
                write!(f, "integrand does not decay: |f({at})| = {value:.3e}")
            }
            Error::NegativeWeight { lambda, value } => {
                write!(f, "weight function negative at lambda = {lambda}: {value:.3e}")
            }
            Error::Degenerate(what) => write!(f, "degenerate normalization: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
