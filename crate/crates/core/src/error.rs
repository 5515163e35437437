use std::fmt;

use thiserror::Error;

/// Component of the Hurwitz-space boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryComponent {
    /// Two poles coincide.
    S1,
    /// The leading tail coefficient of a pole vanishes.
    S2,
}

impl fmt::Display for BoundaryComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryComponent::S1 => write!(f, "S1"),
            BoundaryComponent::S2 => write!(f, "S2"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("root iteration did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },

    #[error("argument {0} lies within the lattice-proximity threshold of a lattice point")]
    LatticePoint(String),

    #[error("no admissible contour translation found")]
    ContourClash,

    #[error("located {found} zeros, argument principle counts {expected}")]
    CountMismatch { found: usize, expected: usize },

    #[error("covering lies on boundary component {component} (indices {indices:?})")]
    OnBoundary {
        component: BoundaryComponent,
        indices: Vec<usize>,
    },

    #[error("f and g share a root (normalized resultant {0:e})")]
    CommonRoot(f64),

    #[error("critical values coalesce (min separation {0:e})")]
    Caustic(f64),

    #[error("point {0} is too close to a pole")]
    NearPole(String),

    #[error("arguments coincide modulo the lattice")]
    Coincident,

    #[error("deformation jacobian is ill-conditioned (condition {0:e})")]
    IllConditioned(f64),

    #[error("finite-difference step underflowed")]
    StepUnderflow,

    #[error("log-log slope fit residual {0} exceeds threshold")]
    SlopeUnstable(f64),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
