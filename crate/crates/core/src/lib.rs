#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Isomonodromic tau-functions, G-functions and the supporting special-function
//! machinery for Frobenius manifolds on Hurwitz spaces of genus zero and one.
//!
//! A point of the Hurwitz space is given either as a rational function
//! ([`cover0::Covering0`]) or as an elliptic function on `C/(Z + sigma Z)`
//! ([`cover1::Covering1`]). From it the crate computes the canonical
//! coordinates (critical values), flat coordinates, Bergmann projective
//! connection, the quadratic Hamiltonians of the isomonodromy problem, the
//! tau-function by two independent closed forms and the G-function. The
//! [`isomon`] module holds the finite-difference machinery that turns
//! parameter derivatives into derivatives with respect to the critical values,
//! so that every differential identity can be checked numerically.

pub mod caustic;
pub mod checks;
pub mod cover0;
pub mod cover1;
pub mod elliptic;
pub mod error;
pub mod isomon;
pub mod poly;
pub mod projective;
pub mod random;
pub mod tolerances;

pub use num_complex::Complex64 as C64;

pub use cover0::{Covering0, CriticalData0, FlatCoords0, Pole};
pub use cover1::{Covering1, CriticalData1, FlatCoords1};
pub use elliptic::{Modulus, WeierstrassContext};
pub use error::{BoundaryComponent, Error, Result};
pub use isomon::{DeformationJacobian, IsomonodromyData, Point};
pub use poly::{CPoly, RootSet};

/// Tau-function values from one of the closed-form routes.
///
/// `log_tau` is assembled from principal branches and is only meaningful up to
/// an additive constant (and a multiple of `2 pi i / 24`); `tau_m48` is the
/// branch-free power `tau^-48`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauValue {
    pub log_tau: C64,
    pub tau_m48: C64,
}

/// G-function together with its scaling anomaly `gamma = L_E G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunction {
    /// Closed form in flat coordinates.
    pub g: C64,
    /// `log(tau_I / J^(1/24))` with `J = prod f_m`, computed from critical data.
    pub g_from_tau: C64,
    pub gamma: f64,
}
