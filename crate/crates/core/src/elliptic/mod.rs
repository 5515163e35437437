//! Special functions on the torus `C / (Z + sigma Z)`.
//!
//! [`Modulus`] carries the period ratio and the q-series (Dedekind eta,
//! Eisenstein series). [`theta1`] is the odd Jacobi theta function in the
//! normalization with periods `1` and `sigma`. [`WeierstrassContext`] builds
//! the Weierstrass functions on top of the theta series, calibrating the
//! additive and quadratic-exponent constants from their Laurent expansions at
//! the origin.

mod modulus;
mod resultant;
mod theta;
mod weierstrass;
mod zeros;

pub use modulus::{Modulus, Reduced};
pub use resultant::{elliptic_resultant, SigmaProduct};
pub use theta::theta1;
pub use weierstrass::WeierstrassContext;
pub use zeros::elliptic_zeros;
