//! Isomonodromy data shared by both genera: Bergmann kernel values, rotation
//! coefficients, quadratic Hamiltonians, Schlesinger residues, and the
//! finite-difference engine that turns parameter derivatives into
//! derivatives with respect to the critical values.

mod bergmann;
mod deform;
mod euler;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::Result;

pub use bergmann::{bergmann_values, build_isomonodromy, IsomonodromyData};
pub use deform::{
    directional_derivative, lambda_derivative, lambda_gradient, richardson_ratio, DeformationJacobian, FdOptions,
};
pub use euler::{euler_unit_checks, EulerReport};

/// Everything the isomonodromy layer needs to know about one point of a
/// Hurwitz space, evaluated at a given ordering of the critical points.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub alpha: Vec<C64>,
    pub lambda: Vec<C64>,
    /// `f_m^2 = 2 / p''(alpha_m)`.
    pub fsq: Vec<C64>,
    /// Schwarzian of the uniformizing coordinate at the critical point.
    pub sw: Vec<C64>,
    /// Bergmann projective connection at the critical point.
    pub sb: Vec<C64>,
    /// Regularized kernel `b(P_m, P_n) / (f_m f_n)`; zero diagonal.
    pub kernel: DMatrix<C64>,
    /// `b(P_m, inf_s) / (f_m h_s)` for the infinities entering the tau-function.
    pub kernel_inf: DMatrix<C64>,
    /// `h_s^{k_s}`, single-valued leading Laurent data at those infinities.
    pub h_pow: Vec<C64>,
    /// Pole orders `k_s` of those infinities.
    pub orders: Vec<usize>,
    /// Genus-one data: `(sigma, eta_tilde)`.
    pub modulus: Option<(C64, C64)>,
}

impl Point {
    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// Principal `f_m = sqrt(f_m^2)`.
    pub fn f(&self) -> Vec<C64> {
        self.fsq.iter().map(|x| x.sqrt()).collect()
    }

    /// Principal `h_s = (h_s^{k_s})^{1/k_s}`.
    pub fn h(&self) -> Vec<C64> {
        self.h_pow
            .iter()
            .zip(&self.orders)
            .map(|(x, &k)| x.powf(1.0 / k as f64))
            .collect()
    }

    /// Smallest `|lambda_m - lambda_n|` over distinct pairs.
    pub fn min_lambda_separation(&self) -> f64 {
        min_separation(&self.lambda)
    }

    pub fn lambda_scale(&self) -> f64 {
        self.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max) + 1.0
    }
}

pub fn min_separation(v: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.min((v[i] - v[j]).norm());
        }
    }
    best
}

/// A Hurwitz-space point that can be deformed through its parameters.
///
/// Parameters are complex; the critical-value map `params -> lambda` has
/// complex rank `M` at generic points.
pub trait Deformable: Sized {
    fn param_names(&self) -> Vec<String>;
    fn params(&self) -> Vec<C64>;
    fn with_params(&self, params: &[C64]) -> Result<Self>;
    /// All critical points, freshly located.
    fn critical_points(&self) -> Result<Vec<C64>>;
    /// Critical points continued by Newton's method from `previous`.
    fn track_critical_points(&self, previous: &[C64]) -> Result<Vec<C64>>;
    /// `d lambda_m / d param_j` at the given critical points.
    fn lambda_jacobian(&self, alpha: &[C64]) -> Result<DMatrix<C64>>;
    fn point(&self, alpha: &[C64]) -> Result<Point>;
}
