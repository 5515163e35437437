use num_complex::Complex64 as C64;

use super::{directional_derivative, Deformable, FdOptions, IsomonodromyData};
use crate::error::Result;

/// Action of the unit field `e = sum d/d lambda_m` and the Euler field
/// `E = sum lambda_m d/d lambda_m` on `log tau` and `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerReport {
    /// `e(log tau) = sum_m H_m`.
    pub e_log_tau: C64,
    /// `sum_m |H_m|`, the natural scale of `e_log_tau`.
    pub h_scale: f64,
    /// `E(log tau) = sum_m lambda_m H_m`.
    pub euler_log_tau: C64,
    /// `e(G)` by finite differences.
    pub e_of_g: C64,
    /// `E(G)` by finite differences.
    pub euler_of_g: C64,
    /// Closed-form scaling anomaly.
    pub gamma: f64,
}

impl EulerReport {
    pub fn e_log_tau_relative(&self) -> f64 {
        self.e_log_tau.norm() / self.h_scale.max(f64::MIN_POSITIVE)
    }

    pub fn anomaly_error(&self) -> f64 {
        (self.euler_of_g - self.gamma).norm()
    }
}

/// `G` is passed as `sum_i weights_i log X_i` with `X = g_parts(cov, alpha)`.
pub fn euler_unit_checks<C, F>(
    cov: &C,
    alpha: &[C64],
    data: &IsomonodromyData,
    g_parts: F,
    g_weights: &[C64],
    gamma: f64,
    opts: FdOptions,
) -> Result<EulerReport>
where
    C: Deformable,
    F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
{
    let log_opts = FdOptions { log: true, ..opts };
    let weigh = |d: Vec<C64>| -> C64 { d.iter().zip(g_weights).map(|(x, w)| x * w).sum() };
    let ones = vec![C64::new(1.0, 0.0); alpha.len()];
    let e_of_g = weigh(directional_derivative(cov, alpha, &ones, &g_parts, log_opts)?);
    let euler_of_g = weigh(directional_derivative(cov, alpha, &data.lambda, &g_parts, log_opts)?);
    Ok(EulerReport {
        e_log_tau: data.h.iter().sum(),
        h_scale: data.h.iter().map(|h| h.norm()).sum(),
        euler_log_tau: data.h.iter().zip(&data.lambda).map(|(h, l)| h * l).sum(),
        e_of_g,
        euler_of_g,
        gamma,
    })
}
