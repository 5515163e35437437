//! Independent numerical routes to projective-connection and Laurent data,
//! used to cross-check the closed-form values.
//!
//! All of them work with the local inverse `z(x)` of `p(z) = lambda_m + x^2`
//! near a critical point (or of `p(z) = zeta^-k` near a pole) obtained by
//! Newton's method, never with the Taylor coefficients of `p`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::cover0::Covering0;
use crate::cover1::Covering1;
use crate::error::{Error, Result};

/// A covering evaluated in its uniformizing coordinate, with its
/// (regularized) Bergmann kernel `B(z1, z2) / (dz1 dz2)`.
pub trait LocalModel {
    /// `p(z), p'(z)`.
    fn p_and_derivative(&self, z: C64) -> Result<(C64, C64)>;
    fn kernel(&self, z1: C64, z2: C64) -> Result<C64>;
}

impl LocalModel for Covering0 {
    fn p_and_derivative(&self, z: C64) -> Result<(C64, C64)> {
        let d = self.eval_derivatives(z, 1)?;
        Ok((d[0], d[1]))
    }

    fn kernel(&self, z1: C64, z2: C64) -> Result<C64> {
        Ok((z1 - z2).powi(-2))
    }
}

impl LocalModel for Covering1 {
    fn p_and_derivative(&self, z: C64) -> Result<(C64, C64)> {
        let d = self.eval_derivatives(z, 1)?;
        Ok((d[0], d[1]))
    }

    fn kernel(&self, z1: C64, z2: C64) -> Result<C64> {
        Ok(self.context().wp(z1 - z2, 0)? + self.context().inc1)
    }
}

fn newton_solve<L: LocalModel>(cov: &L, target: C64, mut z: C64) -> Result<C64> {
    for _ in 0..60 {
        let (p, dp) = cov.p_and_derivative(z)?;
        let step = (p - target) / dp;
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    let residual = (cov.p_and_derivative(z)?.0 - target).norm();
    if residual <= 1e-12 * (1.0 + target.norm()) {
        Ok(z)
    } else {
        Err(Error::NonConvergence { residual })
    }
}

/// Local inversion at a simple critical point `alpha` with critical value
/// `lambda` and `fsq = 2 / p''(alpha)`.
#[derive(Debug, Clone, Copy)]
pub struct CriticalChart {
    pub alpha: C64,
    pub lambda: C64,
    /// `z'(0)`, principal square root of `fsq`.
    pub f: C64,
}

impl CriticalChart {
    pub fn new(alpha: C64, lambda: C64, fsq: C64) -> Self {
        CriticalChart {
            alpha,
            lambda,
            f: fsq.sqrt(),
        }
    }

    /// `z(x)` with `p(z(x)) = lambda + x^2`, on the branch `z ~ alpha + f x`.
    pub fn z<L: LocalModel>(&self, cov: &L, x: C64) -> Result<C64> {
        newton_solve(cov, self.lambda + x * x, self.alpha + self.f * x)
    }

    /// `z'(x) = 2 x / p'(z(x))`.
    pub fn dz<L: LocalModel>(&self, cov: &L, x: C64) -> Result<(C64, C64)> {
        let z = self.z(cov, x)?;
        let (_, dp) = cov.p_and_derivative(z)?;
        Ok((z, 2.0 * x / dp))
    }

    /// Taylor coefficients `z_0, ..., z_{n-1}` of `z(x)` by the trapezoid rule
    /// on `|x| = r`, following the branch continuously around the circle.
    pub fn taylor<L: LocalModel>(&self, cov: &L, r: f64, n: usize, points: usize) -> Result<Vec<C64>> {
        let mut values = Vec::with_capacity(points);
        let mut guess = self.alpha + self.f * r;
        for j in 0..points {
            let x = C64::from_polar(r, 2.0 * PI * j as f64 / points as f64);
            let z = newton_solve(cov, self.lambda + x * x, guess)?;
            values.push(z);
            let next = C64::from_polar(r, 2.0 * PI * (j + 1) as f64 / points as f64);
            guess = z + self.f * (next - x);
        }
        Ok((0..n)
            .map(|k| {
                values
                    .iter()
                    .enumerate()
                    .map(|(j, z)| z * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / points as f64))
                    .sum::<C64>()
                    / (points as f64 * r.powi(k as i32))
            })
            .collect())
    }

    /// Schwarzian `{z, x}` at `x = 0` from the Taylor coefficients,
    /// `6 z3 / z1 - 6 (z2 / z1)^2`.
    pub fn schwarzian<L: LocalModel>(&self, cov: &L, r: f64) -> Result<C64> {
        let t = self.taylor(cov, r, 4, 64)?;
        Ok(6.0 * t[3] / t[1] - 6.0 * (t[2] / t[1]).powi(2))
    }

    /// Projective connection of the kernel at `x = 0`:
    /// `6 lim [K(z(x), z(y)) z'(x) z'(y) - 1/(x - y)^2]` as `x, y -> 0`,
    /// sampled at `x = -y = delta, delta/2, delta/4` with two Richardson
    /// levels. The samples lose about `eps / delta^3` to cancellation in
    /// `p(z) - lambda`, so `delta` should be a sizeable fraction of the chart.
    pub fn kernel_connection<L: LocalModel>(&self, cov: &L, delta: f64) -> Result<C64> {
        let regular = |d: f64| -> Result<C64> {
            let x = C64::new(d, 0.0);
            let (z1, d1) = self.dz(cov, x)?;
            let (z2, d2) = self.dz(cov, -x)?;
            Ok(cov.kernel(z1, z2)? * d1 * d2 - (2.0 * x).powi(-2))
        };
        let r: Vec<C64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|s| regular(delta * s))
            .collect::<Result<_>>()?;
        let r1 = (4.0 * r[1] - r[0]) / 3.0;
        let r2 = (4.0 * r[2] - r[1]) / 3.0;
        Ok(6.0 * (16.0 * r2 - r1) / 15.0)
    }
}

/// Radius for the Taylor circle: a fraction of the distance from `lambda_m`
/// to the other critical values, converted to the `x` scale.
pub fn chart_radius(lambda: &[C64], m: usize) -> f64 {
    let gap = lambda
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != m)
        .map(|(_, l)| (l - lambda[m]).norm())
        .fold(f64::INFINITY, f64::min);
    if gap.is_finite() {
        (0.1 * gap).sqrt().min(0.3)
    } else {
        0.3
    }
}

/// `dz / dzeta` at `zeta = 0` near the pole `b` of order `k`, where
/// `p(z) = zeta^-k`, on the branch `z ~ b + h_guess zeta`; the odd part of
/// two symmetric samples removes the `zeta^2` term.
pub fn pole_chart_derivative<L: LocalModel>(cov: &L, b: C64, h_guess: C64, k: usize, zeta: f64) -> Result<C64> {
    let solve = |s: f64| newton_solve(cov, C64::new(s, 0.0).powi(-(k as i32)), b + h_guess * s);
    let up = solve(zeta)?;
    let dn = solve(-zeta)?;
    let coarse = (up - dn) / (2.0 * zeta);
    let up2 = solve(zeta / 2.0)?;
    let dn2 = solve(-zeta / 2.0)?;
    let fine = (up2 - dn2) / zeta;
    Ok((4.0 * fine - coarse) / 3.0)
}
