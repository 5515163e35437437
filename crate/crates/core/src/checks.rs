//! The identity suite: every differential and closed-form identity that can
//! be verified at a single point of a Hurwitz space, measured against a
//! tolerance.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::cover0::Covering0;
use crate::cover1::Covering1;
use crate::error::Result;
use crate::isomon::{build_isomonodromy, euler_unit_checks, lambda_gradient, Deformable, FdOptions, Point};
use crate::projective::{chart_radius, CriticalChart, LocalModel};
use crate::random::rng;

/// Common interface of the two genera for the identity suite.
pub trait Analyzable: Deformable + LocalModel + Clone {
    fn genus(&self) -> u32;
    /// Route A value of `tau^-48` (from critical data).
    fn route_a(&self, alpha: &[C64]) -> Result<C64>;
    /// Route B value of `tau^-48` (resultant or sigma-product form).
    fn route_b(&self, alpha: &[C64]) -> Result<C64>;
    /// Resultant ratio of `f` and `g` (genus zero only).
    fn resultant_ratio(&self) -> Option<C64>;
    /// `G = sum_i w_i log X_i`: returns `X`.
    fn g_parts(&self) -> Vec<C64>;
    fn g_weights(&self) -> Vec<C64>;
    fn gamma(&self) -> f64;
    /// Closed-form `E(log tau)`.
    fn euler_log_tau(&self) -> f64;
    fn modulus_value(&self) -> Option<C64>;
}

fn tail_weights(orders: impl Iterator<Item = usize>) -> Vec<C64> {
    orders
        .map(|k| C64::new(-((k + 1) as f64) / (24.0 * k as f64), 0.0))
        .collect()
}

impl Analyzable for Covering0 {
    fn genus(&self) -> u32 {
        0
    }

    fn route_a(&self, alpha: &[C64]) -> Result<C64> {
        Ok(self.tau_product(&self.critical_data_at(alpha)?).tau_m48)
    }

    fn route_b(&self, _alpha: &[C64]) -> Result<C64> {
        Ok(self.tau_resultant())
    }

    fn resultant_ratio(&self) -> Option<C64> {
        Some(Covering0::resultant_ratio(self))
    }

    fn g_parts(&self) -> Vec<C64> {
        self.flat_coords().t_pow
    }

    fn g_weights(&self) -> Vec<C64> {
        tail_weights(self.poles().iter().map(|p| p.order()))
    }

    fn gamma(&self) -> f64 {
        Covering0::gamma(self)
    }

    fn euler_log_tau(&self) -> f64 {
        Covering0::euler_log_tau(self)
    }

    fn modulus_value(&self) -> Option<C64> {
        None
    }
}

impl Analyzable for Covering1 {
    fn genus(&self) -> u32 {
        1
    }

    fn route_a(&self, alpha: &[C64]) -> Result<C64> {
        Ok(self.tau_product(&self.critical_data_at(alpha)?).tau_m48)
    }

    fn route_b(&self, alpha: &[C64]) -> Result<C64> {
        self.tau_resultant(alpha)
    }

    fn resultant_ratio(&self) -> Option<C64> {
        None
    }

    fn g_parts(&self) -> Vec<C64> {
        let mut v = vec![(24.0 * self.modulus().log_eta()).exp()];
        v.extend(self.flat_coords().t_pow);
        v
    }

    fn g_weights(&self) -> Vec<C64> {
        let mut v = vec![C64::new(-1.0 / 24.0, 0.0)];
        v.extend(tail_weights(self.poles().iter().map(|p| p.order())));
        v
    }

    fn gamma(&self) -> f64 {
        Covering1::gamma(self)
    }

    fn euler_log_tau(&self) -> f64 {
        Covering1::euler_log_tau(self)
    }

    fn modulus_value(&self) -> Option<C64> {
        Some(self.sigma())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub fd_step: f64,
    pub tol: f64,
    pub seed: u64,
    /// Number of random perturbations for the constancy checks.
    pub perturbations: usize,
    /// Relative size of those perturbations.
    pub perturbation_size: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            fd_step: crate::tolerances::FD_STEP,
            tol: 1e-6,
            seed: 42,
            perturbations: 5,
            perturbation_size: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub description: &'static str,
    /// Relative error unless the description says otherwise.
    pub error: f64,
    pub tol: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &'static str, description: &'static str, error: f64, tol: f64) -> Self {
        CheckResult {
            name,
            description,
            error,
            tol,
            passed: error.is_finite() && error <= tol,
        }
    }
}

fn max_norm(v: impl IntoIterator<Item = C64>) -> f64 {
    v.into_iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// Derivatives that the first-order identities need, all from one
/// finite-difference sweep over the critical values.
pub struct Gradients {
    /// `d log tau^-48 / d lambda_k`.
    pub log_tau48: Vec<C64>,
    /// `[k][n] = d log fsq_n / d lambda_k`.
    pub log_fsq: Vec<Vec<C64>>,
    /// `[k][s] = d log h_s^{k_s} / d lambda_k`.
    pub log_h_pow: Vec<Vec<C64>>,
    /// `d sigma / d lambda_k` (genus one).
    pub sigma: Vec<C64>,
}

pub fn gradients<C: Analyzable>(cov: &C, point: &Point, opts: FdOptions) -> Result<Gradients> {
    let m = point.dim();
    let n_inf = point.h_pow.len();
    let with_sigma = cov.modulus_value().is_some();
    let f = |c: &C, a: &[C64]| -> Result<Vec<C64>> {
        let p = c.point(a)?;
        let mut v = vec![c.route_a(a)?];
        v.extend(p.fsq);
        v.extend(p.h_pow);
        if let Some(s) = c.modulus_value() {
            v.push(s);
        }
        Ok(v)
    };
    let grad = lambda_gradient(cov, &point.alpha, f, FdOptions { log: true, ..opts })?;
    let sigma0 = cov.modulus_value().unwrap_or_default();
    Ok(Gradients {
        log_tau48: grad.iter().map(|g| g[0]).collect(),
        log_fsq: grad.iter().map(|g| g[1..1 + m].to_vec()).collect(),
        log_h_pow: grad.iter().map(|g| g[1 + m..1 + m + n_inf].to_vec()).collect(),
        sigma: if with_sigma {
            grad.iter().map(|g| g[1 + m + n_inf] * sigma0).collect()
        } else {
            Vec::new()
        },
    })
}

/// Largest relative deviation of `values[i] / values[0]` from one; NaN if
/// any value is not finite.
pub fn ratio_drift(values: &[C64]) -> f64 {
    values.iter().map(|v| (v / values[0] - 1.0).norm()).fold(0.0, |acc, d| {
        if acc.is_nan() || !d.is_finite() {
            f64::NAN
        } else {
            acc.max(d)
        }
    })
}

/// Seeded nearby points of the same Hurwitz space, with critical points
/// continued from `alpha`.
pub fn perturbations<C: Analyzable>(cov: &C, alpha: &[C64], opts: &CheckOptions) -> Vec<(C, Vec<C64>)> {
    let mut r = rng(opts.seed);
    let p0 = cov.params();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < opts.perturbations && attempts < 10 * opts.perturbations.max(1) {
        attempts += 1;
        let p: Vec<C64> = p0
            .iter()
            .map(|x| {
                let d = C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
                x + d * opts.perturbation_size * x.norm().max(1.0)
            })
            .collect();
        if let Ok(c) = cov.with_params(&p) {
            if let Ok(a) = c.track_critical_points(alpha) {
                out.push((c, a));
            }
        }
    }
    out
}

/// Runs the identity suite at one point.
pub fn run_checks<C: Analyzable>(cov: &C, opts: &CheckOptions) -> Result<Vec<CheckResult>> {
    let alpha = cov.critical_points()?;
    let point = cov.point(&alpha)?;
    let data = build_isomonodromy(&point)?;
    let fd = FdOptions {
        step: opts.fd_step,
        ..FdOptions::default()
    };
    let tol = opts.tol;
    let m = point.dim();
    let mut out = Vec::new();

    out.push(CheckResult::new(
        "hamiltonian_routes",
        "H_m from rotation coefficients vs S_B(x_m)/24",
        data.discrepancy(),
        tol,
    ));
    out.push(CheckResult::new(
        "sum_hamiltonians",
        "e(log tau) = sum H_m = 0, relative to sum |H_m|",
        data.h.iter().sum::<C64>().norm() / data.h.iter().map(|h| h.norm()).sum::<f64>().max(f64::MIN_POSITIVE),
        tol,
    ));
    out.push(CheckResult::new(
        "v_antisymmetry",
        "V + V^T = 0",
        data.antisymmetry_defect(),
        tol,
    ));

    let g = gradients(cov, &point, fd)?;
    let h_scale = max_norm(data.h.iter().copied());
    let tau_err = (0..m)
        .map(|k| (-g.log_tau48[k] / 48.0 - data.h[k]).norm())
        .fold(0.0, f64::max);
    out.push(CheckResult::new(
        "tau_system",
        "d log tau / d lambda_k = H_k (finite differences)",
        rel(tau_err, h_scale),
        tol,
    ));

    // T = log(prod f_m / prod h_s^(k_s+1)), dT/d lambda_k = S_W(x_k)
    let t_err = (0..m)
        .map(|k| {
            let d: C64 = g.log_fsq[k].iter().sum::<C64>() / 2.0
                - g.log_h_pow[k]
                    .iter()
                    .zip(&point.orders)
                    .map(|(x, &ks)| x * ((ks + 1) as f64 / ks as f64))
                    .sum::<C64>();
            (d - point.sw[k]).norm()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::new(
        "t_functional",
        "d T / d lambda_k = S_W(x_k) (finite differences)",
        rel(t_err, max_norm(point.sw.iter().copied())),
        tol,
    ));

    let mut rauch_err = 0.0f64;
    let mut rauch_scale = 0.0f64;
    for k in 0..m {
        for n in 0..m {
            if n != k {
                let expect = point.fsq[k] * point.kernel[(k, n)];
                rauch_err = rauch_err.max((g.log_fsq[k][n] - expect).norm());
                rauch_scale = rauch_scale.max(expect.norm());
            }
        }
    }
    out.push(CheckResult::new(
        "rauch_f",
        "d f_n / d lambda_m = b(P_m, P_n) f_m / 2",
        rel(rauch_err, rauch_scale),
        tol,
    ));
    if !point.h_pow.is_empty() {
        let mut err = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..m {
            for (s, &ks) in point.orders.iter().enumerate() {
                let expect = point.fsq[k] * point.kernel_inf[(k, s)] * (ks as f64 / 2.0);
                err = err.max((g.log_h_pow[k][s] - expect).norm());
                scale = scale.max(expect.norm());
            }
        }
        out.push(CheckResult::new(
            "rauch_h",
            "d h_s / d lambda_m = b(P_m, inf_s) f_m / 2",
            rel(err, scale),
            tol,
        ));
    }
    if !g.sigma.is_empty() {
        let err = (0..m)
            .map(|k| (g.sigma[k] - C64::i() * PI * point.fsq[k]).norm())
            .fold(0.0, f64::max);
        out.push(CheckResult::new(
            "modulus_flow",
            "d sigma / d lambda_k = pi i f_k^2",
            rel(err, max_norm(point.fsq.iter().map(|f| f * PI))),
            tol,
        ));
    }

    let report = euler_unit_checks(
        cov,
        &alpha,
        &data,
        |c: &C, _a: &[C64]| Ok(c.g_parts()),
        &cov.g_weights(),
        cov.gamma(),
        fd,
    )?;
    out.push(CheckResult::new(
        "euler_g",
        "E(G) = gamma (absolute)",
        report.anomaly_error(),
        tol,
    ));
    out.push(CheckResult::new(
        "unit_g",
        "e(G) = 0 (absolute)",
        report.e_of_g.norm(),
        tol,
    ));
    let closed = cov.euler_log_tau();
    out.push(CheckResult::new(
        "euler_tau",
        "E(log tau) = sum lambda_m H_m equals its closed-form degree",
        rel((report.euler_log_tau - closed).norm(), closed.abs()),
        tol,
    ));

    let sb_err = (0..m)
        .map(|k| -> Result<f64> {
            let chart = CriticalChart::new(alpha[k], point.lambda[k], point.fsq[k]);
            let r = chart_radius(&point.lambda, k);
            let sw = chart.schwarzian(cov, r)?;
            let sb = chart.kernel_connection(cov, r / 4.0)?;
            Ok(((sw - point.sw[k]).norm() / point.sw[k].norm()).max((sb - point.sb[k]).norm() / point.sb[k].norm()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(CheckResult::new(
        "projective_oracles",
        "S_W by local inversion and S_B by kernel expansion vs closed forms",
        sb_err,
        tol.max(crate::tolerances::ORACLE_TOL),
    ));

    let nearby = perturbations(cov, &alpha, opts);
    let mut route = vec![cov.route_b(&alpha)? / cov.route_a(&alpha)?];
    let mut resultant = cov.resultant_ratio().into_iter().collect::<Vec<_>>();
    let mut euler = Vec::new();
    for (c, a) in &nearby {
        route.push(c.route_b(a)? / c.route_a(a)?);
        if let Some(l) = c.resultant_ratio() {
            resultant.push(l);
        }
        let d = build_isomonodromy(&c.point(a)?)?;
        euler.push(d.h.iter().zip(&d.lambda).map(|(h, l)| h * l).sum::<C64>());
    }
    out.push(CheckResult::new(
        "route_ratio",
        "route A / route B tau^-48 constant over nearby points",
        ratio_drift(&route),
        tol.max(1e-7),
    ));
    if !resultant.is_empty() {
        out.push(CheckResult::new(
            "resultant_ratio",
            "resultant product ratio constant over nearby points",
            ratio_drift(&resultant),
            tol,
        ));
    }
    out.push(CheckResult::new(
        "euler_tau_constancy",
        "sum lambda_m H_m constant over nearby points (absolute)",
        euler.iter().map(|e| (e - closed).norm()).fold(0.0, f64::max),
        tol,
    ));
    Ok(out)
}
