//! Analysis reports. Every numeric field carries a verification status.

use std::fmt::Write as _;

use hurwitz_core::checks::{perturbations, ratio_drift, Analyzable, CheckOptions};
use hurwitz_core::isomon::{build_isomonodromy, euler_unit_checks, FdOptions};
use hurwitz_core::projective::{chart_radius, CriticalChart};
use hurwitz_core::tolerances::{CAUSTIC, ORACLE_TOL};
use hurwitz_core::{Result, C64};
use serde::{Serialize, Serializer};

use crate::spec::Model;

/// Two routes to `H` agree at least this well for `checked`.
const HAMILTONIAN_TOL: f64 = 1e-8;
/// Drift of the tau route ratio over nearby points for `checked`.
const ROUTE_TOL: f64 = 1e-7;
/// Finite-difference scaling checks.
const EULER_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Confirmed by an independent route.
    Checked,
    /// Closed form with no independent confirmation.
    Unchecked,
    /// An independent route disagrees, or the point is near the caustic.
    Warned,
}

impl Status {
    fn from_error(error: f64, tol: f64) -> Self {
        if error.is_finite() && error <= tol {
            Status::Checked
        } else {
            Status::Warned
        }
    }
}

/// Complex number serialized as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

fn cx(v: &[C64]) -> Vec<Cx> {
    v.iter().copied().map(Cx).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Field<T> {
    pub value: T,
    pub status: Status,
}

fn field<T>(value: T, status: Status) -> Field<T> {
    Field { value, status }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Named {
    pub name: String,
    pub value: Cx,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauRoutes {
    /// `log tau` from critical data (principal branches).
    pub log_tau: Cx,
    pub tau_m48_route_a: Cx,
    pub tau_m48_route_b: Cx,
    /// Route B over route A; constant on the space.
    pub ratio: Cx,
    /// Largest relative change of the ratio over nearby points.
    pub ratio_drift: f64,
    /// Genus zero: the resultant ratio `R(f, g) / (...)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resultant_ratio: Option<Cx>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausticInfo {
    pub min_lambda_separation: f64,
    pub min_alpha_separation: f64,
    pub near_caustic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub genus: u32,
    pub profile: Vec<usize>,
    pub degree: usize,
    pub dim: usize,
    pub critical_points: Field<Vec<Cx>>,
    pub lambda: Field<Vec<Cx>>,
    pub flat_coordinates: Field<Vec<Named>>,
    pub fsq: Field<Vec<Cx>>,
    pub s_w: Field<Vec<Cx>>,
    pub s_b: Field<Vec<Cx>>,
    pub h_hamiltonian: Field<Vec<Cx>>,
    pub h_from_s_b: Field<Vec<Cx>>,
    pub h_discrepancy: Field<f64>,
    pub tau: Field<TauRoutes>,
    pub g: Field<Cx>,
    pub g_from_tau: Field<Cx>,
    pub gamma: Field<f64>,
    pub euler_log_tau: Field<f64>,
    pub caustic: Field<CausticInfo>,
}

struct GenusParts {
    profile: Vec<usize>,
    degree: usize,
    flat: Vec<Named>,
    log_tau: C64,
    g: C64,
    g_from_tau: C64,
    min_alpha_separation: f64,
}

fn named(prefix: &str, values: &[C64], offset: usize) -> Vec<Named> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| Named {
            name: format!("{prefix}{}", i + offset),
            value: Cx(v),
        })
        .collect()
}

fn genus_parts(model: &Model, alpha: &[C64]) -> Result<GenusParts> {
    Ok(match model {
        Model::Genus0(c) => {
            let cd = c.critical_data_at(alpha)?;
            let flat = c.flat_coords();
            let g = c.g_function(&cd);
            let mut names = named("p", &flat.p, 2);
            names.extend(named("t", &flat.t, 2));
            GenusParts {
                profile: c.profile(),
                degree: c.degree(),
                flat: names,
                log_tau: c.tau_product(&cd).log_tau,
                g: g.g,
                g_from_tau: g.g_from_tau,
                min_alpha_separation: cd.min_alpha_separation,
            }
        }
        Model::Genus1(c) => {
            let cd = c.critical_data_at(alpha)?;
            let flat = c.flat_coords();
            let g = c.g_function(&cd);
            let mut names = vec![Named {
                name: "t0".into(),
                value: Cx(flat.t0),
            }];
            names.extend(named("t", &flat.t, 1));
            GenusParts {
                profile: c.profile(),
                degree: c.degree(),
                flat: names,
                log_tau: c.tau_product(&cd).log_tau,
                g: g.g,
                g_from_tau: g.g_from_tau,
                min_alpha_separation: cd.min_alpha_separation,
            }
        }
    })
}

/// Larger of two errors, with NaN dominating.
fn worse(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn build<C: Analyzable>(cov: &C, model: &Model) -> Result<Report> {
    let alpha = cov.critical_points()?;
    let point = cov.point(&alpha)?;
    let data = build_isomonodromy(&point)?;
    let parts = genus_parts(model, &alpha)?;
    let m = point.dim();

    // independent oracles; a failure leaves the field warned, not the run
    let oracle = |k: usize| -> Result<(f64, f64)> {
        let chart = CriticalChart::new(alpha[k], point.lambda[k], point.fsq[k]);
        let r = chart_radius(&point.lambda, k);
        let sw = chart.schwarzian(cov, r)?;
        let sb = chart.kernel_connection(cov, r / 4.0)?;
        Ok((
            (sw - point.sw[k]).norm() / point.sw[k].norm(),
            (sb - point.sb[k]).norm() / point.sb[k].norm(),
        ))
    };
    let (sw_err, sb_err) = (0..m)
        .map(|k| oracle(k).unwrap_or((f64::NAN, f64::NAN)))
        .fold((0.0f64, 0.0f64), |(a, b), (x, y)| (worse(a, x), worse(b, y)));

    let near_caustic = point.min_lambda_separation() < CAUSTIC * point.lambda_scale();
    let caustic_status = if near_caustic { Status::Warned } else { Status::Checked };
    let lambda_status = if near_caustic { Status::Warned } else { Status::Checked };

    let route_a = cov.route_a(&alpha)?;
    let route_b = cov.route_b(&alpha)?;
    let opts = CheckOptions {
        perturbations: 3,
        ..CheckOptions::default()
    };
    let mut ratios = vec![route_b / route_a];
    for (c, a) in perturbations(cov, &alpha, &opts) {
        ratios.push(c.route_b(&a).and_then(|b| Ok(b / c.route_a(&a)?)).unwrap_or(C64::new(f64::NAN, 0.0)));
    }
    let drift = if ratios.len() > 1 { ratio_drift(&ratios) } else { f64::NAN };

    let closed = cov.euler_log_tau();
    let (anomaly_err, euler_err) = euler_unit_checks(
        cov,
        &alpha,
        &data,
        |c: &C, _a: &[C64]| Ok(c.g_parts()),
        &cov.g_weights(),
        cov.gamma(),
        FdOptions::default(),
    )
    .map(|e| (e.anomaly_error(), (e.euler_log_tau - closed).norm()))
    .unwrap_or((f64::NAN, f64::NAN));

    let discrepancy = data.discrepancy();
    let h_status = Status::from_error(discrepancy, HAMILTONIAN_TOL);
    Ok(Report {
        genus: cov.genus(),
        profile: parts.profile,
        degree: parts.degree,
        dim: m,
        critical_points: field(cx(&alpha), lambda_status),
        lambda: field(cx(&point.lambda), lambda_status),
        flat_coordinates: field(parts.flat, Status::Unchecked),
        fsq: field(cx(&point.fsq), Status::Unchecked),
        s_w: field(cx(&point.sw), Status::from_error(sw_err, ORACLE_TOL)),
        s_b: field(cx(&point.sb), Status::from_error(sb_err, ORACLE_TOL)),
        h_hamiltonian: field(cx(&data.h), h_status),
        h_from_s_b: field(cx(&data.h_sb), h_status),
        h_discrepancy: field(discrepancy, h_status),
        tau: field(
            TauRoutes {
                log_tau: Cx(parts.log_tau),
                tau_m48_route_a: Cx(route_a),
                tau_m48_route_b: Cx(route_b),
                ratio: Cx(route_b / route_a),
                ratio_drift: drift,
                resultant_ratio: cov.resultant_ratio().map(Cx),
            },
            Status::from_error(drift, ROUTE_TOL),
        ),
        g: field(Cx(parts.g), Status::from_error(anomaly_err, EULER_TOL)),
        g_from_tau: field(Cx(parts.g_from_tau), Status::Unchecked),
        gamma: field(cov.gamma(), Status::from_error(anomaly_err, EULER_TOL)),
        euler_log_tau: field(closed, Status::from_error(euler_err, EULER_TOL)),
        caustic: field(
            CausticInfo {
                min_lambda_separation: point.min_lambda_separation(),
                min_alpha_separation: parts.min_alpha_separation,
                near_caustic,
            },
            caustic_status,
        ),
    })
}

pub fn analyze(model: &Model) -> Result<Report> {
    match model {
        Model::Genus0(c) => build(c, model),
        Model::Genus1(c) => build(c, model),
    }
}

pub fn fmt_c(z: C64) -> String {
    format!("{:.12e}{:+.12e}i", z.re, z.im)
}

fn fmt_list(v: &[Cx]) -> String {
    v.iter().map(|z| fmt_c(z.0)).collect::<Vec<_>>().join(", ")
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let mut row = |name: &str, status: Status, value: String| {
            let tag = match status {
                Status::Checked => "checked",
                Status::Unchecked => "unchecked",
                Status::Warned => "WARNED",
            };
            let _ = writeln!(out, "{name:<18} [{tag:<9}] {value}");
        };
        row(
            "covering",
            Status::Checked,
            format!("genus {}, profile {:?}, N = {}, M = {}", self.genus, self.profile, self.degree, self.dim),
        );
        row("critical points", self.critical_points.status, fmt_list(&self.critical_points.value));
        row("lambda", self.lambda.status, fmt_list(&self.lambda.value));
        let flat = self
            .flat_coordinates
            .value
            .iter()
            .map(|n| format!("{} = {}", n.name, fmt_c(n.value.0)))
            .collect::<Vec<_>>()
            .join(", ");
        let flat = if flat.is_empty() { "none (polynomial covering)".into() } else { flat };
        row("flat coordinates", self.flat_coordinates.status, flat);
        row("f^2", self.fsq.status, fmt_list(&self.fsq.value));
        row("S_W", self.s_w.status, fmt_list(&self.s_w.value));
        row("S_B", self.s_b.status, fmt_list(&self.s_b.value));
        row("H (rotation)", self.h_hamiltonian.status, fmt_list(&self.h_hamiltonian.value));
        row("H (S_B / 24)", self.h_from_s_b.status, fmt_list(&self.h_from_s_b.value));
        row("H discrepancy", self.h_discrepancy.status, format!("{:.3e}", self.h_discrepancy.value));
        let t = &self.tau.value;
        row("log tau", self.tau.status, fmt_c(t.log_tau.0));
        row("tau^-48 route A", self.tau.status, fmt_c(t.tau_m48_route_a.0));
        row("tau^-48 route B", self.tau.status, fmt_c(t.tau_m48_route_b.0));
        row(
            "route ratio",
            self.tau.status,
            format!("{} (drift {:.3e})", fmt_c(t.ratio.0), t.ratio_drift),
        );
        if let Some(r) = t.resultant_ratio {
            row("resultant ratio", Status::Unchecked, fmt_c(r.0));
        }
        row("G", self.g.status, fmt_c(self.g.value.0));
        row("G from tau", self.g_from_tau.status, fmt_c(self.g_from_tau.value.0));
        row("gamma", self.gamma.status, format!("{:.12e}", self.gamma.value));
        row("E(log tau)", self.euler_log_tau.status, format!("{:.12e}", self.euler_log_tau.value));
        let c = &self.caustic.value;
        row(
            "caustic",
            self.caustic.status,
            format!(
                "min |lambda_m - lambda_n| = {:.3e}, min |alpha_m - alpha_n| = {:.3e}{}",
                c.min_lambda_separation,
                c.min_alpha_separation,
                if c.near_caustic { ", near the caustic" } else { "" }
            ),
        );
        out
    }
}
