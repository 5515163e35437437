//! Library behind the `hurwitz` binary: spec files, reports and the four
//! commands, each returning its output and exit status.

pub mod report;
pub mod spec;

use std::fmt::Write as _;

use hurwitz_core::checks::{ratio_drift, run_checks, Analyzable, CheckOptions};
use hurwitz_core::random::{random_covering0, rng};
use hurwitz_core::tolerances::CAUSTIC;
use hurwitz_core::{Covering0, Covering1, Error, Pole, C64};
use serde::Serialize;

use report::{fmt_c, Cx};
use spec::{CoveringSpec, Model};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// An identity check failed, or a computation did not converge.
    Failure = 1,
    /// Parse error, invalid input or unknown name.
    Parse = 2,
    /// The covering lies on a boundary component.
    Boundary = 3,
    /// Critical values coalesce (with `--strict`).
    Caustic = 4,
    /// A sweep left the space.
    SweepAborted = 5,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub status: ExitStatus,
    pub message: String,
}

impl CliError {
    pub fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        CliError {
            status,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// What a command prints and how the process should exit.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub status: ExitStatus,
    /// Diagnostic for stderr.
    pub message: Option<String>,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            stdout,
            status: ExitStatus::Success,
            message: None,
        }
    }
}

fn computation_error(e: Error) -> CliError {
    match e {
        Error::Caustic(_) => CliError::new(ExitStatus::Caustic, e.to_string()),
        Error::OnBoundary { .. } | Error::CommonRoot(_) => spec::construction_error("", e),
        other => CliError::new(ExitStatus::Failure, other.to_string()),
    }
}

fn load(text: &str) -> Result<Model, CliError> {
    CoveringSpec::parse(text)?.build(text)
}

pub fn cmd_analyze(text: &str, json: bool, strict: bool) -> Result<Output, CliError> {
    let model = load(text)?;
    let report = report::analyze(&model).map_err(computation_error)?;
    let stdout = if json { report.to_json() + "\n" } else { report.to_table() };
    let mut out = Output::ok(stdout);
    if report.caustic.value.near_caustic {
        let msg = format!(
            "warning: critical values nearly coalesce (min separation {:e})",
            report.caustic.value.min_lambda_separation
        );
        if strict {
            out.status = ExitStatus::Caustic;
        }
        out.message = Some(msg);
    }
    Ok(out)
}

pub fn cmd_check(text: &str, opts: &CheckOptions) -> Result<Output, CliError> {
    let results = match load(text)? {
        Model::Genus0(c) => run_checks(&c, opts),
        Model::Genus1(c) => run_checks(&c, opts),
    }
    .map_err(computation_error)?;
    let mut stdout = String::new();
    for r in &results {
        let _ = writeln!(
            stdout,
            "{} {:<20} error {:.3e}  tol {:.1e}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.error,
            r.tol,
            r.description
        );
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(stdout, "{} of {} identities passed", results.len() - failed, results.len());
    let mut out = Output::ok(stdout);
    if failed > 0 {
        out.status = ExitStatus::Failure;
        out.message = Some(format!("{failed} identities failed"));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepStep {
    pub step: usize,
    pub value: Cx,
    pub route_ratio: Cx,
    pub route_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resultant_drift: Option<f64>,
    pub min_lambda_separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub param: String,
    pub from: Cx,
    pub to: Cx,
    pub steps: Vec<SweepStep>,
    pub max_route_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_resultant_drift: Option<f64>,
    /// Why the sweep stopped early.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

impl SweepReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "sweep {} from {} to {}\n{:>4}  {:<40} {:>12} {:>12} {:>12}\n",
            self.param,
            fmt_c(self.from.0),
            fmt_c(self.to.0),
            "step",
            "value",
            "route drift",
            "res. drift",
            "min gap"
        );
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{:>4}  {:<40} {:>12.3e} {:>12} {:>12.3e}",
                s.step,
                fmt_c(s.value.0),
                s.route_drift,
                s.resultant_drift.map_or("-".into(), |d| format!("{d:.3e}")),
                s.min_lambda_separation
            );
        }
        let _ = writeln!(out, "max route drift {:.3e}", self.max_route_drift);
        if let Some(d) = self.max_resultant_drift {
            let _ = writeln!(out, "max resultant-ratio drift {d:.3e}");
        }
        if let Some(a) = &self.aborted {
            let _ = writeln!(out, "aborted: {a}");
        }
        out
    }
}

fn sweep<C: Analyzable>(cov: &C, param: &str, to: C64, steps: usize) -> Result<SweepReport, CliError> {
    let names = cov.param_names();
    let Some(idx) = names.iter().position(|n| n == param) else {
        return Err(CliError::new(
            ExitStatus::Parse,
            format!("unknown parameter {param}; valid paths: {}", names.join(", ")),
        ));
    };
    if steps == 0 {
        return Err(CliError::new(ExitStatus::Parse, "--steps must be positive"));
    }
    let p0 = cov.params();
    let from = p0[idx];
    let mut alpha = cov.critical_points().map_err(computation_error)?;
    let mut report = SweepReport {
        param: param.to_string(),
        from: Cx(from),
        to: Cx(to),
        steps: Vec::new(),
        max_route_drift: 0.0,
        max_resultant_drift: None,
        aborted: None,
    };
    let mut ratios = Vec::new();
    let mut resultants = Vec::new();
    for step in 0..=steps {
        let value = from + (to - from) * (step as f64 / steps as f64);
        let mut p = p0.clone();
        p[idx] = value;
        let outcome = (|| -> Result<(C64, Option<C64>, f64), String> {
            let c = cov.with_params(&p).map_err(|e| match e {
                Error::OnBoundary { component, .. } => format!("crosses boundary component {component}"),
                other => other.to_string(),
            })?;
            let next = c
                .track_critical_points(&alpha)
                .map_err(|e| format!("critical points lost ({e}); the caustic lies on the segment"))?;
            let point = c.point(&next).map_err(|e| e.to_string())?;
            let gap = point.min_lambda_separation();
            let alpha_gap = hurwitz_core::isomon::min_separation(&next);
            if gap < CAUSTIC * point.lambda_scale() || alpha_gap < 1e-6 {
                return Err(format!("reaches the caustic (min critical-value gap {gap:e})"));
            }
            alpha = next;
            let ratio = c.route_b(&alpha).map_err(|e| e.to_string())? / c.route_a(&alpha).map_err(|e| e.to_string())?;
            Ok((ratio, c.resultant_ratio(), gap))
        })();
        let (ratio, resultant, gap) = match outcome {
            Ok(v) => v,
            Err(e) => {
                report.aborted = Some(format!("step {step}: {e}"));
                break;
            }
        };
        ratios.push(ratio);
        if let Some(r) = resultant {
            resultants.push(r);
        }
        let route_drift = (ratio / ratios[0] - 1.0).norm();
        let resultant_drift = resultant.map(|r| (r / resultants[0] - 1.0).norm());
        report.steps.push(SweepStep {
            step,
            value: Cx(value),
            route_ratio: Cx(ratio),
            route_drift,
            resultant_drift,
            min_lambda_separation: gap,
        });
    }
    report.max_route_drift = if ratios.is_empty() { 0.0 } else { ratio_drift(&ratios) };
    if !resultants.is_empty() {
        report.max_resultant_drift = Some(ratio_drift(&resultants));
    }
    Ok(report)
}

pub fn cmd_sweep(text: &str, param: &str, to: C64, steps: usize, json: bool) -> Result<Output, CliError> {
    let report = match load(text)? {
        Model::Genus0(c) => sweep(&c, param, to, steps),
        Model::Genus1(c) => sweep(&c, param, to, steps),
    }?;
    let stdout = if json {
        serde_json::to_string_pretty(&report).expect("sweep serializes") + "\n"
    } else {
        report.to_table()
    };
    let mut out = Output::ok(stdout);
    if let Some(a) = &report.aborted {
        out.status = ExitStatus::SweepAborted;
        out.message = Some(a.clone());
    }
    Ok(out)
}

pub const EXAMPLES: [&str; 3] = ["a2", "h0_surf", "h12"];

/// Seed of the `h0_surf` example.
pub const H0_SURF_SEED: u64 = 42;

/// The built-in coverings: the A2 cubic `z^3 - 3z`, a fixed random
/// covering of profile `(2, 2)` and the genus-one space `H_{1,2}(2)` at
/// `sigma = 1.1i`.
pub fn example_model(name: &str) -> Result<Model, CliError> {
    let c = C64::new;
    let model = match name {
        "a2" => Covering0::polynomial(vec![c(0.0, 0.0), c(-3.0, 0.0)]).map(Model::Genus0),
        "h0_surf" => random_covering0(&mut rng(H0_SURF_SEED), &[2, 2]).map(Model::Genus0),
        "h12" => Covering1::new(
            c(0.0, 1.1),
            c(0.0, 0.0),
            vec![Pole::new(c(0.23, 0.31), vec![c(0.0, 0.0), c(1.0, 0.0)])],
        )
        .map(Model::Genus1),
        other => {
            return Err(CliError::new(
                ExitStatus::Parse,
                format!("unknown example {other}; available: {}", EXAMPLES.join(", ")),
            ))
        }
    };
    model.map_err(|e| CliError::new(ExitStatus::Failure, e.to_string()))
}

pub fn cmd_example(name: &str) -> Result<String, CliError> {
    Ok(CoveringSpec::from_model(&example_model(name)?).to_json() + "\n")
}

/// Parses `RE,IM`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok(C64::new(parse(re)?, parse(im)?))
}
