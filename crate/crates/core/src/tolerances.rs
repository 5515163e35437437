//! Numerical thresholds shared across modules.
//!
//! Every threshold used by the library is pinned here so that checks, the CLI
//! and the acceptance suite agree on a single value.

/// Newton polishing stops once `|p(r)| < ROOT_POLISH * max|coeff|`.
pub const ROOT_POLISH: f64 = 1e-13;

/// Maximum Newton polishing steps per root.
pub const ROOT_POLISH_STEPS: usize = 50;

/// Backward error above which a root set is reported as non-converged.
pub const ROOT_BACKWARD_ERROR: f64 = 1e-8;

/// Smallest admissible imaginary part of the period ratio.
pub const MIN_IM_SIGMA: f64 = 0.1;

/// Magnitude below which series terms are dropped.
pub const SERIES_EPS: f64 = 1e-16;

/// Hard cap on the number of series terms (overridden by `HURWITZ_TRUNC`).
pub const SERIES_CAP: usize = 400;

/// Pole/zero exclusion radius around lattice points.
pub const LATTICE_PROXIMITY: f64 = 1e-8;

/// Relative critical-value separation flagged as caustic:
/// `min |lambda_m - lambda_n| < CAUSTIC * (max |lambda| + 1)`.
pub const CAUSTIC: f64 = 1e-6;

/// Normalized `|R(f, g)|` below which f and g are treated as sharing a root.
pub const COMMON_ROOT: f64 = 1e-14;

/// Residue-sum tolerance for elliptic coverings.
pub const RESIDUE_SUM: f64 = 1e-12;

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Largest admissible condition number of the deformation jacobian.
pub const MAX_CONDITION: f64 = 1e8;

/// Fit residual (rms of log10 values) above which a slope estimate is unstable.
pub const SLOPE_RESIDUAL: f64 = 0.05;

/// Slack allowed when comparing an estimated vanishing order with a lower bound.
pub const SLOPE_SLACK: f64 = 0.05;

/// Pole separation (mod lattice in genus one) and top tail coefficient
/// magnitude below which a covering is on the Hurwitz-space boundary.
pub const BOUNDARY_DISTANCE: f64 = 1e-10;

/// Newton tracking of critical points stops at this relative step.
pub const TRACK_STEP: f64 = 1e-14;

/// Agreement required between the closed-form projective connections and
/// their local-inversion and kernel-expansion oracles.
pub const ORACLE_TOL: f64 = 1e-5;
