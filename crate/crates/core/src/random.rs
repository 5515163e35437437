//! Seeded generators of generic test coverings.
//!
//! Every instance comes from a `ChaCha8Rng` seeded with a `u64`, so a seed
//! and a profile determine the covering on every platform. Draws that land
//! close to the caustic, close to a boundary component or on an
//! ill-conditioned deformation Jacobian are rejected and redrawn.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover0::{Covering0, Pole};
use crate::cover1::Covering1;
use crate::error::{Error, Result};
use crate::isomon::{DeformationJacobian, Deformable};

pub const GENUS0_PROFILES: [&[usize]; 5] = [&[3], &[2, 1], &[2, 2], &[3, 2], &[2, 1, 1]];
pub const GENUS1_PROFILES: [&[usize]; 3] = [&[2], &[1, 1], &[2, 1]];

/// Size of the generic complex perturbation added to every drawn parameter.
pub const PERTURBATION: f64 = 0.05;
const MAX_ATTEMPTS: usize = 200;
/// Smallest accepted critical-value separation relative to `max |lambda| + 1`.
const MIN_LAMBDA_GAP: f64 = 1e-2;
/// Smallest accepted distance between critical points, and from critical
/// points to poles.
const MIN_POINT_GAP: f64 = 0.05;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_box(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn jitter(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(PERTURBATION * rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI))
}

fn well_conditioned<C: Deformable>(cov: &C, alpha: &[C64]) -> bool {
    DeformationJacobian::of(cov, alpha).map(|j| j.rank_ok()).unwrap_or(false)
}

fn draw0(rng: &mut ChaCha8Rng, profile: &[usize]) -> Result<Covering0> {
    let k1 = profile[0];
    let coeffs = (0..k1 - 1).map(|_| unit_box(rng) + jitter(rng)).collect();
    let n = profile.len() - 1;
    let poles = profile[1..]
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let angle = 2.0 * PI * (i as f64 + rng.gen_range(0.2..0.8)) / n.max(1) as f64;
            let b = C64::from_polar(rng.gen_range(1.0..1.6), angle) + jitter(rng);
            let c = (0..k)
                .map(|_| C64::from_polar(rng.gen_range(0.4..1.2), rng.gen_range(0.0..2.0 * PI)) + jitter(rng))
                .collect();
            Pole::new(b, c)
        })
        .collect();
    Covering0::new(k1, coeffs, poles)
}

fn accept0(cov: &Covering0) -> bool {
    let Ok(cd) = cov.critical_data() else {
        return false;
    };
    let scale = cd.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max) + 1.0;
    let near_pole = cd
        .alpha
        .iter()
        .any(|a| cov.poles().iter().any(|p| (a - p.b).norm() < MIN_POINT_GAP));
    cd.min_lambda_separation > MIN_LAMBDA_GAP * scale
        && cd.min_alpha_separation > MIN_POINT_GAP
        && !near_pole
        && well_conditioned(cov, &cd.alpha)
}

/// A generic genus-zero covering of the given profile `(k_1, ..., k_l)`.
pub fn random_covering0(rng: &mut ChaCha8Rng, profile: &[usize]) -> Result<Covering0> {
    if profile.is_empty() || profile.contains(&0) {
        return Err(Error::InvalidInput(format!("invalid profile {profile:?}")));
    }
    for _ in 0..MAX_ATTEMPTS {
        if let Ok(cov) = draw0(rng, profile) {
            if accept0(&cov) {
                return Ok(cov);
            }
        }
    }
    Err(Error::NonConvergence { residual: f64::NAN })
}

fn draw1(rng: &mut ChaCha8Rng, profile: &[usize]) -> Result<Covering1> {
    let sigma = C64::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.8..1.5)) + jitter(rng);
    let l = profile.len();
    let mut poles: Vec<Pole> = profile
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let x = (i as f64 + rng.gen_range(0.2..0.8)) / l as f64;
            let b = C64::new(x, 0.0) + sigma * rng.gen_range(0.1..0.9) + jitter(rng);
            let c = (0..k)
                .map(|_| C64::from_polar(rng.gen_range(0.4..1.2), rng.gen_range(0.0..2.0 * PI)) + jitter(rng))
                .collect();
            Pole::new(b, c)
        })
        .collect();
    let residue: C64 = poles.iter().map(|p| p.c[0]).sum();
    poles[l - 1].c[0] -= residue;
    Covering1::new(sigma, unit_box(rng), poles)
}

fn accept1(cov: &Covering1) -> bool {
    let Ok(cd) = cov.critical_data() else {
        return false;
    };
    let scale = cd.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max) + 1.0;
    let m = cov.modulus();
    let near_pole = cd
        .alpha
        .iter()
        .any(|a| cov.poles().iter().any(|p| m.distance_mod_lattice(*a, p.b) < MIN_POINT_GAP));
    cd.min_lambda_separation > MIN_LAMBDA_GAP * scale
        && cd.min_alpha_separation > MIN_POINT_GAP
        && !near_pole
        && well_conditioned(cov, &cd.alpha)
}

/// A generic genus-one covering of the given profile; the residue of the
/// last pole is fixed by the residue theorem.
pub fn random_covering1(rng: &mut ChaCha8Rng, profile: &[usize]) -> Result<Covering1> {
    if profile.is_empty() || profile.contains(&0) || profile == [1] {
        return Err(Error::InvalidInput(format!("invalid genus-one profile {profile:?}")));
    }
    for _ in 0..MAX_ATTEMPTS {
        if let Ok(cov) = draw1(rng, profile) {
            if accept1(&cov) {
                return Ok(cov);
            }
        }
    }
    Err(Error::NonConvergence { residual: f64::NAN })
}
