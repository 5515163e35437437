use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tolerances::{MIN_IM_SIGMA, SERIES_CAP, SERIES_EPS};

/// Period ratio `sigma` of the lattice `Z + sigma Z` with its nome
/// `q = exp(2 pi i sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    sigma: C64,
    q: C64,
    truncation: usize,
}

/// A point written as `z0 + m + n sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced {
    pub z0: C64,
    pub m: i64,
    pub n: i64,
}

fn series_cap() -> usize {
    std::env::var("HURWITZ_TRUNC")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(SERIES_CAP)
}

impl Modulus {
    /// Rejects `Im sigma <= 0.1`. The series cap defaults to 400 terms and can
    /// be overridden with the `HURWITZ_TRUNC` environment variable.
    pub fn new(sigma: C64) -> Result<Self> {
        Self::with_cap(sigma, series_cap())
    }

    pub fn with_cap(sigma: C64, cap: usize) -> Result<Self> {
        if !sigma.is_finite() || sigma.im <= MIN_IM_SIGMA {
            return Err(Error::InvalidModulus(format!(
                "Im(sigma) = {} must exceed {MIN_IM_SIGMA}",
                sigma.im
            )));
        }
        let q = (C64::i() * 2.0 * PI * sigma).exp();
        // The slowest series used is sum n^5 q^n / (1 - q^n).
        let aq = q.norm();
        let mut truncation = 1;
        while truncation < cap && (truncation as f64).powi(5) * aq.powi(truncation as i32) >= SERIES_EPS {
            truncation += 1;
        }
        Ok(Modulus {
            sigma,
            q,
            truncation,
        })
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `log eta(sigma) = 2 pi i sigma / 24 + sum log(1 - q^n)`, continuous in
    /// `sigma` on the upper half plane.
    pub fn log_eta(&self) -> C64 {
        let mut acc = C64::i() * 2.0 * PI * self.sigma / 24.0;
        let mut qn = C64::new(1.0, 0.0);
        for _ in 1..=self.truncation {
            qn *= self.q;
            if qn.norm() < SERIES_EPS {
                break;
            }
            acc += (C64::new(1.0, 0.0) - qn).ln();
        }
        acc
    }

    /// Dedekind eta function.
    pub fn dedekind_eta(&self) -> C64 {
        self.log_eta().exp()
    }

    /// `sum_{n >= 1} n^power q^n / (1 - q^n)`.
    fn lambert(&self, power: i32) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut qn = C64::new(1.0, 0.0);
        for n in 1..=self.truncation {
            qn *= self.q;
            let term = (n as f64).powi(power) * qn / (C64::new(1.0, 0.0) - qn);
            acc += term;
            if term.norm() < SERIES_EPS * acc.norm().max(1.0) {
                break;
            }
        }
        acc
    }

    pub fn eisenstein_e2(&self) -> C64 {
        1.0 - 24.0 * self.lambert(1)
    }

    pub fn eisenstein_e4(&self) -> C64 {
        1.0 + 240.0 * self.lambert(3)
    }

    pub fn eisenstein_e6(&self) -> C64 {
        1.0 - 504.0 * self.lambert(5)
    }

    /// `d log eta / d sigma = (pi i / 12) E2(sigma)`.
    pub fn eta_tilde_e2(&self) -> C64 {
        C64::i() * PI / 12.0 * self.eisenstein_e2()
    }

    /// Writes `z = z0 + m + n sigma` with `z0 = x + y sigma`, `x, y` in
    /// `[-1/2, 1/2)`.
    pub fn reduce_centered(&self, z: C64) -> Reduced {
        let y = z.im / self.sigma.im;
        let n = y.round();
        let w = z - n * self.sigma;
        let m = w.re - (y - n) * self.sigma.re;
        let m = m.round();
        Reduced {
            z0: w - m,
            m: m as i64,
            n: n as i64,
        }
    }

    /// Representative of `z` in `{x + y sigma : x, y in [0, 1)}`.
    pub fn reduce(&self, z: C64) -> C64 {
        let (x, y) = self.real_coords(z);
        let (x, y) = (x - x.floor(), y - y.floor());
        // floor can return 1.0 after subtraction for tiny negative inputs
        let x = if x >= 1.0 { 0.0 } else { x };
        let y = if y >= 1.0 { 0.0 } else { y };
        self.from_coords(x, y)
    }

    /// Real coordinates `(x, y)` with `z = x + y sigma`.
    pub fn real_coords(&self, z: C64) -> (f64, f64) {
        let y = z.im / self.sigma.im;
        (z.re - y * self.sigma.re, y)
    }

    pub fn from_coords(&self, x: f64, y: f64) -> C64 {
        x + y * self.sigma
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn lattice_distance(&self, z: C64) -> f64 {
        let r = self.reduce_centered(z).z0;
        let mut best = f64::INFINITY;
        for dm in -1..=1 {
            for dn in -1..=1 {
                best = best.min((r - (dm as f64) - (dn as f64) * self.sigma).norm());
            }
        }
        best
    }

    /// Distance between `a` and `b` modulo the lattice.
    pub fn distance_mod_lattice(&self, a: C64, b: C64) -> f64 {
        self.lattice_distance(a - b)
    }
}
