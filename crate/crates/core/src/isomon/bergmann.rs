use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::Point;
use crate::error::{Error, Result};

/// Rotation coefficients, commutator, Hamiltonians and Schlesinger residues
/// at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct IsomonodromyData {
    /// `gamma_mn = b(P_m, P_n) / 2`, zero diagonal.
    pub gamma: DMatrix<C64>,
    /// `V_mn = gamma_mn (lambda_n - lambda_m)`.
    pub v: DMatrix<C64>,
    /// `H_m = (1/2) sum_n V_nm^2 / (lambda_m - lambda_n)`.
    pub h: Vec<C64>,
    /// `H_m = S_B(x_m) / 24`.
    pub h_sb: Vec<C64>,
    /// `A_k`: row `k` equal to row `k` of `V`, all other rows zero.
    pub a: Vec<DMatrix<C64>>,
    pub lambda: Vec<C64>,
}

impl IsomonodromyData {
    /// `max_m |H_m - H_m^SB| / max_m |H_m|`.
    pub fn discrepancy(&self) -> f64 {
        let scale = self.h.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let diff = self
            .h
            .iter()
            .zip(&self.h_sb)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    /// `max |V + V^T| / max |V|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let scale = self.v.iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (&self.v + self.v.transpose()).iter().map(|x| x.norm()).fold(0.0, f64::max) / scale
    }

    /// Value of the Fuchsian system `sum_k A_k / (lambda - lambda_k)`.
    pub fn fuchsian(&self, lambda: C64) -> DMatrix<C64> {
        let m = self.lambda.len();
        self.a
            .iter()
            .zip(&self.lambda)
            .fold(DMatrix::zeros(m, m), |acc, (ak, lk)| acc + ak / (lambda - lk))
    }
}

/// `b(P_m, P_n)` (zero diagonal) and `b(P_m, inf_s)` with principal `f_m`, `h_s`.
pub fn bergmann_values(point: &Point) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let f = point.f();
    let h = point.h();
    let m = point.dim();
    for i in 0..m {
        for j in 0..m {
            if i != j && !point.kernel[(i, j)].is_finite() {
                return Err(Error::Coincident);
            }
        }
    }
    if point.kernel_inf.iter().any(|x| !x.is_finite()) {
        return Err(Error::Coincident);
    }
    let b = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(0.0, 0.0)
        } else {
            point.kernel[(i, j)] * f[i] * f[j]
        }
    });
    let b_inf = DMatrix::from_fn(m, h.len(), |i, s| point.kernel_inf[(i, s)] * f[i] * h[s]);
    Ok((b, b_inf))
}

/// Builds rotation coefficients, `V`, both Hamiltonian vectors and the
/// Schlesinger residues.
pub fn build_isomonodromy(point: &Point) -> Result<IsomonodromyData> {
    let (b, _) = bergmann_values(point)?;
    let m = point.dim();
    let lambda = &point.lambda;
    let gamma = b / C64::new(2.0, 0.0);
    let v = DMatrix::from_fn(m, m, |i, j| gamma[(i, j)] * (lambda[j] - lambda[i]));
    let h = (0..m)
        .map(|i| {
            (0..m)
                .filter(|&n| n != i)
                .map(|n| v[(n, i)] * v[(n, i)] / (lambda[i] - lambda[n]))
                .sum::<C64>()
                / 2.0
        })
        .collect();
    let h_sb = point.sb.iter().map(|s| s / 24.0).collect();
    let a = (0..m)
        .map(|k| DMatrix::from_fn(m, m, |i, j| if i == k { v[(k, j)] } else { C64::new(0.0, 0.0) }))
        .collect();
    Ok(IsomonodromyData {
        gamma,
        v,
        h,
        h_sb,
        a,
        lambda: lambda.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// A2 data written out by hand: alpha = +-1, lambda = -+2, p'' = +-6.
    fn a2_point() -> Point {
        let alpha = vec![c(1.0, 0.0), c(-1.0, 0.0)];
        let kernel = DMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(0.0, 0.0)
            } else {
                (alpha[i] - alpha[j]).powi(-2)
            }
        });
        Point {
            alpha,
            lambda: vec![c(-2.0, 0.0), c(2.0, 0.0)],
            fsq: vec![c(1.0 / 3.0, 0.0), c(-1.0 / 3.0, 0.0)],
            sw: vec![c(1.0 / 12.0, 0.0), c(-1.0 / 12.0, 0.0)],
            sb: vec![c(1.0 / 12.0, 0.0), c(-1.0 / 12.0, 0.0)],
            kernel,
            kernel_inf: DMatrix::zeros(2, 0),
            h_pow: vec![],
            orders: vec![],
            modulus: None,
        }
    }

    #[test]
    fn a2_hamiltonians_by_both_routes() {
        let data = build_isomonodromy(&a2_point()).unwrap();
        assert!((data.h[0] - 1.0 / 288.0).norm() < 1e-15);
        assert!((data.h[1] + 1.0 / 288.0).norm() < 1e-15);
        assert!(data.discrepancy() < 1e-13);
        let f = a2_point().f();
        assert!((data.gamma[(0, 1)] - f[0] * f[1] / 8.0).norm() < 1e-15);
    }

    #[test]
    fn bergmann_symmetry() {
        let (b, _) = bergmann_values(&a2_point()).unwrap();
        assert!((b[(0, 1)] - b[(1, 0)]).norm() < 1e-15);
    }

    #[test]
    fn v_is_antisymmetric_and_hamiltonians_sum_to_zero() {
        let data = build_isomonodromy(&a2_point()).unwrap();
        assert!(data.antisymmetry_defect() < 1e-12);
        let sum: C64 = data.h.iter().sum();
        assert!(sum.norm() < 1e-15);
    }

    #[test]
    fn residues_of_the_fuchsian_system() {
        let mut p = a2_point();
        p.lambda = vec![c(-2.0, 0.3), c(1.5, -0.4)];
        let data = build_isomonodromy(&p).unwrap();
        for k in 0..2 {
            // (1 / 2 pi i) closed integral around lambda_k, trapezoid rule
            let r = 0.5;
            let n = 64;
            let mut acc = DMatrix::zeros(2, 2);
            for j in 0..n {
                let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                acc += data.fuchsian(data.lambda[k] + w * r) * (w * r / n as f64);
            }
            assert!((acc - &data.a[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn coincident_points_are_rejected() {
        let mut p = a2_point();
        p.kernel[(0, 1)] = c(f64::INFINITY, 0.0);
        assert_eq!(bergmann_values(&p).unwrap_err(), Error::Coincident);
    }
}
