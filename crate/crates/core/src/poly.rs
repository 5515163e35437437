//! Dense univariate polynomials over the complex numbers.
//!
//! Coefficients are stored lowest degree first. The representation is kept
//! normalized: the last stored coefficient is non-zero unless the polynomial
//! is identically zero, in which case no coefficients are stored.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tolerances::{ROOT_BACKWARD_ERROR, ROOT_POLISH, ROOT_POLISH_STEPS};

const ABERTH_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

/// Roots of a polynomial together with their worst backward error.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<C64>,
    /// `max_r |p(r)| / sum_i |a_i| |r|^i` over the returned roots.
    pub residual: f64,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        CPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        CPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// `z - a`.
    pub fn linear(a: C64) -> Self {
        CPoly {
            coeffs: vec![-a, C64::new(1.0, 0.0)],
        }
    }

    /// `lc * prod (z - r)`.
    pub fn from_roots(lc: C64, roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(lc), |acc, &r| &acc * &Self::linear(r))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z), ..., p^(n)(z))`, exact up to rounding.
    pub fn eval_derivatives(&self, z: C64, n: usize) -> Vec<C64> {
        // Repeated synthetic division yields the Taylor coefficients at z.
        let mut work: Vec<C64> = self.coeffs.clone();
        let mut out = Vec::with_capacity(n + 1);
        let mut factorial = 1.0;
        for k in 0..=n {
            if k > 0 {
                factorial *= k as f64;
            }
            if work.is_empty() {
                out.push(C64::new(0.0, 0.0));
                continue;
            }
            let mut acc = C64::new(0.0, 0.0);
            let mut quotient = vec![C64::new(0.0, 0.0); work.len().saturating_sub(1)];
            for i in (0..work.len()).rev() {
                acc = acc * z + work[i];
                if i > 0 {
                    quotient[i - 1] = acc;
                }
            }
            out.push(acc * factorial);
            work = quotient;
        }
        out
    }

    pub fn derivative(&self) -> CPoly {
        CPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: usize) -> CPoly {
        (0..e).fold(Self::constant(C64::new(1.0, 0.0)), |acc, _| &acc * self)
    }

    /// `|p(z)| / sum |a_i| |z|^i`: the relative backward error of z as a root.
    pub fn backward_error(&self, z: C64) -> f64 {
        let r = z.norm();
        let denom = self
            .coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm());
        if denom == 0.0 {
            return 0.0;
        }
        self.eval(z).norm() / denom
    }

    /// All complex roots, with multiplicity, by Aberth-Ehrlich iteration
    /// followed by Newton polishing.
    ///
    /// Clustered roots are returned as they come out of the iteration; no
    /// deflation by multiplicity is attempted.
    pub fn all_roots(&self) -> Result<RootSet> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Err(Error::InvalidInput(
                "root finding needs degree >= 1".into(),
            ));
        }

        // Exact zero roots are split off first.
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let reduced = CPoly::new(self.coeffs[zeros..].to_vec());
        let mut roots = vec![C64::new(0.0, 0.0); zeros];
        if reduced.degree() >= 1 {
            let mut found = reduced.aberth()?;
            for r in found.iter_mut() {
                *r = reduced.polish(*r);
            }
            roots.extend(found);
        }

        let residual = roots
            .iter()
            .map(|&r| self.backward_error(r))
            .fold(0.0, f64::max);
        if !residual.is_finite() || residual > ROOT_BACKWARD_ERROR {
            return Err(Error::NonConvergence { residual });
        }
        Ok(RootSet { roots, residual })
    }

    fn aberth(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        let lc = self.leading();
        if n == 1 {
            return Ok(vec![-self.coeffs[0] / lc]);
        }
        let dp = self.derivative();

        // Starting circle of radius equal to the geometric mean of root moduli.
        let radius = (self.coeffs[0] / lc).norm().powf(1.0 / n as f64).max(1e-3);
        let mut z: Vec<C64> = (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
                C64::from_polar(radius, theta)
            })
            .collect();

        let mut converged = false;
        for _ in 0..ABERTH_MAX_ITER {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let pv = self.eval(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dp.eval(z[i]);
                let sum: C64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = z[i] - z[j];
                        if d.norm() == 0.0 {
                            C64::new(0.0, 0.0)
                        } else {
                            d.inv()
                        }
                    })
                    .sum();
                let w = ratio / (C64::new(1.0, 0.0) - ratio * sum);
                if w.is_finite() {
                    z[i] -= w;
                    max_step = max_step.max(w.norm() / z[i].norm().max(1e-300));
                }
            }
            if max_step < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            // A stalled iteration near a cluster can still be acceptable;
            // the backward error decides.
            let residual = z
                .iter()
                .map(|&r| self.backward_error(r))
                .fold(0.0, f64::max);
            if residual > ROOT_BACKWARD_ERROR {
                return Err(Error::NonConvergence { residual });
            }
        }
        Ok(z)
    }

    /// Newton polishing: stops at `|p(r)| < ROOT_POLISH * max|coeff|`, after
    /// `ROOT_POLISH_STEPS`, or as soon as a step fails to decrease `|p|`.
    pub fn polish(&self, mut r: C64) -> C64 {
        let target = ROOT_POLISH * self.max_abs_coeff();
        let dp = self.derivative();
        let mut val = self.eval(r);
        for _ in 0..ROOT_POLISH_STEPS {
            if val.norm() < target {
                break;
            }
            let d = dp.eval(r);
            if d.norm() == 0.0 {
                break;
            }
            let next = r - val / d;
            let next_val = self.eval(next);
            if !(next_val.norm() < val.norm()) {
                break;
            }
            r = next;
            val = next_val;
        }
        r
    }

    fn sylvester(f: &CPoly, g: &CPoly) -> DMatrix<C64> {
        let m = f.degree();
        let n = g.degree();
        let size = m + n;
        let mut s = DMatrix::from_element(size, size, C64::new(0.0, 0.0));
        for row in 0..n {
            for (j, c) in f.coeffs.iter().rev().enumerate() {
                s[(row, row + j)] = *c;
            }
        }
        for row in 0..m {
            for (j, c) in g.coeffs.iter().rev().enumerate() {
                s[(n + row, row + j)] = *c;
            }
        }
        s
    }
}

/// Resultant `R(f, g) = lc(f)^deg g * prod g(root_i(f))`, evaluated as the
/// determinant of the Sylvester matrix by pivoted LU elimination.
pub fn resultant(f: &CPoly, g: &CPoly) -> C64 {
    if f.is_zero() || g.is_zero() {
        return C64::new(0.0, 0.0);
    }
    let m = f.degree();
    let n = g.degree();
    match (m, n) {
        (0, 0) => C64::new(1.0, 0.0),
        (0, _) => f.leading().powu(n as u32),
        (_, 0) => g.leading().powu(m as u32),
        _ => CPoly::sylvester(f, g).lu().determinant(),
    }
}

/// `|R(f, g)|` divided by its Hadamard bound `||f||^deg g * ||g||^deg f`,
/// so that the result lies in `[0, 1]`.
pub fn normalized_resultant(f: &CPoly, g: &CPoly) -> f64 {
    let norm = |p: &CPoly| p.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let bound = norm(f).powi(g.degree() as i32) * norm(g).powi(f.degree() as i32);
    if bound == 0.0 {
        return 0.0;
    }
    resultant(f, g).norm() / bound
}

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        CPoly::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or_default()
                        + rhs.coeffs.get(i).copied().unwrap_or_default()
                })
                .collect(),
        )
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        self + &(-rhs)
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        if self.is_zero() || rhs.is_zero() {
            return CPoly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> CPoly {
        CPoly::new(
            (0..=degree)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    /// Pairs each expected root with the nearest found root.
    fn max_matching_error(found: &[C64], expected: &[C64]) -> f64 {
        let mut used = vec![false; found.len()];
        let mut worst: f64 = 0.0;
        for e in expected {
            let (idx, d) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, (f - e).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[idx] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn normalization_drops_trailing_zeros() {
        let p = CPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.leading(), c(2.0, 0.0));
        assert!(CPoly::new(vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn derivatives_of_square() {
        let p = CPoly::from_real(&[0.0, 0.0, 1.0]);
        let d = p.eval_derivatives(c(3.0, 0.0), 2);
        assert_eq!(d, vec![c(9.0, 0.0), c(6.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn derivatives_of_a2_cubic() {
        let p = CPoly::from_real(&[0.0, -3.0, 0.0, 1.0]);
        let d = p.eval_derivatives(c(1.0, 0.0), 2);
        assert_eq!(d, vec![c(-2.0, 0.0), c(0.0, 0.0), c(6.0, 0.0)]);
        // beyond the degree everything vanishes
        let d = p.eval_derivatives(c(1.0, 0.0), 5);
        assert_eq!(d[3], c(6.0, 0.0));
        assert_eq!(d[4], c(0.0, 0.0));
    }

    #[test]
    fn first_derivative_matches_central_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_poly(&mut rng, 10);
        for _ in 0..10 {
            let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let h = 1e-5;
            let fd = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
            let exact = p.eval_derivatives(z, 1)[1];
            assert!((fd - exact).norm() / exact.norm() < 1e-7);
        }
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let p = CPoly::from_real(&[1.0, 0.0, 1.0]);
        let rs = p.all_roots().unwrap();
        assert!(max_matching_error(&rs.roots, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
    }

    #[test]
    fn roots_of_a2_derivative() {
        let p = CPoly::from_real(&[-3.0, 0.0, 3.0]);
        let rs = p.all_roots().unwrap();
        assert!(max_matching_error(&rs.roots, &[c(1.0, 0.0), c(-1.0, 0.0)]) < 1e-14);
        assert!(rs.residual < 1e-15);
    }

    #[test]
    fn construct_then_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut roots: Vec<C64> = Vec::new();
            while roots.len() < 8 {
                let r = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
                if roots.iter().all(|q| (q - r).norm() > 0.1) {
                    roots.push(r);
                }
            }
            let p = CPoly::from_roots(c(1.0, 0.5), &roots);
            let rs = p.all_roots().unwrap();
            assert_eq!(rs.roots.len(), 8);
            assert!(max_matching_error(&rs.roots, &roots) < 1e-10);
        }
    }

    #[test]
    fn exact_zero_roots_are_split_off() {
        let p = CPoly::from_roots(c(2.0, 0.0), &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)]);
        let rs = p.all_roots().unwrap();
        assert_eq!(rs.roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
    }

    #[test]
    fn degree_zero_has_no_roots() {
        assert!(CPoly::constant(c(1.0, 0.0)).all_roots().is_err());
        assert!(CPoly::zero().all_roots().is_err());
    }

    #[test]
    fn double_root_is_reported_as_cluster() {
        let p = CPoly::from_roots(c(1.0, 0.0), &[c(0.5, 0.0), c(0.5, 0.0), c(-1.0, 0.0)]);
        let rs = p.all_roots().unwrap();
        let near = rs.roots.iter().filter(|r| (*r - c(0.5, 0.0)).norm() < 1e-6).count();
        assert_eq!(near, 2);
    }

    #[test]
    fn resultant_linear() {
        let a = c(0.3, -1.2);
        let b = c(-0.7, 0.4);
        let r = resultant(&CPoly::linear(a), &CPoly::linear(b));
        assert!((r - (a - b)).norm() < 1e-15);
    }

    #[test]
    fn resultant_of_quadratics() {
        let f = CPoly::from_real(&[-1.0, 0.0, 1.0]);
        let g = CPoly::from_real(&[-4.0, 0.0, 1.0]);
        assert!((resultant(&f, &g) - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn resultant_with_constants() {
        let f = CPoly::constant(c(2.0, 0.0));
        let g = CPoly::from_real(&[1.0, 1.0, 1.0]);
        assert_eq!(resultant(&f, &g), c(4.0, 0.0));
        assert_eq!(resultant(&g, &f), c(4.0, 0.0));
        assert_eq!(resultant(&CPoly::zero(), &g), c(0.0, 0.0));
    }

    #[test]
    fn resultant_matches_product_over_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let f = random_poly(&mut rng, 5);
            let g = random_poly(&mut rng, 7);
            let roots = f.all_roots().unwrap().roots;
            let oracle = f.leading().powu(7) * roots.iter().map(|&r| g.eval(r)).product::<C64>();
            let r = resultant(&f, &g);
            assert!((r - oracle).norm() / oracle.norm() < 1e-9, "{r} vs {oracle}");
        }
    }

    #[test]
    fn resultant_vanishes_on_common_root() {
        let shared = c(0.4, 0.9);
        let f = CPoly::from_roots(c(1.0, 0.0), &[shared, c(-1.0, 0.2), c(0.1, -0.8)]);
        let g = CPoly::from_roots(c(2.0, 0.0), &[shared, c(1.3, 0.0)]);
        assert!(normalized_resultant(&f, &g) < 1e-14);
        let g2 = CPoly::from_roots(c(2.0, 0.0), &[shared + c(0.05, 0.0), c(1.3, 0.0)]);
        assert!(normalized_resultant(&f, &g2) > 1e-6);
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = CPoly> {
        (1..=max_deg).prop_flat_map(|d| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d + 1).prop_filter_map(
                "leading coefficient too small",
                |v| {
                    let p = CPoly::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect());
                    (p.leading().norm() > 0.1 && p.degree() >= 1).then_some(p)
                },
            )
        })
    }

    proptest! {
        #[test]
        fn resultant_antisymmetry(f in arb_poly(6), g in arb_poly(6)) {
            let sign = if (f.degree() * g.degree()) % 2 == 0 { 1.0 } else { -1.0 };
            let a = resultant(&f, &g);
            let b = resultant(&g, &f) * sign;
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1e-300));
        }

        #[test]
        fn roots_reproduce_coefficients(roots in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..12)) {
            let roots: Vec<C64> = roots.into_iter().map(|(a, b)| C64::new(a, b)).collect();
            let separated = roots.iter().enumerate().all(|(i, a)| {
                roots.iter().skip(i + 1).all(|b| (a - b).norm() > 0.1)
            });
            prop_assume!(separated);
            let p = CPoly::from_roots(C64::new(1.5, -0.5), &roots);
            let found = p.all_roots().unwrap();
            let rebuilt = CPoly::from_roots(p.leading(), &found.roots);
            let scale = p.max_abs_coeff();
            for (a, b) in p.coeffs().iter().zip(rebuilt.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-9 * scale);
            }
        }
    }
}
