//! Vanishing orders of the caustic discriminants `R(f, f')` (genus 0) and
//! `kappa` (genus 1) along rays and constructed collision paths.

use num_complex::Complex64 as C64;

use crate::cover0::{Covering0, Pole};
use crate::cover1::Covering1;
use crate::error::{Error, Result};
use crate::poly::CPoly;
use crate::tolerances::SLOPE_RESIDUAL;

/// Least-squares slope of `log |value|` against `log d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub order: f64,
    /// Largest deviation of a sample from the fitted line (natural log).
    pub residual: f64,
    /// `(d, |value|)`.
    pub samples: Vec<(f64, f64)>,
}

pub fn fit_slope(samples: Vec<(f64, f64)>) -> Result<SlopeFit> {
    if samples.len() < 2 || samples.iter().any(|&(d, v)| !(d > 0.0) || !v.is_finite()) {
        return Err(Error::SlopeUnstable(f64::INFINITY));
    }
    if samples.iter().any(|&(_, v)| v == 0.0) {
        return Err(Error::SlopeUnstable(f64::INFINITY));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(d, v)| (d.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let order = sxy / sxx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - my - order * (p.0 - mx)).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        order,
        residual,
        samples,
    })
}

/// Like [`fit_slope`] but fails when the fit residual exceeds the tolerance.
pub fn stable_slope(samples: Vec<(f64, f64)>) -> Result<SlopeFit> {
    let fit = fit_slope(samples)?;
    if fit.residual > SLOPE_RESIDUAL {
        return Err(Error::SlopeUnstable(fit.residual));
    }
    Ok(fit)
}

/// `d = 10^-e` for `e` from `from` to `to` in steps of one half.
pub fn decades(from: f64, to: f64) -> Vec<f64> {
    let n = ((to - from) * 2.0).round() as usize;
    (0..=n).map(|j| 10f64.powf(-(from + j as f64 / 2.0))).collect()
}

/// `R(f, f') = (-1)^(M(M-1)/2) lc^(2M-1) prod_{i<j} (alpha_i - alpha_j)^2`
/// from the roots of `f`; keeps full relative accuracy as roots approach.
pub fn discriminant_resultant(f: &CPoly) -> Result<C64> {
    let m = f.degree();
    if m == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let roots = f.all_roots()?.roots;
    let mut acc = f.leading().powi(2 * m as i32 - 1);
    for i in 0..m {
        for j in i + 1..m {
            acc *= (roots[i] - roots[j]).powi(2);
        }
    }
    if (m * (m - 1) / 2) % 2 == 1 {
        acc = -acc;
    }
    Ok(acc)
}

/// `R(f, f')` of a genus-zero covering, with the roots of `f` polished by
/// Newton's method on the factored form of `f = p' g`, so that clusters near
/// colliding poles keep their relative accuracy.
pub fn covering_discriminant(cov: &Covering0) -> Result<C64> {
    let (f, _) = cov.p_prime_as_ratio();
    let m = f.degree();
    let roots: Vec<C64> = f
        .all_roots()?
        .roots
        .into_iter()
        .map(|mut z| {
            for _ in 0..30 {
                let (v, d) = cov.numerator_derivs(z);
                let step = v / d;
                if !step.is_finite() {
                    break;
                }
                z -= step;
                if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                    break;
                }
            }
            z
        })
        .collect();
    let mut acc = f.leading().powi(2 * m as i32 - 1);
    for i in 0..m {
        for j in i + 1..m {
            acc *= (roots[i] - roots[j]).powi(2);
        }
    }
    if (m * (m - 1) / 2) % 2 == 1 {
        acc = -acc;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TRay {
    /// Index into the finite poles.
    pub pole: usize,
    pub k: usize,
    pub fit: SlopeFit,
    /// Lower bound on the vanishing order: one when `k = 1`, zero otherwise.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BRay {
    pub r: usize,
    pub s: usize,
    pub fit: SlopeFit,
    /// `k_r + k_s`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausticReport {
    pub t_rays: Vec<TRay>,
    pub b_rays: Vec<BRay>,
}

impl CausticReport {
    /// Every estimated order at or above its lower bound, with `slack`.
    /// Rays with `k >= 2` must in addition stay near order zero.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.t_rays.iter().all(|t| {
            if t.k == 1 {
                t.fit.order >= t.bound - slack
            } else {
                t.fit.order.abs() <= slack
            }
        }) && self.b_rays.iter().all(|b| b.fit.order >= b.bound - slack)
    }
}

/// `R(f, f')` along `c_(i,k_i) -> d c_(i,k_i)` so that `t_i -> d^(1/k_i) t_i`;
/// the fit is against `|t_i(d)| / |t_i(1)|`.
pub fn t_ray(cov: &Covering0, i: usize) -> Result<TRay> {
    let pole = &cov.poles()[i];
    let k = pole.order();
    // k >= 2 leaves the space at t = 0 without vanishing: stop at 1e-4
    let ds = if k == 1 { decades(2.0, 6.0) } else { decades(1.0, 4.0) };
    let samples = ds
        .into_iter()
        .map(|d| {
            let s = d.powi(k as i32);
            let mut c = pole.c.clone();
            c[k - 1] *= s;
            let moved = cov.with_pole(i, Pole::new(pole.b, c))?;
            Ok((d, covering_discriminant(&moved)?.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TRay {
        pole: i,
        k,
        fit: stable_slope(samples)?,
        bound: if k == 1 { 1.0 } else { 0.0 },
    })
}

/// `R(f, f')` along `b_s -> b_r + d (b_s - b_r) / |b_s - b_r|`.
pub fn b_ray(cov: &Covering0, r: usize, s: usize) -> Result<BRay> {
    let br = cov.poles()[r].b;
    let ps = &cov.poles()[s];
    let dir = (ps.b - br) / (ps.b - br).norm();
    let samples = decades(2.5, 6.5)
        .into_iter()
        .map(|d| {
            let moved = cov.with_pole(s, Pole::new(br + dir * d, ps.c.clone()))?;
            Ok((d, covering_discriminant(&moved)?.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BRay {
        r,
        s,
        fit: stable_slope(samples)?,
        bound: (cov.poles()[r].order() + ps.order()) as f64,
    })
}

/// Vanishing orders of `R(f, f')` along every `t_i` ray and every pole
/// collision ray.
pub fn caustic_orders(cov: &Covering0) -> Result<CausticReport> {
    let n = cov.poles().len();
    let t_rays = (0..n).map(|i| t_ray(cov, i)).collect::<Result<_>>()?;
    let mut b_rays = Vec::new();
    for r in 0..n {
        for s in r + 1..n {
            b_rays.push(b_ray(cov, r, s)?);
        }
    }
    Ok(CausticReport { t_rays, b_rays })
}

/// Genus-zero covering of profile `(3, 1)`,
/// `p = z^3 + a_1 z + a_0 - c / (z - b)`, with a double critical point at
/// `z*`: `c = 3 z* (z* - b)^3`, `a_1 = -3 z*^2 - 3 z* (z* - b)`.
/// Returns the covering with `c` replaced by `c (1 + s)`.
pub fn collision_path0(zs: C64, b: C64, a0: C64, s: f64) -> Result<Covering0> {
    let c = 3.0 * zs * (zs - b).powi(3);
    let a1 = -3.0 * zs * zs - 3.0 * zs * (zs - b);
    Covering0::new(3, vec![a0, a1], vec![Pole::new(b, vec![c * (1.0 + s)])])
}

/// Order of `R(f, f')` in `s` along [`collision_path0`].
pub fn collision_order0(zs: C64, b: C64, a0: C64) -> Result<SlopeFit> {
    let samples = decades(2.0, 6.0)
        .into_iter()
        .map(|s| Ok((s, covering_discriminant(&collision_path0(zs, b, a0, s)?)?.norm())))
        .collect::<Result<Vec<_>>>()?;
    stable_slope(samples)
}

/// Genus-one covering of profile `(2, 1)` whose residue `c_(1,1)` is tuned
/// so that `p'` has a double zero; the path is `c_(1,1) = c* + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionPath1 {
    pub base: Covering1,
    pub z_star: C64,
    pub c_star: C64,
}

impl CollisionPath1 {
    /// Poles `b1` (order two, `c_(1,2) = c12`) and `b2` (simple); the double
    /// critical point is sought by Newton's method from `z0`.
    pub fn new(sigma: C64, b1: C64, b2: C64, c12: C64, z0: C64) -> Result<Self> {
        let ctx = crate::elliptic::WeierstrassContext::from_sigma(sigma)?;
        // residue making z a critical point
        let c11 = |z: C64| -> Result<C64> {
            let u = ctx.wp_all(z - b1, 1)?;
            let v = ctx.wp(z - b2, 0)?;
            Ok(-c12 * u[1] / (u[0] - v))
        };
        let build = |c: C64| {
            Covering1::with_context(
                ctx,
                C64::new(0.0, 0.0),
                vec![Pole::new(b1, vec![c, c12]), Pole::new(b2, vec![-c])],
            )
        };
        let second = |z: C64| -> Result<C64> { build(c11(z)?)?.eval(z, 2) };
        let mut z = z0;
        for _ in 0..60 {
            let h = 1e-6;
            let g = second(z)?;
            let dg = (second(z + h)? - second(z - h)?) / (2.0 * h);
            let step = g / dg;
            z -= step;
            if step.norm() < 1e-14 {
                let c_star = c11(z)?;
                return Ok(CollisionPath1 {
                    base: build(c_star)?,
                    z_star: z,
                    c_star,
                });
            }
        }
        Err(Error::NonConvergence {
            residual: second(z)?.norm(),
        })
    }

    pub fn at(&self, s: C64) -> Result<Covering1> {
        let p = &self.base.poles();
        Covering1::with_context(
            *self.base.context(),
            self.base.constant(),
            vec![
                Pole::new(p[0].b, vec![self.c_star + s, p[0].c[1]]),
                Pole::new(p[1].b, vec![-(self.c_star + s)]),
            ],
        )
    }

    /// Order of `kappa` in `|s|` along `s = d * direction`.
    pub fn kappa_order(&self, direction: C64) -> Result<SlopeFit> {
        let samples = decades(2.0, 6.0)
            .into_iter()
            .map(|d| {
                let cov = self.at(direction * d)?;
                let alpha = cov.critical_points()?;
                Ok((d, cov.kappa(&alpha)?.norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        stable_slope(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::resultant;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> Covering0 {
        Covering0::new(
            2,
            vec![c(0.3, -0.1)],
            vec![
                Pole::new(c(1.1, 0.4), vec![c(0.7, 0.2)]),
                Pole::new(c(-0.9, 0.6), vec![c(0.4, -0.3), c(0.8, 0.5)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fit_recovers_power_laws() {
        let samples = decades(1.0, 5.0).into_iter().map(|d| (d, 3.0 * d.powi(3))).collect();
        let fit = stable_slope(samples).unwrap();
        assert!((fit.order - 3.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn kinked_data_is_unstable() {
        let samples = decades(1.0, 5.0)
            .into_iter()
            .map(|d| (d, if d > 1e-3 { d } else { d.powi(3) * 1e6 }))
            .collect();
        assert!(matches!(stable_slope(samples), Err(Error::SlopeUnstable(_))));
    }

    #[test]
    fn root_product_matches_sylvester() {
        let (f, _) = sample().p_prime_as_ratio();
        let a = discriminant_resultant(&f).unwrap();
        let b = resultant(&f, &f.derivative());
        assert!((a / b - 1.0).norm() < 1e-10, "{a} {b}");
    }

    #[test]
    fn sample_orders() {
        let report = caustic_orders(&sample()).unwrap();
        for t in &report.t_rays {
            eprintln!("t k={} order={} res={}", t.k, t.fit.order, t.fit.residual);
        }
        for b in &report.b_rays {
            eprintln!("b bound={} order={} res={}", b.bound, b.fit.order, b.fit.residual);
        }
        assert!(report.bounds_hold(0.05));
    }

    #[test]
    fn genus0_collision_is_simple_zero() {
        let fit = collision_order0(c(0.4, 0.3), c(-1.0, 0.5), c(0.2, 0.0)).unwrap();
        assert!((fit.order - 1.0).abs() < 0.05, "{}", fit.order);
    }

    #[test]
    fn genus1_collision_kills_kappa() {
        let path = CollisionPath1::new(c(0.1, 1.05), c(0.2, 0.3), c(0.7, 0.6), c(1.0, 0.0), c(0.5, 0.1)).unwrap();
        let cd = path.at(c(1e-3, 0.0)).unwrap().critical_data().unwrap();
        assert!(cd.min_alpha_separation < 0.1);
        let fit = path.kappa_order(c(1.0, 0.3)).unwrap();
        assert!(fit.order >= 0.95, "{}", fit.order);
    }
}
