//! Genus-one Hurwitz spaces: elliptic coverings
//! `p(z) = a + sum_i sum_alpha c_(i,alpha) zeta^(alpha-1)(z - b_i)` on the torus
//! `C / (Z + sigma Z)`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::cover0::{validate_tails, Pole};
use crate::elliptic::{elliptic_zeros, Modulus, WeierstrassContext};
use crate::error::{BoundaryComponent, Error, Result};
use crate::isomon::{min_separation, Deformable, Point};
use crate::tolerances::{BOUNDARY_DISTANCE, CAUSTIC, LATTICE_PROXIMITY, RESIDUE_SUM, TRACK_STEP};
use crate::{GFunction, TauValue};

/// Relative step of the central difference in `sigma`.
const SIGMA_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Covering1 {
    ctx: WeierstrassContext,
    a: C64,
    poles: Vec<Pole>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData1 {
    pub alpha: Vec<C64>,
    pub lambda: Vec<C64>,
    pub fsq: Vec<C64>,
    /// Schwarzian of the torus coordinate `z` with respect to the local
    /// parameter at the critical point.
    pub sw: Vec<C64>,
    /// `sw - 24 pi i eta_tilde fsq`.
    pub sb: Vec<C64>,
    pub min_lambda_separation: f64,
    /// Smallest separation modulo the lattice.
    pub min_alpha_separation: f64,
    pub caustic: bool,
}

/// Flat coordinates `t_0 = sigma`, `t_i = h_i` (principal), `i = 1..l`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatCoords1 {
    pub t0: C64,
    pub t: Vec<C64>,
    /// `t_i^{k_i} = (-1)^(k_i-1) (k_i-1)! c_(i,k_i)`.
    pub t_pow: Vec<C64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

impl Covering1 {
    /// Poles `i = 1..l` with `sum_i c_(i,1) = 0`; the `b_i` are reduced to the
    /// fundamental parallelogram with `p` itself unchanged.
    pub fn new(sigma: C64, a: C64, poles: Vec<Pole>) -> Result<Self> {
        Self::with_context(WeierstrassContext::from_sigma(sigma)?, a, poles)
    }

    pub fn with_context(ctx: WeierstrassContext, a: C64, poles: Vec<Pole>) -> Result<Self> {
        // zeta(u + m + n sigma) = zeta(u) + m inc1 + n inc2: moving b_i by a
        // lattice vector shifts p by a constant, which the constant absorbs
        let mut a = a;
        let poles = poles
            .into_iter()
            .map(|p| {
                let b = ctx.modulus.reduce(p.b);
                let (m, n) = ctx.modulus.real_coords(p.b - b);
                if let Some(&c1) = p.c.first() {
                    a -= c1 * (m.round() * ctx.inc1 + n.round() * ctx.inc2);
                }
                Pole::new(b, p.c)
            })
            .collect();
        let cov = Covering1 { ctx, a, poles };
        cov.validate()?;
        Ok(cov)
    }

    pub fn context(&self) -> &WeierstrassContext {
        &self.ctx
    }

    pub fn modulus(&self) -> &Modulus {
        &self.ctx.modulus
    }

    pub fn sigma(&self) -> C64 {
        self.ctx.sigma()
    }

    pub fn constant(&self) -> C64 {
        self.a
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn profile(&self) -> Vec<usize> {
        self.poles.iter().map(Pole::order).collect()
    }

    pub fn degree(&self) -> usize {
        self.profile().iter().sum()
    }

    pub fn num_poles(&self) -> usize {
        self.poles.len()
    }

    /// `M = l + N`.
    pub fn dim(&self) -> usize {
        self.num_poles() + self.degree()
    }

    pub fn validate(&self) -> Result<()> {
        if self.poles.is_empty() {
            return Err(Error::InvalidInput("a genus-one covering needs at least one pole".into()));
        }
        if !self.a.is_finite() {
            return Err(Error::InvalidInput("non-finite constant".into()));
        }
        validate_tails(&self.poles)?;
        let residue: C64 = self.poles.iter().map(|p| p.c[0]).sum();
        if residue.norm() >= RESIDUE_SUM {
            return Err(Error::InvalidInput(format!(
                "residues c_(i,1) must sum to zero, got |sum| = {:e}",
                residue.norm()
            )));
        }
        let mut clash = Vec::new();
        for i in 0..self.poles.len() {
            for j in i + 1..self.poles.len() {
                if self.ctx.modulus.distance_mod_lattice(self.poles[i].b, self.poles[j].b) <= BOUNDARY_DISTANCE {
                    clash.extend([i, j]);
                }
            }
        }
        if !clash.is_empty() {
            clash.sort_unstable();
            clash.dedup();
            return Err(Error::OnBoundary {
                component: BoundaryComponent::S1,
                indices: clash,
            });
        }
        Ok(())
    }

    /// `(p(z), p'(z), ..., p^(n)(z))`.
    pub fn eval_derivatives(&self, z: C64, n: usize) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        out[0] = self.a;
        for pole in &self.poles {
            let w = z - pole.b;
            if self.ctx.modulus.lattice_distance(w) <= LATTICE_PROXIMITY {
                return Err(Error::NearPole(format!("{z}")));
            }
            let k = pole.order();
            // zeta^(j) = -wp^(j-1) for j >= 1
            let wp = self.ctx.wp_all(w, (k + n).saturating_sub(1))?;
            let zeta0 = self.ctx.zeta(w, 0)?;
            let zeta = |j: usize| if j == 0 { zeta0 } else { -wp[j - 1] };
            for (d, slot) in out.iter_mut().enumerate() {
                for (alpha, &c) in pole.c.iter().enumerate() {
                    *slot += c * zeta(alpha + d);
                }
            }
        }
        Ok(out)
    }

    pub fn eval(&self, z: C64, n: usize) -> Result<C64> {
        Ok(self.eval_derivatives(z, n)?[n])
    }

    /// The `M` zeros of `p'` in the fundamental parallelogram, polished by
    /// Newton's method.
    pub fn critical_points(&self) -> Result<Vec<C64>> {
        let poles: Vec<(C64, usize)> = self.poles.iter().map(|p| (p.b, p.order() + 1)).collect();
        let h = |z: C64| match self.eval_derivatives(z, 2) {
            Ok(d) => (d[1], d[2]),
            Err(_) => (C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0)),
        };
        let zeros = elliptic_zeros(&self.ctx.modulus, h, &poles)?;
        if zeros.len() != self.dim() {
            return Err(Error::CountMismatch {
                found: zeros.len(),
                expected: self.dim(),
            });
        }
        let polished = self.track_critical_points(&zeros)?;
        Ok(polished.into_iter().map(|z| self.ctx.modulus.reduce(z)).collect())
    }

    pub fn critical_data(&self) -> Result<CriticalData1> {
        let alpha = self.critical_points()?;
        self.critical_data_at(&alpha)
    }

    pub fn critical_data_at(&self, alpha: &[C64]) -> Result<CriticalData1> {
        let shift = C64::i() * 24.0 * std::f64::consts::PI * self.ctx.eta_tilde;
        let mut lambda = Vec::with_capacity(alpha.len());
        let mut fsq = Vec::with_capacity(alpha.len());
        let mut sw = Vec::with_capacity(alpha.len());
        let mut sb = Vec::with_capacity(alpha.len());
        for &z in alpha {
            let d = self.eval_derivatives(z, 4)?;
            let a = d[2];
            let b = d[3] / 2.0;
            let g = d[4] / 6.0;
            let f = 2.0 / a;
            let s = (2.0 * b * b - 3.0 * a * g) / a.powi(3);
            lambda.push(d[0]);
            fsq.push(f);
            sw.push(s);
            sb.push(s - shift * f);
        }
        let mut min_alpha_separation = f64::INFINITY;
        for i in 0..alpha.len() {
            for j in i + 1..alpha.len() {
                min_alpha_separation =
                    min_alpha_separation.min(self.ctx.modulus.distance_mod_lattice(alpha[i], alpha[j]));
            }
        }
        let min_lambda_separation = min_separation(&lambda);
        let scale = lambda.iter().map(|l| l.norm()).fold(0.0, f64::max) + 1.0;
        Ok(CriticalData1 {
            alpha: alpha.to_vec(),
            caustic: min_lambda_separation < CAUSTIC * scale,
            min_lambda_separation,
            min_alpha_separation,
            lambda,
            fsq,
            sw,
            sb,
        })
    }

    /// `h_s^{k_s} = (-1)^(k_s-1) (k_s-1)! c_(s,k_s)`, the leading Laurent
    /// coefficient at `b_s`.
    pub fn h_pow(&self) -> Vec<C64> {
        self.poles
            .iter()
            .map(|p| {
                let k = p.order();
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                p.top() * sign * factorial(k - 1)
            })
            .collect()
    }

    pub fn flat_coords(&self) -> FlatCoords1 {
        let t_pow = self.h_pow();
        FlatCoords1 {
            t0: self.sigma(),
            t: t_pow
                .iter()
                .zip(&self.poles)
                .map(|(x, p)| x.powf(1.0 / p.order() as f64))
                .collect(),
            t_pow,
        }
    }

    /// `tau = eta(sigma)^-1 (prod f_m / prod_{s=1}^l h_s^(k_s+1))^(1/24)`.
    pub fn tau_product(&self, cd: &CriticalData1) -> TauValue {
        let hp = self.h_pow();
        let log_eta = self.ctx.modulus.log_eta();
        let log_f: C64 = cd.fsq.iter().map(|x| x.ln() / 2.0).sum();
        let log_h: C64 = hp
            .iter()
            .zip(&self.poles)
            .map(|(x, p)| (p.order() + 1) as f64 / p.order() as f64 * x.ln())
            .sum();
        let h = self.flat_coords().t;
        let num: C64 = h
            .iter()
            .zip(&self.poles)
            .map(|(h, p)| h.powi(2 * (p.order() as i32 + 1)))
            .product();
        let den: C64 = cd.fsq.iter().product();
        TauValue {
            log_tau: -log_eta + (log_f - log_h) / 24.0,
            tau_m48: (48.0 * log_eta).exp() * num / den,
        }
    }

    /// Critical points re-chosen modulo the lattice so that
    /// `sum alpha_m = sum_s (k_s + 1) b_s` holds exactly.
    pub fn balanced_representatives(&self, alpha: &[C64]) -> Result<Vec<C64>> {
        let target: C64 = self.poles.iter().map(|p| (p.order() + 1) as f64 * p.b).sum();
        let s: C64 = alpha.iter().sum::<C64>() - target;
        let r = self.ctx.modulus.reduce_centered(s);
        let scale = 1.0 + alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if r.z0.norm() > 1e-8 * scale * alpha.len() as f64 {
            return Err(Error::NonConvergence { residual: r.z0.norm() });
        }
        let mut out = alpha.to_vec();
        if let Some(last) = out.last_mut() {
            *last -= r.m as f64 + r.n as f64 * self.sigma();
        }
        Ok(out)
    }

    /// `kappa = prod_{r != s} sigma_w(alpha_r - alpha_s)` for balanced
    /// representatives; vanishes exactly when two critical points collide.
    pub fn kappa(&self, alpha: &[C64]) -> Result<C64> {
        let al = self.balanced_representatives(alpha)?;
        let mut acc = C64::new(1.0, 0.0);
        for r in 0..al.len() {
            for s in 0..al.len() {
                if r != s {
                    acc *= self.ctx.sigma_w(al[r] - al[s]);
                }
            }
        }
        Ok(acc)
    }

    /// Constant `C` of `p'(z) = C prod sigma_w(z - alpha_m) / prod sigma_w(z - b_s)^(k_s+1)`.
    pub fn sigma_constant(&self, alpha: &[C64]) -> Result<C64> {
        let al = self.balanced_representatives(alpha)?;
        let m = &self.ctx.modulus;
        let mut best = (f64::NEG_INFINITY, C64::new(0.0, 0.0));
        for x in [0.13, 0.41, 0.67, 0.89] {
            for y in [0.19, 0.47, 0.73] {
                let z = m.from_coords(x, y);
                let d = self
                    .poles
                    .iter()
                    .map(|p| p.b)
                    .chain(al.iter().copied())
                    .map(|w| m.distance_mod_lattice(z, w))
                    .fold(f64::INFINITY, f64::min);
                if d > best.0 {
                    best = (d, z);
                }
            }
        }
        let z0 = best.1;
        let num: C64 = self
            .poles
            .iter()
            .map(|p| self.ctx.sigma_w(z0 - p.b).powi(p.order() as i32 + 1))
            .product();
        let den: C64 = al.iter().map(|a| self.ctx.sigma_w(z0 - a)).product();
        Ok(self.eval(z0, 1)? * num / den)
    }

    /// `tau^-48 = eta^48 C^(2M) kappa / (prod_{r != s} sigma_w(b_r - b_s)^((k_r+1)(k_s+1)) prod t_s^((k_s+1)(k_s-2)))`.
    pub fn tau_resultant(&self, alpha: &[C64]) -> Result<C64> {
        let kappa = self.kappa(alpha)?;
        let c = self.sigma_constant(alpha)?;
        let mut den = C64::new(1.0, 0.0);
        for (r, pr) in self.poles.iter().enumerate() {
            for (s, ps) in self.poles.iter().enumerate() {
                if r != s {
                    den *= self
                        .ctx
                        .sigma_w(pr.b - ps.b)
                        .powi(((pr.order() + 1) * (ps.order() + 1)) as i32);
                }
            }
        }
        for (t, p) in self.flat_coords().t.iter().zip(&self.poles) {
            let k = p.order() as i32;
            den *= t.powi((k + 1) * (k - 2));
        }
        let eta48 = (48.0 * self.ctx.modulus.log_eta()).exp();
        Ok(eta48 * c.powi(2 * self.dim() as i32) * kappa / den)
    }

    /// `G = -log eta(t0) - (1/24) sum_{s=1}^l (k_s + 1) log t_s`,
    /// `gamma = -(1/24) (l + sum 1/k_s)`.
    pub fn g_function(&self, cd: &CriticalData1) -> GFunction {
        let flat = self.flat_coords();
        let g = -self.ctx.modulus.log_eta()
            - flat
                .t
                .iter()
                .zip(&self.poles)
                .map(|(t, p)| (p.order() + 1) as f64 * t.ln())
                .sum::<C64>()
                / 24.0;
        let log_j: C64 = cd.fsq.iter().map(|x| x.ln() / 2.0).sum();
        GFunction {
            g,
            g_from_tau: self.tau_product(cd).log_tau - log_j / 24.0,
            gamma: self.gamma(),
        }
    }

    pub fn gamma(&self) -> f64 {
        let inv: f64 = self.profile().iter().map(|&k| 1.0 / k as f64).sum();
        -(self.num_poles() as f64 + inv) / 24.0
    }

    /// Closed-form `E(log tau) = (1/24) [-M/2 - sum_s (k_s + 1)/k_s]`.
    pub fn euler_log_tau(&self) -> f64 {
        let tails: f64 = self
            .poles
            .iter()
            .map(|p| (p.order() + 1) as f64 / p.order() as f64)
            .sum();
        (-(self.dim() as f64) / 2.0 - tails) / 24.0
    }

    /// All `b_i` shifted by `s` (then reduced).
    pub fn translated(&self, s: C64) -> Result<Self> {
        let poles = self.poles.iter().map(|p| Pole::new(p.b + s, p.c.clone())).collect();
        Self::with_context(self.ctx, self.a, poles)
    }

    /// Same data at another modulus.
    pub fn with_sigma(&self, sigma: C64) -> Result<Self> {
        Self::new(sigma, self.a, self.poles.clone())
    }

    pub fn with_pole(&self, i: usize, pole: Pole) -> Result<Self> {
        let mut poles = self.poles.clone();
        poles[i] = pole;
        Self::with_context(self.ctx, self.a, poles)
    }

    fn p_at_sigma(&self, sigma: C64, z: &[C64]) -> Result<Vec<C64>> {
        let ctx = WeierstrassContext::from_sigma(sigma)?;
        let cov = Covering1 {
            ctx,
            a: self.a,
            poles: self.poles.clone(),
        };
        z.iter().map(|&x| cov.eval(x, 0)).collect()
    }

    /// `d p(z) / d sigma` at fixed `z`, central difference with one
    /// Richardson step.
    pub fn dp_dsigma(&self, z: &[C64]) -> Result<Vec<C64>> {
        let h = SIGMA_STEP * self.sigma().norm().max(1.0);
        let s = self.sigma();
        let diff = |h: f64| -> Result<Vec<C64>> {
            let up = self.p_at_sigma(s + h, z)?;
            let dn = self.p_at_sigma(s - h, z)?;
            Ok(up.iter().zip(&dn).map(|(u, d)| (u - d) / (2.0 * h)).collect())
        };
        let coarse = diff(h)?;
        let fine = diff(h / 2.0)?;
        Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
    }
}

impl Deformable for Covering1 {
    /// `sigma, a, b_1..b_l`, then every tail coefficient except `c_(l,1)`,
    /// which is fixed by the residue theorem.
    fn param_names(&self) -> Vec<String> {
        let l = self.poles.len();
        let mut names = vec!["modulus".to_string(), "constant".to_string()];
        names.extend((0..l).map(|i| format!("poles.{i}.b")));
        for (i, p) in self.poles.iter().enumerate() {
            let start = if i + 1 == l { 1 } else { 0 };
            names.extend((start..p.order()).map(|j| format!("poles.{i}.c.{j}")));
        }
        names
    }

    fn params(&self) -> Vec<C64> {
        let l = self.poles.len();
        let mut v = vec![self.sigma(), self.a];
        v.extend(self.poles.iter().map(|p| p.b));
        for (i, p) in self.poles.iter().enumerate() {
            let start = if i + 1 == l { 1 } else { 0 };
            v.extend(&p.c[start..]);
        }
        v
    }

    fn with_params(&self, params: &[C64]) -> Result<Self> {
        let l = self.poles.len();
        let ctx = if params[0] == self.sigma() {
            self.ctx
        } else {
            WeierstrassContext::from_sigma(params[0])?
        };
        let bs = &params[2..2 + l];
        let mut rest = &params[2 + l..];
        let mut poles = Vec::with_capacity(l);
        let mut residue = C64::new(0.0, 0.0);
        for (i, p) in self.poles.iter().enumerate() {
            let k = p.order();
            let c = if i + 1 == l {
                let mut c = vec![-residue];
                c.extend(&rest[..k - 1]);
                rest = &rest[k - 1..];
                c
            } else {
                let c = rest[..k].to_vec();
                rest = &rest[k..];
                residue += c[0];
                c
            };
            poles.push(Pole::new(bs[i], c));
        }
        let cov = Covering1 {
            ctx,
            a: params[1],
            poles,
        };
        cov.validate()?;
        Ok(cov)
    }

    fn critical_points(&self) -> Result<Vec<C64>> {
        Covering1::critical_points(self)
    }

    fn track_critical_points(&self, previous: &[C64]) -> Result<Vec<C64>> {
        previous
            .iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..50 {
                    let d = self.eval_derivatives(z, 2)?;
                    let step = d[1] / d[2];
                    if !step.is_finite() {
                        return Err(Error::NonConvergence { residual: d[1].norm() });
                    }
                    z -= step;
                    if step.norm() <= TRACK_STEP * (1.0 + z.norm()) {
                        return Ok(z);
                    }
                }
                let d = self.eval_derivatives(z, 2)?;
                if d[1].norm() < 1e-12 * (1.0 + d[2].norm()) {
                    Ok(z)
                } else {
                    Err(Error::NonConvergence { residual: d[1].norm() })
                }
            })
            .collect()
    }

    fn lambda_jacobian(&self, alpha: &[C64]) -> Result<DMatrix<C64>> {
        let names = self.param_names();
        let l = self.poles.len();
        let dsigma = self.dp_dsigma(alpha)?;
        let mut jac = DMatrix::zeros(alpha.len(), names.len());
        for (m, &z) in alpha.iter().enumerate() {
            // zeta^(j)(z - b_i) for j = 0..=k_i
            let zetas: Vec<Vec<C64>> = self
                .poles
                .iter()
                .map(|p| {
                    let w = z - p.b;
                    let wp = self.ctx.wp_all(w, p.order())?;
                    let mut v = vec![self.ctx.zeta(w, 0)?];
                    v.extend(wp.iter().take(p.order()).map(|x| -x));
                    Ok(v)
                })
                .collect::<Result<_>>()?;
            jac[(m, 0)] = dsigma[m];
            jac[(m, 1)] = C64::new(1.0, 0.0);
            for (i, p) in self.poles.iter().enumerate() {
                jac[(m, 2 + i)] = -p
                    .c
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * zetas[i][j + 1])
                    .sum::<C64>();
            }
            let mut col = 2 + l;
            for (i, p) in self.poles.iter().enumerate() {
                if i + 1 == l {
                    for z in &zetas[i][1..p.order()] {
                        jac[(m, col)] = *z;
                        col += 1;
                    }
                } else {
                    jac[(m, col)] = zetas[i][0] - zetas[l - 1][0];
                    col += 1;
                    for z in &zetas[i][1..p.order()] {
                        jac[(m, col)] = *z;
                        col += 1;
                    }
                }
            }
        }
        Ok(jac)
    }

    fn point(&self, alpha: &[C64]) -> Result<Point> {
        let cd = self.critical_data_at(alpha)?;
        let m = alpha.len();
        let inc = self.ctx.inc1;
        let mut kernel = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    kernel[(i, j)] = match self.ctx.wp(alpha[i] - alpha[j], 0) {
                        Ok(v) => v + inc,
                        Err(_) => C64::new(f64::INFINITY, 0.0),
                    };
                }
            }
        }
        let mut kernel_inf = DMatrix::zeros(m, self.poles.len());
        for i in 0..m {
            for (s, p) in self.poles.iter().enumerate() {
                kernel_inf[(i, s)] = self.ctx.wp(alpha[i] - p.b, 0)? + inc;
            }
        }
        Ok(Point {
            alpha: cd.alpha,
            lambda: cd.lambda,
            fsq: cd.fsq,
            sw: cd.sw,
            sb: cd.sb,
            kernel,
            kernel_inf,
            h_pow: self.h_pow(),
            orders: self.profile(),
            modulus: Some((self.sigma(), self.ctx.eta_tilde)),
        })
    }
}
