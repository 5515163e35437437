//! Genus-zero Hurwitz spaces: rational coverings
//! `p(z) = z^k1 + sum_{r<=k1-2} a_r z^r - sum_{i>=2} sum_alpha c_(i,alpha) / (z - b_i)^alpha`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{BoundaryComponent, Error, Result};
use crate::isomon::{min_separation, Deformable, Point};
use crate::poly::{normalized_resultant, resultant, CPoly};
use crate::tolerances::{BOUNDARY_DISTANCE, CAUSTIC, COMMON_ROOT, LATTICE_PROXIMITY, TRACK_STEP};
use crate::{GFunction, TauValue};

/// A finite pole `b` with tail coefficients `c[alpha - 1] = c_(alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub b: C64,
    pub c: Vec<C64>,
}

impl Pole {
    pub fn new(b: C64, c: Vec<C64>) -> Self {
        Pole { b, c }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    /// Top tail coefficient `c_(k)`.
    pub fn top(&self) -> C64 {
        *self.c.last().expect("pole with empty tail")
    }
}

/// Distances of a covering to the two boundary components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Complex dimension `M` of the Hurwitz space.
    pub dim: usize,
    /// Smallest pole separation (infinite with fewer than two finite poles).
    pub min_pole_distance: f64,
    /// Smallest `|c_(i,k_i)|` (infinite without finite poles).
    pub min_top_tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covering0 {
    /// Polynomial part, monic of degree `k1`.
    poly: CPoly,
    poles: Vec<Pole>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData0 {
    pub alpha: Vec<C64>,
    pub lambda: Vec<C64>,
    pub fsq: Vec<C64>,
    pub sb: Vec<C64>,
    pub min_lambda_separation: f64,
    pub min_alpha_separation: f64,
    /// Critical values closer than the caustic tolerance.
    pub caustic: bool,
}

/// Flat coordinates `p_i = b_i`, `t_i = k_i c_(i,k_i)^(1/k_i)` for `i >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatCoords0 {
    pub p: Vec<C64>,
    /// Principal branch.
    pub t: Vec<C64>,
    /// `t_i^{k_i}`, independent of the branch.
    pub t_pow: Vec<C64>,
    /// Branch index `j` of `t_i = k_i |c|^(1/k) exp(i (arg c + 2 pi j) / k)`.
    pub branch: Vec<u32>,
}

pub(crate) fn validate_tails(poles: &[Pole]) -> Result<f64> {
    let mut min_top = f64::INFINITY;
    let mut bad = Vec::new();
    for (i, p) in poles.iter().enumerate() {
        if p.c.is_empty() {
            return Err(Error::InvalidInput(format!("pole {i} has an empty tail")));
        }
        if p.c.iter().any(|c| !c.is_finite()) || !p.b.is_finite() {
            return Err(Error::InvalidInput(format!("pole {i} has non-finite data")));
        }
        let top = p.top().norm();
        min_top = min_top.min(top);
        if top <= BOUNDARY_DISTANCE {
            bad.push(i);
        }
    }
    if !bad.is_empty() {
        return Err(Error::OnBoundary {
            component: BoundaryComponent::S2,
            indices: bad,
        });
    }
    Ok(min_top)
}

/// `n`-th derivative of `-c (z - b)^-alpha`.
fn tail_derivative(c: C64, alpha: usize, w: C64, n: usize) -> C64 {
    let falling: f64 = (0..n).map(|j| -(alpha as f64) - j as f64).product();
    -c * falling * w.powi(-((alpha + n) as i32))
}

impl Covering0 {
    /// `k1 >= 1`; `poly_coeffs = (a_0, ..., a_{k1-2})`; the poles are the
    /// finite ones, `i = 2..l`.
    pub fn new(k1: usize, poly_coeffs: Vec<C64>, poles: Vec<Pole>) -> Result<Self> {
        if k1 == 0 {
            return Err(Error::InvalidInput("k1 must be at least 1".into()));
        }
        if poly_coeffs.len() + 1 != k1 {
            return Err(Error::InvalidInput(format!(
                "expected {} polynomial coefficients for k1 = {k1}, got {}",
                k1 - 1,
                poly_coeffs.len()
            )));
        }
        let mut coeffs = poly_coeffs;
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.push(C64::new(1.0, 0.0));
        let cov = Covering0 {
            poly: CPoly::new(coeffs),
            poles,
        };
        cov.validate()?;
        Ok(cov)
    }

    /// Polynomial covering `z^k1 + sum a_r z^r`.
    pub fn polynomial(poly_coeffs: Vec<C64>) -> Result<Self> {
        Self::new(poly_coeffs.len() + 1, poly_coeffs, Vec::new())
    }

    fn from_parts(poly: CPoly, poles: Vec<Pole>) -> Result<Self> {
        let cov = Covering0 { poly, poles };
        cov.validate()?;
        Ok(cov)
    }

    pub fn k1(&self) -> usize {
        self.poly.degree()
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// `(a_0, ..., a_{k1-2})`.
    pub fn poly_coeffs(&self) -> Vec<C64> {
        let k1 = self.k1();
        (0..k1.saturating_sub(1))
            .map(|r| self.poly.coeffs().get(r).copied().unwrap_or_default())
            .collect()
    }

    pub fn polynomial_part(&self) -> &CPoly {
        &self.poly
    }

    /// `(k_1, ..., k_l)`.
    pub fn profile(&self) -> Vec<usize> {
        std::iter::once(self.k1())
            .chain(self.poles.iter().map(Pole::order))
            .collect()
    }

    /// Degree `N` of the covering.
    pub fn degree(&self) -> usize {
        self.profile().iter().sum()
    }

    /// Number `l` of poles, including infinity.
    pub fn num_poles(&self) -> usize {
        self.poles.len() + 1
    }

    /// `M = N + l - 2`.
    pub fn dim(&self) -> usize {
        self.degree() + self.num_poles() - 2
    }

    /// Accepts iff the covering is off both boundary components.
    pub fn validate(&self) -> Result<Diagnostics> {
        let min_top_tail = validate_tails(&self.poles)?;
        if self.poly.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
        }
        let mut min_pole_distance = f64::INFINITY;
        let mut clash = Vec::new();
        for i in 0..self.poles.len() {
            for j in i + 1..self.poles.len() {
                let d = (self.poles[i].b - self.poles[j].b).norm();
                min_pole_distance = min_pole_distance.min(d);
                if d <= BOUNDARY_DISTANCE {
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
        if self.dim() == 0 {
            return Err(Error::InvalidInput("the covering p(z) = z has no critical points".into()));
        }
        Ok(Diagnostics {
            dim: self.dim(),
            min_pole_distance,
            min_top_tail,
        })
    }

    /// `(p(z), p'(z), ..., p^(n)(z))`.
    pub fn eval_derivatives(&self, z: C64, n: usize) -> Result<Vec<C64>> {
        let mut out = self.poly.eval_derivatives(z, n);
        for pole in &self.poles {
            let w = z - pole.b;
            if w.norm() <= LATTICE_PROXIMITY {
                return Err(Error::NearPole(format!("{z}")));
            }
            for (j, &c) in pole.c.iter().enumerate() {
                for (d, slot) in out.iter_mut().enumerate() {
                    *slot += tail_derivative(c, j + 1, w, d);
                }
            }
        }
        Ok(out)
    }

    pub fn eval(&self, z: C64, n: usize) -> Result<C64> {
        Ok(self.eval_derivatives(z, n)?[n])
    }

    /// `p' = f / g` with `g = prod (z - b_i)^(k_i + 1)`, assembled coefficient
    /// by coefficient.
    pub fn p_prime_as_ratio(&self) -> (CPoly, CPoly) {
        let factors: Vec<CPoly> = self
            .poles
            .iter()
            .map(|p| CPoly::linear(p.b).pow(p.order() + 1))
            .collect();
        let one = CPoly::constant(C64::new(1.0, 0.0));
        let g = factors.iter().fold(one.clone(), |acc, f| &acc * f);
        let mut f = &self.poly.derivative() * &g;
        for (i, pole) in self.poles.iter().enumerate() {
            let others = factors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(one.clone(), |acc, (_, q)| &acc * q);
            let lin = CPoly::linear(pole.b);
            let k = pole.order();
            let local = pole.c.iter().enumerate().fold(CPoly::zero(), |acc, (j, &c)| {
                let alpha = j + 1;
                &acc + &lin.pow(k - alpha).scale(c * alpha as f64)
            });
            f = &f + &(&local * &others);
        }
        (f, g)
    }

    /// `(f(z), f'(z))` for `f = p' g`, evaluated in factored form (no
    /// expanded coefficients), so that values near clustered roots keep their
    /// relative accuracy.
    pub fn numerator_derivs(&self, z: C64) -> (C64, C64) {
        // (value, derivative) pairs
        let mul = |a: (C64, C64), b: (C64, C64)| (a.0 * b.0, a.0 * b.1 + a.1 * b.0);
        let power = |w: C64, n: usize| {
            if n == 0 {
                (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
            } else {
                (w.powi(n as i32), w.powi(n as i32 - 1) * n as f64)
            }
        };
        let factors: Vec<(C64, C64)> = self.poles.iter().map(|p| power(z - p.b, p.order() + 1)).collect();
        let one = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let g = factors.iter().fold(one, |acc, &f| mul(acc, f));
        let pd = self.poly.eval_derivatives(z, 2);
        let mut out = mul((pd[1], pd[2]), g);
        for (i, pole) in self.poles.iter().enumerate() {
            let others = factors
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(one, |acc, (_, &f)| mul(acc, f));
            let k = pole.order();
            let local = pole.c.iter().enumerate().fold((C64::new(0.0, 0.0), C64::new(0.0, 0.0)), |acc, (j, &c)| {
                let alpha = j + 1;
                let t = power(z - pole.b, k - alpha);
                (acc.0 + t.0 * c * alpha as f64, acc.1 + t.1 * c * alpha as f64)
            });
            let term = mul(local, others);
            out = (out.0 + term.0, out.1 + term.1);
        }
        out
    }

    /// Roots of `f`, after checking that `f` and `g` share none.
    pub fn critical_points(&self) -> Result<Vec<C64>> {
        if !self.poles.is_empty() {
            // the coefficient-norm normalization is not translation invariant,
            // so the test runs with the poles centred at the origin
            let centroid = self.poles.iter().map(|p| p.b).sum::<C64>() / self.poles.len() as f64;
            let (f, g) = self.translated(-centroid)?.p_prime_as_ratio();
            let r = normalized_resultant(&f, &g);
            if r < COMMON_ROOT {
                return Err(Error::CommonRoot(r));
            }
        }
        let (f, _) = self.p_prime_as_ratio();
        let roots = f.all_roots()?.roots;
        // final polish on p' itself
        self.track_critical_points(&roots)
    }

    pub fn critical_data(&self) -> Result<CriticalData0> {
        let alpha = self.critical_points()?;
        self.critical_data_at(&alpha)
    }

    /// Critical data at given critical points (in the given order).
    pub fn critical_data_at(&self, alpha: &[C64]) -> Result<CriticalData0> {
        let mut lambda = Vec::with_capacity(alpha.len());
        let mut fsq = Vec::with_capacity(alpha.len());
        let mut sb = Vec::with_capacity(alpha.len());
        for &z in alpha {
            let d = self.eval_derivatives(z, 4)?;
            let a = d[2];
            let b = d[3] / 2.0;
            let g = d[4] / 6.0;
            lambda.push(d[0]);
            fsq.push(2.0 / a);
            sb.push((2.0 * b * b - 3.0 * a * g) / a.powi(3));
        }
        let min_lambda_separation = min_separation(&lambda);
        let scale = lambda.iter().map(|l| l.norm()).fold(0.0, f64::max) + 1.0;
        Ok(CriticalData0 {
            alpha: alpha.to_vec(),
            caustic: min_lambda_separation < CAUSTIC * scale,
            min_alpha_separation: min_separation(alpha),
            min_lambda_separation,
            lambda,
            fsq,
            sb,
        })
    }

    pub fn flat_coords(&self) -> FlatCoords0 {
        FlatCoords0 {
            p: self.poles.iter().map(|p| p.b).collect(),
            t: self
                .poles
                .iter()
                .map(|p| p.order() as f64 * p.top().powf(1.0 / p.order() as f64))
                .collect(),
            t_pow: self
                .poles
                .iter()
                .map(|p| (p.order() as f64).powi(p.order() as i32) * p.top())
                .collect(),
            branch: vec![0; self.poles.len()],
        }
    }

    /// Principal `h_s = c_(s,k_s)^(1/k_s)`, `s >= 2`.
    pub fn h(&self) -> Vec<C64> {
        self.poles
            .iter()
            .map(|p| p.top().powf(1.0 / p.order() as f64))
            .collect()
    }

    /// Tau-function from the critical data:
    /// `tau^24 = prod f_m / prod_{s>=2} h_s^(k_s + 1)`.
    pub fn tau_product(&self, cd: &CriticalData0) -> TauValue {
        let h = self.h();
        let log_f: C64 = cd.fsq.iter().map(|x| x.ln() / 2.0).sum();
        let log_h: C64 = self
            .poles
            .iter()
            .map(|p| (p.order() + 1) as f64 / p.order() as f64 * p.top().ln())
            .sum();
        let num: C64 = self
            .poles
            .iter()
            .zip(&h)
            .map(|(p, h)| h.powi(2 * (p.order() as i32 + 1)))
            .product();
        let den: C64 = cd.fsq.iter().product();
        TauValue {
            log_tau: (log_f - log_h) / 24.0,
            tau_m48: num / den,
        }
    }

    /// `prod_{i != j} (b_i - b_j)^((k_i + 1)(k_j + 1))` over ordered pairs.
    fn pole_difference_product(&self) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (i, pi) in self.poles.iter().enumerate() {
            for (j, pj) in self.poles.iter().enumerate() {
                if i != j {
                    acc *= (pi.b - pj.b).powi(((pi.order() + 1) * (pj.order() + 1)) as i32);
                }
            }
        }
        acc
    }

    /// `tau^-48 = R(f, f') / (prod (b_i - b_j)^((k_i+1)(k_j+1)) prod t_i^((k_i+1)(k_i-2)))`.
    pub fn tau_resultant(&self) -> C64 {
        let (f, _) = self.p_prime_as_ratio();
        let r = resultant(&f, &f.derivative());
        let flat = self.flat_coords();
        let t_factor: C64 = self
            .poles
            .iter()
            .zip(&flat.t)
            .map(|(p, t)| {
                let k = p.order() as i32;
                t.powi((k + 1) * (k - 2))
            })
            .product();
        r / (self.pole_difference_product() * t_factor)
    }

    /// `R(f, g) / (prod (b_i - b_j)^((k_i+1)(k_j+1)) prod t_i^(k_i (k_i+1)))`,
    /// constant on the Hurwitz space.
    pub fn resultant_ratio(&self) -> C64 {
        let (f, g) = self.p_prime_as_ratio();
        let r = resultant(&f, &g);
        let flat = self.flat_coords();
        let t_factor: C64 = self
            .poles
            .iter()
            .zip(&flat.t_pow)
            .map(|(p, tp)| tp.powi(p.order() as i32 + 1))
            .product();
        r / (self.pole_difference_product() * t_factor)
    }

    /// `G = -(1/24) sum_{i>=2} (k_i + 1) log t_i` and
    /// `gamma = -(1/24) (l - 2 + sum_i 1/k_i + M/k1)`.
    pub fn g_function(&self, cd: &CriticalData0) -> GFunction {
        let flat = self.flat_coords();
        let g: C64 = -self
            .poles
            .iter()
            .zip(&flat.t)
            .map(|(p, t)| (p.order() + 1) as f64 * t.ln())
            .sum::<C64>()
            / 24.0;
        let tau = self.tau_product(cd);
        let log_j: C64 = cd.fsq.iter().map(|x| x.ln() / 2.0).sum();
        GFunction {
            g,
            g_from_tau: tau.log_tau - log_j / 24.0,
            gamma: self.gamma(),
        }
    }

    pub fn gamma(&self) -> f64 {
        let inv: f64 = self.profile().iter().map(|&k| 1.0 / k as f64).sum();
        -(self.num_poles() as f64 - 2.0 + inv + self.dim() as f64 / self.k1() as f64) / 24.0
    }

    /// Closed-form value of `E(log tau) = sum lambda_m H_m`:
    /// `(1/24) [M (1/k1 - 1/2) - sum_{s>=2} (k_s + 1)(1/k1 + 1/k_s)]`.
    pub fn euler_log_tau(&self) -> f64 {
        let k1 = self.k1() as f64;
        let tails: f64 = self
            .poles
            .iter()
            .map(|p| {
                let k = p.order() as f64;
                (k + 1.0) * (1.0 / k1 + 1.0 / k)
            })
            .sum();
        (self.dim() as f64 * (1.0 / k1 - 0.5) - tails) / 24.0
    }

    /// The same covering in the coordinate `w = z + s`: `p~(w) = p(w - s)`.
    /// The polynomial part acquires a `w^(k1-1)` term unless `s = 0`.
    pub fn translated(&self, s: C64) -> Result<Self> {
        let shift = CPoly::linear(s);
        let poly = self
            .poly
            .coeffs()
            .iter()
            .enumerate()
            .fold(CPoly::zero(), |acc, (r, &a)| &acc + &shift.pow(r).scale(a));
        let poles = self
            .poles
            .iter()
            .map(|p| Pole::new(p.b + s, p.c.clone()))
            .collect();
        Self::from_parts(poly, poles)
    }

    /// The covering `c^k1 p(w / c)`, i.e. `z -> c z` with `lambda -> c^k1 lambda`.
    pub fn scaled(&self, c: C64) -> Result<Self> {
        let k1 = self.k1() as i32;
        let poly = CPoly::new(
            self.poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(r, &a)| a * c.powi(k1 - r as i32))
                .collect(),
        );
        let poles = self
            .poles
            .iter()
            .map(|p| {
                Pole::new(
                    p.b * c,
                    p.c.iter()
                        .enumerate()
                        .map(|(j, &cc)| cc * c.powi(k1 + j as i32 + 1))
                        .collect(),
                )
            })
            .collect();
        Self::from_parts(poly, poles)
    }

    /// Replaces the tail coefficients of pole `i` (testing and sweeps).
    pub fn with_pole(&self, i: usize, pole: Pole) -> Result<Self> {
        let mut poles = self.poles.clone();
        poles[i] = pole;
        Self::from_parts(self.poly.clone(), poles)
    }
}

impl Deformable for Covering0 {
    fn param_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.k1() - 1).map(|r| format!("poly_coeffs.{r}")).collect();
        for (i, p) in self.poles.iter().enumerate() {
            names.push(format!("poles.{i}.b"));
            names.extend((0..p.order()).map(|j| format!("poles.{i}.c.{j}")));
        }
        names
    }

    fn params(&self) -> Vec<C64> {
        let mut v = self.poly_coeffs();
        for p in &self.poles {
            v.push(p.b);
            v.extend(&p.c);
        }
        v
    }

    fn with_params(&self, params: &[C64]) -> Result<Self> {
        let k1 = self.k1();
        let mut coeffs = self.poly.coeffs().to_vec();
        coeffs[..k1 - 1].copy_from_slice(&params[..k1 - 1]);
        let mut rest = &params[k1 - 1..];
        let mut poles = Vec::with_capacity(self.poles.len());
        for p in &self.poles {
            let k = p.order();
            poles.push(Pole::new(rest[0], rest[1..=k].to_vec()));
            rest = &rest[k + 1..];
        }
        Self::from_parts(CPoly::new(coeffs), poles)
    }

    fn critical_points(&self) -> Result<Vec<C64>> {
        Covering0::critical_points(self)
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
                let residual = self.eval(z, 1)?.norm();
                if residual < 1e-12 * (1.0 + self.eval(z, 2)?.norm()) {
                    Ok(z)
                } else {
                    Err(Error::NonConvergence { residual })
                }
            })
            .collect()
    }

    fn lambda_jacobian(&self, alpha: &[C64]) -> Result<DMatrix<C64>> {
        let names = self.param_names();
        let mut jac = DMatrix::zeros(alpha.len(), names.len());
        for (m, &z) in alpha.iter().enumerate() {
            let mut col = 0;
            for r in 0..self.k1() - 1 {
                jac[(m, col)] = z.powi(r as i32);
                col += 1;
            }
            for p in &self.poles {
                let w = z - p.b;
                jac[(m, col)] = -p
                    .c
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| c * (j + 1) as f64 * w.powi(-(j as i32 + 2)))
                    .sum::<C64>();
                col += 1;
                for j in 0..p.order() {
                    jac[(m, col)] = -w.powi(-(j as i32 + 1));
                    col += 1;
                }
            }
        }
        Ok(jac)
    }

    fn point(&self, alpha: &[C64]) -> Result<Point> {
        let cd = self.critical_data_at(alpha)?;
        let m = alpha.len();
        let kernel = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                C64::new(0.0, 0.0)
            } else {
                (alpha[i] - alpha[j]).powi(-2)
            }
        });
        let kernel_inf = DMatrix::from_fn(m, self.poles.len(), |i, s| (alpha[i] - self.poles[s].b).powi(-2));
        Ok(Point {
            alpha: cd.alpha,
            lambda: cd.lambda,
            fsq: cd.fsq,
            sw: cd.sb.clone(),
            sb: cd.sb,
            kernel,
            kernel_inf,
            h_pow: self.poles.iter().map(Pole::top).collect(),
            orders: self.poles.iter().map(Pole::order).collect(),
            modulus: None,
        })
    }
}
