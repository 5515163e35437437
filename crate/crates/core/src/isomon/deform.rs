use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::Deformable;
use crate::error::{Error, Result};
use crate::tolerances::{FD_STEP, MAX_CONDITION};

/// Finite-difference settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Step relative to the largest parameter magnitude (at least one).
    pub step: f64,
    /// Apply one level of Richardson extrapolation to the central difference.
    pub richardson: bool,
    /// Differentiate `log F` instead of `F`, through `log(F(+h) / F(-h))` so
    /// that no branch cut is crossed.
    pub log: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: FD_STEP,
            richardson: true,
            log: false,
        }
    }
}

/// `d lambda / d params` with its condition number over the `M` leading
/// singular values.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformationJacobian {
    pub params: Vec<String>,
    pub d_lambda_d_params: DMatrix<C64>,
    pub condition: f64,
    singular_values: Vec<f64>,
    u: DMatrix<C64>,
    v: DMatrix<C64>,
}

impl DeformationJacobian {
    pub fn new(params: Vec<String>, d_lambda_d_params: DMatrix<C64>) -> Self {
        let m = d_lambda_d_params.nrows();
        let svd = d_lambda_d_params.clone().svd(true, true);
        let u = svd.u.expect("u requested");
        let v_t = svd.v_t.expect("v_t requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
        let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
        let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)].conj());
        let condition = if m == 0 {
            1.0
        } else if singular_values.len() < m || singular_values[m - 1] == 0.0 {
            f64::INFINITY
        } else {
            singular_values[0] / singular_values[m - 1]
        };
        DeformationJacobian {
            params,
            d_lambda_d_params,
            condition,
            singular_values,
            u,
            v,
        }
    }

    pub fn of<C: Deformable>(cov: &C, alpha: &[C64]) -> Result<Self> {
        Ok(Self::new(cov.param_names(), cov.lambda_jacobian(alpha)?))
    }

    pub fn rank_ok(&self) -> bool {
        self.condition <= MAX_CONDITION
    }

    /// Minimal-norm solution of `J delta = target`.
    pub fn solve(&self, target: &[C64]) -> Result<DVector<C64>> {
        if !self.rank_ok() {
            return Err(Error::IllConditioned(self.condition));
        }
        let m = self.d_lambda_d_params.nrows();
        let t = DVector::from_column_slice(target);
        let mut delta = DVector::zeros(self.d_lambda_d_params.ncols());
        for i in 0..m {
            let coeff = self.u.column(i).dotc(&t) / self.singular_values[i];
            delta += self.v.column(i) * coeff;
        }
        Ok(delta)
    }
}

struct Deformer<'a, C> {
    cov: &'a C,
    alpha0: &'a [C64],
    p0: Vec<C64>,
    jac: DeformationJacobian,
}

impl<'a, C: Deformable> Deformer<'a, C> {
    fn new(cov: &'a C, alpha0: &'a [C64]) -> Result<Self> {
        Ok(Deformer {
            cov,
            alpha0,
            p0: cov.params(),
            jac: DeformationJacobian::of(cov, alpha0)?,
        })
    }

    fn step_size(&self, delta: &DVector<C64>, rel: f64) -> Result<f64> {
        let scale = self.p0.iter().map(|p| p.norm()).fold(1.0, f64::max);
        let dn = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if dn == 0.0 {
            return Err(Error::StepUnderflow);
        }
        let h = rel * scale / dn;
        if !(h * dn > 1e-13 * scale) {
            return Err(Error::StepUnderflow);
        }
        Ok(h)
    }

    fn eval<F>(&self, delta: &DVector<C64>, eps: f64, f: &F) -> Result<Vec<C64>>
    where
        F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
    {
        let params: Vec<C64> = self.p0.iter().zip(delta.iter()).map(|(p, d)| p + d * eps).collect();
        let moved = self.cov.with_params(&params)?;
        let alpha = moved.track_critical_points(self.alpha0)?;
        f(&moved, &alpha)
    }

    fn central<F>(&self, delta: &DVector<C64>, h: f64, f: &F, log: bool) -> Result<Vec<C64>>
    where
        F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
    {
        let up = self.eval(delta, h, f)?;
        let dn = self.eval(delta, -h, f)?;
        Ok(up
            .iter()
            .zip(&dn)
            .map(|(a, b)| if log { (a / b).ln() } else { a - b } / (2.0 * h))
            .collect())
    }

    fn derivative<F>(&self, target: &[C64], f: &F, opts: FdOptions) -> Result<Vec<C64>>
    where
        F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
    {
        let delta = self.jac.solve(target)?;
        let h = self.step_size(&delta, opts.step)?;
        let coarse = self.central(&delta, h, f, opts.log)?;
        if !opts.richardson {
            return Ok(coarse);
        }
        let fine = self.central(&delta, h / 2.0, f, opts.log)?;
        Ok(coarse
            .iter()
            .zip(&fine)
            .map(|(c, fi)| (4.0 * fi - c) / 3.0)
            .collect())
    }
}

fn unit(m: usize, k: usize) -> Vec<C64> {
    (0..m)
        .map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
        .collect()
}

/// Derivative of the quantities returned by `f` along the deformation whose
/// critical values move with velocity `target`, all other data following
/// the minimal-norm parameter motion.
///
/// `f` receives the deformed covering and its critical points continued from
/// `alpha`, in the same order.
pub fn directional_derivative<C, F>(cov: &C, alpha: &[C64], target: &[C64], f: F, opts: FdOptions) -> Result<Vec<C64>>
where
    C: Deformable,
    F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
{
    Deformer::new(cov, alpha)?.derivative(target, &f, opts)
}

/// `d F / d lambda_k`.
pub fn lambda_derivative<C, F>(cov: &C, alpha: &[C64], k: usize, f: F, opts: FdOptions) -> Result<Vec<C64>>
where
    C: Deformable,
    F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
{
    directional_derivative(cov, alpha, &unit(alpha.len(), k), f, opts)
}

/// `d F / d lambda_k` for every `k`; entry `[k][j]` is the derivative of the
/// `j`-th quantity.
pub fn lambda_gradient<C, F>(cov: &C, alpha: &[C64], f: F, opts: FdOptions) -> Result<Vec<Vec<C64>>>
where
    C: Deformable,
    F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
{
    let d = Deformer::new(cov, alpha)?;
    (0..alpha.len())
        .map(|k| d.derivative(&unit(alpha.len(), k), &f, opts))
        .collect()
}

/// Convergence ratio `|D(h) - D(h/2)| / |D(h/2) - D(h/4)|` of the plain
/// central difference per quantity; close to 4 for smooth quantities.
pub fn richardson_ratio<C, F>(cov: &C, alpha: &[C64], target: &[C64], f: F, step: f64) -> Result<Vec<f64>>
where
    C: Deformable,
    F: Fn(&C, &[C64]) -> Result<Vec<C64>>,
{
    let d = Deformer::new(cov, alpha)?;
    let delta = d.jac.solve(target)?;
    let h = d.step_size(&delta, step)?;
    let d1 = d.central(&delta, h, &f, false)?;
    let d2 = d.central(&delta, h / 2.0, &f, false)?;
    let d4 = d.central(&delta, h / 4.0, &f, false)?;
    Ok((0..d1.len())
        .map(|i| (d1[i] - d2[i]).norm() / (d2[i] - d4[i]).norm())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn minimal_norm_solution_of_wide_system() {
        // one null direction (1, 1, 1) / sqrt(3)
        let j = DMatrix::from_row_slice(
            2,
            3,
            &[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 1.0), c(-1.0, -1.0)],
        );
        let dj = DeformationJacobian::new(vec!["x".into(), "y".into(), "z".into()], j.clone());
        assert!(dj.condition.is_finite());
        let t = [c(0.3, -0.2), c(1.0, 0.5)];
        let delta = dj.solve(&t).unwrap();
        let back = &j * &delta;
        assert!((back[0] - t[0]).norm() < 1e-14 && (back[1] - t[1]).norm() < 1e-14);
        let null_component: C64 = delta.iter().sum();
        assert!(null_component.norm() < 1e-14);
    }

    #[test]
    fn singular_jacobian_is_ill_conditioned() {
        let j = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let dj = DeformationJacobian::new(vec!["x".into(), "y".into()], j);
        assert!(matches!(dj.solve(&[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::IllConditioned(_))));
    }
}
