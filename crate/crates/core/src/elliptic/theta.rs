use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::Modulus;
use crate::tolerances::SERIES_EPS;

/// `n`-th z-derivative of the odd theta function
/// `theta1(z) = 2 sum_{k>=0} (-1)^k q_J^{(k+1/2)^2} sin((2k+1) pi z)`,
/// `q_J = exp(i pi sigma)`, so that `theta1(z + 1) = -theta1(z)`.
///
/// Accurate for `z` near the fundamental parallelogram; callers reduce their
/// arguments first.
pub fn theta1(m: &Modulus, z: C64, n_deriv: u32) -> C64 {
    let ipi_sigma = C64::i() * PI * m.sigma();
    let phase = n_deriv as f64 * PI / 2.0;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..m.truncation() {
        let odd = (2 * k + 1) as f64;
        let half = k as f64 + 0.5;
        let weight = (ipi_sigma * half * half).exp() * (odd * PI).powi(n_deriv as i32);
        let sign = if k % 2 == 0 { 2.0 } else { -2.0 };
        let term = weight * (odd * PI * z + phase).sin() * sign;
        acc += term;
        let bound = weight.norm() * (odd * PI * z.im.abs()).exp();
        if k > 0 && bound < SERIES_EPS * acc.norm().max(SERIES_EPS) {
            break;
        }
    }
    acc
}
