use num_complex::Complex64 as C64;

use super::WeierstrassContext;

/// `a0 * prod sigma_w(z - a_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaProduct {
    pub a0: C64,
    pub zeros: Vec<C64>,
}

impl SigmaProduct {
    pub fn new(a0: C64, zeros: Vec<C64>) -> Self {
        SigmaProduct { a0, zeros }
    }

    pub fn eval(&self, ctx: &WeierstrassContext, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.a0, |acc, &a| acc * ctx.sigma_w(z - a))
    }
}

/// `R(F, G) = a0^N prod_i G(a_i)` for `F = a0 prod_{i<=M} sigma(z - a_i)` and
/// `G = b0 prod_{j<=N} sigma(z - b_j)`.
pub fn elliptic_resultant(ctx: &WeierstrassContext, f: &SigmaProduct, g: &SigmaProduct) -> C64 {
    let n = g.zeros.len() as i32;
    f.zeros
        .iter()
        .fold(f.a0.powi(n), |acc, &a| acc * g.eval(ctx, a))
}
