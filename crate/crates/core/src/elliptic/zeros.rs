use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::Modulus;
use crate::error::{Error, Result};

/// Cells with a single zero and at most this diameter are handed to Newton.
const NEWTON_CELL: f64 = 0.05;
/// Cells below this diameter are reported as clusters.
const MIN_CELL: f64 = 1e-6;
/// Poles closer than this to a cell edge force a different split.
const EDGE_MARGIN: f64 = 1e-6;
const MAX_TRACK_DEPTH: usize = 40;
const MAX_ARG_STEP: f64 = 0.25;

const OFFSETS: [(f64, f64); 6] = [
    (-0.4873, -0.4931),
    (-0.3127, -0.2239),
    (-0.0419, -0.6583),
    (-0.6211, -0.0717),
    (-0.1733, -0.3371),
    (-0.5557, -0.5903),
];
const SPLITS: [f64; 7] = [0.5, 0.4619, 0.5383, 0.4237, 0.5771, 0.3851, 0.6133];

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

struct Finder<'a, F> {
    modulus: &'a Modulus,
    h: F,
    offset: C64,
    /// Poles in cell coordinates, reduced to `[0, 1)^2`.
    poles: Vec<(f64, f64, usize)>,
}

impl<F: Fn(C64) -> (C64, C64)> Finder<'_, F> {
    fn point(&self, x: f64, y: f64) -> C64 {
        self.offset + self.modulus.from_coords(x, y)
    }

    fn value(&self, z: C64) -> Result<C64> {
        let v = (self.h)(z).0;
        if !v.is_finite() || v.norm() == 0.0 {
            return Err(Error::ContourClash);
        }
        Ok(v)
    }

    fn track(&self, a: C64, b: C64, ha: C64, hb: C64, depth: usize) -> Result<f64> {
        let ratio = hb / ha;
        let d = ratio.arg();
        let r = ratio.norm();
        if d.abs() < MAX_ARG_STEP && (0.5..2.0).contains(&r) {
            return Ok(d);
        }
        if depth >= MAX_TRACK_DEPTH {
            return Err(Error::ContourClash);
        }
        let mid = (a + b) / 2.0;
        let hm = self.value(mid)?;
        Ok(self.track(a, mid, ha, hm, depth + 1)? + self.track(mid, b, hm, hb, depth + 1)?)
    }

    fn edge(&self, a: C64, b: C64) -> Result<f64> {
        const SAMPLES: usize = 8;
        let mut total = 0.0;
        let mut prev = a;
        let mut hprev = self.value(a)?;
        for i in 1..=SAMPLES {
            let z = a + (b - a) * (i as f64 / SAMPLES as f64);
            let hz = self.value(z)?;
            total += self.track(prev, z, hprev, hz, 0)?;
            prev = z;
            hprev = hz;
        }
        Ok(total)
    }

    fn winding(&self, c: Cell) -> Result<i64> {
        let p00 = self.point(c.x0, c.y0);
        let p10 = self.point(c.x1, c.y0);
        let p11 = self.point(c.x1, c.y1);
        let p01 = self.point(c.x0, c.y1);
        let total = self.edge(p00, p10)? + self.edge(p10, p11)? + self.edge(p11, p01)? + self.edge(p01, p00)?;
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 0.1 {
            return Err(Error::ContourClash);
        }
        Ok(w.round() as i64)
    }

    fn poles_inside(&self, c: Cell) -> i64 {
        self.poles
            .iter()
            .filter(|(x, y, _)| (c.x0..c.x1).contains(x) && (c.y0..c.y1).contains(y))
            .map(|p| p.2 as i64)
            .sum()
    }

    /// Smallest distance (in the plane) from a pole to the lines `x = x` or `y = y`
    /// inside the top-level cell.
    fn pole_clearance_x(&self, x: f64) -> f64 {
        let s = self.modulus.sigma();
        let scale = s.im / s.norm();
        self.poles
            .iter()
            .map(|p| (p.0 - x).abs() * scale)
            .fold(f64::INFINITY, f64::min)
    }

    fn pole_clearance_y(&self, y: f64) -> f64 {
        let im = self.modulus.sigma().im;
        self.poles
            .iter()
            .map(|p| (p.1 - y).abs() * im)
            .fold(f64::INFINITY, f64::min)
    }

    fn zero_count(&self, c: Cell) -> Result<i64> {
        let n = self.winding(c)? + self.poles_inside(c);
        if n < 0 {
            return Err(Error::ContourClash);
        }
        Ok(n)
    }

    fn diameter(&self, c: Cell) -> f64 {
        let a = (self.point(c.x1, c.y1) - self.point(c.x0, c.y0)).norm();
        let b = (self.point(c.x1, c.y0) - self.point(c.x0, c.y1)).norm();
        a.max(b)
    }

    fn newton(&self, c: Cell) -> Option<C64> {
        let mut z = self.point((c.x0 + c.x1) / 2.0, (c.y0 + c.y1) / 2.0);
        for _ in 0..60 {
            let (v, d) = (self.h)(z);
            if v.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.is_finite() {
                return None;
            }
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        let (x, y) = self.modulus.real_coords(z - self.offset);
        let mx = 0.1 * (c.x1 - c.x0);
        let my = 0.1 * (c.y1 - c.y0);
        let inside = x >= c.x0 - mx && x <= c.x1 + mx && y >= c.y0 - my && y <= c.y1 + my;
        (inside && z.is_finite()).then_some(z)
    }

    fn locate(&self, c: Cell, count: i64, out: &mut Vec<C64>) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let diam = self.diameter(c);
        if count == 1 && diam < NEWTON_CELL {
            if let Some(z) = self.newton(c) {
                out.push(z);
                return Ok(());
            }
        }
        if diam < MIN_CELL {
            let centre = self.point((c.x0 + c.x1) / 2.0, (c.y0 + c.y1) / 2.0);
            out.extend(std::iter::repeat(centre).take(count as usize));
            return Ok(());
        }
        for &sx in &SPLITS {
            let xm = c.x0 + sx * (c.x1 - c.x0);
            if self.pole_clearance_x(xm) < EDGE_MARGIN {
                continue;
            }
            for &sy in &SPLITS {
                let ym = c.y0 + sy * (c.y1 - c.y0);
                if self.pole_clearance_y(ym) < EDGE_MARGIN {
                    continue;
                }
                let children = [
                    Cell { x0: c.x0, x1: xm, y0: c.y0, y1: ym },
                    Cell { x0: xm, x1: c.x1, y0: c.y0, y1: ym },
                    Cell { x0: c.x0, x1: xm, y0: ym, y1: c.y1 },
                    Cell { x0: xm, x1: c.x1, y0: ym, y1: c.y1 },
                ];
                let counts: Result<Vec<i64>> = children.iter().map(|&k| self.zero_count(k)).collect();
                let Ok(counts) = counts else { continue };
                if counts.iter().sum::<i64>() != count {
                    continue;
                }
                for (k, n) in children.iter().zip(counts) {
                    self.locate(*k, n, out)?;
                }
                return Ok(());
            }
        }
        Err(Error::ContourClash)
    }
}

/// All zeros in one fundamental parallelogram of an elliptic function.
///
/// `h` returns the function value and its derivative; `poles` lists the
/// poles (positions and orders) of one period. Zeros are counted by the
/// argument principle on an adaptively subdivided parallelogram, isolated
/// ones are polished by Newton's method, and unresolved clusters are
/// repeated with their multiplicity. Results are reduced to
/// `{x + y sigma : x, y in [0, 1)}`.
pub fn elliptic_zeros<F>(modulus: &Modulus, h: F, poles: &[(C64, usize)]) -> Result<Vec<C64>>
where
    F: Fn(C64) -> (C64, C64),
{
    let expected: usize = poles.iter().map(|p| p.1).sum();
    let mut last_err = Error::ContourClash;
    for &(ox, oy) in &OFFSETS {
        let offset = modulus.from_coords(ox, oy);
        let pole_coords = poles
            .iter()
            .map(|&(b, k)| {
                let (x, y) = modulus.real_coords(b - offset);
                (x - x.floor(), y - y.floor(), k)
            })
            .collect();
        let finder = Finder {
            modulus,
            h: &h,
            offset,
            poles: pole_coords,
        };
        let clear = [0.0, 1.0]
            .iter()
            .all(|&t| finder.pole_clearance_x(t) >= EDGE_MARGIN && finder.pole_clearance_y(t) >= EDGE_MARGIN);
        if !clear {
            continue;
        }
        let whole = Cell { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        match finder.winding(whole) {
            Ok(0) => {}
            Ok(_) | Err(_) => continue,
        }
        let mut out = Vec::with_capacity(expected);
        match finder.locate(whole, expected as i64, &mut out) {
            Ok(()) => {
                if out.len() != expected {
                    return Err(Error::CountMismatch {
                        found: out.len(),
                        expected,
                    });
                }
                return Ok(out.into_iter().map(|z| modulus.reduce(z)).collect());
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::WeierstrassContext;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_same_mod_lattice(m: &Modulus, found: &[C64], expected: &[C64], tol: f64) {
        assert_eq!(found.len(), expected.len());
        let mut used = vec![false; found.len()];
        for e in expected {
            let (i, d) = found
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, f)| (i, m.distance_mod_lattice(*f, *e)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "zero {e} missed by {d}");
            used[i] = true;
        }
    }

    #[test]
    fn wp_prime_half_periods() {
        let ctx = WeierstrassContext::from_sigma(c(0.15, 1.05)).unwrap();
        let h = |z: C64| {
            let v = ctx.wp_all(z, 2).unwrap();
            (v[1], v[2])
        };
        let zeros = elliptic_zeros(&ctx.modulus, h, &[(c(0.0, 0.0), 3)]).unwrap();
        let s = ctx.sigma();
        assert_same_mod_lattice(&ctx.modulus, &zeros, &[c(0.5, 0.0), s / 2.0, (1.0 + s) / 2.0], 1e-9);
    }

    #[test]
    fn wp_minus_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ctx = WeierstrassContext::from_sigma(c(-0.2, 0.9)).unwrap();
        for _ in 0..5 {
            let p = ctx.modulus.from_coords(rng.gen_range(0.1..0.4), rng.gen_range(0.1..0.4));
            let target = ctx.wp(p, 0).unwrap();
            let h = |z: C64| {
                let v = ctx.wp_all(z, 1).unwrap();
                (v[0] - target, v[1])
            };
            let zeros = elliptic_zeros(&ctx.modulus, h, &[(c(0.0, 0.0), 2)]).unwrap();
            assert_same_mod_lattice(&ctx.modulus, &zeros, &[p, -p], 1e-9);
        }
    }

    #[test]
    fn count_equals_pole_count_for_two_pole_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let ctx = WeierstrassContext::from_sigma(c(rng.gen_range(-0.4..0.4), rng.gen_range(0.6..1.5))).unwrap();
            let b1 = ctx.modulus.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let b2 = ctx.modulus.from_coords(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let r = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let a = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // a + r (zeta(z - b1) - zeta(z - b2))
            let h = |z: C64| {
                let v = a + r * (ctx.zeta(z - b1, 0).unwrap() - ctx.zeta(z - b2, 0).unwrap());
                let d = -r * (ctx.wp(z - b1, 0).unwrap() - ctx.wp(z - b2, 0).unwrap());
                (v, d)
            };
            let zeros = elliptic_zeros(&ctx.modulus, h, &[(b1, 1), (b2, 1)]).unwrap();
            assert_eq!(zeros.len(), 2);
            for z in zeros {
                assert!(h(z).0.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn reports_zeros_in_the_fundamental_parallelogram() {
        let ctx = WeierstrassContext::from_sigma(c(0.3, 0.8)).unwrap();
        let h = |z: C64| {
            let v = ctx.wp_all(z, 2).unwrap();
            (v[1], v[2])
        };
        for z in elliptic_zeros(&ctx.modulus, h, &[(c(0.0, 0.0), 3)]).unwrap() {
            let (x, y) = ctx.modulus.real_coords(z);
            assert!((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y));
        }
    }
}
