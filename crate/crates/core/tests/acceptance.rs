//! Acceptance suite: ten criteria, one PASS/FAIL line each. Runs as a plain
//! binary so that the lines appear in order and uninterleaved.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hurwitz_core::caustic::{caustic_orders, collision_order0, CollisionPath1};
use hurwitz_core::checks::{gradients, ratio_drift, Analyzable};
use hurwitz_core::elliptic::{theta1, WeierstrassContext};
use hurwitz_core::isomon::{build_isomonodromy, euler_unit_checks, Deformable, FdOptions};
use hurwitz_core::random::{random_covering0, random_covering1, rng, GENUS0_PROFILES, GENUS1_PROFILES};
use hurwitz_core::tolerances::SLOPE_SLACK;
use hurwitz_core::{Covering0, Covering1, Pole, C64};

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn genus0_instances() -> Vec<Covering0> {
    let mut r = rng(2024);
    (0..50)
        .map(|i| random_covering0(&mut r, GENUS0_PROFILES[i % GENUS0_PROFILES.len()]).expect("genus-0 instance"))
        .collect()
}

fn genus1_instances() -> Vec<Covering1> {
    let mut r = rng(2025);
    (0..20)
        .map(|i| random_covering1(&mut r, GENUS1_PROFILES[i % GENUS1_PROFILES.len()]).expect("genus-1 instance"))
        .collect()
}

fn fd() -> FdOptions {
    FdOptions::default()
}

fn worst<T>(items: &[T], f: impl Fn(&T) -> Result<f64, String>) -> Result<f64, String> {
    items.iter().map(f).try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn hamiltonian_discrepancy<C: Analyzable>(cov: &C) -> Result<f64, String> {
    let alpha = cov.critical_points().map_err(err)?;
    let data = build_isomonodromy(&cov.point(&alpha).map_err(err)?).map_err(err)?;
    Ok(data.discrepancy())
}

fn criterion1(g0: &[Covering0], g1: &[Covering1]) -> Outcome {
    let e0 = worst(g0, hamiltonian_discrepancy)?;
    let e1 = worst(g1, hamiltonian_discrepancy)?;
    Ok((e0 < 1e-8 && e1 < 1e-6, format!("genus 0 {e0:.2e} (< 1e-8), genus 1 {e1:.2e} (< 1e-6)")))
}

fn tau_system_error<C: Analyzable>(cov: &C) -> Result<f64, String> {
    let alpha = cov.critical_points().map_err(err)?;
    let point = cov.point(&alpha).map_err(err)?;
    let data = build_isomonodromy(&point).map_err(err)?;
    let g = gradients(cov, &point, fd()).map_err(err)?;
    let scale = data.h.iter().map(|h| h.norm()).fold(0.0, f64::max);
    Ok(g
        .log_tau48
        .iter()
        .zip(&data.h)
        .map(|(d, h)| (-d / 48.0 - h).norm())
        .fold(0.0, f64::max)
        / scale)
}

fn criterion2(g0: &[Covering0], g1: &[Covering1]) -> Outcome {
    let e0 = worst(g0, tau_system_error)?;
    let e1 = worst(g1, tau_system_error)?;
    Ok((e0.max(e1) < 1e-5, format!("genus 0 {e0:.2e}, genus 1 {e1:.2e} (< 1e-5)")))
}

fn criterion3() -> Outcome {
    let cov = Covering0::polynomial(vec![c(0.0, 0.0), c(-3.0, 0.0)]).map_err(err)?;
    let cd = cov.critical_data().map_err(err)?;
    let alpha = cd.alpha.clone();
    let data = build_isomonodromy(&cov.point(&alpha).map_err(err)?).map_err(err)?;
    // order the critical points by critical value
    let mut idx: Vec<usize> = (0..2).collect();
    idx.sort_by(|&a, &b| cd.lambda[a].re.total_cmp(&cd.lambda[b].re));
    let lambda = [c(-2.0, 0.0), c(2.0, 0.0)];
    let sb = [c(1.0 / 12.0, 0.0), c(-1.0 / 12.0, 0.0)];
    let h = [c(1.0 / 288.0, 0.0), c(-1.0 / 288.0, 0.0)];
    let mut e = 0.0f64;
    for (j, &m) in idx.iter().enumerate() {
        e = e
            .max((cd.lambda[m] - lambda[j]).norm())
            .max((cd.sb[m] - sb[j]).norm() * 12.0)
            .max((data.h[m] - h[j]).norm() * 288.0)
            .max((data.h_sb[m] - h[j]).norm() * 288.0);
    }
    Ok((
        e < 1e-10,
        format!("lambda = {{-2, 2}}, S_B = {{1/12, -1/12}}, H = {{1/288, -1/288}} by both routes, max error {e:.2e}"),
    ))
}

fn rauch_error<C: Analyzable>(cov: &C) -> Result<f64, String> {
    let alpha = cov.critical_points().map_err(err)?;
    let point = cov.point(&alpha).map_err(err)?;
    let g = gradients(cov, &point, fd()).map_err(err)?;
    let m = point.dim();
    let mut e = 0.0f64;
    for k in 0..m {
        for n in (0..m).filter(|&n| n != k) {
            let expect = point.fsq[k] * point.kernel[(k, n)];
            e = e.max((g.log_fsq[k][n] - expect).norm() / expect.norm());
        }
        for (s, &ks) in point.orders.iter().enumerate() {
            let expect = point.fsq[k] * point.kernel_inf[(k, s)] * (ks as f64 / 2.0);
            e = e.max((g.log_h_pow[k][s] - expect).norm() / expect.norm());
        }
    }
    Ok(e)
}

fn criterion4(g0: &[Covering0], g1: &[Covering1]) -> Outcome {
    let e0 = worst(g0, rauch_error)?;
    let e1 = worst(g1, rauch_error)?;
    Ok((e0.max(e1) < 1e-5, format!("genus 0 {e0:.2e}, genus 1 {e1:.2e} (< 1e-5)")))
}

fn criterion5(g1: &[Covering1]) -> Outcome {
    let e = worst(g1, |cov| {
        let alpha = cov.critical_points().map_err(err)?;
        let point = cov.point(&alpha).map_err(err)?;
        let g = gradients(cov, &point, fd()).map_err(err)?;
        Ok(g.sigma
            .iter()
            .zip(&point.fsq)
            .map(|(ds, f)| {
                let expect = C64::i() * PI * f;
                (ds - expect).norm() / expect.norm()
            })
            .fold(0.0, f64::max))
    })?;
    Ok((e < 1e-5, format!("20 instances, max relative error {e:.2e} (< 1e-5)")))
}

/// Route ratio (and resultant ratio, genus zero) along a 20-step straight
/// path in parameter space, critical points continued step by step.
fn sweep_drift<C: Analyzable>(cov: &C, seed: u64) -> Result<(f64, f64), String> {
    let mut r = rng(seed);
    let p0 = cov.params();
    let dir: Vec<C64> = p0
        .iter()
        .map(|x| {
            use rand::Rng;
            c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * 0.05 * x.norm().max(1.0)
        })
        .collect();
    let mut alpha = cov.critical_points().map_err(err)?;
    let mut route = Vec::new();
    let mut resultant = Vec::new();
    for step in 0..=20 {
        let t = step as f64 / 20.0;
        let p: Vec<C64> = p0.iter().zip(&dir).map(|(x, d)| x + d * t).collect();
        let cv = cov.with_params(&p).map_err(err)?;
        alpha = cv.track_critical_points(&alpha).map_err(err)?;
        route.push(cv.route_b(&alpha).map_err(err)? / cv.route_a(&alpha).map_err(err)?);
        if let Some(l) = cv.resultant_ratio() {
            resultant.push(l);
        }
    }
    Ok((ratio_drift(&route), if resultant.is_empty() { 0.0 } else { ratio_drift(&resultant) }))
}

fn criterion6(g0: &[Covering0], g1: &[Covering1]) -> Outcome {
    let mut route0 = 0.0f64;
    let mut resultant = 0.0f64;
    for (i, cov) in g0.iter().step_by(5).enumerate() {
        let (r, l) = sweep_drift(cov, 100 + i as u64)?;
        route0 = route0.max(r);
        resultant = resultant.max(l);
    }
    let mut route1 = 0.0f64;
    for (i, cov) in g1.iter().step_by(2).enumerate() {
        route1 = route1.max(sweep_drift(cov, 200 + i as u64)?.0);
    }
    Ok((
        route0.max(route1) < 1e-7 && resultant < 1e-8,
        format!("route drift genus 0 {route0:.2e}, genus 1 {route1:.2e} (< 1e-7); resultant ratio drift {resultant:.2e} (< 1e-8)"),
    ))
}

fn euler_g_error<C: Analyzable>(cov: &C) -> Result<f64, String> {
    let alpha = cov.critical_points().map_err(err)?;
    let data = build_isomonodromy(&cov.point(&alpha).map_err(err)?).map_err(err)?;
    let report = euler_unit_checks(
        cov,
        &alpha,
        &data,
        |c: &C, _a: &[C64]| Ok(c.g_parts()),
        &cov.g_weights(),
        cov.gamma(),
        fd(),
    )
    .map_err(err)?;
    Ok(report.anomaly_error())
}

fn criterion7(g0: &[Covering0], g1: &[Covering1]) -> Outcome {
    let mut poly = 0.0f64;
    for n in 3..=5 {
        let coeffs: Vec<C64> = (0..n - 1).map(|r| c(0.3 - 0.4 * r as f64, 0.2 + 0.15 * r as f64)).collect();
        let cov = Covering0::polynomial(coeffs).map_err(err)?;
        let g = cov.g_function(&cov.critical_data().map_err(err)?);
        poly = poly.max(g.g.norm()).max(g.gamma.abs());
    }
    let e0 = worst(g0, euler_g_error)?;
    let e1 = worst(g1, euler_g_error)?;
    Ok((
        poly < 1e-14 && e0.max(e1) < 1e-5,
        format!("polynomial N = 3..5: |G|, |gamma| = {poly:.1e}; E(G) - gamma: genus 0 {e0:.2e}, genus 1 {e1:.2e} (< 1e-5)"),
    ))
}

fn h12(sigma: C64, c2: C64) -> Result<C64, String> {
    let cov = Covering1::new(sigma, c(0.0, 0.0), vec![Pole::new(c(0.23, 0.31), vec![c(0.0, 0.0), c2])]).map_err(err)?;
    let cd = cov.critical_data().map_err(err)?;
    let tau = cov.tau_product(&cd).tau_m48;
    let t1_12 = cov.flat_coords().t_pow[0].powi(6);
    let eta72 = (72.0 * cov.modulus().log_eta()).exp();
    Ok(tau / (t1_12 * eta72))
}

fn criterion8() -> Outcome {
    let sigma0 = c(0.0, 1.1);
    let c0 = c(1.0, 0.0);
    let by_c = (0..=20)
        .map(|j| h12(sigma0, c0 * C64::from_polar(1.0 + 0.05 * j as f64, 0.1 * j as f64)))
        .collect::<Result<Vec<_>, _>>()?;
    let by_sigma = (0..=20)
        .map(|j| h12(sigma0 + c(0.02 * j as f64, 0.015 * j as f64), c0))
        .collect::<Result<Vec<_>, _>>()?;
    let (dc, ds) = (ratio_drift(&by_c), ratio_drift(&by_sigma));
    let cross = (by_c[0] / by_sigma[0] - 1.0).norm();
    Ok((
        dc.max(ds).max(cross) < 1e-6,
        format!("tau^-48 / (t1^12 eta^72) drift over c {dc:.2e}, over sigma {ds:.2e} (< 1e-6)"),
    ))
}

fn criterion9() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut r = rng(77);
    for profile in [&[2usize, 1][..], &[2, 2], &[2, 1, 1], &[3, 2]] {
        let cov = random_covering0(&mut r, profile).map_err(err)?;
        let rep = caustic_orders(&cov).map_err(err)?;
        ok &= rep.bounds_hold(SLOPE_SLACK);
        let t: Vec<String> = rep.t_rays.iter().map(|t| format!("k={}:{:.2}", t.k, t.fit.order)).collect();
        let b: Vec<String> = rep.b_rays.iter().map(|b| format!("{:.2}>={}", b.fit.order, b.bound)).collect();
        lines.push(format!("{profile:?} t[{}] b[{}]", t.join(" "), b.join(" ")));
    }
    let coll = collision_order0(c(0.4, 0.3), c(-1.0, 0.5), c(0.2, 0.0)).map_err(err)?;
    ok &= coll.order >= 1.0 - SLOPE_SLACK;
    let path = CollisionPath1::new(c(0.1, 1.05), c(0.2, 0.3), c(0.7, 0.6), c(1.0, 0.0), c(0.5, 0.1)).map_err(err)?;
    let kappa = path.kappa_order(c(1.0, 0.0)).map_err(err)?;
    ok &= kappa.order >= 1.0 - SLOPE_SLACK;
    Ok((
        ok,
        format!(
            "R(f,f') collision order {:.2}, kappa collision order {:.2}; rays {}",
            coll.order,
            kappa.order,
            lines.join("; ")
        ),
    ))
}

fn criterion10() -> Outcome {
    let mut worst_by = [0.0f64; 6];
    for i in 0..20 {
        let sigma = c(-0.5 + 0.05 * i as f64, 0.3 + 2.7 * i as f64 / 19.0);
        let ctx = WeierstrassContext::from_sigma(sigma).map_err(err)?;
        let z = ctx.modulus.from_coords(0.21 + 0.02 * i as f64, 0.37);
        // Legendre relation from zeta increments
        let z0 = ctx.zeta(z, 0).map_err(err)?;
        let eta1 = ctx.zeta(z + 1.0, 0).map_err(err)? - z0;
        let eta2 = ctx.zeta(z + sigma, 0).map_err(err)? - z0;
        worst_by[0] = worst_by[0].max((eta1 * sigma - eta2 - C64::i() * 2.0 * PI).norm());
        // Weierstrass cubic
        let v = ctx.wp_all(z, 1).map_err(err)?;
        let cubic = v[1] * v[1] - (4.0 * v[0].powi(3) - ctx.g2 * v[0] - ctx.g3);
        worst_by[1] = worst_by[1].max(cubic.norm() / v[0].norm().powi(3).max(1.0));
        // theta ratio against the E2 series
        let m = ctx.modulus;
        let ratio = theta1(&m, c(0.0, 0.0), 3) / theta1(&m, c(0.0, 0.0), 1);
        let e2 = 12.0 * PI * C64::i() * m.eta_tilde_e2();
        worst_by[2] = worst_by[2].max((ratio - e2).norm() / e2.norm());
        worst_by[3] = worst_by[3].max((ctx.eta_tilde - m.eta_tilde_e2()).norm() / m.eta_tilde_e2().norm());
        // sigma quasi-periodicity with the Legendre data
        let rhs = -ctx.sigma_w(z) * (eta1 * (z + 0.5)).exp();
        worst_by[4] = worst_by[4].max((ctx.sigma_w(z + 1.0) - rhs).norm() / rhs.norm());
    }
    // Laurent calibrations, literally, where the O(z^2) terms are small
    for sigma in [c(0.0, 1.0), c(0.3, 1.1), c(-0.4, 1.7)] {
        let ctx = WeierstrassContext::from_sigma(sigma).map_err(err)?;
        let z = c(1e-3, 0.0);
        let e = (ctx.wp(z, 0).map_err(err)? - z.powi(-2))
            .norm()
            .max((ctx.zeta(z, 0).map_err(err)? - z.inv()).norm())
            .max((ctx.sigma_w(z) / z - 1.0).norm() * 10.0);
        worst_by[5] = worst_by[5].max(e);
    }
    let tol = [1e-10, 1e-9, 1e-10, 1e-10, 1e-9, 1e-4];
    let ok = worst_by.iter().zip(&tol).all(|(e, t)| e < t);
    Ok((
        ok,
        format!(
            "Legendre {:.1e}, cubic {:.1e}, theta ratio {:.1e}, eta~ two series {:.1e}, sigma quasi-period {:.1e}, Laurent {:.1e} over 20 moduli",
            worst_by[0], worst_by[1], worst_by[2], worst_by[3], worst_by[4], worst_by[5]
        ),
    ))
}

fn main() -> ExitCode {
    let g0 = genus0_instances();
    let g1 = genus1_instances();
    let mut failed = 0;
    let criteria: Vec<Criterion> = vec![
        ("two-route Hamiltonians", Box::new(|| criterion1(&g0, &g1))),
        ("tau differential system", Box::new(|| criterion2(&g0, &g1))),
        ("A2 anchor", Box::new(criterion3)),
        ("Rauch consequences", Box::new(|| criterion4(&g0, &g1))),
        ("genus-1 modulus flow", Box::new(|| criterion5(&g1))),
        ("closed-form constancy", Box::new(|| criterion6(&g0, &g1))),
        ("G-function and anomaly", Box::new(|| criterion7(&g0, &g1))),
        ("H_{1,2}(2) example", Box::new(criterion8)),
        ("caustic vanishing orders", Box::new(criterion9)),
        ("special-function substrate", Box::new(criterion10)),
    ];
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1} s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        println!("acceptance: 10/10 passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
