//! Fourteen acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use herglotz::harness::{run_suite, sample_density, RatioReport, RunConfig, SuiteId};
use herglotz::kernel::{direction_sample, verify_silla, verify_silla_at, KernelQuadratureSpec};
use herglotz::multipliers::{a_t_seq, cap_average_eigenvalue};
use herglotz::norms::{bessel_avg, bessel_band_integral, bessel_i3, lema_ratio};
use herglotz::sphere::{HarmonicSpectrum, SphereQuadrature};
use herglotz::wavefield::{direct_quadrature_degree, eval_direct, extend, helmholtz_residual};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {:.1} s, limit {} s", t.as_secs_f64(), limit.as_secs()))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-radius..radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= radius * radius {
            return x;
        }
    }
}

fn suite_passes(config: &RunConfig, suite: SuiteId, prefix: &str) -> Check {
    let reports = run_suite(config, suite).map_err(|e| e.to_string())?;
    let mine: Vec<&RatioReport> = reports.iter().filter(|r| r.suite.starts_with(prefix)).collect();
    ensure(!mine.is_empty(), || format!("no `{prefix}` reports"))?;
    let failed: Vec<String> = mine
        .iter()
        .filter(|r| !r.verdict.passed())
        .map(|r| format!("{} {:?}: min {:.3e} max {:.3e} bound {:?} {:?}", r.suite, r.parameters, r.min, r.max, r.bound, r.notes))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    let worst = mine.iter().filter(|r| r.suite == prefix).map(|r| r.spread()).fold(1.0, f64::max);
    Ok(format!("{} reports, worst max/min {worst:.3}", mine.len()))
}

fn extension_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for d in [2usize, 3] {
        let phi = sample_density(d, 8, 1.0, 11);
        let u = extend(&phi);
        let q = SphereQuadrature::new(d, direct_quadrature_degree(8, 10.0)).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let x = random_point(&mut rng, d, 10.0);
            let a = u.eval_point(&x).map_err(|e| e.to_string())?;
            let b = eval_direct(&phi, &x, &q).map_err(|e| e.to_string())?;
            worst = worst.max((a - b).norm());
        }
    }
    ensure(worst <= 1e-8, || format!("max |spectral - direct| = {worst:.3e}"))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("max abs deviation {worst:.2e}"))
}

fn constant_anchor() -> Check {
    let phi = HarmonicSpectrum::single_mode(3, 0, 0, 1, Complex64::new(1.0, 0.0)).map_err(|e| e.to_string())?;
    let u = extend(&phi);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = random_point(&mut rng, 3, 20.0);
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let want = (4.0 * PI).sqrt() * r.sin() / r;
        worst = worst.max((u.eval_point(&x).map_err(|e| e.to_string())? - want).norm());
    }
    ensure(worst <= 1e-8, || format!("deviation {worst:.3e}"))?;
    Ok(format!("max deviation {worst:.2e}"))
}

fn kernel_path() -> Check {
    let start = Instant::now();
    let spec = KernelQuadratureSpec::for_degree(8);
    let coarse = KernelQuadratureSpec::new(16, 10, 3, 3, 0.4).map_err(|e| e.to_string())?;
    let dirs = direction_sample(3, 4).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let mut slowest = f64::INFINITY;
    for seed in [3u64, 4] {
        let f = sample_density(3, 8, 1.0, seed);
        for alpha in [0.5, 1.0, 2.0] {
            let chk = verify_silla(&f, alpha, &spec).map_err(|e| e.to_string())?;
            worst = worst.max(chk.kernel_deviation).max(chk.poisson_deviation);
            let a = verify_silla_at(&f, alpha, &coarse, &dirs, false).map_err(|e| e.to_string())?.kernel_deviation;
            let b = verify_silla_at(&f, alpha, &coarse.refined(), &dirs, false).map_err(|e| e.to_string())?.kernel_deviation;
            slowest = slowest.min(a / b);
        }
    }
    ensure(worst <= 1e-4, || format!("max deviation {worst:.3e}"))?;
    ensure(slowest >= 16.0, || format!("refinement reduced deviation only {slowest:.1}x"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("max deviation {worst:.2e}, refinement gain >= {slowest:.0}x"))
}

fn multiplier_anchors() -> Check {
    let e = |x: herglotz::Error| x.to_string();
    let mut t = 1e-3;
    while t <= PI {
        for d in [2usize, 3, 4] {
            ensure((cap_average_eigenvalue(d, 0, t).map_err(e)? - 1.0).abs() <= 1e-10, || format!("m_0 at d={d} t={t}"))?;
            for (ell, v) in a_t_seq(d, t).map_err(e)?.real_values(32).into_iter().enumerate() {
                ensure(v.abs() <= 1.0 + 1e-10, || format!("|m_{ell}| = {v} at d={d} t={t}"))?;
            }
        }
        let m1 = cap_average_eigenvalue(3, 1, t).map_err(e)?;
        ensure((m1 - 0.5 * (1.0 + t.cos())).abs() <= 1e-9, || format!("m_1 closed form at t={t}: {m1}"))?;
        t *= 1.25;
    }
    for d in [2usize, 3, 4] {
        for ell in 1..=32 {
            let v = cap_average_eigenvalue(d, ell, PI).map_err(e)?;
            ensure(v.abs() <= 1e-8, || format!("m_{ell} at t = pi, d={d}: {v:.3e}"))?;
        }
    }
    Ok("m_0 = 1, m_l(pi) = 0, d = 3 closed form, |m| <= 1".into())
}

fn bessel_averages() -> Check {
    let e = |x: herglotz::Error| x.to_string();
    let mut worst = 0.0f64;
    for mu in [0.5, 1.0, 5.5, 20.0] {
        worst = worst.max((PI * bessel_avg(mu, 0.0, 2000.0).map_err(e)? - 1.0).abs());
    }
    ensure(worst <= 0.02, || format!("|pi avg - 1| = {worst:.3e}"))?;
    // J_{1/2}^2 r = (2/pi) sin^2 r.
    let mut closed = 0.0f64;
    for r in [0.7f64, 3.0, 25.0, 400.0] {
        let want = (r - (2.0 * r).sin() / 2.0) / (PI * r);
        closed = closed.max((bessel_avg(0.5, 0.0, r).map_err(e)? - want).abs());
    }
    ensure(closed <= 1e-8, || format!("mu = 1/2 closed form off by {closed:.3e}"))?;
    Ok(format!("max |pi avg - 1| = {worst:.2e}, closed form {closed:.1e}"))
}

fn two_sided_ratio() -> Check {
    let start = Instant::now();
    let mus = [0.5, 1.0, 2.0, 3.5, 5.0, 8.0, 12.0, 20.0, 30.0];
    let mut all = Vec::new();
    let mut per_s = 0.0f64;
    for s in [0.0, 0.5, 1.0, 2.0] {
        let r: Vec<f64> = mus.iter().map(|&mu| lema_ratio(mu, s)).collect::<herglotz::Result<_>>().map_err(|e| e.to_string())?;
        ensure(r.iter().all(|v| v.is_finite() && *v > 0.0), || format!("non-positive ratio at s={s}: {r:?}"))?;
        let (lo, hi) = r.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        per_s = per_s.max(hi / lo);
        all.extend(r);
    }
    let (lo, hi) = all.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    ensure(per_s <= 25.0, || format!("per-s spread {per_s:.2}"))?;
    ensure(hi / lo <= 50.0, || format!("overall spread {:.2}", hi / lo))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("overall spread {:.3}, per-s {per_s:.3}", hi / lo))
}

fn band_and_floor() -> Check {
    let e = |x: herglotz::Error| x.to_string();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for a in [1.0, 2.0, 4.0] {
        for mu in 1..=40 {
            let v = bessel_band_integral(mu as f64, a).map_err(e)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    ensure(lo >= 0.1 && hi <= 10.0, || format!("band integrals in [{lo:.3}, {hi:.3}]"))?;
    let floor = RunConfig::default().tolerances.i3_floor;
    let mut min = f64::INFINITY;
    for k in 1..=100 {
        let mu = 0.5 * k as f64;
        min = min.min((1.0 + mu).powi(2) * bessel_i3(mu).map_err(e)?);
    }
    ensure(min >= floor, || format!("(1+mu)^2 I3 min {min:.4} below floor {floor}"))?;
    Ok(format!("band in [{lo:.3}, {hi:.3}], I3 floor {min:.4} >= {floor}"))
}

fn config(suite: SuiteId, dims: &[usize], alphas: &[f64]) -> RunConfig {
    RunConfig { dims: dims.to_vec(), alphas: Some(alphas.to_vec()), suites: vec![suite], ..RunConfig::default() }
}

fn weighted_norm() -> Check {
    let c = config(SuiteId::TheoremL, &[2, 3], &[-1.0, -0.5, 0.5, 1.0, 1.5]);
    suite_passes(&c, SuiteId::TheoremL, "theorem_l")
}

fn square_function() -> Check {
    let c = config(SuiteId::TheoremS, &[3], &[0.5, 1.0, 1.5]);
    suite_passes(&c, SuiteId::TheoremS, "theorem_s")
}

fn square_function_companions() -> Check {
    let c = config(SuiteId::TheoremSGeneral, &[2, 3], &[2.0, 2.5, 3.0]);
    suite_passes(&c, SuiteId::TheoremSGeneral, "theorem_s_general")
}

fn singular_kernel() -> Check {
    let c = config(SuiteId::TheoremK, &[2, 3], &[0.5, 1.0]);
    suite_passes(&c, SuiteId::TheoremK, "theorem_k")
}

fn growth_and_divergence() -> Check {
    let c = config(SuiteId::PropGrowth, &[2, 3], &[0.5, 1.0]);
    suite_passes(&c, SuiteId::PropGrowth, "prop_growth")
}

fn recovery() -> Check {
    let c = config(SuiteId::PropRecovery, &[2, 3], &[0.0, 0.5, 1.0]);
    suite_passes(&c, SuiteId::PropRecovery, "prop_recovery")
}

fn helmholtz_order() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in [2usize, 3] {
        for seed in 0..5u64 {
            let u = extend(&sample_density(d, 8, 1.0, 100 + seed));
            for _ in 0..10 {
                let x = random_point(&mut rng, d, 5.0);
                let r1 = helmholtz_residual(&u, &x, 0.02).map_err(|e| e.to_string())?;
                let r2 = helmholtz_residual(&u, &x, 0.01).map_err(|e| e.to_string())?;
                let q = r1 / r2;
                lo = lo.min(q);
                hi = hi.max(q);
            }
        }
    }
    ensure(lo >= 3.5 && hi <= 4.5, || format!("halving ratios in [{lo:.3}, {hi:.3}]"))?;
    Ok(format!("halving ratios in [{lo:.3}, {hi:.3}]"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 14] = [
        ("extension: spectral vs direct quadrature", extension_oracle),
        ("extension: constant density anchor", constant_anchor),
        ("kernel path vs multiplier path", kernel_path),
        ("cap-average multiplier anchors", multiplier_anchors),
        ("Bessel averages", bessel_averages),
        ("two-sided radial ratio", two_sided_ratio),
        ("band integrals and I3 floor", band_and_floor),
        ("weighted norm equivalence", weighted_norm),
        ("square function equivalence", square_function),
        ("square function with companions", square_function_companions),
        ("singular kernel equivalence", singular_kernel),
        ("weighted growth and divergence", growth_and_divergence),
        ("coefficient recovery", recovery),
        ("Helmholtz residual order", helmholtz_order),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({detail}; {secs:.1} s)", i + 1),
            Err(why) => {
                println!("FAIL {:>2} {name} ({why}; {secs:.1} s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
