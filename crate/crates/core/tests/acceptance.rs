//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hus_core::cli;
use hus_core::harness::{
    certify, instability_witness, lower_bound_witness, standard_specs, symmetric_grid,
    CertificationSummary,
};
use hus_core::linalg::{classify, expm_closed, expm_series_oracle, Vec2, DEFAULT_TOL};
use hus_core::second_order::{
    direct_repeated_constant, repeated_root_threshold, repeated_root_threshold_closed_form,
    second_order_report, Roots, SecondOrderProblem, Substitution,
};
use hus_core::stability::{analyze, lower_bound, zero_band};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    eigenvalues, m, sample_imaginary, sample_stable, sample_zero_eigenvalue, STABLE_CLASSES,
};

const TOL: f64 = DEFAULT_TOL;

type Outcome = Result<String, String>;

type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!(
            "runtime {:.3}s exceeds {:.0}s",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        )
    })
}

fn random_dir<R: Rng>(rng: &mut R) -> Vec2 {
    let x = rng.gen_range(-1.0..1.0);
    if rng.gen_bool(0.5) {
        Vec2::new(1.0, x)
    } else {
        Vec2::new(x, -1.0)
    }
}

fn golden_constants() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("2 1 1 2", 1.0),
        ("0 1 -2 3", 2.0),
        ("3 1 -2 0", 2.5),
        ("2 -1 3 -2", 5.0),
    ];
    let mut worst = 0.0f64;
    for (matrix, want) in cases {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(["hus", "analyze", "--matrix", matrix], &mut out, &mut err);
        ensure(code == cli::EXIT_OK, || format!("{matrix}: exit {code}"))?;
        let v: serde_json::Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let k = v["k"].as_f64().ok_or("missing k")?;
        let lb = v["lower_bound"].as_f64().ok_or("missing lower_bound")?;
        worst = worst.max((k - want).abs()).max((lb - want).abs());
        ensure((k - want).abs() <= 1e-12, || {
            format!("{matrix}: K = {k}, want {want}")
        })?;
        ensure((lb - want).abs() <= 1e-12, || {
            format!("{matrix}: lower bound {lb}")
        })?;
        ensure(v["best"] == true, || {
            format!("{matrix}: best = {}", v["best"])
        })?;
    }
    within_time(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "4/4 matrices, max |err| {worst:.1e}, {:.0?}",
        start.elapsed()
    ))
}

fn stability_characterization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    let mut excluded = 0;
    for i in 0..1000 {
        let a = match i % 5 {
            0 => sample_stable(&mut rng, STABLE_CLASSES[(i / 5) % 5]),
            1 => sample_zero_eigenvalue(&mut rng),
            2 => sample_imaginary(&mut rng),
            3 => m(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ),
            // Real part placed across the zero band.
            _ => {
                let delta = 10f64.powf(rng.gen_range(-16.0..-4.0))
                    * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                common::with_distinct(
                    delta,
                    rng.gen_range(0.5..2.0),
                    rng.gen_range(-0.5..0.5),
                    0.0,
                )
            }
        };
        let band = zero_band(&a, TOL);
        let min_re = eigenvalues(&a)
            .iter()
            .map(|z| z.re.abs())
            .fold(f64::INFINITY, f64::min);
        if min_re > 1e-2 * band && min_re < 1e2 * band {
            excluded += 1;
            continue;
        }
        checked += 1;
        let want = min_re > band;
        let got = analyze(&a, TOL).map_err(|e| e.to_string())?.stable;
        ensure(got == want, || {
            format!("{a:?}: stable = {got}, min |Re| = {min_re:e}")
        })?;
    }
    within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "{checked}/{checked} agree, {excluded} inside band excluded, {:.0?}",
        start.elapsed()
    ))
}

fn exponential_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut entry_err = 0.0f64;
    let mut entry_rel = 0.0f64;
    let mut identity_err = 0.0f64;
    for _ in 0..500 {
        // Entries in [−1, 1] keep ‖M‖∞ ≤ 2.
        let a = m(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let t = rng.gen_range(-5.0..5.0);
        let closed = expm_closed(&a, t);
        let series = expm_series_oracle(&a, t);
        entry_err = entry_err.max(closed.max_abs_diff(&series));
        entry_rel = entry_rel.max(closed.max_abs_diff(&series) / series.max_abs().max(1.0));

        let (s, u) = (0.5 * t, rng.gen_range(-2.5..2.5));
        let lhs = expm_closed(&a, s + u);
        let rhs = expm_closed(&a, s) * expm_closed(&a, u);
        identity_err = identity_err.max(lhs.max_abs_diff(&rhs) / lhs.max_abs().max(1.0));
        let det_want = (t * a.trace()).exp();
        identity_err = identity_err.max((closed.det() - det_want).abs() / det_want.max(1.0));
    }
    ensure(entry_err < 1e-9, || {
        format!("entrywise error {entry_err:e}")
    })?;
    ensure(identity_err < 1e-8, || {
        format!("identity error {identity_err:e}")
    })?;
    within_time(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "500 samples, entrywise abs {entry_err:.1e} rel {entry_rel:.1e}, identities {identity_err:.1e}, {:.0?}",
        start.elapsed()
    ))
}

fn lower_bound_witness_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_sd, mut worst_dev, mut worst_res) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..100 {
        let a = sample_stable(&mut rng, STABLE_CLASSES[i % 5]);
        let eps = rng.gen_range(0.1..3.0);
        let lb = lower_bound(&a).map_err(|e| e.to_string())?;
        let w = lower_bound_witness(&a, lb.maximizer, eps, TOL).map_err(|e| e.to_string())?;
        let want = eps * lb.bound;
        let rho = classify(&a, TOL).spectral_abscissa();
        let grid = symmetric_grid(3.0 / rho, 0.01).map_err(|e| e.to_string())?;
        let devs: Vec<f64> = grid.iter().map(|&t| w.deviation(t).inf_norm()).collect();
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        let sd = (devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / devs.len() as f64).sqrt();
        worst_sd = worst_sd.max(sd);
        worst_dev = devs
            .iter()
            .fold(worst_dev, |acc, d| acc.max((d - want).abs()));
        worst_res = grid.iter().fold(worst_res, |acc, &t| {
            acc.max((w.residual(t).inf_norm() - eps).abs())
        });
    }
    ensure(worst_sd < 1e-10, || format!("stddev {worst_sd:e}"))?;
    ensure(worst_dev < 1e-10, || {
        format!("deviation error {worst_dev:e}")
    })?;
    ensure(worst_res < 1e-10, || {
        format!("residual error {worst_res:e}")
    })?;
    Ok(format!(
        "100 matrices, stddev {worst_sd:.1e}, |dev − ε‖A⁻¹e‖| {worst_dev:.1e}, |res − ε| {worst_res:.1e}"
    ))
}

fn certification_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut runs = 0;
    let mut max_ratio_over_k = 0.0f64;
    let mut max_spread = 0.0f64;
    for i in 0..200 {
        let a = sample_stable(&mut rng, STABLE_CLASSES[i % 5]);
        let report = analyze(&a, TOL).map_err(|e| e.to_string())?;
        let k = report.k_reported.ok_or("no K for a stable matrix")?;
        let dir = random_dir(&mut rng);
        let omega = rng.gen_range(0.2..3.0);
        let period = rng.gen_range(0.2..2.0);
        let summaries: Vec<CertificationSummary> = [1e-3, 1.0, 10.0]
            .iter()
            .map(|&eps| {
                certify(
                    &a,
                    &standard_specs(eps, dir, omega, period),
                    &report,
                    50.0,
                    0.01,
                    TOL,
                )
                .map_err(|e| format!("{a:?}: {e}"))
            })
            .collect::<Result<_, _>>()?;
        for s in &summaries {
            for r in &s.runs {
                runs += 1;
                ensure(r.pass, || {
                    format!(
                        "{a:?} {} ε={}: {} > {}",
                        r.spec.name(),
                        r.spec.epsilon,
                        r.sup_deviation,
                        r.threshold
                    )
                })?;
                max_ratio_over_k = max_ratio_over_k.max(r.ratio / k);
            }
        }
        for f in 0..3 {
            let base = summaries[0].runs[f].ratio;
            for s in &summaries[1..] {
                max_spread = max_spread.max((s.runs[f].ratio - base).abs() / base);
            }
        }
    }
    ensure(max_spread <= 1e-6, || {
        format!("ratio spread across ε {max_spread:e}")
    })?;
    within_time(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{runs} runs pass, max ratio/K {max_ratio_over_k:.6}, ε-spread {max_spread:.1e}, {:.1?}",
        start.elapsed()
    ))
}

fn best_constant_attainment() -> Outcome {
    let mut mats = vec![
        m(2.0, 1.0, 1.0, 2.0),
        m(1.0, 1.0, 0.0, 1.0),
        m(-1.0, 1.0, 0.0, -1.0),
        m(2.0, -3.0, 0.0, 2.0),
        m(0.5, 0.25, 0.0, 0.5),
        m(0.0, 1.0, -2.0, 3.0),
        m(3.0, 1.0, -2.0, 0.0),
        m(2.0, -1.0, 3.0, -2.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // Random matrices flagged best-attained by the analysis join the set.
    for attempt in 0..2000 {
        let a = sample_stable(&mut rng, STABLE_CLASSES[attempt % 5]);
        if analyze(&a, TOL).map_err(|e| e.to_string())?.best_attained {
            mats.push(a);
        }
    }
    let eps = 0.7;
    let mut worst = 0.0f64;
    for a in &mats {
        let report = analyze(a, TOL).map_err(|e| e.to_string())?;
        ensure(report.best_attained, || format!("{a:?}: best not attained"))?;
        let k = report.k_reported.ok_or("no K")?;
        let lb = lower_bound(a).map_err(|e| e.to_string())?;
        let w = lower_bound_witness(a, lb.maximizer, eps, TOL).map_err(|e| e.to_string())?;
        let rho = classify(a, TOL).spectral_abscissa();
        for t in symmetric_grid(2.0 / rho, 0.05).map_err(|e| e.to_string())? {
            let err = (w.deviation(t).inf_norm() - k * eps).abs();
            worst = worst.max(err);
            ensure(err < 1e-10, || format!("{a:?} t={t}: |dev − Kε| = {err:e}"))?;
        }
    }
    Ok(format!(
        "{} matrices, max |dev − Kε| {worst:.1e}",
        mats.len()
    ))
}

fn repeated_root_threshold_criterion() -> Outcome {
    let l = repeated_root_threshold();
    ensure(l > 1.815 && l < 1.816, || format!("threshold {l}"))?;
    let closed = repeated_root_threshold_closed_form();
    ensure((l - closed).abs() < 1e-12, || {
        format!("bisection {l} vs closed form {closed}")
    })?;
    let e = std::f64::consts::E;
    let lower = (2.0 * l + 1.0) / (l * l);
    let upper = (l + 2.0 / e) / l;
    ensure((lower - upper).abs() < 1e-9, || {
        format!("branches {lower} vs {upper}")
    })?;
    let jump = (direct_repeated_constant(l - 1e-9) - direct_repeated_constant(l + 1e-9)).abs();
    ensure(jump < 1e-7, || format!("jump {jump:e}"))?;
    Ok(format!(
        "λ* = {l:.15}, |bisection − closed| {:.1e}, branch gap {:.1e}",
        (l - closed).abs(),
        (lower - upper).abs()
    ))
}

fn instability_divergence() -> Outcome {
    let eps = 1.0;
    let mut notes = Vec::new();
    for (name, a) in [
        ("rotation", m(0.0, 1.0, -1.0, 0.0)),
        ("kernel", m(0.0, 0.0, 1.0, 1.0)),
    ] {
        let ec = classify(&a, TOL);
        let w = instability_witness(&a, &ec, eps, TOL).map_err(|e| e.to_string())?;
        for t in [50.0, 100.0, 200.0] {
            let g1 = w.growth(t).map_err(|e| e.to_string())?;
            let g2 = w.growth(2.0 * t).map_err(|e| e.to_string())?;
            ensure(g2 >= 1.5 * g1, || {
                format!("{a:?} T={t}: g(2T)/g(T) = {}", g2 / g1)
            })?;
        }
        let g = w.growth(50.0).map_err(|e| e.to_string())?;
        notes.push(format!("{name} g(50) = {g:.3}"));
    }
    let rot = m(0.0, 1.0, -1.0, 0.0);
    let w = instability_witness(&rot, &classify(&rot, TOL), eps, TOL).map_err(|e| e.to_string())?;
    let t = 200.0 * std::f64::consts::PI;
    let slope = w.growth(t).map_err(|e| e.to_string())? / t;
    let want = eps / w.scale;
    let rel = (slope - want).abs() / want;
    ensure(rel < 0.01, || format!("g(T)/T = {slope}, ε/m = {want}"))?;
    Ok(format!(
        "g(2T) ≥ 1.5 g(T) for both, {}, rotation g/T off by {rel:.1e}",
        notes.join(", ")
    ))
}

fn second_order_cross_checks() -> Outcome {
    let real = |l1: f64, l2: f64, substitution| SecondOrderProblem {
        roots: Roots::Real {
            lambda1: l1,
            lambda2: l2,
        },
        substitution,
    };
    let threshold = repeated_root_threshold();
    let mut problems = Vec::new();
    for i in 0..50 {
        let x = 0.2 + 3.8 * i as f64 / 49.0;
        let around = threshold * (0.5 + i as f64 / 49.0);
        problems.push(real(x, x + 0.5, Substitution::Direct));
        problems.push(real(around, around, Substitution::Direct));
        problems.push(real(x, -0.7 * x - 0.1, Substitution::Direct));
        problems.push(real(x, x, Substitution::Triangular));
        problems.push(real(x + 0.4, x, Substitution::Triangular));
        problems.push(real(-x, -x - 0.4, Substitution::Triangular));
        problems.push(real(x, -x - 0.2, Substitution::Triangular));
        for alpha in [-1.0, -0.5, 0.5, 1.0] {
            problems.push(SecondOrderProblem {
                roots: Roots::Complex { alpha, beta: x },
                substitution: Substitution::Direct,
            });
        }
    }
    let mut worst = 0.0f64;
    for p in &problems {
        let r = second_order_report(p, TOL).map_err(|e| e.to_string())?;
        let cc = r
            .cross_check
            .ok_or_else(|| format!("{p:?}: no cross-check"))?;
        worst = worst.max(cc.abs_diff);
        ensure(cc.abs_diff < 1e-12, || format!("{p:?}: {cc:?}"))?;
    }
    Ok(format!(
        "{} root patterns, max |diff| {worst:.1e}",
        problems.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("golden constants", golden_constants),
        ("stability characterization", stability_characterization),
        ("exponential oracle", exponential_oracle),
        (
            "lower-bound witness exactness",
            lower_bound_witness_exactness,
        ),
        ("certification soundness", certification_soundness),
        ("best-constant attainment", best_constant_attainment),
        ("repeated-root threshold", repeated_root_threshold_criterion),
        ("instability divergence", instability_divergence),
        ("second-order cross-checks", second_order_cross_checks),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
