//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are the pinned acceptance values.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use randpolar_core::experiments::{santalo_expectation_experiment, ExperimentConfig, Mode};
use randpolar_core::geom::{unit_volume_ball_radius, CoefficientGauge};
use randpolar_core::measure::StepFn1d;
use randpolar_core::volume::{exact_polar_volume_crosspoly, mc_polar_measure};
use randpolar_core::{Body, PnDensity, RadialMeasure, RadialStepFn, RngStream};
use serde_json::Value;

use common::{run, SMALL_CONFIGS};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn ball_polar_closed_form() -> Outcome {
    let body = Body::ball(2, unit_volume_ball_radius(2)).unwrap();
    let start = Instant::now();
    let est = single_thread(|| {
        mc_polar_measure(&body, &RadialMeasure::lebesgue(2), 1_000_000, RngStream::from_seed(1)).unwrap()
    });
    let secs = start.elapsed().as_secs_f64();
    let truth = PI * PI;
    let ok = (est.value - truth).abs() <= 3.0 * est.stderr + 1e-12 * truth && secs < 10.0;
    outcome(ok, format!("estimate {} ± {} vs π² = {truth}, {secs:.2} s single-threaded", est.value, est.stderr))
}

fn exact_oracle_agreement() -> Outcome {
    let mut rng = RngStream::from_seed(2).named("configs").rng();
    let mut agree = 0;
    for case in 0..50u64 {
        let n = 2 + (case % 2) as usize;
        let big_n = rng.random_range(n..=6);
        let pts: Vec<Vec<f64>> =
            (0..big_n).map(|_| (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()).collect();
        let exact = exact_polar_volume_crosspoly(&pts, n).unwrap();
        let body = Body::cross_polytope(&pts).unwrap();
        let est =
            mc_polar_measure(&body, &RadialMeasure::lebesgue(n), 200_000, RngStream::from_seed(2).child(case)).unwrap();
        if (est.value - exact).abs() <= 3.0 * est.stderr + 1e-12 * exact {
            agree += 1;
        }
    }
    outcome(agree >= 47, format!("{agree}/50 within 3·stderr (need ≥ 47)"))
}

const DESK_CONFIG: &str = r#"{"n": 2, "N": 4, "gauge": {"kind": "lq", "q": 1}, "rball": 0,
    "law_x": {"kind": "uniform_cube"}, "measure": {"kind": "lebesgue_ball", "R": 5},
    "trials": 2000, "budget_per_trial": 100000, "seed": 2024, "estimator": "monte_carlo"}"#;

fn check_named(report: &Value, name: &str) -> Option<(f64, f64)> {
    report["summary"]["checks"]
        .as_array()?
        .iter()
        .find(|c| c["name"] == name)
        .map(|c| (c["value"].as_f64().unwrap(), c["bound"].as_f64().unwrap()))
}

fn desk_scale_expectation(dir: &std::path::Path) -> Outcome {
    let start = Instant::now();
    let r = run(dir, "santalo", DESK_CONFIG, "criterion3", &[]);
    let secs = start.elapsed().as_secs_f64();
    if r.code > 1 {
        return outcome(false, format!("command failed: {}", r.stderr));
    }
    let report = r.report();
    let (gap, bound) = check_named(&report, "mean_z_minus_mean_x").unwrap();
    outcome(
        r.code == 0 && gap >= bound && secs < 900.0,
        format!("mean_Z − mean_X = {gap:.4} ≥ {bound:.4}, {secs:.0} s"),
    )
}

fn desk_scale_dominance(dir: &std::path::Path) -> Outcome {
    let r = run(dir, "dominance", DESK_CONFIG, "criterion4", &[]);
    if r.code > 1 {
        return outcome(false, format!("command failed: {}", r.stderr));
    }
    let report = r.report();
    let levels = report["summary"]["survival"]["grid"].as_array().map_or(0, |g| g.len());
    let (margin, _) = check_named(&report, "survival_margin").unwrap();
    outcome(
        r.code == 0 && levels == 50 && margin >= 0.0,
        format!("min over {levels} levels of S_Z + 3·SE − S_X = {margin:.4}"),
    )
}

fn shadow_convexity(dir: &std::path::Path) -> Outcome {
    let config = r#"{"theta": [0, 1], "base_positions": [[1, 0], [0.5, 0], [-0.7, 0]],
        "gauge": {"kind": "lq", "q": 1}, "measure": {"kind": "lebesgue_ball", "R": 2},
        "direction": [0.48, 0.6, -0.64], "t_grid": [-1, -0.8, -0.6, -0.4, -0.2, 0, 0.2, 0.4, 0.6, 0.8, 1]}"#;
    let r = run(dir, "shadow", config, "criterion5", &[]);
    if r.code > 1 {
        return outcome(false, format!("command failed: {}", r.stderr));
    }
    let s = &r.report()["summary"];
    let v = &s["verdict"];
    let ok = r.code == 0 && s["method"] == "exact" && v["tol"].as_f64() == Some(1e-9);
    outcome(
        ok,
        format!(
            "{} profile, asymmetry {:.2e}, chord violation {:.2e} (tol 1e-9)",
            s["method"],
            v["worst_asymmetry"].as_f64().unwrap_or(f64::NAN),
            v["worst_violation"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn busemann_triangle(dir: &std::path::Path) -> Outcome {
    let square = r#"{"n": 2, "density": {"kind": "box", "half": 0.5}, "pairs": 200, "seed": 6, "tol": 1e-6}"#;
    let gauss = r#"{"n": 2, "density": {"kind": "gaussian", "sigma": 1}, "pairs": 200, "seed": 6, "tol": 1e-6}"#;
    let a = run(dir, "busemann", square, "criterion6a", &[]);
    let b = run(dir, "busemann", gauss, "criterion6b", &[]);
    if a.code > 1 || b.code > 1 {
        return outcome(false, format!("command failed: {}{}", a.stderr, b.stderr));
    }
    let (excess, _) = check_named(&a.report(), "triangle_excess").unwrap();
    let (closed, _) = check_named(&b.report(), "gaussian_closed_form").unwrap();
    outcome(
        a.code == 0 && b.code == 0,
        format!("square: worst Φ(z₁+z₂) − Φ(z₁) − Φ(z₂) = {excess:.2e}; Gaussian: max |Φ(z) − |z|/√(2π)| = {closed:.2e}"),
    )
}

fn rbll_family(dir: &std::path::Path) -> Outcome {
    let r = run(dir, "rbll", "{}", "criterion7", &[]);
    if r.code > 1 {
        return outcome(false, format!("command failed: {}", r.stderr));
    }
    let report = r.report();
    let (excess, _) = check_named(&report, "worst_excess").unwrap();
    let (gap, _) = check_named(&report, "worst_gap_when_symmetric").unwrap();
    outcome(
        r.code == 0,
        format!(
            "{} cases, worst lhs − rhs = {excess:.2e}; {} symmetric-decreasing cases, worst |lhs − rhs| = {gap:.2e}",
            report["summary"]["cases"], report["summary"]["symmetric_decreasing_cases"]
        ),
    )
}

fn rearrangement() -> Outcome {
    let mut rng = RngStream::from_seed(8).named("steps").rng();
    let mut worst_level: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=3usize);
        let k = rng.random_range(1..=6usize);
        let mut b = 0.0;
        let breaks: Vec<f64> = (0..k).map(|_| { b += 0.1 + rng.random::<f64>(); b }).collect();
        // coarse values so that ties and zero pieces occur
        let values: Vec<f64> = (0..k).map(|_| rng.random_range(0..=4) as f64 / 4.0).collect();
        let f = RadialStepFn::new(breaks, values.clone()).unwrap();
        let g = f.rearranged(n);
        for &v in &values {
            // levels at and just below each value; negative levels give all of ℝⁿ
            for alpha in [v, v - 0.125].into_iter().filter(|a| *a >= 0.0) {
                let (a, c) = (f.level_set_volume(alpha, n), g.level_set_volume(alpha, n));
                worst_level = worst_level.max((a - c).abs() / a.max(1e-300));
            }
        }
        for p in [1.0, 2.0, f64::INFINITY] {
            let (a, c) = (f.lp_norm(n, p), g.lp_norm(n, p));
            if a > 0.0 {
                worst_norm = worst_norm.max((a - c).abs() / a);
            }
        }
        let pieces: Vec<(f64, f64, f64)> =
            (0..k).map(|j| (j as f64 * 1.5 - 2.0, j as f64 * 1.5 - 1.0, values[j])).collect();
        let h = StepFn1d::new(pieces).unwrap();
        let hs = h.rearranged_on_line();
        for &v in &values {
            let (a, c) = (h.level_set_length(v), hs.level_set_length(v));
            worst_level = worst_level.max((a - c).abs() / a.max(1e-300));
        }
    }
    // level sets are unions of the same annuli, so only rounding separates the volumes
    outcome(
        worst_level <= 1e-12 && worst_norm <= 1e-9,
        format!("worst relative level-set gap {worst_level:.1e}, worst L_p gap {worst_norm:.1e}"),
    )
}

fn convergence(dir: &std::path::Path) -> Outcome {
    let config = r#"{"n": 2, "measure": {"kind": "lebesgue"}, "schedule": [4, 8, 16, 32, 64, 128, 256, 512],
                     "band": 0.05, "seed": 9}"#;
    let r = run(dir, "converge", config, "criterion9", &[]);
    if r.code > 1 {
        return outcome(false, format!("command failed: {}", r.stderr));
    }
    let path = &r.report()["summary"]["convergence"];
    let values: Vec<f64> = path["values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let monotone = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let last = *values.last().unwrap();
    let rel = (last - PI * PI) / (PI * PI);
    outcome(
        r.code == 0 && monotone && rel.abs() <= 0.05,
        format!("monotone: {monotone}, value at N = 512: {last:.4} ({:+.2}% from π²)", 100.0 * rel),
    )
}

fn determinism(dir: &std::path::Path) -> Outcome {
    let mut mismatches = Vec::new();
    for (command, config) in SMALL_CONFIGS {
        let a = run(dir, command, config, &format!("det-{command}-1"), &["--threads", "1"]);
        let b = run(dir, command, config, &format!("det-{command}-4"), &["--threads", "4"]);
        let c = run(dir, command, config, &format!("det-{command}-4b"), &["--threads", "4"]);
        if a.report_text() != b.report_text() || b.report_text() != c.report_text() {
            mismatches.push(*command);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{} commands compared at --threads 1/4/4; mismatches: {mismatches:?}", SMALL_CONFIGS.len()),
    )
}

fn null_calibration() -> Outcome {
    let mut fails = 0;
    for seed in 0..100 {
        let mut cfg = ExperimentConfig::new(
            Mode::Expectation,
            CoefficientGauge::lq(4, 1.0).unwrap(),
            PnDensity::uniform_dn(2).unwrap(),
            RadialMeasure::lebesgue_ball(2, 5.0).unwrap(),
        )
        .unwrap();
        cfg.seed = 1000 + seed;
        cfg.trials = 200;
        if !santalo_expectation_experiment(&cfg).unwrap().verdict.passed() {
            fails += 1;
        }
    }
    outcome(fails <= 1, format!("{fails}/100 false FAILs (need ≤ 1)"))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<Criterion> = vec![
        ("ball polar closed form", Box::new(ball_polar_closed_form)),
        ("exact-oracle agreement", Box::new(exact_oracle_agreement)),
        ("desk-scale expectation", Box::new(|| desk_scale_expectation(d))),
        ("stochastic dominance", Box::new(|| desk_scale_dominance(d))),
        ("shadow profile convexity", Box::new(|| shadow_convexity(d))),
        ("Busemann triangle inequality", Box::new(|| busemann_triangle(d))),
        ("rearrangement inequality family", Box::new(|| rbll_family(d))),
        ("rearrangement equimeasurability", Box::new(rearrangement)),
        ("convergence path", Box::new(|| convergence(d))),
        ("determinism across threads", Box::new(|| determinism(d))),
        ("null calibration", Box::new(null_calibration)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{tag}] {name}: {} ({:.1} s)", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
