//! One handler per subcommand: parse the configuration, run the
//! computation and collect the verdict, summary and plot-ready CSV files.

use rand::Rng;
use randpolar_core::analysis::{
    ball_bobkov_gauge, brunn_profile, busemann_gauge, check_concavity, milman_pajor_gauge, rbll_check_1d,
    rbll_family, shadow_profile, ProfileMethod, RbllCase, RBLL_TOL,
};
use randpolar_core::experiments::{
    centroid_polar_experiment, convergence_experiment, newsan_experiment, polar_value,
    rearrangement_ladder_experiment, santalo_expectation_experiment, stochastic_dominance_experiment,
    EstimatorChoice, ExperimentReport, Mode, Verdict,
};
use randpolar_core::geom::{dot, norm};
use randpolar_core::measure::DensityOracle;
use randpolar_core::volume::{exact_polar_measure, layer_cake_measure, mc_polar_measure};
use randpolar_core::{Estimate, RngStream};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::spec::{
    parse_experiment_config, parse_json, BrunnSpec, BusemannSpec, CentroidSpec, ConfigError, GaugeCmdSpec,
    GaugeKind, NewsanSpec, OracleSpec, PolarMethod, PolarVolumeSpec, RbllSpec, ShadowSpec,
};
use crate::{CliError, Command};

/// Flag values that replace the corresponding configuration fields.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

/// Everything a command produces besides wall-clock time.
#[derive(Clone, Debug)]
pub struct Outcome {
    /// The effective configuration, overrides applied.
    pub config: Value,
    pub verdict: Verdict,
    pub summary: Value,
    /// Deterministic work counters.
    pub timing: Value,
    /// Extra output files `(name, contents)`.
    pub files: Vec<(String, String)>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configuration types serialize to JSON")
}

fn compute(e: randpolar_core::Error) -> CliError {
    CliError::Compute(e)
}

/// Run `command` on the configuration text.
pub fn execute(command: Command, config: &str, ov: Overrides) -> Result<Outcome, CliError> {
    match command {
        Command::PolarVolume => polar_volume(parse_json(config)?, ov),
        Command::Santalo => experiment(config, Mode::Expectation, ov),
        Command::Dominance => experiment(config, Mode::Dominance, ov),
        Command::Converge => experiment(config, Mode::Convergence, ov),
        Command::Shadow => shadow(parse_json(config)?, ov),
        Command::Busemann => busemann(parse_json(config)?, ov),
        Command::Gauge => gauge(parse_json(config)?, ov),
        Command::Brunn => brunn(parse_json(config)?),
        Command::Rbll => rbll(parse_json(config)?),
        Command::Centroid => centroid(parse_json(config)?),
        Command::Newsan => newsan(parse_json(config)?, ov),
    }
}

fn estimate_summary(e: &Estimate) -> Value {
    json!({ "value": e.value, "stderr": e.stderr, "samples": e.samples })
}

fn polar_volume(mut spec: PolarVolumeSpec, ov: Overrides) -> Result<Outcome, CliError> {
    spec.seed = ov.seed.unwrap_or(spec.seed);
    spec.budget = ov.budget.unwrap_or(spec.budget);
    if spec.budget < 2 {
        return Err(ConfigError::new("budget", "must be ≥ 2").into());
    }
    let body = spec.body.to_core("body")?;
    let measure = spec.measure.to_core(body.dim(), "measure")?;
    let stream = RngStream::from_seed(spec.seed).named("polar-volume");
    let mut low_accuracy = None;
    let est = match spec.method {
        PolarMethod::Auto => polar_value(&body, &measure, spec.budget, stream, EstimatorChoice::Auto),
        PolarMethod::MonteCarlo => mc_polar_measure(&body, &measure, spec.budget, stream),
        PolarMethod::Exact => exact_polar_measure(&body, &measure).map(Estimate::exact),
        PolarMethod::LayerCake => {
            layer_cake_measure(&body, &measure, spec.levels.as_deref(), spec.budget, stream).map(|lc| {
                low_accuracy = Some(lc.low_accuracy);
                lc.estimate
            })
        }
    }
    .map_err(compute)?;
    let mut summary = estimate_summary(&est);
    summary["low_accuracy"] = to_value(&low_accuracy);
    let verdict = match spec.expected {
        Some(x) => {
            summary["expected"] = json!(x);
            Verdict::from_bool((est.value - x).abs() <= 3.0 * est.stderr + 1e-12 * x.abs())
        }
        None => Verdict::Pass,
    };
    Ok(Outcome {
        config: to_value(&spec),
        verdict,
        summary,
        timing: json!({ "bodies": 1, "mc_samples": est.samples }),
        files: Vec::new(),
    })
}

fn report_summary(r: &ExperimentReport) -> Value {
    let sides: Vec<Value> = r
        .sides
        .iter()
        .map(|s| json!({ "label": s.label, "mean": s.mean, "stderr": s.stderr, "trials": s.values.len() }))
        .collect();
    json!({
        "checks": r.checks,
        "sides": sides,
        "survival": r.survival,
        "convergence": r.convergence,
        "notes": r.notes,
    })
}

fn report_files(r: &ExperimentReport) -> Vec<(String, String)> {
    let mut files = vec![("trials.csv".to_string(), r.trials_csv())];
    if let Some(s) = r.survival_csv() {
        files.push(("survival.csv".into(), s));
    }
    if let Some(p) = r.path_csv() {
        files.push(("path.csv".into(), p));
    }
    files
}

fn report_outcome(config: Value, r: &ExperimentReport) -> Outcome {
    Outcome {
        config,
        verdict: r.verdict,
        summary: report_summary(r),
        timing: to_value(&r.work),
        files: report_files(r),
    }
}

fn experiment(text: &str, mode: Mode, ov: Overrides) -> Result<Outcome, CliError> {
    let mut value: Value = parse_json(text)?;
    if let Some(obj) = value.as_object_mut() {
        if let Some(s) = ov.seed {
            obj.insert("seed".into(), json!(s));
        }
        if let Some(b) = ov.budget {
            obj.insert("budget_per_trial".into(), json!(b));
        }
    }
    let (spec, cfg) = parse_experiment_config(&value.to_string(), mode)?;
    let report = match mode {
        Mode::Expectation if spec.ladder => rearrangement_ladder_experiment(&cfg),
        Mode::Expectation => santalo_expectation_experiment(&cfg),
        Mode::Dominance => stochastic_dominance_experiment(&cfg),
        _ => convergence_experiment(&cfg),
    }
    .map_err(compute)?;
    Ok(report_outcome(to_value(&spec), &report))
}

fn shadow(mut spec: ShadowSpec, ov: Overrides) -> Result<Outcome, CliError> {
    spec.seed = ov.seed.unwrap_or(spec.seed);
    spec.budget = ov.budget.unwrap_or(spec.budget);
    let cfg = spec.to_core()?;
    let stream = RngStream::from_seed(spec.seed).named("shadow");
    let profile = shadow_profile(&cfg, &spec.direction, &spec.t_grid, spec.budget, stream).map_err(compute)?;
    let points = profile.grid.len() as u64;
    let mc_samples = if profile.method == ProfileMethod::MonteCarlo { spec.budget * points } else { 0 };
    Ok(Outcome {
        config: to_value(&spec),
        verdict: Verdict::from_bool(profile.verdict.passed()),
        summary: json!({ "method": profile.method, "verdict": profile.verdict, "values": profile.values }),
        timing: json!({ "bodies": points, "mc_samples": mc_samples }),
        files: vec![("profile.csv".into(), profile.to_csv())],
    })
}

fn random_points(n: usize, count: usize, scale: f64, stream: RngStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    (0..count).map(|_| (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()).collect()
}

fn check_dimension(n: usize, path: &str) -> Result<(), CliError> {
    if !(1..=3).contains(&n) {
        return Err(ConfigError::new(path, "must be 1, 2 or 3").into());
    }
    Ok(())
}

fn check_scale(scale: f64, count: usize, count_name: &str) -> Result<(), CliError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(ConfigError::new("scale", "must be finite and > 0").into());
    }
    if count == 0 {
        return Err(ConfigError::new(count_name, "must be ≥ 1").into());
    }
    Ok(())
}

fn busemann(mut spec: BusemannSpec, ov: Overrides) -> Result<Outcome, CliError> {
    spec.seed = ov.seed.unwrap_or(spec.seed);
    check_dimension(spec.n, "n")?;
    check_scale(spec.scale, spec.pairs, "pairs")?;
    let psi = spec.density.to_core(spec.n, "density")?;
    let psi: &dyn DensityOracle = psi.as_ref();
    let root = RngStream::from_seed(spec.seed).named("busemann");
    let a = random_points(spec.n, spec.pairs, spec.scale, root.named("first"));
    let b = random_points(spec.n, spec.pairs, spec.scale, root.named("second"));
    let rows: Vec<[f64; 3]> = (0..spec.pairs)
        .into_par_iter()
        .map(|i| {
            let s: Vec<f64> = a[i].iter().zip(&b[i]).map(|(x, y)| x + y).collect();
            Ok([busemann_gauge(psi, &a[i])?, busemann_gauge(psi, &b[i])?, busemann_gauge(psi, &s)?])
        })
        .collect::<randpolar_core::Result<_>>()
        .map_err(compute)?;
    let worst_excess = rows.iter().map(|r| r[2] - r[0] - r[1]).fold(f64::NEG_INFINITY, f64::max);
    let mut checks = vec![json!({ "name": "triangle_excess", "value": worst_excess, "bound": spec.tol,
                                  "passed": worst_excess <= spec.tol })];
    let mut passed = worst_excess <= spec.tol;
    if let OracleSpec::Gaussian { sigma } = spec.density {
        // ν⁺(z⊥) = (2πσ²)^{(n-1)/2} for the unnormalized Gaussian
        let mass = (2.0 * std::f64::consts::PI * sigma * sigma).powf(0.5 * (spec.n as f64 - 1.0));
        let worst = rows
            .iter()
            .zip(&a)
            .map(|(r, z)| (r[0] - norm(z) / mass).abs())
            .fold(0.0f64, f64::max);
        checks.push(json!({ "name": "gaussian_closed_form", "value": worst, "bound": spec.tol,
                            "passed": worst <= spec.tol }));
        passed &= worst <= spec.tol;
    }
    let concavity = (spec.concavity_segments > 0)
        .then(|| check_concavity(psi, spec.concavity_segments, root.named("concavity")));
    if let Some(c) = concavity {
        passed &= c.verified();
    }
    let mut csv = String::from("pair_index,phi_z1,phi_z2,phi_sum\n");
    for (i, r) in rows.iter().enumerate() {
        csv.push_str(&format!("{i},{},{},{}\n", r[0], r[1], r[2]));
    }
    Ok(Outcome {
        config: to_value(&spec),
        verdict: Verdict::from_bool(passed),
        summary: json!({ "checks": checks, "concavity": concavity }),
        timing: json!({ "gauge_evaluations": 3 * spec.pairs }),
        files: vec![("pairs.csv".into(), csv)],
    })
}

/// Orthonormal basis of `E` (Gram–Schmidt) for projecting onto `E⊥`.
fn orthonormal(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let mut v = b.clone();
        for u in &out {
            let d = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
        let r = norm(&v);
        if !(r > 1e-12) {
            return Err(ConfigError::new(format!("subspace[{i}]"), "is linearly dependent on earlier vectors").into());
        }
        out.push(v.iter().map(|x| x / r).collect());
    }
    Ok(out)
}

fn gauge(mut spec: GaugeCmdSpec, ov: Overrides) -> Result<Outcome, CliError> {
    spec.seed = ov.seed.unwrap_or(spec.seed);
    check_dimension(spec.n, "n")?;
    check_scale(spec.scale, spec.points, "points")?;
    if !(spec.p > 0.0 && spec.p.is_finite()) {
        return Err(ConfigError::new("p", "must be finite and > 0").into());
    }
    let f = spec.density.to_core(spec.n, "density")?;
    let f: &dyn DensityOracle = f.as_ref();
    for (i, v) in spec.subspace.iter().enumerate() {
        if v.len() != spec.n {
            return Err(ConfigError::new(format!("subspace[{i}]"), format!("must have {} entries", spec.n)).into());
        }
    }
    let basis = match spec.gauge {
        GaugeKind::MilmanPajor => {
            if spec.subspace.len() + 1 > spec.n {
                return Err(ConfigError::new("subspace", "must have dimension < n").into());
            }
            orthonormal(&spec.subspace)?
        }
        GaugeKind::BallBobkov => Vec::new(),
    };
    let project = |v: &[f64]| -> Vec<f64> {
        let mut w = v.to_vec();
        for u in &basis {
            let d = dot(&w, u);
            w.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
        }
        w
    };
    let eval = |x: &[f64]| match spec.gauge {
        GaugeKind::BallBobkov => ball_bobkov_gauge(f, spec.p, x),
        GaugeKind::MilmanPajor => milman_pajor_gauge(f, &spec.subspace, spec.p, x),
    };
    let root = RngStream::from_seed(spec.seed).named("gauge");
    let pts: Vec<Vec<f64>> =
        random_points(spec.n, spec.points, spec.scale, root.named("points")).iter().map(|v| project(v)).collect();
    let rows: Vec<[f64; 4]> = (0..spec.points)
        .into_par_iter()
        .map(|i| {
            let x = &pts[i];
            let y = &pts[(i + 1) % pts.len()];
            let twice: Vec<f64> = x.iter().map(|c| 2.0 * c).collect();
            let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            Ok([eval(x)?, eval(&twice)?, eval(y)?, eval(&sum)?])
        })
        .collect::<randpolar_core::Result<_>>()
        .map_err(compute)?;
    let homogeneity = rows.iter().map(|r| (r[1] - 2.0 * r[0]).abs() / r[0].max(1e-300)).fold(0.0f64, f64::max);
    let triangle = rows.iter().map(|r| r[3] - r[0] - r[2]).fold(f64::NEG_INFINITY, f64::max);
    let checks = json!([
        { "name": "relative_homogeneity_error", "value": homogeneity, "bound": 1e-9, "passed": homogeneity <= 1e-9 },
        { "name": "triangle_excess", "value": triangle, "bound": spec.tol, "passed": triangle <= spec.tol },
    ]);
    let mut csv = String::from("point_index,gauge,gauge_twice,gauge_next,gauge_sum\n");
    for (i, r) in rows.iter().enumerate() {
        csv.push_str(&format!("{i},{},{},{},{}\n", r[0], r[1], r[2], r[3]));
    }
    Ok(Outcome {
        config: to_value(&spec),
        verdict: Verdict::from_bool(homogeneity <= 1e-9 && triangle <= spec.tol),
        summary: json!({ "checks": checks }),
        timing: json!({ "gauge_evaluations": 4 * spec.points }),
        files: vec![("gauge.csv".into(), csv)],
    })
}

fn brunn(spec: BrunnSpec) -> Result<Outcome, CliError> {
    spec.phi.validate("phi")?;
    if !(spec.n == 1 || spec.n == 2) {
        return Err(ConfigError::new("n", "must be 1 or 2").into());
    }
    if !(spec.alpha > 0.0 && spec.alpha.is_finite()) {
        return Err(ConfigError::new("alpha", "must be finite and > 0").into());
    }
    let phi = spec.phi.clone();
    let profile =
        brunn_profile(move |t, x| phi.eval(t, x), spec.alpha, spec.n, &spec.t_grid, spec.phi.x_radius()).map_err(compute)?;
    Ok(Outcome {
        config: to_value(&spec),
        verdict: Verdict::from_bool(profile.verdict.midpoint_convex),
        summary: json!({ "verdict": profile.verdict, "values": profile.values }),
        timing: json!({ "profile_points": profile.grid.len() }),
        files: vec![("profile.csv".into(), profile.to_csv())],
    })
}

fn rbll(spec: RbllSpec) -> Result<Outcome, CliError> {
    let cases: Vec<RbllCase> = match &spec.cases {
        None => rbll_family(),
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let path = format!("cases[{i}]");
                Ok(RbllCase { functions: c.functions(&path)?, coeffs: c.coeffs.clone(), half_width: c.half_width })
            })
            .collect::<Result<_, ConfigError>>()?,
    };
    let results: Vec<_> = cases
        .par_iter()
        .map(|c| rbll_check_1d(&c.functions, &c.coeffs, c.half_width))
        .collect::<randpolar_core::Result<_>>()
        .map_err(compute)?;
    let worst_excess = results.iter().map(|r| r.lhs - r.rhs).fold(f64::NEG_INFINITY, f64::max);
    let symmetric: Vec<usize> =
        (0..cases.len()).filter(|&i| cases[i].functions.iter().all(|f| f.is_symmetric_decreasing())).collect();
    let worst_equality = symmetric.iter().map(|&i| (results[i].lhs - results[i].rhs).abs()).fold(0.0f64, f64::max);
    let holds = worst_excess <= RBLL_TOL;
    let equal = worst_equality <= RBLL_TOL;
    let mut csv = String::from("case_index,lhs,rhs\n");
    for (i, r) in results.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", r.lhs, r.rhs));
    }
    Ok(Outcome {
        config: to_value(&spec),
        verdict: Verdict::from_bool(holds && equal),
        summary: json!({
            "cases": cases.len(),
            "symmetric_decreasing_cases": symmetric.len(),
            "checks": [
                { "name": "worst_excess", "value": worst_excess, "bound": RBLL_TOL, "passed": holds },
                { "name": "worst_gap_when_symmetric", "value": worst_equality, "bound": RBLL_TOL, "passed": equal },
            ],
        }),
        timing: json!({ "cases": cases.len() }),
        files: vec![("rbll.csv".into(), csv)],
    })
}

fn centroid(spec: CentroidSpec) -> Result<Outcome, CliError> {
    check_dimension(spec.n, "n")?;
    if !(spec.p >= 1.0) {
        return Err(ConfigError::new("p", "must be ≥ 1").into());
    }
    let mu = spec.mu.to_core(spec.n, "mu")?;
    let measure = spec.measure.to_core(spec.n, "measure")?;
    let r = centroid_polar_experiment(&mu, spec.p, &measure).map_err(compute)?;
    Ok(report_outcome(to_value(&spec), &r))
}

fn newsan(mut spec: NewsanSpec, ov: Overrides) -> Result<Outcome, CliError> {
    spec.seed = ov.seed.unwrap_or(spec.seed);
    spec.budget = ov.budget.unwrap_or(spec.budget);
    if spec.budget < 2 {
        return Err(ConfigError::new("budget", "must be ≥ 2").into());
    }
    let body = spec.body.to_core("body")?;
    let measure = spec.measure.to_core(body.dim(), "measure")?;
    let r = newsan_experiment(&body, &measure, spec.budget, spec.seed, spec.estimator).map_err(compute)?;
    Ok(report_outcome(to_value(&spec), &r))
}
