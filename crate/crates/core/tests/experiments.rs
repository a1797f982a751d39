use std::f64::consts::PI;

use randpolar_core::experiments::{
    centroid_polar_experiment, centroid_support, convergence_experiment, newsan_experiment,
    rearrangement_ladder_experiment, santalo_expectation_experiment, stochastic_dominance_experiment,
    EstimatorChoice, ExperimentConfig, Mode, Verdict,
};
use randpolar_core::geom::{unit_volume_ball_radius, CoefficientGauge};
use randpolar_core::measure::{PnDensity, RadialMeasure, RadialStepFn};
use randpolar_core::volume::exact_polar_measure;
use randpolar_core::Body;

fn config(mode: Mode, big_n: usize, law: PnDensity, measure: RadialMeasure) -> ExperimentConfig {
    ExperimentConfig::new(mode, CoefficientGauge::lq(big_n, 1.0).unwrap(), law, measure).unwrap()
}

fn disk5() -> RadialMeasure {
    RadialMeasure::lebesgue_ball(2, 5.0).unwrap()
}

#[test]
fn null_hypothesis_rarely_fails() {
    let mut fails = 0;
    for seed in 0..100 {
        let mut cfg = config(Mode::Expectation, 4, PnDensity::uniform_dn(2).unwrap(), disk5());
        cfg.seed = seed;
        cfg.trials = 200;
        if !santalo_expectation_experiment(&cfg).unwrap().verdict.passed() {
            fails += 1;
        }
    }
    assert!(fails <= 1, "{fails} false failures in 100 repetitions");
}

#[test]
fn cube_points_give_smaller_expected_polar() {
    let mut cfg = config(Mode::Expectation, 4, PnDensity::uniform_cube(2).unwrap(), disk5());
    cfg.trials = 1000;
    let r = santalo_expectation_experiment(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
    assert_eq!(r.sides.len(), 2);
    assert_eq!(r.sides[0].values.len(), 1000);
}

#[test]
fn one_dimensional_trials_follow_closed_form_law() {
    // value = min(2/|X|, 2R) with |X| uniform on [0, 1/2]
    let big_r = 3.0;
    let mut cfg = config(
        Mode::Expectation,
        1,
        PnDensity::uniform_dn(1).unwrap(),
        RadialMeasure::lebesgue_ball(1, big_r).unwrap(),
    );
    cfg.trials = 2000;
    let r = santalo_expectation_experiment(&cfg).unwrap();
    let cdf = |v: f64| {
        if v < 4.0 {
            0.0
        } else if v < 2.0 * big_r {
            1.0 - 4.0 / v
        } else {
            1.0
        }
    };
    let mut vals = r.sides[0].values.clone();
    vals.sort_by(f64::total_cmp);
    let m = vals.len() as f64;
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < vals.len() {
        let v = vals[i];
        assert!((4.0..=2.0 * big_r + 1e-12).contains(&v));
        let mut j = i;
        while j < vals.len() && vals[j] == v {
            j += 1;
        }
        // empirical and analytic CDFs just below v and at v
        let below = cdf(v - 1e-12 * v);
        ks = ks.max((below - i as f64 / m).abs()).max((cdf(v) - j as f64 / m).abs());
        i = j;
    }
    assert!(ks < 1.63 / m.sqrt(), "KS distance {ks}");
}

#[test]
fn dominance_holds_for_cube_points() {
    let mut cfg = config(Mode::Dominance, 3, PnDensity::uniform_cube(2).unwrap(), disk5());
    cfg.trials = 1000;
    let r = stochastic_dominance_experiment(&cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
    let s = r.survival.as_ref().unwrap();
    assert_eq!(s.grid.len(), 50);
    assert_eq!(s.s_x[0].max(s.s_z[0]), 1.0);
    assert!(r.survival_csv().unwrap().lines().count() == 51);
}

#[test]
fn dominance_of_identical_laws_passes() {
    let mut cfg = config(Mode::Dominance, 3, PnDensity::uniform_dn(2).unwrap(), disk5());
    cfg.trials = 500;
    cfg.seed = 11;
    assert!(stochastic_dominance_experiment(&cfg).unwrap().verdict.passed());
}

#[test]
fn dominance_rejects_measures_without_convex_profile() {
    // ρ^{-1/3} of a step with two positive levels jumps inside the support
    let m = RadialMeasure::step(2, RadialStepFn::new(vec![1.0, 2.0], vec![1.0, 0.5]).unwrap()).unwrap();
    let r = ExperimentConfig::new(
        Mode::Dominance,
        CoefficientGauge::lq(3, 1.0).unwrap(),
        PnDensity::uniform_cube(2).unwrap(),
        m,
    );
    assert!(r.is_err());
}

#[test]
fn rearrangement_ladder_is_ordered() {
    // annular density 0.5 on |x| < 1/2, 1 on 1/2 ≤ |x| < b
    let b = (0.25 + (1.0 - 0.5 * PI * 0.25) / PI).sqrt();
    let profile = RadialStepFn::new(vec![0.5, b], vec![0.5, 1.0]).unwrap();
    let law = PnDensity::radial_step(2, profile).unwrap();
    let mut cfg = config(Mode::Expectation, 4, law, disk5());
    cfg.trials = 1000;
    let r = rearrangement_ladder_experiment(&cfg).unwrap();
    assert_eq!(r.sides.len(), 3);
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
}

#[test]
fn convergence_path_reaches_pi_squared() {
    let mut cfg = config(Mode::Convergence, 4, PnDensity::uniform_dn(2).unwrap(), RadialMeasure::lebesgue(2));
    cfg.seed = 7;
    let r = convergence_experiment(&cfg).unwrap();
    let path = r.convergence.as_ref().unwrap();
    assert_eq!(path.schedule, vec![4, 8, 16, 32, 64, 128, 256, 512]);
    assert!((path.target - PI * PI).abs() < 1e-12);
    for w in path.values.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    assert!(path.values[7] >= PI * PI * (1.0 - 1e-12));
    assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
}

#[test]
fn scaled_cross_polytope_polar_is_square() {
    let r2 = unit_volume_ball_radius(2);
    let body = Body::cross_polytope(&[vec![r2, 0.0], vec![0.0, r2]]).unwrap();
    let v = exact_polar_measure(&body, &RadialMeasure::lebesgue(2)).unwrap();
    assert!((v - 4.0 * PI).abs() < 1e-10);
}

#[test]
fn dn_centroid_body_matches_itself() {
    let mu = PnDensity::uniform_dn(2).unwrap();
    let h = centroid_support(&mu, 2.0, &[1.0, 0.0]).unwrap();
    assert!((h - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-12);
    let r = centroid_polar_experiment(&mu, 2.0, &RadialMeasure::lebesgue(2)).unwrap();
    assert!(r.verdict.passed());
    assert!((r.sides[0].mean - r.sides[1].mean).abs() < 1e-12 * r.sides[1].mean);
}

#[test]
fn cube_centroid_polar_is_smaller() {
    for (n, p) in [(2, 1.0), (2, 2.0), (2, 3.0), (3, 1.0)] {
        let mu = PnDensity::uniform_cube(n).unwrap();
        let r = centroid_polar_experiment(&mu, p, &RadialMeasure::lebesgue(n)).unwrap();
        assert!(r.verdict.passed(), "n={n} p={p}: {:?}", r.checks);
        assert!(r.sides[0].mean < r.sides[1].mean);
    }
}

#[test]
fn centroid_support_is_homogeneous() {
    let mu = PnDensity::uniform_cube(3).unwrap();
    for y in [[0.3, -0.2, 0.9], [1.0, 1.0, 1.0], [0.0, 0.5, -0.1]] {
        let h1 = centroid_support(&mu, 1.5, &y).unwrap();
        let y2: Vec<f64> = y.iter().map(|c| 2.0 * c).collect();
        let h2 = centroid_support(&mu, 1.5, &y2).unwrap();
        assert!((h2 - 2.0 * h1).abs() <= 1e-9 * h1);
    }
}

#[test]
fn centroid_rejects_simplex_and_bad_p() {
    let m = RadialMeasure::lebesgue(2);
    assert!(centroid_polar_experiment(&PnDensity::uniform_simplex(2).unwrap(), 1.0, &m).is_err());
    assert!(centroid_polar_experiment(&PnDensity::uniform_dn(2).unwrap(), 0.5, &m).is_err());
    assert!(centroid_polar_experiment(&PnDensity::uniform_dn(2).unwrap(), f64::INFINITY, &m).is_err());
}

#[test]
fn newsan_ball_is_equality() {
    let body = Body::ball(3, 0.7).unwrap();
    let r = newsan_experiment(&body, &RadialMeasure::lebesgue(3), 10_000, 0, EstimatorChoice::Auto).unwrap();
    assert!(r.verdict.passed());
    assert!((r.sides[0].mean / r.sides[1].mean - 1.0).abs() < 1e-12);
}

#[test]
fn newsan_square_and_cross_polytope() {
    let m = RadialMeasure::lebesgue(2);
    let square = Body::cube(2, 1.0).unwrap();
    let r = newsan_experiment(&square, &m, 10_000, 0, EstimatorChoice::Auto).unwrap();
    assert!(r.verdict.passed());
    assert!((r.sides[0].mean - 2.0).abs() < 1e-12);
    assert!((r.sides[1].mean - PI * PI / 4.0).abs() < 1e-12);

    let cross = Body::cross_polytope(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let big = RadialMeasure::lebesgue_ball(2, 100.0).unwrap();
    let r = newsan_experiment(&cross, &big, 10_000, 0, EstimatorChoice::Auto).unwrap();
    assert!(r.verdict.passed());
    assert!((r.sides[0].mean - 4.0).abs() < 1e-12);
    assert!((r.sides[1].mean - PI * PI / 2.0).abs() < 1e-10);

    let mc = newsan_experiment(&cross, &big, 200_000, 3, EstimatorChoice::MonteCarlo).unwrap();
    assert!(mc.verdict.passed());
    assert!(mc.work.mc_samples == 200_000);
}

#[test]
fn newsan_rejects_asymmetric_body() {
    use randpolar_core::geom::Halfspace;
    let hs = vec![
        Halfspace::new(vec![1.0, 0.0], 1.0),
        Halfspace::new(vec![-1.0, 0.0], 2.0),
        Halfspace::new(vec![0.0, 1.0], 1.0),
        Halfspace::new(vec![0.0, -1.0], 1.0),
    ];
    let body = Body::hpolytope(2, hs).unwrap();
    assert!(newsan_experiment(&body, &RadialMeasure::lebesgue(2), 1000, 0, EstimatorChoice::Auto).is_err());
}

#[test]
fn reports_are_reproducible_and_thread_independent() {
    let mut cfg = config(Mode::Expectation, 4, PnDensity::uniform_cube(2).unwrap(), disk5());
    cfg.trials = 20;
    cfg.budget_per_trial = 5_000;
    cfg.estimator = EstimatorChoice::MonteCarlo;
    cfg.seed = 42;
    let a = santalo_expectation_experiment(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| santalo_expectation_experiment(&cfg).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a.work.mc_samples, 2 * 20 * 5_000);
    let csv = a.trials_csv();
    assert!(csv.starts_with("trial_index,side,value,stderr\n0,X,"));
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn mode_mismatch_is_rejected() {
    let cfg = config(Mode::Convergence, 4, PnDensity::uniform_dn(2).unwrap(), disk5());
    assert!(santalo_expectation_experiment(&cfg).is_err());
    let cfg = config(Mode::Expectation, 4, PnDensity::uniform_dn(2).unwrap(), disk5());
    assert!(convergence_experiment(&cfg).is_err());
}
