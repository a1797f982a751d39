use std::f64::consts::{PI, TAU};

use rand::Rng;
use randpolar_core::geom::{unit_volume_ball_radius, CoefficientGauge};
use randpolar_core::measure::{RadialMeasure, RadialStepFn};
use randpolar_core::volume::{
    exact_polar_measure, exact_polar_volume_crosspoly, layer_cake_measure, mc_polar_measure, CHUNK_SIZE,
};
use randpolar_core::{Body, Error, RngStream};

/// `k`-sigma agreement, with rounding slack for zero-variance estimators.
fn within(est: randpolar_core::Estimate, truth: f64, k: f64) -> bool {
    (est.value - truth).abs() <= k * est.stderr + 1e-12 * truth.abs()
}

#[test]
fn dn_polar_is_pi_squared() {
    let body = Body::ball(2, unit_volume_ball_radius(2)).unwrap();
    let est = mc_polar_measure(&body, &RadialMeasure::lebesgue(2), 1_000_000, RngStream::new(1, 0)).unwrap();
    assert!(within(est, PI * PI, 3.0), "{est:?}");
    assert_eq!(est.samples, 1_000_000);
}

#[test]
fn cross_polytope_polar_is_square() {
    let body = Body::cross_polytope(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let est = mc_polar_measure(&body, &RadialMeasure::lebesgue(2), 200_000, RngStream::new(2, 0)).unwrap();
    assert!(within(est, 4.0, 3.0), "{est:?}");
}

#[test]
fn three_point_example_matches_oracle() {
    let pts = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let exact = exact_polar_volume_crosspoly(&pts, 2).unwrap();
    let body = Body::cross_polytope(&pts).unwrap();
    let est = mc_polar_measure(&body, &RadialMeasure::lebesgue(2), 200_000, RngStream::new(3, 0)).unwrap();
    assert!(within(est, exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn infinite_mass_with_unbounded_polar_is_refused() {
    // a segment: its polar is an infinite slab
    let body = Body::cross_polytope(&[vec![1.0, 0.0]]).unwrap();
    let err = mc_polar_measure(&body, &RadialMeasure::lebesgue(2), 1000, RngStream::new(0, 0)).unwrap_err();
    assert!(matches!(err, Error::Infeasible(_)));
    // with a finite-mass measure the ν-sampling branch applies: slab |y_1| ≤ 1 under a Gaussian
    let g = RadialMeasure::gaussian(2, 1.0).unwrap();
    let est = mc_polar_measure(&body, &g, 200_000, RngStream::new(0, 1)).unwrap();
    let truth = TAU * statrs::function::erf::erf(1.0 / 2f64.sqrt());
    assert!(within(est, truth, 3.0), "{est:?} vs {truth}");
}

fn random_points(rng: &mut impl Rng, n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| loop {
            let p: Vec<f64> = (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r <= 1.0 && r > 0.05 {
                break p;
            }
        })
        .collect()
}

#[test]
fn mc_agrees_with_exact_oracle_on_random_configurations() {
    let mut rng = RngStream::new(2024, 0).rng();
    let mut agree = 0;
    for trial in 0..50 {
        let n = 2 + trial % 2;
        let count = n + trial % (7 - n);
        let pts = random_points(&mut rng, n, count);
        let exact = exact_polar_volume_crosspoly(&pts, n).unwrap();
        let body = Body::cross_polytope(&pts).unwrap();
        let est = mc_polar_measure(&body, &RadialMeasure::lebesgue(n), 40_000, RngStream::new(7, trial as u64))
            .unwrap();
        if within(est, exact, 3.0) {
            agree += 1;
        }
    }
    assert!(agree >= 47, "only {agree}/50 within 3 stderr");
}

#[test]
fn adding_a_column_never_grows_the_polar() {
    let mut rng = RngStream::new(99, 0).rng();
    for trial in 0..40 {
        let n = 2 + trial % 2;
        let mut pts = random_points(&mut rng, n, n + 1);
        let before = exact_polar_volume_crosspoly(&pts, n).unwrap();
        let body = Body::cross_polytope(&pts).unwrap();
        let stream = RngStream::new(5, trial as u64);
        let mc_before = mc_polar_measure(&body, &RadialMeasure::lebesgue(n), 20_000, stream).unwrap();
        pts.extend(random_points(&mut rng, n, 1));
        let after = exact_polar_volume_crosspoly(&pts, n).unwrap();
        assert!(after <= before * (1.0 + 1e-12), "{after} > {before}");
        let body = Body::cross_polytope(&pts).unwrap();
        let mc_after = mc_polar_measure(&body, &RadialMeasure::lebesgue(n), 20_000, stream).unwrap();
        let noise = 3.0 * mc_before.stderr.hypot(mc_after.stderr);
        assert!(mc_after.value <= mc_before.value + noise);
    }
}

#[test]
fn exact_volume_scale_law() {
    let mut rng = RngStream::new(31, 0).rng();
    for trial in 0..20 {
        let n = 2 + trial % 2;
        let pts = random_points(&mut rng, n, n + 2);
        let lambda = 0.3 + 2.0 * rng.random::<f64>();
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|c| c * lambda).collect()).collect();
        let a = exact_polar_volume_crosspoly(&pts, n).unwrap();
        let b = exact_polar_volume_crosspoly(&scaled, n).unwrap();
        assert!((b - a * lambda.powi(-(n as i32))).abs() <= 1e-9 * b);
    }
}

#[test]
fn estimates_are_bit_identical_and_thread_independent() {
    let body = Body::cross_polytope(&[vec![1.0, 0.2], vec![-0.3, 0.8], vec![0.5, 0.5]]).unwrap();
    let m = RadialMeasure::gaussian(2, 0.8).unwrap();
    let budget = 3 * CHUNK_SIZE + 17;
    let a = mc_polar_measure(&body, &m, budget, RngStream::new(42, 3)).unwrap();
    let b = mc_polar_measure(&body, &m, budget, RngStream::new(42, 3)).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| mc_polar_measure(&body, &m, budget, RngStream::new(42, 3)).unwrap());
    assert_eq!(a, c);
    assert_eq!(a.streams, 4);
}

#[test]
fn layer_cake_gaussian_ball() {
    let body = Body::ball(2, 1.0).unwrap();
    let m = RadialMeasure::gaussian(2, 1.0).unwrap();
    let truth = TAU * (1.0 - (-0.5f64).exp());
    let lc = layer_cake_measure(&body, &m, None, 400_000, RngStream::new(8, 0)).unwrap();
    assert!(!lc.low_accuracy);
    assert!(within(lc.estimate, truth, 3.0), "{lc:?} vs {truth}");
    let mc = mc_polar_measure(&body, &m, 400_000, RngStream::new(8, 1)).unwrap();
    let combined = lc.estimate.stderr.hypot(mc.stderr);
    assert!((lc.estimate.value - mc.value).abs() <= 3.0 * combined);
}

#[test]
fn layer_cake_on_polytopes_matches_exact_oracle() {
    let body = Body::cross_polytope(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, -0.7]]).unwrap();
    let measures = [
        RadialMeasure::gaussian(2, 0.7).unwrap(),
        RadialMeasure::power_kernel(2, vec![(0.0, 1.0), (0.5, 1.3), (1.0, 2.5)]).unwrap(),
        RadialMeasure::step(2, RadialStepFn::new(vec![0.4, 0.9, 3.0], vec![1.0, 0.6, 0.1]).unwrap()).unwrap(),
    ];
    for (k, m) in measures.iter().enumerate() {
        let exact = exact_polar_measure(&body, m).unwrap();
        let lc = layer_cake_measure(&body, m, None, 300_000, RngStream::new(12, k as u64)).unwrap();
        assert!(within(lc.estimate, exact, 3.0), "{m:?}: {lc:?} vs {exact}");
    }
}

#[test]
fn layer_cake_single_level_is_restricted_mc() {
    let body = Body::cross_polytope(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let m = RadialMeasure::lebesgue_ball(2, 1.2).unwrap();
    let lc = layer_cake_measure(&body, &m, None, 100_000, RngStream::new(4, 0)).unwrap();
    assert_eq!(lc.levels, 1);
    let mc = mc_polar_measure(&body, &m, 100_000, RngStream::new(4, 0)).unwrap();
    assert_eq!(lc.estimate, mc);
}

#[test]
fn degenerate_level_grid_is_flagged() {
    let body = Body::ball(2, 1.0).unwrap();
    let m = RadialMeasure::gaussian(2, 1.0).unwrap();
    let lc = layer_cake_measure(&body, &m, Some(&[1.0]), 10_000, RngStream::new(1, 1)).unwrap();
    assert!(lc.low_accuracy);
    assert_eq!(lc.levels, 1);
    assert!(lc.estimate.value.is_finite());
}

#[test]
fn ball_gauge_images_in_three_dimensions() {
    // [e1 e2 e3] B_∞³ is the cube [-1,1]³, whose polar is the octahedron of volume 4/3
    let cols: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let cube = Body::matrix_image(&cols, CoefficientGauge::lq(3, f64::INFINITY).unwrap(), 0.0).unwrap();
    let exact = exact_polar_measure(&cube, &RadialMeasure::lebesgue(3)).unwrap();
    assert!((exact - 4.0 / 3.0).abs() < 1e-12);
    let est = mc_polar_measure(&cube, &RadialMeasure::lebesgue(3), 200_000, RngStream::new(6, 0)).unwrap();
    assert!(within(est, exact, 3.0));
}
