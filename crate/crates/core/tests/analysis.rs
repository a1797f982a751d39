use rand::Rng;
use randpolar_core::analysis::{
    ball_bobkov_gauge, brunn_profile, busemann_gauge, milman_pajor_gauge, rbll_check_1d, rbll_family,
};
use randpolar_core::geom::norm;
use randpolar_core::measure::{BoxIndicator, DensityOracle, FnDensity, GaussianFactor};
use randpolar_core::RngStream;

fn random_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect()
}

#[test]
fn busemann_triangle_inequality() {
    let oracles: Vec<Box<dyn DensityOracle>> = vec![
        Box::new(GaussianFactor { dim: 2, sigma: 1.0 }),
        Box::new(BoxIndicator::symmetric(2, 1.0)),
        Box::new(FnDensity::new(2, |x: &[f64]| if x[0] * x[0] / 4.0 + x[1] * x[1] <= 1.0 { 1.0 } else { 0.0 })
            .with_support_radius(2.0)),
    ];
    let mut rng = RngStream::new(17, 0).rng();
    for psi in &oracles {
        for _ in 0..200 {
            let a = random_vec(&mut rng, 2, 2.0);
            let b = random_vec(&mut rng, 2, 2.0);
            let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = busemann_gauge(psi.as_ref(), &s).unwrap();
            let rhs = busemann_gauge(psi.as_ref(), &a).unwrap() + busemann_gauge(psi.as_ref(), &b).unwrap();
            assert!(lhs <= rhs + 1e-6, "{a:?} {b:?}: {lhs} > {rhs}");
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gauges_are_positively_homogeneous() {
    let gauss = GaussianFactor { dim: 2, sigma: 1.0 };
    let square = BoxIndicator::symmetric(2, 1.0);
    let mut rng = RngStream::new(23, 0).rng();
    for _ in 0..100 {
        let x = random_vec(&mut rng, 2, 3.0);
        let lambda = 0.1 + 5.0 * rng.random::<f64>();
        let lx: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        for psi in [&gauss as &dyn DensityOracle, &square] {
            let b = busemann_gauge(psi, &x).unwrap();
            assert!(rel(busemann_gauge(psi, &lx).unwrap(), lambda * b) <= 1e-9);
            let f = ball_bobkov_gauge(psi, 1.5, &x).unwrap();
            assert!(rel(ball_bobkov_gauge(psi, 1.5, &lx).unwrap(), lambda * f) <= 1e-9);
        }
        // v ⟂ E = span(u)
        let u = vec![-x[1], x[0]];
        let m = milman_pajor_gauge(&gauss, std::slice::from_ref(&u), 2.0, &x).unwrap();
        assert!(rel(milman_pajor_gauge(&gauss, &[u], 2.0, &lx).unwrap(), lambda * m) <= 1e-9);
    }
}

#[test]
fn ball_bobkov_matches_norm_of_indicator() {
    let ellipse = FnDensity::new(2, |x: &[f64]| if x[0] * x[0] / 4.0 + x[1] * x[1] <= 1.0 { 1.0 } else { 0.0 })
        .with_support_radius(2.0);
    let mut rng = RngStream::new(5, 5).rng();
    for _ in 0..20 {
        let x = random_vec(&mut rng, 2, 3.0);
        let p = 0.5 + 3.0 * rng.random::<f64>();
        let k_norm = (x[0] * x[0] / 4.0 + x[1] * x[1]).sqrt();
        let f = ball_bobkov_gauge(&ellipse, p, &x).unwrap();
        assert!(rel(f, p.powf(1.0 / p) * k_norm) < 1e-7, "{x:?} {p}");
        assert!(norm(&x) > 0.0);
    }
}

type Phi = Box<dyn Fn(f64, &[f64]) -> f64 + Sync>;

#[test]
fn brunn_profiles_are_convex_for_admissible_functions() {
    let grid: Vec<f64> = (-8..=8).map(|i| i as f64 * 0.25).collect();
    let cases: Vec<(Phi, f64, usize, Option<f64>)> = vec![
        (Box::new(|t: f64, x: &[f64]| (1.0 + t * t + x[0] * x[0]).sqrt()), 1.0, 1, None),
        (Box::new(|t: f64, x: &[f64]| (t.abs() + x[0].abs()).exp()), 1.0, 1, None),
        (Box::new(|t: f64, x: &[f64]| 1.0 + (t - 0.3).powi(2) + x[0] * x[0] + x[1] * x[1]), 0.5, 2, None),
        (Box::new(|t: f64, x: &[f64]| (1.0 + (t + x[0]).abs() + x[1].abs()).powi(2)), 2.0, 2, None),
        (Box::new(|_: f64, _: &[f64]| 3.0), 1.0, 2, Some(1.0)),
    ];
    for (phi, alpha, n, dom) in cases {
        let p = brunn_profile(|t, x| phi(t, x), alpha, n, &grid, dom).unwrap();
        assert!(p.verdict.midpoint_convex, "{:?}", p.verdict);
    }
}

#[test]
fn rbll_holds_on_the_exhaustive_family() {
    let family = rbll_family();
    let mut worst = f64::NEG_INFINITY;
    for case in &family {
        let r = rbll_check_1d(&case.functions, &case.coeffs, case.half_width).unwrap();
        worst = worst.max(r.lhs - r.rhs);
        assert!(r.holds(), "{case:?}: {r:?}");
    }
    assert!(worst <= 1e-9);
}
