//! Fixtures shared by the benchmarks.

use rand::Rng;
use randpolar_core::geom::CoefficientGauge;
use randpolar_core::{Body, Result, RngStream};

/// `count` seeded points uniform in `[-1, 1]ⁿ`.
pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::from_seed(seed).named("bench-points").rng();
    (0..count).map(|_| (0..n).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect()).collect()
}

/// `[x_1 ⋯ x_N] B_q^N` for seeded points.
pub fn lq_image(n: usize, count: usize, q: f64, seed: u64) -> Result<Body> {
    Body::matrix_image(&random_points(n, count, seed), CoefficientGauge::lq(count, q)?, 0.0)
}
