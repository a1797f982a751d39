//! Shadow systems `t ↦ [y_1 + t_1θ ⋯ y_N + t_Nθ] C + r B₂ⁿ` and the profile
//! `t ↦ ν(K_t°)^{-1}`.

use rayon::prelude::*;

use super::profile::{ProfileMethod, ProfileReport};
use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{dot, norm, Body, CoefficientGauge};
use crate::measure::RadialMeasure;
use crate::rng::RngStream;
use crate::volume::{exact_polar_measure, mc_polar_measure};

/// Tolerance of convexity checks on exactly evaluated profiles.
pub const EXACT_PROFILE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ShadowConfig {
    pub theta: Vec<f64>,
    pub base_positions: Vec<Vec<f64>>,
    pub gauge: CoefficientGauge,
    pub rball: f64,
    pub measure: RadialMeasure,
}

impl ShadowConfig {
    pub fn new(
        theta: Vec<f64>,
        base_positions: Vec<Vec<f64>>,
        gauge: CoefficientGauge,
        rball: f64,
        measure: RadialMeasure,
    ) -> Result<Self> {
        let n = theta.len();
        if (norm(&theta) - 1.0).abs() > 1e-12 {
            return Err(invalid("theta must be a unit vector"));
        }
        check_dim(n, measure.dim())?;
        check_dim(gauge.dim(), base_positions.len())?;
        for y in &base_positions {
            check_dim(n, y.len())?;
            if dot(y, &theta).abs() > 1e-12 {
                return Err(invalid("base positions must lie in θ⊥"));
            }
        }
        if !gauge.is_symmetric() {
            return Err(invalid("shadow systems need an origin-symmetric gauge"));
        }
        Ok(Self { theta, base_positions, gauge, rball, measure })
    }

    /// `K_t` for the parameter point `t ∈ ℝ^N`.
    pub fn body(&self, t: &[f64]) -> Result<Body> {
        check_dim(self.base_positions.len(), t.len())?;
        let cols: Vec<Vec<f64>> = self
            .base_positions
            .iter()
            .zip(t)
            .map(|(y, ti)| y.iter().zip(&self.theta).map(|(a, b)| a + ti * b).collect())
            .collect();
        Body::matrix_image(&cols, self.gauge.clone(), self.rball)
    }
}

fn check_symmetric_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 5 {
        return Err(invalid("profile grid needs at least 5 points"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("profile grid must be strictly increasing"));
    }
    let scale = grid.iter().fold(0.0_f64, |m, t| m.max(t.abs())).max(1.0);
    let l = grid.len();
    if (0..l).any(|i| (grid[i] + grid[l - 1 - i]).abs() > 1e-12 * scale) {
        return Err(invalid("profile grid must be symmetric about 0"));
    }
    Ok(())
}

/// Evaluate `g(t) = 1/ν(K_{t·direction}°)` on `t_grid` and check evenness and
/// midpoint convexity.
///
/// The deterministic oracle is used when it covers every grid point
/// (polytopal bodies in the plane, Lebesgue measures in space); otherwise
/// all points are estimated by Monte Carlo on a common random stream, and
/// the checks allow three propagated standard errors.
pub fn shadow_profile(
    cfg: &ShadowConfig,
    direction: &[f64],
    t_grid: &[f64],
    budget: u64,
    stream: RngStream,
) -> Result<ProfileReport> {
    check_dim(cfg.base_positions.len(), direction.len())?;
    if (norm(direction) - 1.0).abs() > 1e-9 {
        return Err(invalid("direction must be a unit vector in ℝ^N"));
    }
    check_symmetric_grid(t_grid)?;
    let bodies: Vec<Body> = t_grid
        .iter()
        .map(|&t| cfg.body(&direction.iter().map(|d| t * d).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let polytopal = cfg.theta.len() <= 3 && bodies.iter().all(|b| b.polar_halfspaces().is_some());
    if polytopal {
        let exact: Vec<Result<f64>> = bodies.par_iter().map(|b| exact_polar_measure(b, &cfg.measure)).collect();
        if exact.iter().all(|v| v.is_ok()) {
            let values: Vec<f64> = exact.into_iter().map(|v| 1.0 / v.unwrap()).collect();
            let n = values.len();
            return Ok(ProfileReport::new(t_grid.to_vec(), values, vec![0.0; n], ProfileMethod::Exact, EXACT_PROFILE_TOL));
        }
    }
    let estimates: Vec<_> = bodies.par_iter().map(|b| mc_polar_measure(b, &cfg.measure, budget, stream)).collect();
    let mut values = Vec::with_capacity(t_grid.len());
    let mut stderr = Vec::with_capacity(t_grid.len());
    for e in estimates {
        let e = e?;
        if !(e.value > 0.0) {
            return Err(Error::Infeasible("zero polar measure on the profile grid".into()));
        }
        values.push(1.0 / e.value);
        stderr.push(e.stderr / (e.value * e.value));
    }
    Ok(ProfileReport::new(t_grid.to_vec(), values, stderr, ProfileMethod::MonteCarlo, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn slab_area(radius: f64, d: f64) -> f64 {
        if d >= radius {
            return PI * radius * radius;
        }
        let cap = radius * radius * (d / radius).acos() - d * (radius * radius - d * d).sqrt();
        PI * radius * radius - 2.0 * cap
    }

    fn grid() -> Vec<f64> {
        (-6..=6).map(|i| i as f64 / 3.0).collect()
    }

    #[test]
    fn segment_shadow_matches_slab_areas() {
        let radius = 2.0;
        let cfg = ShadowConfig::new(
            vec![0.0, 1.0],
            vec![vec![1.0, 0.0]],
            CoefficientGauge::lq(1, 1.0).unwrap(),
            0.0,
            RadialMeasure::lebesgue_ball(2, radius).unwrap(),
        )
        .unwrap();
        let p = shadow_profile(&cfg, &[1.0], &grid(), 1000, RngStream::new(0, 0)).unwrap();
        assert_eq!(p.method, ProfileMethod::Exact);
        for (t, g) in p.grid.iter().zip(&p.values) {
            // K_t = [-(e1 + tθ), e1 + tθ], polar slab of half-width 1/sqrt(1 + t²)
            let truth = 1.0 / slab_area(radius, 1.0 / (1.0 + t * t).sqrt());
            assert!((g - truth).abs() < 1e-12, "{t}: {g} vs {truth}");
        }
        assert!(p.verdict.passed(), "{:?}", p.verdict);
    }

    #[test]
    fn degenerate_base_is_convex_in_closed_form() {
        // all y_i = 0: K_t is the segment [-|t|_1θ, |t|_1θ] up to the gauge
        let cfg = ShadowConfig::new(
            vec![1.0, 0.0],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            CoefficientGauge::lq(2, 1.0).unwrap(),
            0.0,
            RadialMeasure::lebesgue_ball(2, 1.0).unwrap(),
        )
        .unwrap();
        let dir = [0.6, 0.8];
        let p = shadow_profile(&cfg, &dir, &grid(), 1000, RngStream::new(0, 0)).unwrap();
        for (t, g) in p.grid.iter().zip(&p.values) {
            let h = 0.8 * t.abs(); // l_∞ norm of t·dir
            let d = if h > 0.0 { 1.0 / h } else { f64::INFINITY };
            assert!((g - 1.0 / slab_area(1.0, d)).abs() < 1e-12);
        }
        assert!(p.verdict.passed() && p.verdict.worst_violation <= 1e-9);
    }

    #[test]
    fn monte_carlo_profile_matches_exact_verdict() {
        let theta = vec![0.0, 1.0];
        let base = vec![vec![1.0, 0.0], vec![-0.4, 0.0], vec![0.7, 0.0]];
        let measure = RadialMeasure::lebesgue_ball(2, 2.0).unwrap();
        let exact_cfg =
            ShadowConfig::new(theta, base, CoefficientGauge::lq(3, 1.0).unwrap(), 0.0, measure).unwrap();
        let dir = [0.48, 0.6, -0.64];
        let g: Vec<f64> = (-3..=3).map(|i| i as f64 * 0.5).collect();
        let exact = shadow_profile(&exact_cfg, &dir, &g, 0, RngStream::new(0, 0)).unwrap();
        assert_eq!(exact.method, ProfileMethod::Exact);
        assert!(exact.verdict.passed());
        // r > 0 forces Monte Carlo on essentially the same bodies
        let mc_cfg = ShadowConfig { rball: 1e-9, ..exact_cfg };
        let mc = shadow_profile(&mc_cfg, &dir, &g, 100_000, RngStream::new(77, 0)).unwrap();
        assert_eq!(mc.method, ProfileMethod::MonteCarlo);
        assert_eq!(mc.verdict.passed(), exact.verdict.passed());
        for i in 0..g.len() {
            assert!((mc.values[i] - exact.values[i]).abs() < 4.0 * mc.stderr[i] + 1e-6);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let m = RadialMeasure::lebesgue_ball(2, 1.0).unwrap();
        let g = CoefficientGauge::lq(1, 1.0).unwrap();
        assert!(ShadowConfig::new(vec![0.0, 1.0], vec![vec![1.0, 0.5]], g.clone(), 0.0, m.clone()).is_err());
        let cfg = ShadowConfig::new(vec![0.0, 1.0], vec![vec![1.0, 0.0]], g, 0.0, m).unwrap();
        assert!(shadow_profile(&cfg, &[1.0], &[-1.0, 0.0, 1.0], 10, RngStream::new(0, 0)).is_err());
        assert!(shadow_profile(&cfg, &[1.0], &[-2.0, -1.0, 0.0, 1.0, 3.0], 10, RngStream::new(0, 0)).is_err());
    }
}
