//! Estimators of `ν(K°)`: Monte Carlo with honest standard errors, the
//! layer-cake reduction to balls, and exact low-dimensional oracles.

mod accum;
mod exact;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use accum::{chunk_count, run_chunks, Accum, CHUNK_SIZE};
pub use exact::{exact_polar_measure, exact_polar_volume_crosspoly, polar_polygon, radial_polygon_measure};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{norm, polar_enclosing_radius, polytope, unit_ball_volume, Body, DirectionGrid, PolarRadius};
use crate::measure::{fill_uniform_ball, RadialKind, RadialMeasure, RadialSampler};
use crate::quad::{integrate, Domain, QuadOptions};
use crate::rng::RngStream;

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub streams: u64,
}

impl Estimate {
    /// A value known without sampling error.
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, samples: 0, seed: 0, streams: 0 }
    }

    fn from_accum(acc: &Accum, stream: RngStream) -> Self {
        Self {
            value: acc.mean,
            stderr: acc.stderr(),
            samples: acc.count,
            seed: stream.seed,
            streams: chunk_count(acc.count),
        }
    }
}

/// How the estimator draws its points.
#[derive(Clone, Debug)]
pub enum SamplingPlan {
    /// Uniform points of `radius · B₂ⁿ ⊇ K° ∩ supp ρ`.
    UniformBall { radius: f64 },
    /// Points of `ν / ν(ℝⁿ)`.
    Measure(RadialSampler),
}

fn cached_grid(n: usize) -> Option<&'static DirectionGrid> {
    static GRIDS: [OnceLock<DirectionGrid>; 2] = [OnceLock::new(), OnceLock::new()];
    match n {
        2 | 3 => Some(GRIDS[n - 2].get_or_init(|| DirectionGrid::default_for(n).expect("lattice exists"))),
        _ => None,
    }
}

/// Rigorous radius of a centered ball containing `K°`.
pub fn polar_radius(body: &Body) -> Result<PolarRadius> {
    let n = body.dim();
    if n <= 3 {
        if let Some(hs) = body.polar_halfspaces() {
            if !polytope::is_bounded(n, &hs)? {
                return Ok(PolarRadius::Unbounded);
            }
            let verts = polytope::enumerate_vertices(n, &hs)?;
            let r = verts.iter().map(|v| norm(v)).fold(0.0, f64::max);
            return Ok(PolarRadius::Bounded(r * (1.0 + 1e-12)));
        }
    }
    if n == 1 {
        let h = [body.support_value(&[1.0])?, body.support_value(&[-1.0])?];
        let m = h[0].min(h[1]);
        return Ok(if m > 0.0 { PolarRadius::Bounded(1.0 / m) } else { PolarRadius::Unbounded });
    }
    match cached_grid(n) {
        Some(grid) => polar_enclosing_radius(body, grid),
        None => {
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            polar_enclosing_radius(body, &DirectionGrid::from_directions(n, &[e])?)
        }
    }
}

/// Choose the sampling branch: uniform on an enclosing ball of the polar
/// (cut down to the support of `ρ`), else `ν`-sampling for finite mass.
pub fn sampling_plan(body: &Body, m: &RadialMeasure) -> Result<SamplingPlan> {
    check_dim(body.dim(), m.dim())?;
    // surface unsupported membership oracles now rather than in the hot loop
    let mut probe = vec![0.0; body.dim()];
    probe[0] = 1.0;
    body.support_value(&probe)?;
    let support = m.support_radius();
    let radius = match polar_radius(body)? {
        PolarRadius::Bounded(r) => r.min(support),
        PolarRadius::Unbounded => support,
    };
    if radius.is_finite() {
        return Ok(SamplingPlan::UniformBall { radius });
    }
    match RadialSampler::new(m) {
        Ok(s) => Ok(SamplingPlan::Measure(s)),
        Err(Error::InfiniteMass(_)) => Err(Error::Infeasible(
            "polar body is unbounded and the measure has infinite mass; ν(K°) cannot be estimated with error bars"
                .into(),
        )),
        Err(e) => Err(e),
    }
}

fn check_budget(budget: u64) -> Result<()> {
    if budget < 2 {
        return Err(invalid("budget must be at least 2 samples"));
    }
    Ok(())
}

/// Monte Carlo estimate of `ν(K°)`.
pub fn mc_polar_measure(body: &Body, m: &RadialMeasure, budget: u64, stream: RngStream) -> Result<Estimate> {
    check_budget(budget)?;
    let plan = sampling_plan(body, m)?;
    let n = body.dim();
    let acc = match &plan {
        SamplingPlan::UniformBall { radius } => {
            let scale = unit_ball_volume(n) * radius.powi(n as i32);
            let radius = *radius;
            run_chunks(budget, stream, |rng, len, acc| {
                let mut y = vec![0.0; n];
                for _ in 0..len {
                    fill_uniform_ball(&mut y, radius, rng);
                    let v = if body.polar_contains_fast(&y) { scale * m.rho(norm(&y)) } else { 0.0 };
                    acc.push(v);
                }
            })
        }
        SamplingPlan::Measure(sampler) => {
            let mass = sampler.total_mass();
            run_chunks(budget, stream, |rng, len, acc| {
                let mut y = vec![0.0; n];
                for _ in 0..len {
                    sampler.fill(&mut y, rng);
                    acc.push(if body.polar_contains_fast(&y) { mass } else { 0.0 });
                }
            })
        }
    };
    Ok(Estimate::from_accum(&acc, stream))
}

/// Levels used when none are given: 64 geometric levels from `ρ(0)` down to
/// `10⁻⁶ρ(0)` merged with 64 uniform levels in `(0, ρ(0)]`; step profiles
/// use their own values, indicators a single level.
pub fn default_level_grid(m: &RadialMeasure) -> Vec<f64> {
    let top = m.rho_max();
    let mut levels: Vec<f64> = match m.kind() {
        RadialKind::LebesgueRestricted { .. } => vec![1.0],
        RadialKind::Step(f) => f.values().iter().copied().filter(|&v| v > 0.0).collect(),
        _ => (0..64)
            .map(|i| top * 1e-6f64.powf(i as f64 / 63.0))
            .chain((1..=64).map(|k| top * k as f64 / 64.0))
            .collect(),
    };
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();
    levels
}

/// Layer-cake estimate and its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerCakeEstimate {
    pub estimate: Estimate,
    pub levels: usize,
    /// Too few levels to resolve a continuously varying `ρ`.
    pub low_accuracy: bool,
}

/// Estimate `ν(K°) = ∫₀^{ρ(0)} |K° ∩ R(t)B₂ⁿ| dt` with every `|K° ∩ R(t)B|`
/// read off one shared sample.
///
/// Between consecutive levels `|K° ∩ R(t)B|` is interpolated linearly in
/// the ball volume `|R(t)B|`, integrated exactly in `t`; the resulting formula
/// is linear in the per-level indicators, so each sample carries a fixed
/// weight and the standard error is exact. Below the lowest level the last
/// slice is extended down to `t = 0`.
pub fn layer_cake_measure(
    body: &Body,
    m: &RadialMeasure,
    level_grid: Option<&[f64]>,
    budget: u64,
    stream: RngStream,
) -> Result<LayerCakeEstimate> {
    check_budget(budget)?;
    check_dim(body.dim(), m.dim())?;
    let n = body.dim();
    let top = m.rho_max();
    if !top.is_finite() {
        return Err(invalid("layer cake needs a finite ρ(0)"));
    }
    if !m.condnu2().decreasing {
        return Err(invalid("layer cake needs a decreasing ρ"));
    }
    let mut levels: Vec<f64> = match level_grid {
        Some(g) => g.to_vec(),
        None => default_level_grid(m),
    };
    if levels.is_empty() || levels.iter().any(|&t| !(t > 0.0 && t <= top * (1.0 + 1e-12))) {
        return Err(invalid("levels must lie in (0, ρ(0)]"));
    }
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();
    let radii: Vec<f64> = levels.iter().map(|&t| m.level_radius(t)).collect();
    let lowest = *radii.last().unwrap();
    let radius = match polar_radius(body)? {
        PolarRadius::Bounded(r) => r.min(lowest),
        PolarRadius::Unbounded => lowest,
    };
    if !radius.is_finite() {
        return Err(Error::Infeasible(
            "polar body is unbounded and the lowest level set is the whole space".into(),
        ));
    }
    let omega = unit_ball_volume(n);
    let capped = |r: f64| omega * r.min(radius).powi(n as i32);
    let vols: Vec<f64> = radii.iter().map(|&r| capped(r)).collect();
    // weight of level j in the quadrature over t
    let mut weights = vec![0.0; levels.len()];
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-300, ..QuadOptions::default() };
    for j in 0..levels.len() - 1 {
        let (hi, lo) = (levels[j], levels[j + 1]);
        let dt = hi - lo;
        let dv = vols[j + 1] - vols[j];
        if dv <= 0.0 {
            weights[j] += dt;
            continue;
        }
        let integral = integrate(|t| capped(m.level_radius(t)), Domain::Finite(lo, hi), &opts)?.value;
        let alpha = ((integral - vols[j] * dt) / dv).clamp(0.0, dt);
        weights[j] += dt - alpha;
        weights[j + 1] += alpha;
    }
    *weights.last_mut().unwrap() += levels[levels.len() - 1];
    // value = Σ_j w_j |K° ∩ R_j B|, so sample Y contributes Σ_{j : R_j ≥ |Y|} w_j
    let mut suffix = weights.clone();
    for j in (0..suffix.len() - 1).rev() {
        suffix[j] += suffix[j + 1];
    }
    let scale = omega * radius.powi(n as i32);
    let acc = run_chunks(budget, stream, |rng, len, acc| {
        let mut y = vec![0.0; n];
        for _ in 0..len {
            fill_uniform_ball(&mut y, radius, rng);
            let v = if body.polar_contains_fast(&y) {
                let s = norm(&y);
                let j = radii.partition_point(|&r| r < s);
                if j < suffix.len() {
                    scale * suffix[j]
                } else {
                    0.0
                }
            } else {
                0.0
            };
            acc.push(v);
        }
    });
    let continuous = matches!(m.kind(), RadialKind::GaussianLike { .. } | RadialKind::PowerKernel { .. });
    Ok(LayerCakeEstimate {
        estimate: Estimate::from_accum(&acc, stream),
        levels: levels.len(),
        low_accuracy: continuous && levels.len() < 16,
    })
}
