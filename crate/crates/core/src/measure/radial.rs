//! Radial measures `dν = ρ(|x|) dx`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use super::step::RadialStepFn;
use crate::error::{invalid, Error, Result};
use crate::geom::unit_ball_volume;
use crate::quad::{integrate, Domain, QuadOptions};

/// Shape of the radial profile `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RadialKind {
    /// `ρ = 1` on `[0, R]`, zero beyond; `R = +∞` is plain Lebesgue measure.
    LebesgueRestricted { radius: f64 },
    /// `ρ(t) = exp(-t²/2σ²)`.
    GaussianLike { sigma: f64 },
    /// `ρ = k^{-(n+1)}` for a nondecreasing piecewise-linear `k` given as
    /// `(t, k(t))` knots starting at `t = 0`, extended linearly past the
    /// last knot.
    PowerKernel { table: Vec<(f64, f64)> },
    /// Arbitrary nonnegative radial step profile.
    Step(RadialStepFn),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    dim: usize,
    kind: RadialKind,
}

/// Outcome of the grid check for the two measure classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condnu2Report {
    /// `ρ` nonincreasing on the grid.
    pub decreasing: bool,
    /// `ρ^{-1/(n+1)}` convex on the grid (zeros of `ρ` map to `+∞`).
    pub condnu2: bool,
}

/// Relative tolerance of the grid convexity test.
pub const CONVEXITY_REL_TOL: f64 = 1e-10;

impl RadialMeasure {
    pub fn new(dim: usize, kind: RadialKind) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("measure dimension must be ≥ 1"));
        }
        match &kind {
            RadialKind::LebesgueRestricted { radius } => {
                if !(*radius > 0.0) {
                    return Err(invalid("measure.R must be > 0"));
                }
            }
            RadialKind::GaussianLike { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(invalid("measure.sigma must be finite and > 0"));
                }
            }
            RadialKind::PowerKernel { table } => {
                if table.len() < 2 {
                    return Err(invalid("measure.k_table needs at least two knots"));
                }
                if table[0].0 != 0.0 {
                    return Err(invalid("measure.k_table must start at t = 0"));
                }
                if table.iter().any(|&(t, k)| !(t.is_finite() && k.is_finite())) {
                    return Err(invalid("measure.k_table entries must be finite"));
                }
                if table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(invalid("measure.k_table abscissae must be strictly increasing"));
                }
                if table.windows(2).any(|w| w[1].1 < w[0].1) {
                    return Err(invalid("measure.k_table must be nondecreasing (ρ decreasing)"));
                }
                if !(table[0].1 > 0.0) {
                    // ρ(0) = +∞ with ρ ~ t^{-(n+1)} makes every neighbourhood of 0 infinite
                    return Err(invalid("measure.k_table must have k(0) > 0"));
                }
            }
            RadialKind::Step(_) => {}
        }
        Ok(Self { dim, kind })
    }

    pub fn lebesgue(dim: usize) -> Self {
        Self { dim, kind: RadialKind::LebesgueRestricted { radius: f64::INFINITY } }
    }

    pub fn lebesgue_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::new(dim, RadialKind::LebesgueRestricted { radius })
    }

    pub fn gaussian(dim: usize, sigma: f64) -> Result<Self> {
        Self::new(dim, RadialKind::GaussianLike { sigma })
    }

    pub fn power_kernel(dim: usize, table: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(dim, RadialKind::PowerKernel { table })
    }

    pub fn step(dim: usize, profile: RadialStepFn) -> Result<Self> {
        Self::new(dim, RadialKind::Step(profile))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RadialKind {
        &self.kind
    }

    /// Same profile in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(dim, self.kind.clone())
    }

    fn kernel(table: &[(f64, f64)], t: f64) -> f64 {
        let j = table.partition_point(|&(s, _)| s <= t);
        let (a, b) = if j >= table.len() {
            (table[table.len() - 2], table[table.len() - 1])
        } else {
            (table[j - 1], table[j])
        };
        a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
    }

    /// `ρ(t)` for `t ≥ 0`.
    pub fn rho(&self, t: f64) -> f64 {
        match &self.kind {
            RadialKind::LebesgueRestricted { radius } => {
                if t <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            RadialKind::GaussianLike { sigma } => (-t * t / (2.0 * sigma * sigma)).exp(),
            RadialKind::PowerKernel { table } => Self::kernel(table, t).powi(-(self.dim as i32 + 1)),
            RadialKind::Step(f) => f.eval(t),
        }
    }

    /// `ρ(0)`; for a step profile the supremum, which bounds the layer range.
    pub fn rho_max(&self) -> f64 {
        match &self.kind {
            RadialKind::Step(f) => f.sup(),
            _ => self.rho(0.0),
        }
    }

    /// Radius outside which `ρ` vanishes (`+∞` if it never does).
    pub fn support_radius(&self) -> f64 {
        match &self.kind {
            RadialKind::LebesgueRestricted { radius } => *radius,
            RadialKind::Step(f) => f.support_radius(),
            _ => f64::INFINITY,
        }
    }

    /// `ν(ℝⁿ)`, or `Err(InfiniteMass)`.
    pub fn total_mass(&self) -> Result<f64> {
        let m = self.ball_mass(f64::INFINITY)?;
        if m.is_finite() {
            Ok(m)
        } else {
            Err(Error::InfiniteMass(format!("{:?} has infinite total mass", self.kind)))
        }
    }

    pub fn has_finite_mass(&self) -> bool {
        self.total_mass().is_ok()
    }

    /// `ν(R B₂ⁿ)`.
    pub fn ball_mass(&self, radius: f64) -> Result<f64> {
        let n = self.dim;
        let omega = unit_ball_volume(n);
        Ok(match &self.kind {
            RadialKind::LebesgueRestricted { radius: big } => {
                let r = radius.min(*big);
                if r.is_infinite() {
                    f64::INFINITY
                } else {
                    omega * r.powi(n as i32)
                }
            }
            RadialKind::GaussianLike { sigma } => {
                let full = (2.0 * PI * sigma * sigma).powf(n as f64 / 2.0);
                if radius.is_infinite() {
                    full
                } else {
                    full * gamma_lr(n as f64 / 2.0, radius * radius / (2.0 * sigma * sigma))
                }
            }
            RadialKind::Step(f) => {
                let mut s = 0.0;
                let mut inner = 0.0;
                for (&b, &v) in f.breaks().iter().zip(f.values()) {
                    let outer = b.min(radius);
                    if outer > inner {
                        s += v * omega * (outer.powi(n as i32) - inner.powi(n as i32));
                    }
                    inner = b;
                }
                s
            }
            RadialKind::PowerKernel { table } => {
                let last = table[table.len() - 1];
                let prev = table[table.len() - 2];
                if radius.is_infinite() && last.1 == prev.1 {
                    return Ok(f64::INFINITY);
                }
                self.power_radial_integral(table, 0.0, radius)? * n as f64 * omega
            }
        })
    }

    /// `∫_a^b ρ(t) t^{n-1} dt` for a power kernel, split at the knots.
    fn power_radial_integral(&self, table: &[(f64, f64)], a: f64, b: f64) -> Result<f64> {
        let n = self.dim as i32;
        let f = |t: f64| Self::kernel(table, t).powi(-(n + 1)) * t.powi(n - 1);
        let opts = QuadOptions { rel_tol: 1e-11, abs_tol: 0.0, ..QuadOptions::default() };
        let mut knots: Vec<f64> = table.iter().map(|p| p.0).filter(|&t| t > a && t < b).collect();
        knots.insert(0, a);
        let mut s = 0.0;
        for w in knots.windows(2) {
            s += integrate(f, Domain::Finite(w[0], w[1]), &opts)?.value;
        }
        let from = *knots.last().unwrap();
        s += if b.is_infinite() {
            integrate(f, Domain::Above(from), &opts)?.value
        } else {
            integrate(f, Domain::Finite(from, b), &opts)?.value
        };
        Ok(s)
    }

    /// Radius of the level ball `{ρ ≥ t}` for `0 < t ≤ ρ(0)` (decreasing `ρ`).
    pub fn level_radius(&self, t: f64) -> f64 {
        let n = self.dim as f64;
        match &self.kind {
            RadialKind::LebesgueRestricted { radius } => {
                if t <= 1.0 {
                    *radius
                } else {
                    0.0
                }
            }
            RadialKind::GaussianLike { sigma } => {
                if t >= 1.0 {
                    0.0
                } else {
                    sigma * (2.0 * (1.0 / t).ln()).sqrt()
                }
            }
            RadialKind::Step(f) => {
                f.values().iter().rposition(|&v| v >= t).map_or(0.0, |j| f.breaks()[j])
            }
            RadialKind::PowerKernel { table } => {
                let c = t.powf(-1.0 / (n + 1.0));
                if c < table[0].1 {
                    return 0.0;
                }
                for w in table.windows(2) {
                    if c < w[1].1 {
                        return w[0].0 + (c - w[0].1) / (w[1].1 - w[0].1) * (w[1].0 - w[0].0);
                    }
                }
                let (p, q) = (table[table.len() - 2], table[table.len() - 1]);
                let slope = (q.1 - p.1) / (q.0 - p.0);
                if slope > 0.0 {
                    q.0 + (c - q.1) / slope
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Grid check of the decreasing and `ρ^{-1/(n+1)}`-convex classes.
    pub fn check_condnu2(&self, grid: &[f64]) -> Result<Condnu2Report> {
        if grid.len() < 3 {
            return Err(invalid("condnu2 grid needs at least 3 points"));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("condnu2 grid must be nonnegative and strictly increasing"));
        }
        let rho: Vec<f64> = grid.iter().map(|&t| self.rho(t)).collect();
        let decreasing = rho.windows(2).all(|w| w[1] <= w[0]);
        let e = -1.0 / (self.dim as f64 + 1.0);
        let g: Vec<f64> = rho.iter().map(|&r| if r > 0.0 { r.powf(e) } else { f64::INFINITY }).collect();
        let mut convex = true;
        for i in 0..grid.len() - 2 {
            let (t0, t1, t2) = (grid[i], grid[i + 1], grid[i + 2]);
            let (g0, g1, g2) = (g[i], g[i + 1], g[i + 2]);
            let ok = if g1.is_infinite() {
                // the effective domain of a convex function is an interval
                g0.is_infinite() || g2.is_infinite()
            } else if g0.is_infinite() || g2.is_infinite() {
                true
            } else {
                let chord = ((t2 - t1) * g0 + (t1 - t0) * g2) / (t2 - t0);
                g1 <= chord + CONVEXITY_REL_TOL * g0.abs().max(g1.abs()).max(g2.abs())
            };
            convex &= ok;
        }
        Ok(Condnu2Report { decreasing, condnu2: decreasing && convex })
    }

    /// Default grid: 257 points spanning the scale of the profile.
    pub fn default_condnu2_grid(&self) -> Vec<f64> {
        let scale = match &self.kind {
            RadialKind::LebesgueRestricted { radius } if radius.is_finite() => 2.0 * radius,
            RadialKind::LebesgueRestricted { .. } => 10.0,
            RadialKind::GaussianLike { sigma } => 8.0 * sigma,
            RadialKind::PowerKernel { table } => 2.0 * table[table.len() - 1].0,
            RadialKind::Step(f) => 1.5 * f.outer_radius(),
        };
        let mut grid: Vec<f64> = (0..=256).map(|i| scale * i as f64 / 256.0).collect();
        if let RadialKind::Step(f) = &self.kind {
            // make sure every piece is visited
            for (j, &b) in f.breaks().iter().enumerate() {
                let a = if j == 0 { 0.0 } else { f.breaks()[j - 1] };
                grid.push(0.5 * (a + b));
            }
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            grid.dedup();
        }
        grid
    }

    /// `check_condnu2` on [`Self::default_condnu2_grid`].
    pub fn condnu2(&self) -> Condnu2Report {
        self.check_condnu2(&self.default_condnu2_grid()).expect("default grid is valid")
    }
}

/// Fill `out` with a uniform direction on the sphere.
pub(crate) fn fill_direction<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    loop {
        let mut s = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            s += *v * *v;
        }
        if s > 1e-300 {
            let inv = 1.0 / s.sqrt();
            out.iter_mut().for_each(|v| *v *= inv);
            return;
        }
    }
}

/// Fill `out` with a uniform point of `radius · B₂ⁿ`.
pub fn fill_uniform_ball<R: Rng + ?Sized>(out: &mut [f64], radius: f64, rng: &mut R) {
    fill_direction(out, rng);
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / out.len() as f64);
    out.iter_mut().for_each(|v| *v *= r);
}

/// Uniform point of `radius · B₂ⁿ`: uniform direction times `R U^{1/n}`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Vec<f64> {
    let mut x = vec![0.0; n];
    fill_uniform_ball(&mut x, radius, rng);
    x
}

/// Number of knots of the numeric inverse-CDF table.
pub const INVERSE_CDF_POINTS: usize = 4096;

#[derive(Clone, Debug)]
enum SamplerKind {
    Ball(f64),
    Gaussian(f64),
    Annuli { cum: Vec<f64>, inner: Vec<f64>, outer: Vec<f64> },
    Table { t: Vec<f64>, cdf: Vec<f64> },
}

/// Exact or tabulated sampler for `ν / ν(ℝⁿ)`.
#[derive(Clone, Debug)]
pub struct RadialSampler {
    dim: usize,
    total_mass: f64,
    kind: SamplerKind,
}

impl RadialSampler {
    pub fn new(m: &RadialMeasure) -> Result<Self> {
        let total_mass = m.total_mass()?;
        let n = m.dim;
        let kind = match &m.kind {
            RadialKind::LebesgueRestricted { radius } => SamplerKind::Ball(*radius),
            RadialKind::GaussianLike { sigma } => SamplerKind::Gaussian(*sigma),
            RadialKind::Step(f) => {
                let mut cum = Vec::new();
                let mut inner = Vec::new();
                let mut outer = Vec::new();
                let mut acc = 0.0;
                for j in 0..f.breaks().len() {
                    let w = f.values()[j] * f.annulus_volume(j, n);
                    if w > 0.0 {
                        acc += w;
                        cum.push(acc);
                        inner.push(if j == 0 { 0.0 } else { f.breaks()[j - 1] });
                        outer.push(f.breaks()[j]);
                    }
                }
                if cum.is_empty() {
                    return Err(invalid("radial step measure has zero mass"));
                }
                SamplerKind::Annuli { cum, inner, outer }
            }
            RadialKind::PowerKernel { table } => {
                let scale = table[table.len() - 1].0.max(table[0].1 / 1e3);
                let (lo, hi) = (scale * 1e-6, scale * 1e12);
                let count = INVERSE_CDF_POINTS - 1;
                let mut t = Vec::with_capacity(INVERSE_CDF_POINTS);
                t.push(0.0);
                for i in 0..count {
                    t.push(lo * (hi / lo).powf(i as f64 / (count - 1) as f64));
                }
                let mut cdf = Vec::with_capacity(t.len());
                cdf.push(0.0);
                let mut acc = 0.0;
                for w in t.windows(2) {
                    acc += m.power_radial_integral(table, w[0], w[1])?;
                    cdf.push(acc);
                }
                cdf.iter_mut().for_each(|c| *c /= acc);
                SamplerKind::Table { t, cdf }
            }
        };
        Ok(Self { dim: n, total_mass, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Draw one point of `ν / ν(ℝⁿ)` into `out`.
    pub fn fill<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        let n = self.dim as f64;
        match &self.kind {
            SamplerKind::Ball(radius) => fill_uniform_ball(out, *radius, rng),
            SamplerKind::Gaussian(sigma) => {
                out.iter_mut().for_each(|v| *v = sigma * rng.sample::<f64, _>(StandardNormal));
            }
            SamplerKind::Annuli { cum, inner, outer } => {
                let u: f64 = rng.random::<f64>() * cum[cum.len() - 1];
                let j = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
                let v: f64 = rng.random();
                let (a, b) = (inner[j].powf(n), outer[j].powf(n));
                let r = (a + v * (b - a)).powf(1.0 / n);
                fill_direction(out, rng);
                out.iter_mut().for_each(|x| *x *= r);
            }
            SamplerKind::Table { t, cdf } => {
                let u: f64 = rng.random();
                let j = cdf.partition_point(|&c| c <= u).clamp(1, cdf.len() - 1);
                let span = cdf[j] - cdf[j - 1];
                let r = if span > 0.0 {
                    t[j - 1] + (u - cdf[j - 1]) / span * (t[j] - t[j - 1])
                } else {
                    t[j]
                };
                fill_direction(out, rng);
                out.iter_mut().for_each(|x| *x *= r);
            }
        }
    }
}

/// One draw from `ν / ν(ℝⁿ)` together with `ν(ℝⁿ)`.
pub fn sample_radial_measure<R: Rng + ?Sized>(m: &RadialMeasure, rng: &mut R) -> Result<(Vec<f64>, f64)> {
    let sampler = RadialSampler::new(m)?;
    let mut x = vec![0.0; m.dim];
    sampler.fill(&mut x, rng);
    Ok((x, sampler.total_mass))
}
