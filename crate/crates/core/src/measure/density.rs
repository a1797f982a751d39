//! The class 𝒫ₙ of probability densities bounded by one.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::radial::fill_uniform_ball;
use super::step::RadialStepFn;
use crate::error::{invalid, Error, Result};
use crate::geom::{norm, unit_volume_ball_radius};

/// Tolerance on `∫f = 1` for densities in 𝒫ₙ.
pub const MASS_TOL: f64 = 1e-9;

/// Iteration cap of the rejection sampler, per point.
pub const REJECTION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PnDensity {
    /// Uniform on `[-1/2, 1/2]ⁿ`.
    UniformCube { dim: usize },
    /// Uniform on `D_n`, the centered Euclidean ball of volume one.
    UniformDn { dim: usize },
    /// Uniform on a unit-volume simplex with centroid at the origin.
    UniformSimplex { dim: usize },
    /// Radial step density `f(x) = a_j` for `r_{j-1} ≤ |x| < r_j`.
    RadialStep { dim: usize, profile: RadialStepFn },
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl PnDensity {
    pub fn uniform_cube(dim: usize) -> Result<Self> {
        Self::validated(Self::UniformCube { dim })
    }

    pub fn uniform_dn(dim: usize) -> Result<Self> {
        Self::validated(Self::UniformDn { dim })
    }

    pub fn uniform_simplex(dim: usize) -> Result<Self> {
        Self::validated(Self::UniformSimplex { dim })
    }

    pub fn radial_step(dim: usize, profile: RadialStepFn) -> Result<Self> {
        Self::validated(Self::RadialStep { dim, profile })
    }

    /// Check dimension, `0 ≤ f ≤ 1` and unit mass.
    pub fn validated(self) -> Result<Self> {
        if self.dim() == 0 {
            return Err(invalid("density dimension must be ≥ 1"));
        }
        if let Self::RadialStep { dim, profile } = &self {
            if profile.sup() > 1.0 {
                return Err(invalid("density exceeds 1: 𝒫ₙ densities are bounded by one"));
            }
            let mass = profile.integral(*dim);
            if (mass - 1.0).abs() > MASS_TOL {
                return Err(invalid(format!("density integrates to {mass}, not 1")));
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::UniformCube { dim }
            | Self::UniformDn { dim }
            | Self::UniformSimplex { dim }
            | Self::RadialStep { dim, .. } => *dim,
        }
    }

    /// Edge scale `s = (n!)^{1/n}` of the simplex `s·conv{0, e_1, …, e_n}`.
    fn simplex_scale(n: usize) -> f64 {
        factorial(n).powf(1.0 / n as f64)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::UniformCube { .. } => {
                if x.iter().all(|v| v.abs() <= 0.5) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::UniformDn { dim } => {
                if norm(x) <= unit_volume_ball_radius(*dim) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::UniformSimplex { dim } => {
                let s = Self::simplex_scale(*dim);
                let c = s / (*dim as f64 + 1.0);
                let y: Vec<f64> = x.iter().map(|v| (v + c) / s).collect();
                if y.iter().all(|&v| v >= 0.0) && y.iter().sum::<f64>() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::RadialStep { profile, .. } => profile.eval(norm(x)),
        }
    }

    /// Radius of a centered ball containing the support.
    pub fn support_radius(&self) -> f64 {
        let n = self.dim();
        match self {
            Self::UniformCube { .. } => 0.5 * (n as f64).sqrt(),
            Self::UniformDn { .. } => unit_volume_ball_radius(n),
            Self::UniformSimplex { .. } => {
                // farthest vertex from the centroid: s·e_i - c·1
                let s = Self::simplex_scale(n);
                let c = s / (n as f64 + 1.0);
                ((s - c).powi(2) + (n as f64 - 1.0) * c * c).sqrt()
            }
            Self::RadialStep { profile, .. } => profile.support_radius(),
        }
    }

    /// Draw one point into `out`.
    pub fn fill<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) -> Result<()> {
        let n = self.dim();
        match self {
            Self::UniformCube { .. } => out.iter_mut().for_each(|v| *v = rng.random::<f64>() - 0.5),
            Self::UniformDn { .. } => fill_uniform_ball(out, unit_volume_ball_radius(n), rng),
            Self::UniformSimplex { .. } => {
                let s = Self::simplex_scale(n);
                let c = s / (n as f64 + 1.0);
                let e0: f64 = rng.sample(Exp1);
                let mut total = e0;
                for v in out.iter_mut() {
                    *v = rng.sample(Exp1);
                    total += *v;
                }
                out.iter_mut().for_each(|v| *v = s * *v / total - c);
            }
            Self::RadialStep { profile, .. } => {
                let radius = profile.support_radius();
                for _ in 0..REJECTION_CAP {
                    fill_uniform_ball(out, radius, rng);
                    let u: f64 = rng.random();
                    if u < profile.eval(norm(out)) {
                        return Ok(());
                    }
                }
                return Err(Error::RejectionCap(REJECTION_CAP));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.dim()];
        self.fill(&mut x, rng)?;
        Ok(x)
    }

    /// Symmetric decreasing rearrangement; uniform bodies of volume one all
    /// rearrange to the indicator of `D_n`.
    pub fn rearranged(&self) -> RadialStepFn {
        let n = self.dim();
        match self {
            Self::RadialStep { profile, .. } => profile.rearranged(n),
            _ => RadialStepFn::ball_indicator(unit_volume_ball_radius(n)).expect("positive radius"),
        }
    }

    /// The rearranged density as a member of 𝒫ₙ.
    pub fn rearranged_density(&self) -> PnDensity {
        match self {
            Self::UniformDn { .. } => self.clone(),
            _ => Self::RadialStep { dim: self.dim(), profile: self.rearranged() },
        }
    }
}

/// Symmetric decreasing rearrangement of a density in 𝒫ₙ.
pub fn rearrange_density(f: &PnDensity) -> RadialStepFn {
    f.rearranged()
}

/// Draw one point from `f`.
pub fn sample_density<R: Rng + ?Sized>(f: &PnDensity, rng: &mut R) -> Result<Vec<f64>> {
    f.sample(rng)
}
