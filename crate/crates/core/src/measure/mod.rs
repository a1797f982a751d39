//! Radial measures, the density class 𝒫ₙ, symmetric decreasing
//! rearrangement and the samplers used by every estimator.

mod density;
mod oracle;
mod radial;
mod step;

pub use density::{rearrange_density, sample_density, PnDensity, MASS_TOL, REJECTION_CAP};
pub use oracle::{
    nu_plus_hyperplane, orthonormal_complement, BodyIndicator, BoxIndicator, DensityOracle, FnDensity,
    GaussianFactor, HYPERPLANE_REL_TOL,
};
pub use radial::{
    fill_uniform_ball, sample_radial_measure, sample_uniform_ball, Condnu2Report, RadialKind, RadialMeasure,
    RadialSampler, CONVEXITY_REL_TOL, INVERSE_CDF_POINTS,
};
pub use step::{RadialStepFn, StepFn1d};
