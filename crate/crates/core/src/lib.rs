//! Polar bodies of random convex sets.
//!
//! Bodies are matrix images `[x_1 ... x_N] C + r B_2^n` of a coefficient
//! gauge, measured by radial measures `dν = ρ(|x|) dx`. The crate provides
//! the support and polar oracles ([`geom`]), radial measures, bounded
//! densities and samplers ([`measure`]), Monte Carlo and exact estimators of
//! `ν(K°)` ([`volume`]), Busemann-type gauges and shadow-system profiles
//! ([`analysis`]) and the reproducible experiments built on them
//! ([`experiments`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod geom;
pub mod measure;
pub mod quad;
pub mod volume;
pub mod rng;

pub use error::{Error, Result};
pub use geom::{Body, CoefficientGauge, DirectionGrid, PolarRadius};
pub use measure::{PnDensity, RadialMeasure, RadialStepFn};
pub use rng::RngStream;
pub use volume::Estimate;
