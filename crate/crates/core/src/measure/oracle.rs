//! Density oracles on ℝⁿ and their hyperplane measures.

use std::sync::Arc;

use super::radial::RadialMeasure;
use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{dot, norm, Body};
use crate::quad::{integrate, try_integrate, Domain, QuadOptions};

/// Pointwise evaluable nonnegative function on ℝⁿ.
pub trait DensityOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
    /// Radius of a centered ball containing the support, if known.
    fn support_radius(&self) -> Option<f64> {
        None
    }
}

/// `exp(-|x|²/2σ²)`.
#[derive(Clone, Debug)]
pub struct GaussianFactor {
    pub dim: usize,
    pub sigma: f64,
}

impl DensityOracle for GaussianFactor {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (-dot(x, x) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// `ρ(|x|)` of a radial measure.
impl DensityOracle for RadialMeasure {
    fn dim(&self) -> usize {
        RadialMeasure::dim(self)
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.rho(norm(x))
    }
    fn support_radius(&self) -> Option<f64> {
        Some(RadialMeasure::support_radius(self)).filter(|r| r.is_finite())
    }
}

/// Indicator of the axis-parallel box `∏[lo_i, hi_i]`.
#[derive(Clone, Debug)]
pub struct BoxIndicator {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxIndicator {
    pub fn symmetric(dim: usize, half: f64) -> Self {
        Self { lo: vec![-half; dim], hi: vec![half; dim] }
    }
}

impl DensityOracle for BoxIndicator {
    fn dim(&self) -> usize {
        self.lo.len()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        let inside = x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| *a <= *v && *v <= *b);
        if inside {
            1.0
        } else {
            0.0
        }
    }
    fn support_radius(&self) -> Option<f64> {
        Some(self.lo.iter().zip(&self.hi).map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt())
    }
}

/// Indicator of a body with a membership oracle.
#[derive(Clone, Debug)]
pub struct BodyIndicator {
    body: Body,
}

impl BodyIndicator {
    pub fn new(body: Body) -> Result<Self> {
        body.contains(&vec![0.0; body.dim()])?;
        Ok(Self { body })
    }
}

impl DensityOracle for BodyIndicator {
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        if self.body.contains(x).unwrap_or(false) {
            1.0
        } else {
            0.0
        }
    }
    fn support_radius(&self) -> Option<f64> {
        Some(self.body.circumradius_bound()).filter(|r| r.is_finite())
    }
}

type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Closure-backed oracle.
#[derive(Clone)]
pub struct FnDensity {
    dim: usize,
    f: DensityFn,
    support: Option<f64>,
}

impl FnDensity {
    pub fn new(dim: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, f: Arc::new(f), support: None }
    }

    pub fn with_support_radius(mut self, radius: f64) -> Self {
        self.support = Some(radius);
        self
    }
}

impl std::fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnDensity").field("dim", &self.dim).field("support", &self.support).finish()
    }
}

impl DensityOracle for FnDensity {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn support_radius(&self) -> Option<f64> {
        self.support
    }
}

/// Relative tolerance of hyperplane quadrature.
pub const HYPERPLANE_REL_TOL: f64 = 1e-7;

/// Orthonormal basis of `z⊥` for `n ∈ {2, 3}`.
pub fn orthonormal_complement(z: &[f64]) -> Result<Vec<Vec<f64>>> {
    let r = norm(z);
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("normal vector must be nonzero and finite"));
    }
    let u: Vec<f64> = z.iter().map(|v| v / r).collect();
    match u.len() {
        2 => Ok(vec![vec![-u[1], u[0]]]),
        3 => {
            // start from the axis least aligned with u
            let k = (0..3).min_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap()).unwrap();
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let d = dot(&e, &u);
            let mut v1: Vec<f64> = (0..3).map(|i| e[i] - d * u[i]).collect();
            let m = norm(&v1);
            v1.iter_mut().for_each(|x| *x /= m);
            let v2 = vec![u[1] * v1[2] - u[2] * v1[1], u[2] * v1[0] - u[0] * v1[2], u[0] * v1[1] - u[1] * v1[0]];
            Ok(vec![v1, v2])
        }
        n => Err(Error::Unsupported(format!("hyperplane quadrature in dimension {n}"))),
    }
}

/// `ν⁺(z⊥) = ∫_{z⊥} ψ` by adaptive quadrature (nested in the plane for n = 3).
pub fn nu_plus_hyperplane(psi: &dyn DensityOracle, z: &[f64]) -> Result<f64> {
    check_dim(psi.dim(), z.len())?;
    let basis = orthonormal_complement(z)?;
    let opts = QuadOptions::with_rel_tol(HYPERPLANE_REL_TOL);
    let reach = psi.support_radius();
    let line = |r: Option<f64>| match r {
        Some(r) => Domain::Finite(-r, r),
        None => Domain::Real,
    };
    match basis.len() {
        1 => {
            let v = &basis[0];
            let q = integrate(|s| psi.eval(&[s * v[0], s * v[1]]), line(reach), &opts)?;
            Ok(q.value)
        }
        _ => {
            let (v1, v2) = (&basis[0], &basis[1]);
            let inner_opts = QuadOptions::with_rel_tol(HYPERPLANE_REL_TOL * 0.1);
            let q = try_integrate(
                |s| {
                    let chord = reach.map(|r| (r * r - s * s).max(0.0).sqrt());
                    if chord == Some(0.0) {
                        return Ok(0.0);
                    }
                    let p = |t: f64| {
                        let x = [s * v1[0] + t * v2[0], s * v1[1] + t * v2[1], s * v1[2] + t * v2[2]];
                        psi.eval(&x)
                    };
                    Ok(integrate(p, line(chord), &inner_opts)?.value)
                },
                line(reach),
                &opts,
            )?;
            Ok(q.value)
        }
    }
}
