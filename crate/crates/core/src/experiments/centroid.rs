use statrs::function::gamma::ln_gamma;

use super::{Check, ExperimentReport, Mode, SideSummary};
use crate::error::{invalid, Error, Result};
use crate::geom::{norm, unit_volume_ball_radius};
use crate::measure::{PnDensity, RadialMeasure};
use crate::quad::{integrate, try_integrate, Domain, QuadOptions};
use crate::volume::Estimate;

/// Relative tolerance of the quadratures behind `h_{Z_p}` and `ν(Z_p°)`.
pub const CENTROID_QUAD_TOL: f64 = 1e-9;

/// Relative slack allowed in the centroid comparison, covering the
/// quadrature error of both sides.
pub const CENTROID_REL_SLACK: f64 = 1e-6;

/// `∫_{rBⁿ} |x_1|^p dx = r^{n+p} π^{(n-1)/2} Γ((p+1)/2) / Γ((n+p)/2 + 1)`.
pub fn lp_ball_moment(n: usize, p: f64, r: f64) -> f64 {
    let nf = n as f64;
    let ln = (nf + p) * r.ln() + 0.5 * (nf - 1.0) * std::f64::consts::PI.ln() + ln_gamma(0.5 * (p + 1.0))
        - ln_gamma(0.5 * (nf + p) + 1.0);
    ln.exp()
}

/// Coordinates of a direction below this fraction of its largest entry are
/// integrated numerically; larger ones by finite differences, where the
/// cancellation stays harmless.
const DIFFERENCE_MIN_RATIO: f64 = 0.05;

/// `k`-fold antiderivative of `|x|^p`: `sign(x)^k |x|^{p+k} / ((p+1)⋯(p+k))`.
fn abs_power_antiderivative(x: f64, p: f64, k: usize) -> f64 {
    let denom: f64 = (1..=k).map(|j| p + j as f64).product();
    let sign = if k % 2 == 1 { x.signum() } else { 1.0 };
    sign * x.abs().powf(p + k as f64) / denom
}

/// `∫_{[-1/2,1/2]^k} |c + ⟨b, s⟩|^p ds` for nonzero `b`, as the mixed
/// difference `Δ_{b_1}⋯Δ_{b_k}` of the `k`-fold antiderivative divided by
/// `∏ b_i` (the box-spline identity).
fn box_moment(c: f64, b: &[f64], p: f64) -> f64 {
    let k = b.len();
    let mut acc = 0.0;
    for mask in 0..(1usize << k) {
        let mut x = c;
        let mut sign = 1.0;
        for (i, bi) in b.iter().enumerate() {
            if mask & (1 << i) != 0 {
                x += 0.5 * bi;
            } else {
                x -= 0.5 * bi;
                sign = -sign;
            }
        }
        acc += sign * abs_power_antiderivative(x, p, k);
    }
    acc / b.iter().product::<f64>()
}

/// `∫_{[-1/2,1/2]ⁿ} |⟨x, u⟩|^p dx` for a unit vector `u`.
fn cube_moment(u: &[f64], p: f64) -> Result<f64> {
    let big = u.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let (large, small): (Vec<f64>, Vec<f64>) = u.iter().partition(|c| c.abs() >= DIFFERENCE_MIN_RATIO * big);
    let small: Vec<f64> = small.into_iter().filter(|c| *c != 0.0).collect();
    let opts = QuadOptions::with_rel_tol(CENTROID_QUAD_TOL);
    let half = Domain::Finite(-0.5, 0.5);
    match small.len() {
        0 => Ok(box_moment(0.0, &large, p)),
        1 => Ok(integrate(|s| box_moment(small[0] * s, &large, p), half, &opts)?.value),
        2 => Ok(try_integrate(
            |s| Ok(integrate(|t| box_moment(small[0] * s + small[1] * t, &large, p), half, &opts)?.value),
            half,
            &opts,
        )?
        .value),
        _ => Err(Error::Unsupported("cube centroid support needs n ≤ 3".into())),
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::Divergent("p = ∞ has no moment integral".into()));
    }
    if !(p >= 1.0) {
        return Err(invalid("p must be ≥ 1"));
    }
    Ok(())
}

/// `h_{Z_p(μ)}(y) = (∫ |⟨x, y⟩|^p dμ(x))^{1/p}`, evaluated along `y/|y|` and
/// scaled by `|y|`.
pub fn centroid_support(mu: &PnDensity, p: f64, y: &[f64]) -> Result<f64> {
    check_p(p)?;
    crate::error::check_dim(mu.dim(), y.len())?;
    let r = norm(y);
    if r == 0.0 {
        return Ok(0.0);
    }
    let n = mu.dim();
    let moment = match mu {
        PnDensity::UniformDn { .. } => lp_ball_moment(n, p, unit_volume_ball_radius(n)),
        PnDensity::RadialStep { profile, .. } => {
            let mut inner = 0.0;
            let mut acc = 0.0;
            for (&b, &v) in profile.breaks().iter().zip(profile.values()) {
                acc += v * (lp_ball_moment(n, p, b) - if inner > 0.0 { lp_ball_moment(n, p, inner) } else { 0.0 });
                inner = b;
            }
            acc
        }
        PnDensity::UniformCube { .. } => {
            let u: Vec<f64> = y.iter().map(|c| c / r).collect();
            cube_moment(&u, p)?
        }
        PnDensity::UniformSimplex { .. } => {
            return Err(Error::Unsupported("centroid support of the simplex density".into()));
        }
    };
    Ok(r * moment.powf(1.0 / p))
}

/// `ν(K°)` for an origin-symmetric body given by its support function, via
/// `ν(K°) = (1/|S|) ∫_{S^{n-1}} ν(B(1/h_K(θ))) dθ` for `n ≤ 3`.
pub fn polar_measure_from_support<F>(n: usize, support: F, measure: &RadialMeasure) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    crate::error::check_dim(n, measure.dim())?;
    let q = |theta: &[f64]| -> Result<f64> {
        let h = support(theta)?;
        if !(h > 0.0) {
            return Err(Error::Unbounded("support function vanishes in some direction".into()));
        }
        measure.ball_mass(1.0 / h)
    };
    let opts = QuadOptions::with_rel_tol(CENTROID_QUAD_TOL);
    let pi = std::f64::consts::PI;
    match n {
        1 => q(&[1.0]),
        2 => Ok(try_integrate(|phi| q(&[phi.cos(), phi.sin()]), Domain::Finite(0.0, pi), &opts)?.value / pi),
        3 => {
            let outer = try_integrate(
                |phi| {
                    Ok(try_integrate(
                        |z| {
                            let s = (1.0 - z * z).max(0.0).sqrt();
                            q(&[s * phi.cos(), s * phi.sin(), z])
                        },
                        Domain::Finite(0.0, 1.0),
                        &opts,
                    )?
                    .value)
                },
                Domain::Finite(0.0, 2.0 * pi),
                &opts,
            )?;
            Ok(outer.value / (2.0 * pi))
        }
        _ => Err(Error::Unsupported("polar measure from a support function needs n ≤ 3".into())),
    }
}

/// `ν(Z_p(μ)°)`; closed form when `Z_p(μ)` is a ball.
fn centroid_polar_measure(mu: &PnDensity, p: f64, measure: &RadialMeasure) -> Result<f64> {
    let n = mu.dim();
    if matches!(mu, PnDensity::UniformDn { .. } | PnDensity::RadialStep { .. }) {
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        return measure.ball_mass(1.0 / centroid_support(mu, p, &e1)?);
    }
    polar_measure_from_support(n, |theta| centroid_support(mu, p, theta), measure)
}

/// Compares `ν(Z_p(μ)°)` with `ν(Z_p(λ_{D_n})°)` by deterministic
/// quadrature; passes when the first does not exceed the second by more than
/// the quadrature slack.
pub fn centroid_polar_experiment(mu: &PnDensity, p: f64, measure: &RadialMeasure) -> Result<ExperimentReport> {
    check_p(p)?;
    let n = mu.dim();
    crate::error::check_dim(n, measure.dim())?;
    if n > 3 {
        return Err(Error::Unsupported("centroid experiment needs n ≤ 3".into()));
    }
    let lhs = centroid_polar_measure(mu, p, measure)?;
    let rhs = centroid_polar_measure(&PnDensity::UniformDn { dim: n }, p, measure)?;
    let mut report = ExperimentReport::new(
        Mode::Centroid,
        0,
        vec![Check::at_most("polar_measure_mu", lhs, rhs * (1.0 + CENTROID_REL_SLACK))],
    );
    let (el, er) = (Estimate::exact(lhs), Estimate::exact(rhs));
    report.work.add(&el);
    report.work.add(&er);
    report.sides = vec![SideSummary::from_estimates("X", &[el]), SideSummary::from_estimates("Z", &[er])];
    Ok(report)
}
