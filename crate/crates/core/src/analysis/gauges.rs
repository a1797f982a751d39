//! Gauges built from densities: Busemann, Milman–Pajor, Ball–Bobkov, and
//! the functional Brunn profile.
//!
//! Every gauge is evaluated along the unit direction and the homogeneity
//! factor is applied analytically, so `Φ(λz) = λΦ(z)` holds to rounding.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{ProfileMethod, ProfileReport};
use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{dot, norm};
use crate::measure::{fill_uniform_ball, nu_plus_hyperplane, DensityOracle};
use crate::quad::{integrate, try_integrate, Domain, QuadOptions};
use crate::rng::RngStream;

/// Quadrature tolerance of the radial gauge integrals.
pub const GAUGE_REL_TOL: f64 = 1e-10;

/// Tolerance of the Brunn-profile convexity check, relative to the largest value.
pub const BRUNN_CONVEXITY_TOL: f64 = 1e-6;

fn check_nonzero(z: &[f64]) -> Result<f64> {
    let r = norm(z);
    if !r.is_finite() {
        return Err(invalid("point must be finite"));
    }
    Ok(r)
}

fn positive_mass(m: f64, what: &str) -> Result<f64> {
    if m.is_finite() && m > 0.0 {
        Ok(m)
    } else if m.is_finite() {
        Err(Error::Divergent(format!("{what} vanishes")))
    } else {
        Err(Error::Divergent(format!("{what} is infinite")))
    }
}

/// `Φ(z) = |z| / ν⁺(z⊥)` with `ν⁺(H) = ∫_H ψ`; `Φ(0) = 0`.
pub fn busemann_gauge(psi: &dyn DensityOracle, z: &[f64]) -> Result<f64> {
    check_dim(psi.dim(), z.len())?;
    let r = check_nonzero(z)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let unit: Vec<f64> = z.iter().map(|v| v / r).collect();
    Ok(r / positive_mass(nu_plus_hyperplane(psi, &unit)?, "hyperplane mass")?)
}

/// Outcome of the `-1/n`-concavity spot check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityCheck {
    pub segments: usize,
    pub violations: usize,
}

impl ConcavityCheck {
    pub fn verified(&self) -> bool {
        self.violations == 0
    }
}

/// Midpoint convexity of `ψ^{-1/n}` on random segments whose endpoints lie
/// in the support of `ψ`; a zero midpoint between positive endpoints counts
/// as a violation (the support must be convex).
pub fn check_concavity(psi: &dyn DensityOracle, segments: usize, stream: RngStream) -> ConcavityCheck {
    let n = psi.dim();
    let radius = psi.support_radius().unwrap_or(3.0);
    let e = -1.0 / n as f64;
    let mut rng = stream.rng();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut done = 0;
    let mut violations = 0;
    let mut attempts = 0;
    while done < segments && attempts < 1000 * segments {
        attempts += 1;
        fill_uniform_ball(&mut x, radius, &mut rng);
        fill_uniform_ball(&mut y, radius, &mut rng);
        let (fx, fy) = (psi.eval(&x), psi.eval(&y));
        if !(fx > 0.0 && fy > 0.0) {
            continue;
        }
        done += 1;
        let lambda: f64 = rng.random();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (1.0 - lambda) * a + lambda * b).collect();
        let fm = psi.eval(&mid);
        let rhs = (1.0 - lambda) * fx.powf(e) + lambda * fy.powf(e);
        if !(fm > 0.0) || fm.powf(e) > rhs * (1.0 + 1e-9) {
            violations += 1;
        }
    }
    ConcavityCheck { segments: done, violations }
}

/// `(1/p) ∫_0^R f(u^{1/p} θ) du = ∫_0^{R^{1/p}} f(sθ) s^{p-1} ds`.
fn radial_moment(f: &dyn DensityOracle, theta: &[f64], p: f64, offset: &[f64]) -> Result<f64> {
    let opts = QuadOptions { rel_tol: GAUGE_REL_TOL, abs_tol: 1e-300, ..QuadOptions::default() };
    let mut x = vec![0.0; theta.len()];
    let g = |u: f64| {
        let s = u.powf(1.0 / p);
        for i in 0..x.len() {
            x[i] = offset[i] + s * theta[i];
        }
        f.eval(&x)
    };
    let domain = match f.support_radius() {
        Some(r) => Domain::Finite(0.0, (r + norm(offset)).powf(p)),
        None => Domain::Above(0.0),
    };
    Ok(integrate(g, domain, &opts)?.value / p)
}

/// `F(x) = (∫_0^∞ f(rx) r^{p-1} dr)^{-1/p}`, a gauge for suitable `f`.
pub fn ball_bobkov_gauge(f: &dyn DensityOracle, p: f64, x: &[f64]) -> Result<f64> {
    check_dim(f.dim(), x.len())?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p must be finite and > 0"));
    }
    let r = check_nonzero(x)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let theta: Vec<f64> = x.iter().map(|v| v / r).collect();
    let j = positive_mass(radial_moment(f, &theta, p, &vec![0.0; x.len()])?, "radial integral")?;
    Ok(r * j.powf(-1.0 / p))
}

/// Orthonormalize `basis` (Gram–Schmidt); errors on dependent vectors.
fn orthonormalize(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for b in basis {
        let mut v = b.clone();
        for u in &out {
            let d = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, c)| *a -= d * c);
        }
        let r = norm(&v);
        if !(r > 1e-12 * norm(b).max(1e-300)) {
            return Err(invalid("subspace basis is linearly dependent"));
        }
        out.push(v.into_iter().map(|a| a / r).collect());
    }
    Ok(out)
}

/// `Φ(v) = |v|^{(2p-1)/p} (∫_{E ⊕ ℝ₊v} ⟨x, v⟩^{p-1} φ(x) dx)^{-1/p}` for `v ∈ E⊥`.
///
/// Writing `x = e + s v/|v|` reduces the integral to
/// `|v|^{p-1} ∫_E ∫_0^∞ s^{p-1} φ(e + s v̂) ds de`, hence
/// `Φ(v) = |v| · J(v̂)^{-1/p}`.
pub fn milman_pajor_gauge(phi: &dyn DensityOracle, subspace: &[Vec<f64>], p: f64, v: &[f64]) -> Result<f64> {
    let n = phi.dim();
    check_dim(n, v.len())?;
    if n > 3 || subspace.len() + 1 > n {
        return Err(Error::Unsupported("Milman–Pajor quadrature needs dim E + 1 ≤ n ≤ 3".into()));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid("p must be finite and > 0"));
    }
    for b in subspace {
        check_dim(n, b.len())?;
    }
    let r = check_nonzero(v)?;
    if r == 0.0 {
        return Err(invalid("v must be nonzero"));
    }
    let basis = orthonormalize(subspace)?;
    let theta: Vec<f64> = v.iter().map(|c| c / r).collect();
    if basis.iter().any(|u| dot(u, &theta).abs() > 1e-9) {
        return Err(invalid("v must be orthogonal to E"));
    }
    let opts = QuadOptions { rel_tol: GAUGE_REL_TOL * 10.0, abs_tol: 1e-300, ..QuadOptions::default() };
    let line = match phi.support_radius() {
        Some(rad) => Domain::Finite(-rad, rad),
        None => Domain::Real,
    };
    let point = |coeffs: &[f64]| -> Vec<f64> {
        let mut e = vec![0.0; n];
        for (c, u) in coeffs.iter().zip(&basis) {
            e.iter_mut().zip(u).for_each(|(a, b)| *a += c * b);
        }
        e
    };
    let j = match basis.len() {
        0 => radial_moment(phi, &theta, p, &vec![0.0; n])?,
        1 => try_integrate(|a| radial_moment(phi, &theta, p, &point(&[a])), line, &opts)?.value,
        _ => try_integrate(
            |a| Ok(try_integrate(|b| radial_moment(phi, &theta, p, &point(&[a, b])), line, &opts)?.value),
            line,
            &opts,
        )?
        .value,
    };
    Ok(r * positive_mass(j, "half-space moment")?.powf(-1.0 / p))
}

/// `Φ(t) = (∫_{ℝⁿ} φ(t, x)^{-n-α} dx)^{-1/α}` on `t_grid`, for `n ∈ {1, 2}`.
///
/// `x_radius` restricts the `x`-integral to `[-x_radius, x_radius]ⁿ` for
/// functions that are `+∞` outside a bounded domain.
pub fn brunn_profile<F>(varphi: F, alpha: f64, n: usize, t_grid: &[f64], x_radius: Option<f64>) -> Result<ProfileReport>
where
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    if !(n == 1 || n == 2) {
        return Err(Error::Unsupported("Brunn profiles are evaluated for n ≤ 2".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha must be finite and > 0"));
    }
    if t_grid.len() < 3 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t grid must be strictly increasing with at least 3 points"));
    }
    let power = -(n as f64) - alpha;
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-300, ..QuadOptions::default() };
    let line = match x_radius {
        Some(r) => Domain::Finite(-r, r),
        None => Domain::Real,
    };
    let integrand = |t: f64, x: &[f64]| -> Result<f64> {
        let v = varphi(t, x);
        if !(v > 0.0) || v.is_nan() {
            return Err(invalid("φ must be positive"));
        }
        Ok(v.powf(power))
    };
    let values: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let mass = if n == 1 {
                try_integrate(|x| integrand(t, &[x]), line, &opts)?.value
            } else {
                try_integrate(
                    |x| Ok(try_integrate(|y| integrand(t, &[x, y]), line, &opts)?.value),
                    line,
                    &opts,
                )?
                .value
            };
            Ok(positive_mass(mass, "Brunn integral")?.powf(-1.0 / alpha))
        })
        .collect::<Result<_>>()?;
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let k = values.len();
    Ok(ProfileReport::new(
        t_grid.to_vec(),
        values,
        vec![0.0; k],
        ProfileMethod::Quadrature,
        BRUNN_CONVEXITY_TOL * scale.max(1.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{BoxIndicator, FnDensity, GaussianFactor};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn busemann_examples() {
        let g = GaussianFactor { dim: 2, sigma: 1.0 };
        let z = [0.3, -1.2];
        assert!((busemann_gauge(&g, &z).unwrap() - norm(&z) / (2.0 * PI).sqrt()).abs() < 1e-7);
        let sq = BoxIndicator::symmetric(2, 1.0);
        assert!((busemann_gauge(&sq, &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-7);
        let v = busemann_gauge(&sq, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((v - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-7);
        assert_eq!(busemann_gauge(&sq, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn concavity_spot_checks() {
        let g = GaussianFactor { dim: 2, sigma: 1.0 };
        assert!(check_concavity(&g, 50, RngStream::new(1, 0)).verified());
        // a density vanishing on an annulus has a non-convex support
        let ring = FnDensity::new(2, |x: &[f64]| {
            let r = norm(x);
            if (0.5..1.0).contains(&r) {
                0.0
            } else {
                (-r).exp()
            }
        });
        let c = check_concavity(&ring, 50, RngStream::new(1, 0));
        assert_eq!(c.segments, 50);
        assert!(!c.verified());
    }

    #[test]
    fn ball_bobkov_examples() {
        let disk = FnDensity::new(2, |x: &[f64]| if norm(x) <= 1.0 { 1.0 } else { 0.0 }).with_support_radius(1.0);
        assert!((ball_bobkov_gauge(&disk, 1.0, &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-9);
        // 1_K with p = 2: F(x) = sqrt(2) |x|
        assert!((ball_bobkov_gauge(&disk, 2.0, &[3.0, 4.0]).unwrap() - 5.0 * 2f64.sqrt()).abs() < 1e-8);
        let g = GaussianFactor { dim: 2, sigma: 1.0 };
        let x = [0.5, -2.0];
        assert!((ball_bobkov_gauge(&g, 1.0, &x).unwrap() - norm(&x) * (2.0 / PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn milman_pajor_examples() {
        let sq = BoxIndicator::symmetric(2, 1.0);
        let v = milman_pajor_gauge(&sq, &[vec![0.0, 1.0]], 1.0, &[1.0, 0.0]).unwrap();
        assert!((v - 0.5).abs() < 1e-7);
        // E = {0}, p = 1: the gauge of K itself
        let w = milman_pajor_gauge(&sq, &[], 1.0, &[3.0, 1.5]).unwrap();
        assert!((w - 3.0).abs() < 1e-8);
        assert!(milman_pajor_gauge(&sq, &[vec![1.0, 1.0]], 1.0, &[1.0, 0.0]).is_err());
        // in space, E a plane: half-space mass of the cube is 4 -> 1/4
        let cube = BoxIndicator::symmetric(3, 1.0);
        let u = milman_pajor_gauge(&cube, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 1.0, &[0.0, 0.0, 2.0]).unwrap();
        assert!((u - 0.5).abs() < 1e-6);
    }

    #[test]
    fn brunn_closed_forms() {
        let grid: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.5).collect();
        let p = brunn_profile(|t, x| (1.0 + t * t + x[0] * x[0]).sqrt(), 1.0, 1, &grid, None).unwrap();
        for (t, v) in p.grid.iter().zip(&p.values) {
            assert!((v - (1.0 + t * t).sqrt() / PI).abs() < 1e-8);
        }
        assert!(p.verdict.midpoint_convex);
        let q = brunn_profile(|t, x| (t.abs() + x[0].abs()).exp(), 1.0, 1, &grid, None).unwrap();
        for (t, v) in q.grid.iter().zip(&q.values) {
            assert!((v - (2.0 * t.abs()).exp()).abs() < 1e-7 * v);
        }
        assert!(q.verdict.midpoint_convex);
        let c = brunn_profile(|_, _| 2.0, 1.0, 2, &grid, Some(1.0)).unwrap();
        // ∫_{[-1,1]²} 2^{-3} = 1/2, Φ = 2
        assert!(c.values.iter().all(|v| (v - 2.0).abs() < 1e-9));
        assert!(c.verdict.passed());
    }
}
