//! Exact (or deterministic-quadrature) values of `ν(K°)` in dimension ≤ 3.

use std::f64::consts::TAU;

use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{norm, polytope, polytope::Halfspace, Body};
use crate::measure::{RadialKind, RadialMeasure};
use crate::quad::{try_integrate, Domain, QuadOptions};

/// Relative tolerance of the angular quadratures used by the planar oracle.
const ANGULAR_REL_TOL: f64 = 1e-11;

/// `|{y : |⟨x_i, y⟩| ≤ 1 ∀i}|`, the volume of the polar of `conv{±x_i}`.
pub fn exact_polar_volume_crosspoly(points: &[Vec<f64>], n: usize) -> Result<f64> {
    if !(n == 2 || n == 3) {
        return Err(Error::Unsupported(format!("exact polar volume in dimension {n}")));
    }
    if points.is_empty() {
        return Err(Error::Unbounded("no points: the polar is the whole space".into()));
    }
    let mut hs = Vec::with_capacity(2 * points.len());
    for x in points {
        check_dim(n, x.len())?;
        hs.push(Halfspace::new(x.clone(), 1.0));
        hs.push(Halfspace::new(x.iter().map(|c| -c).collect(), 1.0));
    }
    if !polytope::is_bounded(n, &hs)? {
        return Err(Error::Unbounded("points do not span the space".into()));
    }
    polytope::hpolytope_volume(n, &hs)
}

/// Half-space description of `K°` for polytopal `K`.
fn polar_description(body: &Body) -> Result<Option<Vec<Halfspace>>> {
    if let Some(hs) = body.polar_halfspaces() {
        return Ok(Some(hs));
    }
    if let Body::HPolytope(h) = body {
        let verts = h.vertices().ok_or_else(|| Error::Unsupported("H-polytope without vertices".into()))?;
        let mut probe = vec![0.0; body.dim()];
        probe[0] = 1.0;
        if !body.support_value(&probe)?.is_finite() {
            return Err(Error::Unsupported("polar of an unbounded H-polytope".into()));
        }
        return Ok(Some(verts.iter().map(|v| Halfspace::new(v.clone(), 1.0)).collect()));
    }
    Ok(None)
}

/// Vertices (counter-clockwise) of the polygon `K°` when `K` is a planar
/// polytope; `None` for non-polytopal bodies.
pub fn polar_polygon(body: &Body) -> Result<Option<Vec<[f64; 2]>>> {
    check_dim(2, body.dim())?;
    match polar_description(body)? {
        Some(hs) => Ok(Some(polytope::halfplane_polygon(&hs)?)),
        None => Ok(None),
    }
}

/// `ν(P)` for a planar convex polygon `P` containing the origin in its
/// interior, by edge-wise angular integration of the ball-mass function.
pub fn radial_polygon_measure(poly: &[[f64; 2]], m: &RadialMeasure) -> Result<f64> {
    check_dim(2, m.dim())?;
    if poly.len() < 3 {
        return Ok(0.0);
    }
    if let RadialKind::LebesgueRestricted { radius } = m.kind() {
        return Ok(polytope::polygon_disk_area(poly, *radius));
    }
    let opts = QuadOptions { rel_tol: ANGULAR_REL_TOL, abs_tol: 1e-300, ..QuadOptions::default() };
    let mut total = 0.0;
    for (i, a) in poly.iter().enumerate() {
        let b = poly[(i + 1) % poly.len()];
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        let span = cross.atan2(dot);
        if span <= 0.0 {
            return Err(invalid("polygon must be counter-clockwise around the origin"));
        }
        let edge = [b[0] - a[0], b[1] - a[1]];
        let len = norm(&edge);
        let d = cross / len;
        // outward normal of the edge line
        let phi_n = (-edge[0]).atan2(edge[1]);
        let phi_a = a[1].atan2(a[0]);
        let q = try_integrate(
            |phi| {
                let c = (phi - phi_n).cos();
                m.ball_mass(d / c)
            },
            Domain::Finite(phi_a, phi_a + span),
            &opts,
        )?;
        total += q.value / TAU;
    }
    Ok(total)
}

/// `ν(K°)` without sampling: closed forms for balls, exact polygon and
/// polytope volumes, and deterministic angular quadrature of the radial
/// function `1/h_K` in the plane.
pub fn exact_polar_measure(body: &Body, m: &RadialMeasure) -> Result<f64> {
    check_dim(body.dim(), m.dim())?;
    let n = body.dim();
    if let Body::Ball { radius, .. } = body {
        return m.ball_mass(1.0 / radius);
    }
    match n {
        1 => {
            let half = |h: f64| if h > 0.0 { m.ball_mass(1.0 / h) } else { m.ball_mass(f64::INFINITY) };
            Ok(0.5 * (half(body.support_value(&[1.0])?)? + half(body.support_value(&[-1.0])?)?))
        }
        2 => {
            if let Some(hs) = polar_description(body)? {
                let support = m.support_radius();
                let poly = if support.is_finite() {
                    // the measure vanishes outside its ball, so an unbounded polar can be clipped
                    polytope::clip_square(&hs, 2.0 * support)
                } else {
                    polytope::halfplane_polygon(&hs)?
                };
                return radial_polygon_measure(&poly, m);
            }
            let opts = QuadOptions {
                rel_tol: ANGULAR_REL_TOL,
                abs_tol: 1e-300,
                initial_panels: 256,
                ..QuadOptions::default()
            };
            let q = try_integrate(
                |phi| {
                    let h = body.support_value(&[phi.cos(), phi.sin()])?;
                    m.ball_mass(if h > 0.0 { 1.0 / h } else { f64::INFINITY })
                },
                Domain::Finite(0.0, TAU),
                &opts,
            )?;
            if !q.value.is_finite() {
                return Err(Error::Divergent("ν(K°) is infinite".into()));
            }
            Ok(q.value / TAU)
        }
        3 => {
            let RadialKind::LebesgueRestricted { radius } = m.kind() else {
                return Err(Error::Unsupported("exact 3-D oracle needs a Lebesgue measure".into()));
            };
            let hs = polar_description(body)?
                .ok_or_else(|| Error::Unsupported("exact 3-D oracle needs a polytopal body".into()))?;
            if radius.is_finite() {
                let verts = polytope::enumerate_vertices(3, &hs)?;
                let far = verts.iter().map(|v| norm(v)).fold(0.0, f64::max);
                if !polytope::is_bounded(3, &hs)? || far > *radius {
                    return Err(Error::Unsupported("3-D polar body leaves the measure's ball".into()));
                }
            }
            polytope::hpolytope_volume(3, &hs)
        }
        _ => Err(Error::Unsupported(format!("exact ν(K°) in dimension {n}"))),
    }
}
