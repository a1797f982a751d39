//! Adaptive Simpson quadrature on finite, half-infinite and infinite
//! intervals.
//!
//! Infinite ranges are mapped onto bounded ones (`x = u/(1-u)` and
//! `x = u/(1-u^2)`); the integrand is assumed to vanish at infinity and the
//! mapped endpoints are evaluated as zero. Local acceptance uses a tolerance
//! proportional to panel width. Panels narrower than `2^-45` of the whole
//! range are accepted unconditionally, so jump discontinuities (indicator
//! densities) converge with an error bounded by the jump times that width.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Finite(f64, f64),
    /// `[a, +inf)`
    Above(f64),
    /// `(-inf, +inf)`
    Real,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the number of panel bisections.
    pub max_subdivisions: usize,
    pub initial_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-7,
            abs_tol: 1e-13,
            max_subdivisions: 100_000,
            initial_panels: 32,
        }
    }
}

impl QuadOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

/// Integrate an infallible integrand.
pub fn integrate<F>(mut f: F, domain: Domain, opts: &QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), domain, opts)
}

/// Integrate an integrand that may itself fail (nested quadrature).
pub fn try_integrate<F>(mut f: F, domain: Domain, opts: &QuadOptions) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    match domain {
        Domain::Finite(a, b) => {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidArgument("finite domain with non-finite bound".into()));
            }
            if a == b {
                return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
            }
            if a > b {
                let q = simpson(&mut f, b, a, opts)?;
                return Ok(Quadrature { value: -q.value, ..q });
            }
            simpson(&mut f, a, b, opts)
        }
        Domain::Above(a) => {
            let mut g = |u: f64| -> Result<f64> {
                if u >= 1.0 {
                    return Ok(0.0);
                }
                let w = 1.0 - u;
                f(a + u / w).map(|v| v / (w * w))
            };
            simpson(&mut g, 0.0, 1.0, opts)
        }
        Domain::Real => {
            let mut g = |u: f64| -> Result<f64> {
                if u.abs() >= 1.0 {
                    return Ok(0.0);
                }
                let w = 1.0 - u * u;
                f(u / w).map(|v| v * (1.0 + u * u) / (w * w))
            };
            simpson(&mut g, -1.0, 1.0, opts)
        }
    }
}

fn eval<F: FnMut(f64) -> Result<f64>>(f: &mut F, x: f64, count: &mut usize) -> Result<f64> {
    *count += 1;
    let v = f(x)?;
    if v.is_nan() {
        return Err(Error::Quadrature(format!("integrand is NaN at {x}")));
    }
    if v.is_infinite() {
        return Err(Error::Divergent(format!("integrand is infinite at {x}")));
    }
    Ok(v)
}

fn simpson<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64, opts: &QuadOptions) -> Result<Quadrature> {
    let panels = opts.initial_panels.max(1);
    let width = b - a;
    let mut evaluations = 0usize;
    let mut stack = Vec::with_capacity(panels + 64);
    let h = width / panels as f64;
    let mut left = eval(f, a, &mut evaluations)?;
    let mut coarse = 0.0;
    for k in 0..panels {
        let pa = a + h * k as f64;
        let pb = if k + 1 == panels { b } else { a + h * (k + 1) as f64 };
        let fm = eval(f, 0.5 * (pa + pb), &mut evaluations)?;
        let fb = eval(f, pb, &mut evaluations)?;
        let whole = (pb - pa) / 6.0 * (left + 4.0 * fm + fb);
        coarse += whole;
        stack.push(Panel { a: pa, b: pb, fa: left, fm, fb, whole });
        left = fb;
    }
    let tol = (opts.rel_tol * coarse.abs()).max(opts.abs_tol);
    let min_width = width * (2f64).powi(-45);

    let mut value = 0.0;
    let mut error = 0.0;
    let mut subdivisions = 0usize;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(f, lm, &mut evaluations)?;
        let frm = eval(f, rm, &mut evaluations)?;
        let lw = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let rw = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let diff = lw + rw - p.whole;
        let local_tol = tol * (p.b - p.a) / width;
        if diff.abs() <= 15.0 * local_tol || p.b - p.a <= min_width {
            value += lw + rw + diff / 15.0;
            error += diff.abs() / 15.0;
            continue;
        }
        subdivisions += 1;
        if subdivisions > opts.max_subdivisions {
            return Err(Error::Quadrature(format!(
                "exceeded {} subdivisions on [{a}, {b}]",
                opts.max_subdivisions
            )));
        }
        stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: lw });
        stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: rw });
    }
    Ok(Quadrature { value, error, evaluations })
}
