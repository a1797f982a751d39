//! Convex bodies of the form `K = [x_1 ... x_N] C + r B_2^n` and the oracles
//! everything else consumes: support values, polar membership, polar radii
//! and Hausdorff distances.
//!
//! Bodies are represented by their support function rather than by vertices
//! or facets, so polar membership costs `O(nN)` in any dimension.

mod grid;
pub mod polytope;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

pub use grid::DirectionGrid;
pub use polytope::Halfspace;

use crate::error::{check_dim, invalid, Error, Result};
use crate::rng::RngStream;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Volume of the Euclidean unit ball `ω_n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Radius `r_n = ω_n^{-1/n}` of the volume-one ball `D_n`.
pub fn unit_volume_ball_radius(n: usize) -> f64 {
    unit_ball_volume(n).powf(-1.0 / n as f64)
}

/// Volume of `B_q^n = {c : sum |c_i|^q <= 1}`.
pub fn lq_ball_volume(n: usize, q: f64) -> f64 {
    if q.is_infinite() {
        return 2f64.powi(n as i32);
    }
    use statrs::function::gamma::ln_gamma;
    let ln = n as f64 * (2.0f64.ln() + ln_gamma(1.0 + 1.0 / q)) - ln_gamma(1.0 + n as f64 / q);
    ln.exp()
}

/// `||u||_p` for `p` in `[1, inf]`, scaled to avoid overflow.
pub fn lp_norm(u: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    }
    if p == 1.0 {
        return u.iter().map(|x| x.abs()).sum();
    }
    if p == 2.0 {
        return norm(u);
    }
    let m = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * u.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Conjugate exponent: `1 ↦ ∞`, `∞ ↦ 1`, otherwise `q/(q-1)`.
pub fn dual_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

type VecFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A gauge given by closures for the norm `u ↦ ||u||_C` and for the support
/// function `h_C`, which is its dual norm.
#[derive(Clone)]
pub struct GaugeOracle {
    gauge: VecFn,
    support: VecFn,
    unconditional: bool,
    symmetric: bool,
}

impl fmt::Debug for GaugeOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaugeOracle")
            .field("unconditional", &self.unconditional)
            .field("symmetric", &self.symmetric)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum GaugeKind {
    LqBall { q: f64 },
    Oracle(GaugeOracle),
}

/// Gauge of the coefficient body `C ⊂ R^N`.
#[derive(Clone, Debug)]
pub struct CoefficientGauge {
    dim: usize,
    kind: GaugeKind,
}

impl CoefficientGauge {
    pub fn lq(dim: usize, q: f64) -> Result<Self> {
        if q.is_nan() || q < 1.0 {
            return Err(invalid("gauge.q must be ≥ 1"));
        }
        if dim == 0 {
            return Err(invalid("gauge dimension must be positive"));
        }
        Ok(Self { dim, kind: GaugeKind::LqBall { q } })
    }

    pub fn oracle<G, H>(dim: usize, gauge: G, support: H, unconditional: bool, symmetric: bool) -> Result<Self>
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        H: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(invalid("gauge dimension must be positive"));
        }
        Ok(Self {
            dim,
            kind: GaugeKind::Oracle(GaugeOracle {
                gauge: Arc::new(gauge),
                support: Arc::new(support),
                unconditional,
                symmetric: symmetric || unconditional,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &GaugeKind {
        &self.kind
    }

    pub fn q(&self) -> Option<f64> {
        match self.kind {
            GaugeKind::LqBall { q } => Some(q),
            GaugeKind::Oracle(_) => None,
        }
    }

    pub fn is_unconditional(&self) -> bool {
        match &self.kind {
            GaugeKind::LqBall { .. } => true,
            GaugeKind::Oracle(o) => o.unconditional,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.kind {
            GaugeKind::LqBall { .. } => true,
            GaugeKind::Oracle(o) => o.symmetric,
        }
    }

    /// `||u||_C`.
    pub fn norm(&self, u: &[f64]) -> f64 {
        match &self.kind {
            GaugeKind::LqBall { q } => lp_norm(u, *q),
            GaugeKind::Oracle(o) => (o.gauge)(u),
        }
    }

    /// `h_C(u) = sup_{c ∈ C} <c, u>`; `+inf` signals an unbounded direction.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.kind {
            GaugeKind::LqBall { q } => lp_norm(u, dual_exponent(*q)),
            GaugeKind::Oracle(o) => (o.support)(u),
        }
    }

    /// Spot-check homogeneity and the declared symmetry classes on seeded
    /// Gaussian samples. Returns the first violated property.
    pub fn check_on_samples(&self, samples: usize, stream: RngStream) -> std::result::Result<(), String> {
        let mut rng = stream.rng();
        let mut u = vec![0.0; self.dim];
        for _ in 0..samples {
            for c in u.iter_mut() {
                *c = rng.sample(StandardNormal);
            }
            let base = self.norm(&u);
            let lambda = 0.1 + 3.0 * rng.random::<f64>();
            let scaled: Vec<f64> = u.iter().map(|c| lambda * c).collect();
            if (self.norm(&scaled) - lambda * base).abs() > 1e-9 * (1.0 + lambda * base) {
                return Err("gauge is not positively homogeneous".into());
            }
            if self.is_symmetric() {
                let neg: Vec<f64> = u.iter().map(|c| -c).collect();
                if (self.norm(&neg) - base).abs() > 1e-9 * (1.0 + base) {
                    return Err("gauge declared symmetric but ||-u|| != ||u||".into());
                }
            }
            if self.is_unconditional() {
                let flipped: Vec<f64> = u.iter().map(|c| if rng.random::<bool>() { -c } else { *c }).collect();
                if (self.norm(&flipped) - base).abs() > 1e-9 * (1.0 + base) {
                    return Err("gauge declared unconditional but not invariant under sign flips".into());
                }
            }
        }
        Ok(())
    }
}

/// `[x_1 ... x_N] C + r B_2^n`.
#[derive(Clone, Debug)]
pub struct MatrixImage {
    dim: usize,
    /// Column-major: column `i` occupies `cols[i*dim .. (i+1)*dim]`.
    cols: Vec<f64>,
    gauge: CoefficientGauge,
    r: f64,
}

impl MatrixImage {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_columns(&self) -> usize {
        self.gauge.dim
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.cols[i * self.dim..(i + 1) * self.dim]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.cols.chunks_exact(self.dim)
    }

    pub fn gauge(&self) -> &CoefficientGauge {
        &self.gauge
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    fn image_support(&self, y: &[f64]) -> f64 {
        match self.gauge.kind {
            GaugeKind::LqBall { q } => {
                let p = dual_exponent(q);
                if p.is_infinite() {
                    self.columns().fold(0.0_f64, |m, x| m.max(dot(x, y).abs()))
                } else if p == 1.0 {
                    self.columns().map(|x| dot(x, y).abs()).sum()
                } else {
                    let u: Vec<f64> = self.columns().map(|x| dot(x, y)).collect();
                    lp_norm(&u, p)
                }
            }
            GaugeKind::Oracle(_) => {
                let u: Vec<f64> = self.columns().map(|x| dot(x, y)).collect();
                self.gauge.support(&u)
            }
        }
    }

    /// Smallest singular value of the `n x N` column matrix.
    pub fn min_singular_value(&self) -> f64 {
        let n = self.dim;
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for x in self.columns() {
            for i in 0..n {
                for j in 0..n {
                    gram[(i, j)] += x[i] * x[j];
                }
            }
        }
        let eig = SymmetricEigen::new(gram);
        eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v)).max(0.0).sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct HPolytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Option<Vec<Vec<f64>>>,
    bounded: Option<bool>,
}

impl HPolytope {
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> Option<&[Vec<f64>]> {
        self.vertices.as_deref()
    }
}

/// A convex body.
#[derive(Clone, Debug)]
pub enum Body {
    MatrixImage(MatrixImage),
    Ball { dim: usize, radius: f64 },
    HPolytope(HPolytope),
}

/// Radius of a centered ball containing the polar body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolarRadius {
    Bounded(f64),
    Unbounded,
}

impl PolarRadius {
    pub fn bounded(self) -> Option<f64> {
        match self {
            PolarRadius::Bounded(r) => Some(r),
            PolarRadius::Unbounded => None,
        }
    }
}

/// Threshold below which a support value is treated as zero.
pub const DEGENERATE_SUPPORT: f64 = 1e-12;

impl Body {
    pub fn matrix_image(columns: &[Vec<f64>], gauge: CoefficientGauge, r: f64) -> Result<Self> {
        let first = columns.first().ok_or_else(|| invalid("matrix image needs at least one column"))?;
        let dim = first.len();
        if dim == 0 {
            return Err(invalid("columns must have positive dimension"));
        }
        check_dim(gauge.dim, columns.len())?;
        if !(r >= 0.0 && r.is_finite()) {
            return Err(invalid("r must be finite and nonnegative"));
        }
        let mut cols = Vec::with_capacity(dim * columns.len());
        for c in columns {
            check_dim(dim, c.len())?;
            if c.iter().any(|v| !v.is_finite()) {
                return Err(invalid("column entries must be finite"));
            }
            cols.extend_from_slice(c);
        }
        Ok(Body::MatrixImage(MatrixImage { dim, cols, gauge, r }))
    }

    /// `conv{±x_1, ..., ±x_N} = [x_1 ... x_N] B_1^N`.
    pub fn cross_polytope(points: &[Vec<f64>]) -> Result<Self> {
        Self::matrix_image(points, CoefficientGauge::lq(points.len().max(1), 1.0)?, 0.0)
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid("ball needs dim >= 1 and a finite positive radius"));
        }
        Ok(Body::Ball { dim, radius })
    }

    /// Centered cube `[-half, half]^n`, as `half · [e_1 ... e_n] B_∞^n`.
    pub fn cube(dim: usize, half: f64) -> Result<Self> {
        let cols: Vec<Vec<f64>> = (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = half;
                e
            })
            .collect();
        Self::matrix_image(&cols, CoefficientGauge::lq(dim, f64::INFINITY)?, 0.0)
    }

    pub fn hpolytope(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(invalid("H-polytope needs at least one half-space"));
        }
        for h in &halfspaces {
            check_dim(dim, h.normal.len())?;
        }
        let (vertices, bounded) = if dim <= 3 {
            (Some(polytope::enumerate_vertices(dim, &halfspaces)?), Some(polytope::is_bounded(dim, &halfspaces)?))
        } else {
            (None, None)
        };
        Ok(Body::HPolytope(HPolytope { dim, halfspaces, vertices, bounded }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::MatrixImage(m) => m.dim,
            Body::Ball { dim, .. } => *dim,
            Body::HPolytope(h) => h.dim,
        }
    }

    /// `h_K(y)`.
    pub fn support_value(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        Ok(match self {
            Body::MatrixImage(m) => {
                let h = m.image_support(y);
                if m.r > 0.0 {
                    h + m.r * norm(y)
                } else {
                    h
                }
            }
            Body::Ball { radius, .. } => radius * norm(y),
            Body::HPolytope(h) => {
                let verts = h.vertices.as_ref().ok_or_else(|| {
                    Error::Unsupported(format!("H-polytope support value in dimension {}", h.dim))
                })?;
                if h.bounded != Some(true) {
                    return Ok(f64::INFINITY);
                }
                verts.iter().map(|v| dot(v, y)).fold(f64::NEG_INFINITY, f64::max)
            }
        })
    }

    /// `y ∈ K°`, i.e. `h_K(y) <= 1`.
    pub fn polar_contains(&self, y: &[f64]) -> Result<bool> {
        Ok(self.support_value(y)? <= 1.0)
    }

    /// Allocation-free membership test for the sampling hot path; dimensions
    /// are not re-checked.
    #[inline]
    pub(crate) fn polar_contains_fast(&self, y: &[f64]) -> bool {
        match self {
            Body::MatrixImage(m) => {
                let slack = 1.0 - if m.r > 0.0 { m.r * norm(y) } else { 0.0 };
                if slack < 0.0 {
                    return false;
                }
                match m.gauge.kind {
                    GaugeKind::LqBall { q: 1.0 } => m.columns().all(|x| dot(x, y).abs() <= slack),
                    GaugeKind::LqBall { q } if q.is_infinite() => {
                        let mut s = 0.0;
                        for x in m.columns() {
                            s += dot(x, y).abs();
                            if s > slack {
                                return false;
                            }
                        }
                        true
                    }
                    _ => m.image_support(y) <= slack,
                }
            }
            _ => self.support_value(y).map(|h| h <= 1.0).unwrap_or(false),
        }
    }

    /// Membership `x ∈ K`, for the kinds where it is cheap.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        match self {
            Body::Ball { radius, .. } => Ok(norm(x) <= *radius),
            Body::HPolytope(h) => Ok(h.halfspaces.iter().all(|hs| hs.value(x) <= 0.0)),
            Body::MatrixImage(m) => {
                if m.r != 0.0 || m.num_columns() != m.dim {
                    return Err(Error::Unsupported("membership needs a square matrix image with r = 0".into()));
                }
                let n = m.dim;
                let a = DMatrix::from_column_slice(n, n, &m.cols);
                let b = nalgebra::DVector::from_column_slice(x);
                let c = a.lu().solve(&b).ok_or_else(|| Error::Unsupported("singular matrix image".into()))?;
                Ok(m.gauge.norm(c.as_slice()) <= 1.0 + 1e-12)
            }
        }
    }

    /// `sup_{x∈K} |x|`, exact or an upper bound; `+inf` when unknown.
    pub fn circumradius_bound(&self) -> f64 {
        match self {
            Body::Ball { radius, .. } => *radius,
            Body::HPolytope(h) => match (&h.vertices, h.bounded) {
                (Some(v), Some(true)) => v.iter().map(|p| norm(p)).fold(0.0, f64::max),
                _ => f64::INFINITY,
            },
            Body::MatrixImage(m) => {
                let lengths: Vec<f64> = m.columns().map(norm).collect();
                let base = if m.gauge.is_unconditional() { m.gauge.support(&lengths) } else { f64::INFINITY };
                base + m.r
            }
        }
    }

    /// Half-space description of `K°`, when `K` is a polytope whose polar
    /// facets are explicit: `conv{±x_i}` (q = 1) and zonotopes (q = ∞, N <= 16).
    pub fn polar_halfspaces(&self) -> Option<Vec<Halfspace>> {
        let Body::MatrixImage(m) = self else { return None };
        if m.r != 0.0 {
            return None;
        }
        match m.gauge.kind {
            GaugeKind::LqBall { q: 1.0 } => Some(
                m.columns()
                    .flat_map(|x| {
                        [Halfspace::new(x.to_vec(), 1.0), Halfspace::new(x.iter().map(|c| -c).collect(), 1.0)]
                    })
                    .collect(),
            ),
            GaugeKind::LqBall { q } if q.is_infinite() && m.num_columns() <= 16 => {
                let nc = m.num_columns();
                Some(
                    (0..1usize << nc)
                        .map(|mask| {
                            let mut a = vec![0.0; m.dim];
                            for (i, x) in m.columns().enumerate() {
                                let s = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                                for (t, c) in x.iter().enumerate() {
                                    a[t] += s * c;
                                }
                            }
                            Halfspace::new(a, 1.0)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Lebesgue volume `|K|`, exact for balls, square matrix images with an
    /// `l_q` gauge, polytopal matrix images in `n <= 3` and H-polytopes in
    /// `n <= 3`.
    pub fn volume(&self) -> Result<f64> {
        match self {
            Body::Ball { dim, radius } => Ok(unit_ball_volume(*dim) * radius.powi(*dim as i32)),
            Body::HPolytope(h) => polytope::hpolytope_volume(h.dim, &h.halfspaces),
            Body::MatrixImage(m) => {
                if m.r == 0.0 {
                    if m.num_columns() < m.dim {
                        return Ok(0.0);
                    }
                    if let (Some(q), true) = (m.gauge.q(), m.num_columns() == m.dim) {
                        let a = DMatrix::from_column_slice(m.dim, m.dim, &m.cols);
                        return Ok(a.determinant().abs() * lq_ball_volume(m.dim, q));
                    }
                    if m.dim <= 3 {
                        if let Some(hs) = self.polar_halfspaces() {
                            // facets of K are the vertices of K°
                            let verts = polytope::enumerate_vertices(m.dim, &hs)?;
                            if !polytope::is_bounded(m.dim, &hs)? {
                                return Ok(0.0);
                            }
                            let facets: Vec<Halfspace> = verts.into_iter().map(|v| Halfspace::new(v, 1.0)).collect();
                            return polytope::hpolytope_volume(m.dim, &facets);
                        }
                    }
                }
                Err(Error::Unsupported("exact volume of this matrix image".into()))
            }
        }
    }

    /// Scale every column (or radius) by `lambda`, keeping `r`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        match self {
            Body::MatrixImage(m) => Ok(Body::MatrixImage(MatrixImage {
                cols: m.cols.iter().map(|c| c * lambda).collect(),
                ..m.clone()
            })),
            Body::Ball { dim, radius } => Body::ball(*dim, radius * lambda),
            Body::HPolytope(h) => Body::hpolytope(
                h.dim,
                h.halfspaces.iter().map(|hs| Halfspace::new(hs.normal.clone(), hs.offset * lambda)).collect(),
            ),
        }
    }
}

/// `1 / min_grid h_K(θ)`, or exactly `1/r` when the body contains `r B_2^n`.
pub fn polar_bounding_radius(body: &Body, grid: &DirectionGrid) -> Result<PolarRadius> {
    check_dim(body.dim(), grid.dim())?;
    if grid.is_empty() {
        return Err(invalid("direction grid is empty"));
    }
    match body {
        Body::MatrixImage(m) if m.r > 0.0 => return Ok(PolarRadius::Bounded(1.0 / m.r)),
        Body::Ball { radius, .. } => return Ok(PolarRadius::Bounded(1.0 / radius)),
        _ => {}
    }
    let mut hmin = f64::INFINITY;
    for theta in grid.iter() {
        hmin = hmin.min(body.support_value(theta)?);
    }
    if hmin < DEGENERATE_SUPPORT {
        Ok(PolarRadius::Unbounded)
    } else {
        Ok(PolarRadius::Bounded(1.0 / hmin))
    }
}

/// A radius `R` with `K° ⊆ R B_2^n` that holds rigorously, not only on the
/// grid. Combines `K ⊇ r B` with a singular-value bound for `l_q` gauges and
/// a covering-radius correction of the grid minimum.
pub fn polar_enclosing_radius(body: &Body, grid: &DirectionGrid) -> Result<PolarRadius> {
    check_dim(body.dim(), grid.dim())?;
    let mut best = f64::INFINITY;
    match body {
        Body::Ball { radius, .. } => return Ok(PolarRadius::Bounded(1.0 / radius)),
        Body::HPolytope(h) => {
            if h.halfspaces.iter().any(|hs| hs.offset <= 0.0) {
                return Ok(PolarRadius::Unbounded);
            }
            // min over the sphere of h_K is the distance to the nearest facet
            let r = h.halfspaces.iter().map(|hs| norm(&hs.normal) / hs.offset).fold(0.0, f64::max);
            return Ok(PolarRadius::Bounded(r));
        }
        Body::MatrixImage(m) => {
            if m.r > 0.0 {
                best = best.min(1.0 / m.r);
            }
            if let Some(q) = m.gauge.q() {
                let p = dual_exponent(q);
                let nc = m.num_columns() as f64;
                // ||u||_p >= c ||u||_2 on R^N
                let c = if p >= 2.0 { nc.powf(1.0 / p - 0.5) } else { 1.0 };
                let sigma = m.min_singular_value();
                let scale = m.columns().map(norm).fold(0.0, f64::max);
                if sigma > DEGENERATE_SUPPORT * scale.max(1.0) {
                    best = best.min(1.0 / (c * sigma));
                }
            }
        }
    }
    if let Some(delta) = grid.covering() {
        if delta < 1.0 {
            let mut hmin = f64::INFINITY;
            let mut hmax = 0.0_f64;
            for theta in grid.iter() {
                let h = body.support_value(theta)?;
                hmin = hmin.min(h);
                hmax = hmax.max(h);
            }
            // h_K is R_K-Lipschitz on the sphere with R_K <= hmax / (1 - delta)
            let lower = hmin - hmax / (1.0 - delta) * delta;
            if lower > 0.0 {
                best = best.min(1.0 / lower);
            }
        }
    }
    if best.is_finite() {
        Ok(PolarRadius::Bounded(best))
    } else {
        Ok(PolarRadius::Unbounded)
    }
}

/// `max_grid |h_a(θ) - h_b(θ)|`, a lower bound for the Hausdorff distance.
pub fn hausdorff_estimate(a: &Body, b: &Body, grid: &DirectionGrid) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    check_dim(a.dim(), grid.dim())?;
    let mut worst = 0.0_f64;
    for theta in grid.iter() {
        let (ha, hb) = (a.support_value(theta)?, b.support_value(theta)?);
        if !ha.is_finite() || !hb.is_finite() {
            return Err(Error::Unbounded("Hausdorff distance needs bounded bodies".into()));
        }
        worst = worst.max((ha - hb).abs());
    }
    Ok(worst)
}
