//! Exact polytope routines for dimensions 1 to 3: vertex enumeration of
//! H-polytopes, planar half-plane clipping, an incremental 3-D convex hull and
//! volumes.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};

/// Closed half-space `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        super::dot(&self.normal, x) - self.offset
    }
}

/// Identification tolerance for vertices and facet incidence.
pub const VERTEX_TOL: f64 = 1e-9;

/// Above this many facets, 3-D volumes go through the hull-duality route
/// instead of exhaustive triple enumeration.
pub const TRIPLE_ENUMERATION_LIMIT: usize = 64;

fn feasible(hs: &[Halfspace], v: &[f64]) -> bool {
    let scale = 1.0 + super::norm(v);
    hs.iter().all(|h| {
        let an = super::norm(&h.normal);
        h.value(v) <= VERTEX_TOL * (scale * an + h.offset.abs())
    })
}

fn push_unique(out: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    let tol = VERTEX_TOL * (1.0 + super::norm(&v));
    let dup = out.iter().any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() <= tol));
    if !dup {
        out.push(v);
    }
}

/// Vertices of `{x : <a_i, x> <= b_i}` for `n <= 3`, by intersecting every
/// `n`-subset of boundary hyperplanes and keeping feasible points.
pub fn enumerate_vertices(n: usize, hs: &[Halfspace]) -> Result<Vec<Vec<f64>>> {
    for h in hs {
        crate::error::check_dim(n, h.normal.len())?;
    }
    let mut out = Vec::new();
    match n {
        1 => {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for h in hs {
                let a = h.normal[0];
                if a > 0.0 {
                    hi = hi.min(h.offset / a);
                } else if a < 0.0 {
                    lo = lo.max(h.offset / a);
                } else if h.offset < 0.0 {
                    return Ok(out);
                }
            }
            if lo.is_finite() && lo <= hi {
                out.push(vec![lo]);
            }
            if hi.is_finite() && lo <= hi {
                push_unique(&mut out, vec![hi]);
            }
        }
        2 => {
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    let (a, b) = (&hs[i].normal, &hs[j].normal);
                    let det = a[0] * b[1] - a[1] * b[0];
                    let scale = super::norm(a) * super::norm(b);
                    if det.abs() <= 1e-14 * scale {
                        continue;
                    }
                    let x = (hs[i].offset * b[1] - hs[j].offset * a[1]) / det;
                    let y = (a[0] * hs[j].offset - b[0] * hs[i].offset) / det;
                    let v = vec![x, y];
                    if feasible(hs, &v) {
                        push_unique(&mut out, v);
                    }
                }
            }
        }
        3 => {
            let m = hs.len();
            for i in 0..m {
                for j in i + 1..m {
                    let cij = cross(&hs[i].normal, &hs[j].normal);
                    for k in j + 1..m {
                        let c = &hs[k].normal;
                        let det = dot3(&cij, c);
                        let scale = super::norm(&hs[i].normal) * super::norm(&hs[j].normal) * super::norm(c);
                        if det.abs() <= 1e-14 * scale {
                            continue;
                        }
                        let cjk = cross(&hs[j].normal, c);
                        let cki = cross(c, &hs[i].normal);
                        let v: Vec<f64> = (0..3)
                            .map(|t| (hs[i].offset * cjk[t] + hs[j].offset * cki[t] + hs[k].offset * cij[t]) / det)
                            .collect();
                        if feasible(hs, &v) {
                            push_unique(&mut out, v);
                        }
                    }
                }
            }
        }
        _ => return Err(Error::Unsupported(format!("vertex enumeration in dimension {n}"))),
    }
    Ok(out)
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: &[f64; 3], b: &[f64]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn rank(n: usize, hs: &[Halfspace]) -> usize {
    let rows: Vec<Vec<f64>> = hs
        .iter()
        .filter_map(|h| {
            let r = super::norm(&h.normal);
            (r > 0.0).then(|| h.normal.iter().map(|c| c / r).collect())
        })
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    m.svd(false, false).rank(1e-12)
}

/// Whether the recession cone `{d : <a_i, d> <= 0}` is trivial (`n <= 3`).
///
/// A nontrivial cone either contains a line (normals do not span) or has an
/// extreme ray cut out by `n - 1` tight constraints; both cases are checked
/// exhaustively.
pub fn is_bounded(n: usize, hs: &[Halfspace]) -> Result<bool> {
    if n > 3 {
        return Err(Error::Unsupported(format!("boundedness test in dimension {n}")));
    }
    if rank(n, hs) < n {
        return Ok(false);
    }
    let in_cone = |d: &[f64]| {
        let dn = super::norm(d);
        hs.iter().all(|h| super::dot(&h.normal, d) <= 1e-12 * dn * super::norm(&h.normal))
    };
    match n {
        1 => Ok(!(in_cone(&[1.0]) || in_cone(&[-1.0]))),
        2 => {
            for h in hs {
                let d = [-h.normal[1], h.normal[0]];
                if super::norm(&d) > 0.0 && (in_cone(&d) || in_cone(&[-d[0], -d[1]])) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        3 => {
            for i in 0..hs.len() {
                for j in i + 1..hs.len() {
                    let d = cross(&hs[i].normal, &hs[j].normal);
                    if super::norm(&d) <= 1e-14 * super::norm(&hs[i].normal) * super::norm(&hs[j].normal) {
                        continue;
                    }
                    if in_cone(&d) || in_cone(&[-d[0], -d[1], -d[2]]) {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        _ => unreachable!(),
    }
}

/// Clip a convex polygon (counter-clockwise) by one half-plane.
pub fn clip_polygon(poly: &[[f64; 2]], h: &Halfspace) -> Vec<[f64; 2]> {
    let a = [h.normal[0], h.normal[1]];
    let side = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] - h.offset;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for (i, p) in poly.iter().enumerate() {
        let q = &poly[(i + 1) % poly.len()];
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(*p);
        }
        if (sp <= 0.0) != (sq <= 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// Intersection of the half-planes with the square `[-bound, bound]^2`.
pub fn clip_square(hs: &[Halfspace], bound: f64) -> Vec<[f64; 2]> {
    let mut poly = vec![[-bound, -bound], [bound, -bound], [bound, bound], [-bound, bound]];
    for h in hs {
        poly = clip_polygon(&poly, h);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Counter-clockwise polygon of a bounded planar H-polytope.
///
/// Clips a large square first to locate the polygon, then re-clips a square
/// fitted to it so the final vertices carry no large-coordinate roundoff.
pub fn halfplane_polygon(hs: &[Halfspace]) -> Result<Vec<[f64; 2]>> {
    for h in hs {
        crate::error::check_dim(2, h.normal.len())?;
    }
    if !is_bounded(2, hs)? {
        return Err(Error::Unbounded("half-plane intersection is unbounded".into()));
    }
    let scale = hs
        .iter()
        .filter(|h| super::norm(&h.normal) > 0.0)
        .map(|h| h.offset.abs() / super::norm(&h.normal))
        .fold(1.0_f64, f64::max);
    let coarse = clip_square(hs, 1e8 * scale);
    if coarse.is_empty() {
        return Ok(coarse);
    }
    let extent = coarse.iter().map(|p| p[0].abs().max(p[1].abs())).fold(0.0, f64::max);
    Ok(clip_square(hs, 2.0 * extent + f64::MIN_POSITIVE))
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let mut s = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = &poly[(i + 1) % poly.len()];
        s += p[0] * q[1] - p[1] * q[0];
    }
    0.5 * s
}

/// Signed area of `triangle(0, a, b) ∩ R·B_2^2`.
pub fn triangle_disk_area(a: [f64; 2], b: [f64; 2], radius: f64) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let mut cuts = vec![0.0, 1.0];
    if dd > 0.0 {
        // |a + t d|^2 = R^2
        let ad = a[0] * d[0] + a[1] * d[1];
        let aa = a[0] * a[0] + a[1] * a[1];
        let disc = ad * ad - dd * (aa - radius * radius);
        if disc > 0.0 {
            let s = disc.sqrt();
            for t in [(-ad - s) / dd, (-ad + s) / dd] {
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (p, q) = (at(w[0]), at(w[1]));
        // pieces lie on one side of the circle; two probes keep tangent pieces outside
        let inside = |t: f64| {
            let m = at(t);
            m[0] * m[0] + m[1] * m[1] <= radius * radius
        };
        let cr = p[0] * q[1] - p[1] * q[0];
        if inside((2.0 * w[0] + w[1]) / 3.0) && inside((w[0] + 2.0 * w[1]) / 3.0) {
            area += 0.5 * cr;
        } else {
            let dt = p[0] * q[0] + p[1] * q[1];
            area += 0.5 * radius * radius * cr.atan2(dt);
        }
    }
    area
}

/// Area of a polygon intersected with the centered disk of the given radius.
pub fn polygon_disk_area(poly: &[[f64; 2]], radius: f64) -> f64 {
    if radius.is_infinite() {
        return polygon_area(poly);
    }
    let mut s = 0.0;
    for (i, p) in poly.iter().enumerate() {
        s += triangle_disk_area(*p, poly[(i + 1) % poly.len()], radius);
    }
    s
}

/// Volume of a bounded H-polytope in dimension `n <= 3`.
pub fn hpolytope_volume(n: usize, hs: &[Halfspace]) -> Result<f64> {
    match n {
        1 => {
            if !is_bounded(1, hs)? {
                return Err(Error::Unbounded("interval is unbounded".into()));
            }
            let v = enumerate_vertices(1, hs)?;
            Ok(match v.len() {
                2 => (v[1][0] - v[0][0]).abs(),
                _ => 0.0,
            })
        }
        2 => Ok(polygon_area(&halfplane_polygon(hs)?)),
        3 => {
            if hs.len() > TRIPLE_ENUMERATION_LIMIT && hs.iter().all(|h| h.offset > 0.0) {
                polar_hull_volume(hs)
            } else {
                facet_volume_3d(hs)
            }
        }
        _ => Err(Error::Unsupported(format!("exact volume in dimension {n}"))),
    }
}

/// 3-D volume by triple enumeration, facet assembly and a cone
/// decomposition from the vertex centroid.
pub fn facet_volume_3d(hs: &[Halfspace]) -> Result<f64> {
    for h in hs {
        crate::error::check_dim(3, h.normal.len())?;
    }
    if !is_bounded(3, hs)? {
        return Err(Error::Unbounded("polytope is unbounded".into()));
    }
    // normalize and bucket duplicate facets
    let mut unique: Vec<([f64; 3], f64)> = Vec::new();
    for h in hs {
        let r = super::norm(&h.normal);
        if r == 0.0 {
            if h.offset < 0.0 {
                return Ok(0.0);
            }
            continue;
        }
        let a = [h.normal[0] / r, h.normal[1] / r, h.normal[2] / r];
        let b = h.offset / r;
        let dup = unique.iter().any(|(u, c)| {
            (u[0] - a[0]).abs() <= VERTEX_TOL
                && (u[1] - a[1]).abs() <= VERTEX_TOL
                && (u[2] - a[2]).abs() <= VERTEX_TOL
                && (c - b).abs() <= VERTEX_TOL * (1.0 + b.abs())
        });
        if !dup {
            unique.push((a, b));
        }
    }
    let normalized: Vec<Halfspace> = unique.iter().map(|(a, b)| Halfspace::new(a.to_vec(), *b)).collect();
    let verts = enumerate_vertices(3, &normalized)?;
    if verts.len() < 4 {
        return Ok(0.0);
    }
    let mut c = [0.0; 3];
    for v in &verts {
        for t in 0..3 {
            c[t] += v[t] / verts.len() as f64;
        }
    }
    let mut volume = 0.0;
    for (a, b) in &unique {
        let on: Vec<&Vec<f64>> = verts
            .iter()
            .filter(|v| (dot3(a, v) - b).abs() <= VERTEX_TOL * (1.0 + super::norm(v)))
            .collect();
        if on.len() < 3 {
            continue;
        }
        let mut fc = [0.0; 3];
        for v in &on {
            for t in 0..3 {
                fc[t] += v[t] / on.len() as f64;
            }
        }
        let e1 = {
            let far = on
                .iter()
                .map(|v| [v[0] - fc[0], v[1] - fc[1], v[2] - fc[2]])
                .max_by(|x, y| super::norm(x).partial_cmp(&super::norm(y)).unwrap())
                .unwrap();
            let r = super::norm(&far);
            [far[0] / r, far[1] / r, far[2] / r]
        };
        let e2 = cross(a, &e1);
        let mut ordered: Vec<(f64, &Vec<f64>)> = on
            .iter()
            .map(|v| {
                let w = [v[0] - fc[0], v[1] - fc[1], v[2] - fc[2]];
                (dot3(&e2, &w).atan2(dot3(&e1, &w)), *v)
            })
            .collect();
        ordered.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let p0 = ordered[0].1;
        for w in ordered[1..].windows(2) {
            volume += tetra_volume(&c, p0, w[0].1, w[1].1).abs();
        }
    }
    Ok(volume)
}

fn tetra_volume(o: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let u = [a[0] - o[0], a[1] - o[1], a[2] - o[2]];
    let v = [b[0] - o[0], b[1] - o[1], b[2] - o[2]];
    let w = [c[0] - o[0], c[1] - o[1], c[2] - o[2]];
    dot3(&cross(&u, &v), &w) / 6.0
}

/// Volume of `{y : <a_i, y> <= b_i}` with all `b_i > 0` via polarity: hull the
/// points `a_i / b_i`, map each hull facet `<w, x> = d` to the vertex `w / d`,
/// then hull those vertices.
pub fn polar_hull_volume(hs: &[Halfspace]) -> Result<f64> {
    let pts: Vec<[f64; 3]> = hs
        .iter()
        .map(|h| {
            if h.offset <= 0.0 {
                Err(invalid("polar hull route needs positive offsets"))
            } else {
                Ok([h.normal[0] / h.offset, h.normal[1] / h.offset, h.normal[2] / h.offset])
            }
        })
        .collect::<Result<_>>()?;
    let hull = ConvexHull3::build(&pts).map_err(|_| Error::Unbounded("normals do not surround the origin".into()))?;
    let mut dual = Vec::with_capacity(hull.faces.len());
    for f in &hull.faces {
        if f.offset <= 1e-12 * hull.scale {
            return Err(Error::Unbounded("origin on the boundary of the normal hull".into()));
        }
        dual.push([f.normal[0] / f.offset, f.normal[1] / f.offset, f.normal[2] / f.offset]);
    }
    Ok(ConvexHull3::build(&dual)?.volume())
}

#[derive(Clone, Debug)]
pub struct HullFace {
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// `<normal, x> = offset` on the face plane.
    pub offset: f64,
}

/// Incremental convex hull in R^3 with triangulated faces.
#[derive(Clone, Debug)]
pub struct ConvexHull3 {
    pub points: Vec<[f64; 3]>,
    pub faces: Vec<HullFace>,
    interior: [f64; 3],
    scale: f64,
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

impl ConvexHull3 {
    pub fn build(points: &[[f64; 3]]) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InvalidArgument("hull needs at least 4 points".into()));
        }
        let scale = points
            .iter()
            .flat_map(|p| p.iter().map(|c| c.abs()))
            .fold(0.0_f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let eps = 1e-12 * scale;
        let dist = |a: &[f64; 3], b: &[f64; 3]| super::norm(&sub(a, b));
        let i0 = 0;
        let i1 = (0..points.len())
            .max_by(|&x, &y| dist(&points[x], &points[i0]).partial_cmp(&dist(&points[y], &points[i0])).unwrap())
            .unwrap();
        if dist(&points[i1], &points[i0]) <= eps {
            return Err(Error::InvalidArgument("degenerate hull: all points coincide".into()));
        }
        let line = sub(&points[i1], &points[i0]);
        let i2 = (0..points.len())
            .max_by(|&x, &y| {
                let dx = super::norm(&cross(&line, &sub(&points[x], &points[i0])));
                let dy = super::norm(&cross(&line, &sub(&points[y], &points[i0])));
                dx.partial_cmp(&dy).unwrap()
            })
            .unwrap();
        let pn = cross(&line, &sub(&points[i2], &points[i0]));
        if super::norm(&pn) <= eps * super::norm(&line) {
            return Err(Error::InvalidArgument("degenerate hull: collinear points".into()));
        }
        let i3 = (0..points.len())
            .max_by(|&x, &y| {
                let dx = dot3(&pn, &sub(&points[x], &points[i0])).abs();
                let dy = dot3(&pn, &sub(&points[y], &points[i0])).abs();
                dx.partial_cmp(&dy).unwrap()
            })
            .unwrap();
        if dot3(&pn, &sub(&points[i3], &points[i0])).abs() <= eps * super::norm(&pn) {
            return Err(Error::InvalidArgument("degenerate hull: coplanar points".into()));
        }
        let seed = [i0, i1, i2, i3];
        let mut interior = [0.0; 3];
        for &i in &seed {
            for t in 0..3 {
                interior[t] += points[i][t] / 4.0;
            }
        }

        let mut hull = Self { points: points.to_vec(), faces: Vec::new(), interior, scale };
        let mut alive: Vec<bool> = Vec::new();
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
            hull.push_face(tri, &mut alive, &mut edges)?;
        }
        for (p, &x) in points.iter().enumerate() {
            if seed.contains(&p) {
                continue;
            }
            let visible: Vec<usize> = (0..hull.faces.len())
                .filter(|&f| alive[f] && dot3(&hull.faces[f].normal, &x) - hull.faces[f].offset > eps)
                .collect();
            if visible.is_empty() {
                continue;
            }
            let mut horizon = Vec::new();
            for &f in &visible {
                let v = hull.faces[f].vertices;
                for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                    let twin = *edges
                        .get(&(b, a))
                        .ok_or_else(|| Error::InvalidArgument("hull lost an edge twin".into()))?;
                    if !visible.contains(&twin) {
                        horizon.push((a, b));
                    }
                }
            }
            for &f in &visible {
                alive[f] = false;
                let v = hull.faces[f].vertices;
                for e in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                    edges.remove(&e);
                }
            }
            for (a, b) in horizon {
                hull.push_face_oriented([a, b, p], &mut alive, &mut edges);
            }
        }
        let faces = hull.faces.iter().zip(&alive).filter(|(_, &a)| a).map(|(f, _)| f.clone()).collect();
        hull.faces = faces;
        Ok(hull)
    }

    fn push_face(
        &mut self,
        tri: [usize; 3],
        alive: &mut Vec<bool>,
        edges: &mut HashMap<(usize, usize), usize>,
    ) -> Result<()> {
        let (a, b, c) = (self.points[tri[0]], self.points[tri[1]], self.points[tri[2]]);
        let n = cross(&sub(&b, &a), &sub(&c, &a));
        let tri = if dot3(&n, &sub(&self.interior, &a)) > 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
        self.push_face_oriented(tri, alive, edges);
        Ok(())
    }

    fn push_face_oriented(&mut self, tri: [usize; 3], alive: &mut Vec<bool>, edges: &mut HashMap<(usize, usize), usize>) {
        let (a, b, c) = (self.points[tri[0]], self.points[tri[1]], self.points[tri[2]]);
        let n = cross(&sub(&b, &a), &sub(&c, &a));
        let r = super::norm(&n).max(f64::MIN_POSITIVE);
        let normal = [n[0] / r, n[1] / r, n[2] / r];
        let id = self.faces.len();
        self.faces.push(HullFace { vertices: tri, normal, offset: dot3(&normal, &a) });
        alive.push(true);
        for e in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            edges.insert(e, id);
        }
    }

    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.vertices;
                tetra_volume(&self.interior, &self.points[a], &self.points[b], &self.points[c])
            })
            .sum()
    }

    /// Indices of points that are hull vertices.
    pub fn vertex_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.faces.iter().flat_map(|f| f.vertices).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}
