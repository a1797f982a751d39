//! Exact evaluation of `∫ ∏_i g_i(Σ_j c_ij s_j) ds` for one-dimensional step
//! functions, before and after symmetric decreasing rearrangement.
//!
//! Expanding the product over the pieces of each `g_i` turns the integral
//! into a weighted sum of volumes of convex polytopes
//! `{s ∈ [-L, L]^N : a_i ≤ ⟨c_i, s⟩ ≤ b_i}`, computed exactly for `N ≤ 3`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::polytope::{clip_square, enumerate_vertices, polygon_area, ConvexHull3, Halfspace};
use crate::measure::StepFn1d;

/// Slack allowed in `lhs ≤ rhs`.
pub const RBLL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbllResult {
    pub lhs: f64,
    pub rhs: f64,
}

impl RbllResult {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + RBLL_TOL
    }
}

/// One instance of the inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbllCase {
    pub functions: Vec<StepFn1d>,
    pub coeffs: Vec<Vec<f64>>,
    pub half_width: f64,
}

fn polytope_volume(n: usize, hs: &[Halfspace], half_width: f64) -> Result<f64> {
    match n {
        1 => {
            let (mut lo, mut hi) = (-half_width, half_width);
            for h in hs {
                let a = h.normal[0];
                if a > 0.0 {
                    hi = hi.min(h.offset / a);
                } else if a < 0.0 {
                    lo = lo.max(h.offset / a);
                } else if h.offset < 0.0 {
                    return Ok(0.0);
                }
            }
            Ok((hi - lo).max(0.0))
        }
        2 => Ok(polygon_area(&clip_square(hs, half_width)).max(0.0)),
        3 => {
            let mut all = hs.to_vec();
            for j in 0..3 {
                for sign in [1.0, -1.0] {
                    let mut e = vec![0.0; 3];
                    e[j] = sign;
                    all.push(Halfspace::new(e, half_width));
                }
            }
            let verts = enumerate_vertices(3, &all)?;
            if verts.len() < 4 {
                return Ok(0.0);
            }
            let pts: Vec<[f64; 3]> = verts.iter().map(|v| [v[0], v[1], v[2]]).collect();
            match ConvexHull3::build(&pts) {
                Ok(h) => Ok(h.volume()),
                Err(Error::InvalidArgument(_)) => Ok(0.0),
                Err(e) => Err(e),
            }
        }
        _ => Err(Error::Unsupported(format!("exact cell decomposition in dimension {n}"))),
    }
}

fn product_integral(functions: &[StepFn1d], coeffs: &[Vec<f64>], n: usize, half_width: f64) -> Result<f64> {
    // rows with c_i = 0 contribute the constant g_i(0)
    let mut constant = 1.0;
    let mut active = Vec::new();
    for (g, c) in functions.iter().zip(coeffs) {
        if c.iter().all(|&v| v == 0.0) {
            constant *= g.eval(0.0);
        } else {
            active.push((g, c));
        }
    }
    if constant == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut choice = vec![0usize; active.len()];
    if active.iter().any(|(g, _)| g.pieces().is_empty()) {
        return Ok(0.0);
    }
    loop {
        let mut weight = constant;
        let mut hs = Vec::with_capacity(2 * active.len());
        for ((g, c), &k) in active.iter().zip(&choice) {
            let (a, b, v) = g.pieces()[k];
            weight *= v;
            hs.push(Halfspace::new(c.to_vec(), b));
            hs.push(Halfspace::new(c.iter().map(|x| -x).collect(), -a));
        }
        if weight != 0.0 {
            total += weight * polytope_volume(n, &hs, half_width)?;
        }
        // odometer over piece choices
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(total);
            }
            choice[i] += 1;
            if choice[i] < active[i].0.pieces().len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// `lhs = ∫_{[-L,L]^N} ∏ g_i(Σ_j c_ij s_j) ds` and the same with every `g_i`
/// replaced by its symmetric decreasing rearrangement. The centered box is
/// itself a product of symmetric decreasing factors, so `lhs ≤ rhs` is the
/// rearrangement inequality on `ℝ^N`.
pub fn rbll_check_1d(functions: &[StepFn1d], coeffs: &[Vec<f64>], half_width: f64) -> Result<RbllResult> {
    if functions.is_empty() || functions.len() > 3 {
        return Err(invalid("between 1 and 3 functions are supported"));
    }
    check_dim(functions.len(), coeffs.len())?;
    let n = coeffs[0].len();
    if n == 0 || n > 3 {
        return Err(invalid("between 1 and 3 integration variables are supported"));
    }
    for c in coeffs {
        check_dim(n, c.len())?;
        if c.iter().any(|v| !v.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Unbounded("integration box must be bounded".into()));
    }
    let stars: Vec<StepFn1d> = functions.iter().map(|g| g.rearranged_on_line()).collect();
    Ok(RbllResult {
        lhs: product_integral(functions, coeffs, n, half_width)?,
        rhs: product_integral(&stars, coeffs, n, half_width)?,
    })
}

/// Every placement of up to three unit intervals `[a, a+1)` with
/// `a ∈ {-3/2, -1/2, 0, 1}` and every coefficient matrix in `{-1,0,1}^{k×N}`
/// for `k·N ≤ 6`, integrated over `[-2, 2]^N`.
pub fn rbll_family() -> Vec<RbllCase> {
    const STARTS: [f64; 4] = [-1.5, -0.5, 0.0, 1.0];
    let mut cases = Vec::new();
    for k in 1..=3usize {
        for n in 1..=3usize {
            if k * n > 6 {
                continue;
            }
            let entries = k * n;
            for code in 0..3usize.pow(entries as u32) {
                let mut c = code;
                let mut coeffs = vec![vec![0.0; n]; k];
                for row in coeffs.iter_mut() {
                    for v in row.iter_mut() {
                        *v = (c % 3) as f64 - 1.0;
                        c /= 3;
                    }
                }
                for place in 0..STARTS.len().pow(k as u32) {
                    let mut p = place;
                    let functions = (0..k)
                        .map(|_| {
                            let a = STARTS[p % STARTS.len()];
                            p /= STARTS.len();
                            StepFn1d::indicator(a, a + 1.0).expect("unit interval")
                        })
                        .collect();
                    cases.push(RbllCase { functions, coeffs: coeffs.clone(), half_width: 2.0 });
                }
            }
        }
    }
    cases
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(a: f64, b: f64) -> StepFn1d {
        StepFn1d::indicator(a, b).unwrap()
    }

    #[test]
    fn interval_overlap_examples() {
        let same = rbll_check_1d(&[ind(0.0, 1.0), ind(0.0, 1.0)], &[vec![1.0], vec![1.0]], 5.0).unwrap();
        assert!((same.lhs - 1.0).abs() < 1e-15 && (same.rhs - 1.0).abs() < 1e-15);
        let apart = rbll_check_1d(&[ind(0.0, 1.0), ind(2.0, 3.0)], &[vec![1.0], vec![1.0]], 5.0).unwrap();
        assert_eq!(apart.lhs, 0.0);
        assert!((apart.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_function_is_equimeasurable() {
        let g = StepFn1d::new(vec![(0.3, 0.9, 0.5), (1.2, 1.7, 1.0)]).unwrap();
        let r = rbll_check_1d(&[g], &[vec![1.0]], 5.0).unwrap();
        assert!((r.lhs - 0.8).abs() < 1e-15);
        assert!((r.lhs - r.rhs).abs() < 1e-15);
    }

    #[test]
    fn symmetric_decreasing_inputs_give_equality() {
        let g = StepFn1d::new(vec![(-2.0, -1.0, 0.5), (-1.0, 1.0, 1.0), (1.0, 2.0, 0.5)]).unwrap();
        let h = ind(-0.5, 0.5);
        let c = vec![vec![1.0, -1.0], vec![0.5, 1.0]];
        let r = rbll_check_1d(&[g, h], &c, 3.0).unwrap();
        assert_eq!(r.lhs, r.rhs);
    }

    #[test]
    fn two_dimensional_convolution() {
        // ∫∫ 1_[0,1)(s) 1_[0,1)(t) 1_[-1/2,1/2)(s - t) ds dt = 3/4
        let r = rbll_check_1d(
            &[ind(0.0, 1.0), ind(0.0, 1.0), ind(-0.5, 0.5)],
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, -1.0]],
            3.0,
        )
        .unwrap();
        assert!((r.lhs - 0.75).abs() < 1e-12);
        assert!((r.rhs - 0.75).abs() < 1e-12);
    }

    #[test]
    fn three_dimensional_cells() {
        // unit cube of s with 1_[-1/2,1/2)(s1+s2+s3 - 3/2): central slab of the cube
        let r = rbll_check_1d(
            &[ind(0.0, 1.0), ind(0.0, 1.0)],
            &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            1.0,
        )
        .unwrap();
        // s3 ranges over [-1, 1]: volume 2
        assert!((r.lhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn family_size() {
        assert_eq!(rbll_family().len(), 156 + 13_104 + 48_384);
    }
}
