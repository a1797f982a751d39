//! Radial and one-dimensional step functions and their symmetric decreasing
//! rearrangements.
//!
//! Level sets of a step function are finite unions of annuli (or
//! intervals), so rearrangement is exact: sort the pieces by value and stack
//! their volumes into centered balls.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geom::unit_ball_volume;

/// Radial step function `t ↦ values[j]` on `[breaks[j-1], breaks[j])`, with
/// `breaks[-1] = 0` and value `0` beyond the last break.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialStepFn {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl RadialStepFn {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(invalid("step function needs matching, nonempty breaks and values"));
        }
        let mut prev = 0.0;
        for &b in &breaks {
            if !(b > prev) || !b.is_finite() {
                return Err(invalid("breaks must be finite, positive and strictly increasing"));
            }
            prev = b;
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("step values must be finite and nonnegative"));
        }
        Ok(Self { breaks, values })
    }

    /// Indicator of the centered ball of radius `r`.
    pub fn ball_indicator(radius: f64) -> Result<Self> {
        Self::new(vec![radius], vec![1.0])
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn inner(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.breaks[j - 1]
        }
    }

    /// Value at radius `t >= 0` (right-continuous).
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.breaks.partition_point(|&b| b <= t) {
            j if j < self.values.len() => self.values[j],
            _ => 0.0,
        }
    }

    pub fn outer_radius(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// Radius of the support: the outer edge of the last nonzero piece.
    pub fn support_radius(&self) -> f64 {
        self.values.iter().rposition(|&v| v > 0.0).map_or(0.0, |j| self.breaks[j])
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Volume of the `j`-th annulus in `R^n`.
    pub fn annulus_volume(&self, j: usize, n: usize) -> f64 {
        unit_ball_volume(n) * (self.breaks[j].powi(n as i32) - self.inner(j).powi(n as i32))
    }

    /// `|{x ∈ R^n : f(|x|) > alpha}|`.
    pub fn level_set_volume(&self, alpha: f64, n: usize) -> f64 {
        (0..self.values.len()).filter(|&j| self.values[j] > alpha).map(|j| self.annulus_volume(j, n)).sum()
    }

    /// `∫_{R^n} f(|x|)^p dx`; `p = ∞` gives the sup.
    pub fn lp_norm(&self, n: usize, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup();
        }
        let s: f64 = (0..self.values.len()).map(|j| self.values[j].powf(p) * self.annulus_volume(j, n)).sum();
        s.powf(1.0 / p)
    }

    pub fn integral(&self, n: usize) -> f64 {
        self.lp_norm(n, 1.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// Merge equal neighbours and drop trailing zero pieces.
    fn compacted(&self) -> Self {
        let mut breaks: Vec<f64> = Vec::with_capacity(self.breaks.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.values.len());
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if values.last() == Some(&v) {
                *breaks.last_mut().unwrap() = b;
            } else {
                breaks.push(b);
                values.push(v);
            }
        }
        while values.len() > 1 && values.last() == Some(&0.0) {
            values.pop();
            breaks.pop();
        }
        Self { breaks, values }
    }

    /// Symmetric decreasing rearrangement in `R^n`.
    pub fn rearranged(&self, n: usize) -> Self {
        if self.is_nonincreasing() {
            return self.compacted();
        }
        let dim = n as i32;
        let mut pieces: Vec<(f64, f64)> = (0..self.values.len())
            .filter(|&j| self.values[j] > 0.0)
            .map(|j| (self.values[j], self.breaks[j].powi(dim) - self.inner(j).powi(dim)))
            .collect();
        pieces.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        Self::stack(pieces, n)
    }

    /// Stack `(value, r^n-measure)` pieces, sorted by value, into a radial step.
    fn stack(pieces: Vec<(f64, f64)>, n: usize) -> Self {
        if pieces.is_empty() {
            return Self { breaks: vec![1.0], values: vec![0.0] };
        }
        let mut cum = 0.0;
        let mut breaks = Vec::with_capacity(pieces.len());
        let mut values = Vec::with_capacity(pieces.len());
        for (v, m) in pieces {
            cum += m;
            breaks.push(cum.powf(1.0 / n as f64));
            values.push(v);
        }
        Self { breaks, values }.compacted()
    }
}

/// Step function on the line: `value` on each half-open interval `[a, b)`,
/// zero elsewhere. Intervals must be disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFn1d {
    pieces: Vec<(f64, f64, f64)>,
}

impl StepFn1d {
    pub fn new(mut pieces: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(a, b, v) in &pieces {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(invalid("1-D step pieces need finite a < b"));
            }
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid("1-D step values must be finite and nonnegative"));
            }
        }
        pieces.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        if pieces.windows(2).any(|w| w[1].0 < w[0].1) {
            return Err(invalid("1-D step pieces overlap"));
        }
        Ok(Self { pieces })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b, 1.0)])
    }

    pub fn pieces(&self) -> &[(f64, f64, f64)] {
        &self.pieces
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.pieces.iter().find(|p| p.0 <= s && s < p.1).map_or(0.0, |p| p.2)
    }

    pub fn level_set_length(&self, alpha: f64) -> f64 {
        self.pieces.iter().filter(|p| p.2 > alpha).map(|p| p.1 - p.0).sum()
    }

    pub fn is_symmetric_decreasing(&self) -> bool {
        self.pieces.iter().all(|p| {
            // every level set must be a centered interval
            let alpha = p.2;
            let (lo, hi) = self
                .pieces
                .iter()
                .filter(|q| q.2 >= alpha)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), q| (l.min(q.0), h.max(q.1)));
            lo == -hi && self.pieces.iter().filter(|q| q.2 >= alpha).map(|q| q.1 - q.0).sum::<f64>() == hi - lo
        })
    }

    /// Symmetric decreasing rearrangement on the line.
    pub fn rearranged(&self) -> RadialStepFn {
        let mut pieces: Vec<(f64, f64)> =
            self.pieces.iter().filter(|p| p.2 > 0.0).map(|p| (p.2, 0.5 * (p.1 - p.0))).collect();
        pieces.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        RadialStepFn::stack(pieces, 1)
    }

    /// Rearrangement expressed on the line, for evaluation alongside `self`.
    pub fn rearranged_on_line(&self) -> StepFn1d {
        let star = self.rearranged();
        let mut pieces = Vec::new();
        for (j, (&b, &v)) in star.breaks.iter().zip(&star.values).enumerate() {
            if v == 0.0 {
                continue;
            }
            let a = star.inner(j);
            if a == 0.0 {
                pieces.push((-b, b, v));
            } else {
                pieces.push((-b, -a, v));
                pieces.push((a, b, v));
            }
        }
        StepFn1d::new(pieces).expect("rearrangement pieces are disjoint")
    }
}
