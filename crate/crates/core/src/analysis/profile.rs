//! Sampled one-parameter profiles and their grid convexity/evenness checks.

use serde::{Deserialize, Serialize};

/// How the profile values were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    /// Closed form or deterministic quadrature; stderr is zero.
    Exact,
    MonteCarlo,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub even: bool,
    pub midpoint_convex: bool,
    /// Largest excess `g(t_1) - chord(t_1)` over all consecutive triples
    /// (zero when every triple lies on or below its chord).
    pub worst_violation: f64,
    /// Largest `|g(t) - g(-t)|` over symmetric grid pairs.
    pub worst_asymmetry: f64,
    /// Fixed tolerance added to every comparison.
    pub tol: f64,
}

impl ConvexityVerdict {
    pub fn passed(&self) -> bool {
        self.even && self.midpoint_convex
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileReport {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Vec<f64>,
    pub method: ProfileMethod,
    pub verdict: ConvexityVerdict,
}

impl ProfileReport {
    /// Build a report and evaluate it with fixed tolerance `tol`.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, stderr: Vec<f64>, method: ProfileMethod, tol: f64) -> Self {
        let verdict = check(&grid, &values, &stderr, tol);
        Self { grid, values, stderr, method, verdict }
    }

    /// `t,value,stderr` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value,stderr\n");
        for ((t, v), s) in self.grid.iter().zip(&self.values).zip(&self.stderr) {
            out.push_str(&format!("{t},{v},{s}\n"));
        }
        out
    }
}

/// Re-evaluate a profile with tolerance `tol` plus three propagated
/// standard errors per comparison.
pub fn convexity_even_check(p: &ProfileReport, tol: f64) -> ConvexityVerdict {
    check(&p.grid, &p.values, &p.stderr, tol)
}

fn check(grid: &[f64], values: &[f64], stderr: &[f64], tol: f64) -> ConvexityVerdict {
    let mut convex = true;
    let mut worst = 0.0_f64;
    for i in 0..grid.len().saturating_sub(2) {
        let (t0, t1, t2) = (grid[i], grid[i + 1], grid[i + 2]);
        let (w0, w2) = ((t2 - t1) / (t2 - t0), (t1 - t0) / (t2 - t0));
        let chord = w0 * values[i] + w2 * values[i + 2];
        let excess = values[i + 1] - chord;
        let se = (stderr[i + 1].powi(2) + (w0 * stderr[i]).powi(2) + (w2 * stderr[i + 2]).powi(2)).sqrt();
        worst = worst.max(excess);
        if excess > tol + 3.0 * se {
            convex = false;
        }
    }
    let mut even = true;
    let mut asym = 0.0_f64;
    let scale = grid.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    for (i, &t) in grid.iter().enumerate() {
        if t <= 0.0 {
            continue;
        }
        if let Some(j) = grid.iter().position(|&s| (s + t).abs() <= 1e-12 * scale.max(1.0)) {
            let d = (values[i] - values[j]).abs();
            asym = asym.max(d);
            if d > tol + 3.0 * stderr[i].hypot(stderr[j]) {
                even = false;
            }
        }
    }
    ConvexityVerdict { even, midpoint_convex: convex, worst_violation: worst, worst_asymmetry: asym, tol }
}
