//! Reproducible statistical experiments: expectation and distributional
//! comparisons against uniform points of `D_n`, the `N → ∞` convergence
//! path, `L_p`-centroid bodies and the volume-normalized polar inequality.
//!
//! Every report is derived from a single seed; trial `i` of side `S` draws
//! its points and its Monte Carlo samples from child streams keyed by
//! `(S, i)`, so results do not depend on scheduling.

mod centroid;
mod convergence;
mod expectation;
mod newsan;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use centroid::{centroid_polar_experiment, centroid_support, lp_ball_moment, polar_measure_from_support};
pub use convergence::{convergence_experiment, kendall_tau};
pub use expectation::{rearrangement_ladder_experiment, santalo_expectation_experiment, stochastic_dominance_experiment};
pub use newsan::newsan_experiment;

use crate::error::{check_dim, invalid, Error, Result};
use crate::geom::{Body, CoefficientGauge};
use crate::measure::{PnDensity, RadialMeasure};
use crate::rng::RngStream;
use crate::volume::{exact_polar_measure, mc_polar_measure, Estimate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Expectation,
    Dominance,
    Convergence,
    Centroid,
    Newsan,
}

/// How each `ν(K°)` is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorChoice {
    /// Deterministic oracle when it applies, Monte Carlo otherwise.
    #[default]
    Auto,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// A named comparison `value ≥ bound` (or `≤`, per `kind`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value >= bound }
    }

    pub fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, bound, passed: value <= bound }
    }
}

/// Per-trial values of one side of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideSummary {
    pub label: String,
    pub mean: f64,
    /// Standard error of `mean` across trials.
    pub stderr: f64,
    pub values: Vec<f64>,
    /// Within-trial estimator standard errors (zero for exact values).
    pub value_stderr: Vec<f64>,
}

impl SideSummary {
    pub fn from_estimates(label: &str, estimates: &[Estimate]) -> Self {
        let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        } else {
            estimates.first().map_or(0.0, |e| e.stderr)
        };
        Self {
            label: label.into(),
            mean,
            stderr,
            values,
            value_stderr: estimates.iter().map(|e| e.stderr).collect(),
        }
    }
}

/// Empirical survival functions on a shared grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurves {
    pub grid: Vec<f64>,
    pub s_x: Vec<f64>,
    pub s_z: Vec<f64>,
    /// Allowed excess `3·SE` at each grid point.
    pub tolerance: Vec<f64>,
}

/// The recorded `N → ∞` path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePath {
    pub schedule: Vec<usize>,
    pub values: Vec<f64>,
    pub target: f64,
    /// Grid Hausdorff distance of `K_N` to the final body of the path.
    pub hausdorff_to_final: Vec<f64>,
    pub kendall_tau: f64,
}

/// Deterministic work counters (wall-clock time is kept out of reports so
/// that reruns are byte-identical).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub bodies: u64,
    pub exact_evaluations: u64,
    pub mc_samples: u64,
}

impl WorkCounters {
    fn add(&mut self, e: &Estimate) {
        self.bodies += 1;
        if e.samples == 0 {
            self.exact_evaluations += 1;
        } else {
            self.mc_samples += e.samples;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub mode: Mode,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub sides: Vec<SideSummary>,
    pub survival: Option<SurvivalCurves>,
    pub convergence: Option<ConvergencePath>,
    pub seed: u64,
    pub work: WorkCounters,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    fn new(mode: Mode, seed: u64, checks: Vec<Check>) -> Self {
        let verdict = Verdict::from_bool(checks.iter().all(|c| c.passed));
        Self {
            mode,
            verdict,
            checks,
            sides: Vec::new(),
            survival: None,
            convergence: None,
            seed,
            work: WorkCounters::default(),
            notes: Vec::new(),
        }
    }

    /// `trial_index,side,value,stderr` rows with a header.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("trial_index,side,value,stderr\n");
        for side in &self.sides {
            for (i, (v, s)) in side.values.iter().zip(&side.value_stderr).enumerate() {
                out.push_str(&format!("{i},{},{v},{s}\n", side.label));
            }
        }
        out
    }

    /// `t,survival_x,survival_z,tolerance` rows, when curves were recorded.
    pub fn survival_csv(&self) -> Option<String> {
        let s = self.survival.as_ref()?;
        let mut out = String::from("t,survival_x,survival_z,tolerance\n");
        for i in 0..s.grid.len() {
            out.push_str(&format!("{},{},{},{}\n", s.grid[i], s.s_x[i], s.s_z[i], s.tolerance[i]));
        }
        Some(out)
    }

    /// `N,value,hausdorff_to_final` rows, when a path was recorded.
    pub fn path_csv(&self) -> Option<String> {
        let p = self.convergence.as_ref()?;
        let mut out = String::from("N,value,hausdorff_to_final\n");
        for i in 0..p.schedule.len() {
            out.push_str(&format!("{},{},{}\n", p.schedule[i], p.values[i], p.hausdorff_to_final[i]));
        }
        Some(out)
    }
}

/// Validated configuration of the random-body experiments.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub big_n: usize,
    pub gauge: CoefficientGauge,
    pub rball: f64,
    pub law_x: PnDensity,
    pub measure: RadialMeasure,
    pub trials: usize,
    pub budget_per_trial: u64,
    pub seed: u64,
    pub mode: Mode,
    pub estimator: EstimatorChoice,
    /// Convergence mode: values of `N` along the path.
    pub schedule: Vec<usize>,
    /// Convergence mode: allowed relative excess over the limit at the last `N`.
    pub band: f64,
    /// Dominance mode: number of survival levels.
    pub survival_levels: usize,
}

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_BUDGET: u64 = 20_000;
pub const DEFAULT_BAND: f64 = 0.05;
pub const DEFAULT_SURVIVAL_LEVELS: usize = 50;

pub fn default_schedule() -> Vec<usize> {
    (2..=9).map(|k| 1usize << k).collect()
}

impl ExperimentConfig {
    /// Configuration with default trial counts, budget, schedule and levels.
    pub fn new(mode: Mode, gauge: CoefficientGauge, law_x: PnDensity, measure: RadialMeasure) -> Result<Self> {
        let cfg = Self {
            n: law_x.dim(),
            big_n: gauge.dim(),
            gauge,
            rball: 0.0,
            law_x,
            measure,
            trials: DEFAULT_TRIALS,
            budget_per_trial: DEFAULT_BUDGET,
            seed: 0,
            mode,
            estimator: EstimatorChoice::Auto,
            schedule: default_schedule(),
            band: DEFAULT_BAND,
            survival_levels: DEFAULT_SURVIVAL_LEVELS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.big_n == 0 {
            return Err(invalid("n and N must be ≥ 1"));
        }
        check_dim(self.n, self.law_x.dim())?;
        check_dim(self.n, self.measure.dim())?;
        if self.mode != Mode::Convergence {
            check_dim(self.big_n, self.gauge.dim())?;
        }
        if !(self.rball >= 0.0 && self.rball.is_finite()) {
            return Err(invalid("rball must be finite and ≥ 0"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be ≥ 1"));
        }
        if self.budget_per_trial < 2 {
            return Err(invalid("budget_per_trial must be ≥ 2"));
        }
        if matches!(self.mode, Mode::Expectation | Mode::Dominance) && !self.gauge.is_unconditional() {
            return Err(invalid("gauge must be unconditional for expectation and dominance modes"));
        }
        if !self.measure.condnu2().decreasing {
            return Err(invalid("measure density ρ must be decreasing"));
        }
        if self.mode == Mode::Dominance && !self.measure.condnu2().condnu2 {
            return Err(invalid("dominance mode needs ρ^{-1/(n+1)} convex (check_condnu2 failed)"));
        }
        if self.mode == Mode::Dominance && self.survival_levels < 2 {
            return Err(invalid("survival_levels must be ≥ 2"));
        }
        if self.mode == Mode::Convergence {
            if self.schedule.is_empty() || self.schedule.windows(2).any(|w| w[1] <= w[0]) {
                return Err(invalid("schedule must be nonempty and strictly increasing"));
            }
            if !(self.band > 0.0) {
                return Err(invalid("band must be > 0"));
            }
        }
        Ok(())
    }
}

/// `ν(K°)` by the configured estimator.
pub fn polar_value(
    body: &Body,
    measure: &RadialMeasure,
    budget: u64,
    stream: RngStream,
    estimator: EstimatorChoice,
) -> Result<Estimate> {
    if estimator == EstimatorChoice::Auto && body.dim() <= 3 {
        match exact_polar_measure(body, measure) {
            Ok(v) => return Ok(Estimate::exact(v)),
            Err(Error::Unsupported(_)) | Err(Error::Unbounded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    mc_polar_measure(body, measure, budget, stream)
}

/// Draw the `N` columns of one trial.
fn draw_columns(law: &PnDensity, count: usize, stream: RngStream) -> Result<Vec<Vec<f64>>> {
    let mut rng = stream.rng();
    (0..count).map(|_| law.sample(&mut rng)).collect()
}

/// Values of `ν(([X_1 ⋯ X_N]C + rB)°)` over `cfg.trials` independent trials
/// with columns drawn from `law`; side `label` keys the random streams.
fn side_trials(cfg: &ExperimentConfig, law: &PnDensity, label: &str) -> Result<Vec<Estimate>> {
    let root = RngStream::from_seed(cfg.seed).named(label);
    let points = root.named("points");
    let mc = root.named("mc");
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let cols = draw_columns(law, cfg.big_n, points.child(i as u64))?;
            let body = Body::matrix_image(&cols, cfg.gauge.clone(), cfg.rball)?;
            polar_value(&body, &cfg.measure, cfg.budget_per_trial, mc.child(i as u64), cfg.estimator)
        })
        .collect()
}
