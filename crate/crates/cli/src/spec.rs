//! JSON configuration schemas and their conversion into validated core
//! types. Conversion errors carry the dotted path of the offending field.

use randpolar_core::analysis::ShadowConfig;
use randpolar_core::experiments::{default_schedule, EstimatorChoice, ExperimentConfig, Mode};
use randpolar_core::geom::{CoefficientGauge, Halfspace};
use randpolar_core::measure::{BodyIndicator, BoxIndicator, DensityOracle, GaussianFactor, StepFn1d};
use randpolar_core::{Body, PnDensity, RadialMeasure, RadialStepFn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Invalid configuration: `path` names the field, `message` the violated rule.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{path} {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

pub type ConfigResult<T> = Result<T, ConfigError>;

fn join(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn core_err(path: &str) -> impl Fn(randpolar_core::Error) -> ConfigError + '_ {
    move |e| ConfigError::new(path, format!("is invalid: {e}"))
}

/// Deserialize `text`, reporting structural errors with their field path.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> ConfigResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "config".to_string() } else { path };
        ConfigError::new(path, format!("could not be parsed: {}", e.inner()))
    })
}

/// `q` of an `l_q` gauge: a number or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    Named(String),
}

impl Exponent {
    fn value(&self, path: &str) -> ConfigResult<f64> {
        match self {
            Exponent::Finite(q) => Ok(*q),
            Exponent::Named(s) if matches!(s.as_str(), "inf" | "infinity" | "∞") => Ok(f64::INFINITY),
            Exponent::Named(s) => Err(ConfigError::new(path, format!("must be a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeSpec {
    Lq { q: Exponent },
}

impl GaugeSpec {
    pub fn l1() -> Self {
        GaugeSpec::Lq { q: Exponent::Finite(1.0) }
    }

    pub fn to_core(&self, dim: usize, path: &str) -> ConfigResult<CoefficientGauge> {
        match self {
            GaugeSpec::Lq { q } => {
                let qp = join(path, "q");
                let q = q.value(&qp)?;
                if !(q >= 1.0) {
                    return Err(ConfigError::new(qp, "must be ≥ 1"));
                }
                CoefficientGauge::lq(dim, q).map_err(core_err(path))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Lebesgue,
    LebesgueBall {
        #[serde(rename = "R")]
        radius: f64,
    },
    Gaussian {
        sigma: f64,
    },
    PowerKernel {
        k_table: Vec<(f64, f64)>,
    },
    Step {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
}

impl MeasureSpec {
    pub fn to_core(&self, dim: usize, path: &str) -> ConfigResult<RadialMeasure> {
        match self {
            MeasureSpec::Lebesgue => Ok(RadialMeasure::lebesgue(dim)),
            MeasureSpec::LebesgueBall { radius } => {
                if !(*radius > 0.0) {
                    return Err(ConfigError::new(join(path, "R"), "must be > 0"));
                }
                RadialMeasure::lebesgue_ball(dim, *radius).map_err(core_err(path))
            }
            MeasureSpec::Gaussian { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(ConfigError::new(join(path, "sigma"), "must be finite and > 0"));
                }
                RadialMeasure::gaussian(dim, *sigma).map_err(core_err(path))
            }
            MeasureSpec::PowerKernel { k_table } => {
                if k_table.len() < 2 {
                    return Err(ConfigError::new(join(path, "k_table"), "needs at least 2 rows"));
                }
                RadialMeasure::power_kernel(dim, k_table.clone()).map_err(core_err(&join(path, "k_table")))
            }
            MeasureSpec::Step { breaks, values } => {
                let profile = RadialStepFn::new(breaks.clone(), values.clone()).map_err(core_err(path))?;
                RadialMeasure::step(dim, profile).map_err(core_err(path))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum DensitySpec {
    #[serde(rename = "uniform_cube")]
    UniformCube,
    #[serde(rename = "uniform_Dn")]
    UniformDn,
    #[serde(rename = "uniform_simplex")]
    UniformSimplex,
    #[serde(rename = "radial_step")]
    RadialStep { breaks: Vec<f64>, values: Vec<f64> },
}

impl DensitySpec {
    pub fn to_core(&self, dim: usize, path: &str) -> ConfigResult<PnDensity> {
        let d = match self {
            DensitySpec::UniformCube => PnDensity::uniform_cube(dim),
            DensitySpec::UniformDn => PnDensity::uniform_dn(dim),
            DensitySpec::UniformSimplex => PnDensity::uniform_simplex(dim),
            DensitySpec::RadialStep { breaks, values } => {
                RadialStepFn::new(breaks.clone(), values.clone()).and_then(|p| PnDensity::radial_step(dim, p))
            }
        };
        d.map_err(core_err(path))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        n: usize,
        radius: f64,
    },
    Cube {
        n: usize,
        half: f64,
    },
    CrossPolytope {
        points: Vec<Vec<f64>>,
    },
    MatrixImage {
        columns: Vec<Vec<f64>>,
        #[serde(default = "GaugeSpec::l1")]
        gauge: GaugeSpec,
        #[serde(default)]
        r: f64,
    },
    Hpolytope {
        n: usize,
        halfspaces: Vec<HalfspaceSpec>,
    },
}

impl BodySpec {
    pub fn to_core(&self, path: &str) -> ConfigResult<Body> {
        let b = match self {
            BodySpec::Ball { n, radius } => Body::ball(*n, *radius),
            BodySpec::Cube { n, half } => {
                if !(*half > 0.0) {
                    return Err(ConfigError::new(join(path, "half"), "must be > 0"));
                }
                Body::cube(*n, *half)
            }
            BodySpec::CrossPolytope { points } => Body::cross_polytope(points),
            BodySpec::MatrixImage { columns, gauge, r } => {
                if *r < 0.0 {
                    return Err(ConfigError::new(join(path, "r"), "must be ≥ 0"));
                }
                let g = gauge.to_core(columns.len(), &join(path, "gauge"))?;
                Body::matrix_image(columns, g, *r)
            }
            BodySpec::Hpolytope { n, halfspaces } => Body::hpolytope(
                *n,
                halfspaces.iter().map(|h| Halfspace::new(h.normal.clone(), h.offset)).collect(),
            ),
        };
        b.map_err(core_err(path))
    }
}

/// Densities for the gauge commands (not necessarily probability densities).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    /// `exp(-|x|²/2σ²)`.
    Gaussian { sigma: f64 },
    /// Indicator of `[-half, half]ⁿ`.
    Box { half: f64 },
    /// `ρ(|x|)` of a radial measure.
    Radial { measure: MeasureSpec },
    /// Indicator of a body.
    Body { body: BodySpec },
}

impl OracleSpec {
    pub fn to_core(&self, dim: usize, path: &str) -> ConfigResult<Box<dyn DensityOracle>> {
        Ok(match self {
            OracleSpec::Gaussian { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(ConfigError::new(join(path, "sigma"), "must be finite and > 0"));
                }
                Box::new(GaussianFactor { dim, sigma: *sigma })
            }
            OracleSpec::Box { half } => {
                if !(*half > 0.0 && half.is_finite()) {
                    return Err(ConfigError::new(join(path, "half"), "must be finite and > 0"));
                }
                Box::new(BoxIndicator::symmetric(dim, *half))
            }
            OracleSpec::Radial { measure } => Box::new(measure.to_core(dim, &join(path, "measure"))?),
            OracleSpec::Body { body } => {
                let bp = join(path, "body");
                let b = body.to_core(&bp)?;
                if b.dim() != dim {
                    return Err(ConfigError::new(bp, format!("must have dimension {dim}")));
                }
                Box::new(BodyIndicator::new(b).map_err(core_err(&join(path, "body")))?)
            }
        })
    }
}

fn default_trials() -> usize {
    randpolar_core::experiments::DEFAULT_TRIALS
}
fn default_budget_per_trial() -> u64 {
    randpolar_core::experiments::DEFAULT_BUDGET
}
fn default_band() -> f64 {
    randpolar_core::experiments::DEFAULT_BAND
}
fn default_levels() -> usize {
    randpolar_core::experiments::DEFAULT_SURVIVAL_LEVELS
}
fn default_law() -> DensitySpec {
    DensitySpec::UniformDn
}

/// Configuration of the `santalo`, `dominance` and `converge` commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: usize,
    #[serde(rename = "N", default)]
    pub big_n: usize,
    #[serde(default = "GaugeSpec::l1")]
    pub gauge: GaugeSpec,
    #[serde(default)]
    pub rball: f64,
    #[serde(default = "default_law")]
    pub law_x: DensitySpec,
    pub measure: MeasureSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_budget_per_trial")]
    pub budget_per_trial: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorChoice,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<usize>,
    #[serde(default = "default_band")]
    pub band: f64,
    #[serde(default = "default_levels")]
    pub survival_levels: usize,
    /// `santalo` only: add the rearranged law as a middle side.
    #[serde(default)]
    pub ladder: bool,
}

/// Parse and validate an experiment configuration for `mode`.
pub fn parse_experiment_config(text: &str, mode: Mode) -> ConfigResult<(ExperimentSpec, ExperimentConfig)> {
    let spec: ExperimentSpec = parse_json(text)?;
    let cfg = spec.to_core(mode)?;
    Ok((spec, cfg))
}

impl ExperimentSpec {
    pub fn to_core(&self, mode: Mode) -> ConfigResult<ExperimentConfig> {
        let n = self.n;
        if !(1..=64).contains(&n) {
            return Err(ConfigError::new("n", "must be between 1 and 64"));
        }
        let big_n = if mode == Mode::Convergence {
            // the convergence path uses B₁^N for every N of the schedule
            *self.schedule.last().unwrap_or(&1)
        } else {
            if self.big_n == 0 {
                return Err(ConfigError::new("N", "must be ≥ 1"));
            }
            self.big_n
        };
        if !(self.rball >= 0.0 && self.rball.is_finite()) {
            return Err(ConfigError::new("rball", "must be finite and ≥ 0"));
        }
        if self.trials == 0 {
            return Err(ConfigError::new("trials", "must be ≥ 1"));
        }
        if self.budget_per_trial < 2 {
            return Err(ConfigError::new("budget_per_trial", "must be ≥ 2"));
        }
        if mode == Mode::Convergence {
            if self.schedule.is_empty() || self.schedule.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::new("schedule", "must be nonempty and strictly increasing"));
            }
            if !(self.band > 0.0) {
                return Err(ConfigError::new("band", "must be > 0"));
            }
        }
        if mode == Mode::Dominance && self.survival_levels < 2 {
            return Err(ConfigError::new("survival_levels", "must be ≥ 2"));
        }
        let gauge = self.gauge.to_core(big_n, "gauge")?;
        if matches!(mode, Mode::Expectation | Mode::Dominance) && !gauge.is_unconditional() {
            return Err(ConfigError::new("gauge", "must be unconditional"));
        }
        let law_x = self.law_x.to_core(n, "law_x")?;
        let measure = self.measure.to_core(n, "measure")?;
        let report = measure.condnu2();
        if !report.decreasing {
            return Err(ConfigError::new("measure", "must have a decreasing density"));
        }
        if mode == Mode::Dominance && !report.condnu2 {
            return Err(ConfigError::new("measure", "must have ρ^{-1/(n+1)} convex for dominance"));
        }
        let mut cfg = ExperimentConfig::new(mode, gauge, law_x, measure).map_err(core_err("config"))?;
        cfg.rball = self.rball;
        cfg.trials = self.trials;
        cfg.budget_per_trial = self.budget_per_trial;
        cfg.seed = self.seed;
        cfg.estimator = self.estimator;
        cfg.schedule = self.schedule.clone();
        cfg.band = self.band;
        cfg.survival_levels = self.survival_levels;
        cfg.validate().map_err(core_err("config"))?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarMethod {
    #[default]
    Auto,
    MonteCarlo,
    LayerCake,
    Exact,
}

fn default_budget() -> u64 {
    100_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarVolumeSpec {
    pub body: BodySpec,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub method: PolarMethod,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
    /// Layer-cake levels; the default grid when absent.
    #[serde(default)]
    pub levels: Option<Vec<f64>>,
    /// Reference value: the verdict checks agreement within 3 standard errors.
    #[serde(default)]
    pub expected: Option<f64>,
}

fn default_t_grid() -> Vec<f64> {
    (-5..=5).map(|i| i as f64 * 0.2).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowSpec {
    pub theta: Vec<f64>,
    pub base_positions: Vec<Vec<f64>>,
    #[serde(default = "GaugeSpec::l1")]
    pub gauge: GaugeSpec,
    #[serde(default)]
    pub rball: f64,
    pub measure: MeasureSpec,
    pub direction: Vec<f64>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
}

impl ShadowSpec {
    pub fn to_core(&self) -> ConfigResult<ShadowConfig> {
        let n = self.theta.len();
        if n == 0 {
            return Err(ConfigError::new("theta", "must be nonempty"));
        }
        if self.direction.len() != self.base_positions.len() {
            return Err(ConfigError::new("direction", "must have one entry per base position"));
        }
        let gauge = self.gauge.to_core(self.base_positions.len(), "gauge")?;
        let measure = self.measure.to_core(n, "measure")?;
        ShadowConfig::new(self.theta.clone(), self.base_positions.clone(), gauge, self.rball, measure)
            .map_err(core_err("config"))
    }
}

fn default_pairs() -> usize {
    200
}
fn default_scale() -> f64 {
    1.0
}
fn default_segments() -> usize {
    50
}
fn default_pair_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusemannSpec {
    pub n: usize,
    pub density: OracleSpec,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Points are drawn uniformly from `[-scale, scale]ⁿ`.
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pair_tol")]
    pub tol: f64,
    #[serde(default = "default_segments")]
    pub concavity_segments: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeKind {
    BallBobkov,
    MilmanPajor,
}

fn default_points() -> usize {
    100
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeCmdSpec {
    pub gauge: GaugeKind,
    pub n: usize,
    pub density: OracleSpec,
    pub p: f64,
    /// Spanning vectors of `E` (Milman–Pajor only).
    #[serde(default)]
    pub subspace: Vec<Vec<f64>>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_pair_tol")]
    pub tol: f64,
}

/// Convex positive functions `φ(t, x)` for the Brunn profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `c + (t - shift)² + |x|²`.
    Quadratic { c: f64, #[serde(default)] shift: f64 },
    /// `sqrt(c + t² + |x|²)`.
    Hyperbolic { c: f64 },
    /// `exp(|t| + |x|₁)`.
    ExpL1,
    /// `value` on `[-radius, radius]ⁿ`, `+∞` outside.
    ConstantOnBox { value: f64, radius: f64 },
}

impl PhiSpec {
    pub fn validate(&self, path: &str) -> ConfigResult<()> {
        match self {
            PhiSpec::Quadratic { c, .. } | PhiSpec::Hyperbolic { c } if !(*c > 0.0) => {
                Err(ConfigError::new(join(path, "c"), "must be > 0"))
            }
            PhiSpec::ConstantOnBox { value, .. } if !(*value > 0.0) => {
                Err(ConfigError::new(join(path, "value"), "must be > 0"))
            }
            PhiSpec::ConstantOnBox { radius, .. } if !(*radius > 0.0) => {
                Err(ConfigError::new(join(path, "radius"), "must be > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        let x2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            PhiSpec::Quadratic { c, shift } => c + (t - shift).powi(2) + x2,
            PhiSpec::Hyperbolic { c } => (c + t * t + x2).sqrt(),
            PhiSpec::ExpL1 => (t.abs() + x.iter().map(|v| v.abs()).sum::<f64>()).exp(),
            PhiSpec::ConstantOnBox { value, .. } => *value,
        }
    }

    pub fn x_radius(&self) -> Option<f64> {
        match self {
            PhiSpec::ConstantOnBox { radius, .. } => Some(*radius),
            _ => None,
        }
    }
}

fn default_brunn_grid() -> Vec<f64> {
    (-8..=8).map(|i| i as f64 * 0.25).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrunnSpec {
    pub phi: PhiSpec,
    pub alpha: f64,
    pub n: usize,
    #[serde(default = "default_brunn_grid")]
    pub t_grid: Vec<f64>,
}

/// One user-supplied instance: step functions as `[a, b, value]` pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbllCaseSpec {
    pub functions: Vec<Vec<(f64, f64, f64)>>,
    pub coeffs: Vec<Vec<f64>>,
    pub half_width: f64,
}

impl RbllCaseSpec {
    pub fn functions(&self, path: &str) -> ConfigResult<Vec<StepFn1d>> {
        self.functions
            .iter()
            .enumerate()
            .map(|(i, f)| StepFn1d::new(f.clone()).map_err(core_err(&format!("{path}.functions[{i}]"))))
            .collect()
    }
}

/// `rbll` configuration; the exhaustive built-in family when `cases` is absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbllSpec {
    #[serde(default)]
    pub cases: Option<Vec<RbllCaseSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentroidSpec {
    pub n: usize,
    pub mu: DensitySpec,
    pub p: f64,
    pub measure: MeasureSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewsanSpec {
    pub body: BodySpec,
    pub measure: MeasureSpec,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimator: EstimatorChoice,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_q_below_one_names_the_field() {
        let text = r#"{"n": 2, "N": 4, "gauge": {"kind": "lq", "q": 0.5}, "measure": {"kind": "lebesgue"}}"#;
        let err = parse_experiment_config(text, Mode::Expectation).unwrap_err();
        assert_eq!(err.to_string(), "gauge.q must be ≥ 1");
    }

    #[test]
    fn structural_errors_carry_paths() {
        let text = r#"{"n": 2, "N": 4, "measure": {"kind": "lebesgue_ball", "R": "big"}}"#;
        let err = parse_experiment_config(text, Mode::Expectation).unwrap_err();
        // tagged enums are buffered, so the path stops at the enum field
        assert_eq!(err.path, "measure");
        assert!(err.message.contains("expected f64"), "{err}");
        let text = r#"{"n": 2, "N": "four", "measure": {"kind": "lebesgue"}}"#;
        assert_eq!(parse_experiment_config(text, Mode::Expectation).unwrap_err().path, "N");
        let text = r#"{"n": 2, "N": 4, "measure": {"kind": "lebesgue"}, "bogus": 1}"#;
        assert!(parse_experiment_config(text, Mode::Expectation).is_err());
    }

    #[test]
    fn infinite_exponent_is_accepted() {
        let text = r#"{"n": 2, "N": 2, "gauge": {"kind": "lq", "q": "inf"}, "measure": {"kind": "lebesgue"}}"#;
        let (_, cfg) = parse_experiment_config(text, Mode::Expectation).unwrap();
        assert_eq!(cfg.gauge.q(), Some(f64::INFINITY));
    }

    #[test]
    fn dominance_requires_convex_profile() {
        let text = r#"{"n": 2, "N": 3, "measure": {"kind": "step", "breaks": [1, 2], "values": [1, 0.5]}}"#;
        let err = parse_experiment_config(text, Mode::Dominance).unwrap_err();
        assert_eq!(err.path, "measure");
    }

    #[test]
    fn specs_round_trip_through_json() {
        let text = r#"{"n": 2, "N": 4, "law_x": {"kind": "uniform_cube"},
                       "measure": {"kind": "power_kernel", "k_table": [[0, 1], [1, 2]]}, "seed": 9}"#;
        let (spec, _) = parse_experiment_config(text, Mode::Expectation).unwrap();
        let again: ExperimentSpec = parse_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, again);
        let body = BodySpec::MatrixImage { columns: vec![vec![1.0, 0.0]], gauge: GaugeSpec::l1(), r: 0.5 };
        let json = serde_json::to_string(&body).unwrap();
        assert_eq!(parse_json::<BodySpec>(&json).unwrap(), body);
    }
}
