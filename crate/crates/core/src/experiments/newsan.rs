use super::{polar_value, Check, EstimatorChoice, ExperimentReport, Mode, SideSummary};
use crate::error::{invalid, Error, Result};
use crate::geom::{unit_ball_volume, Body, DirectionGrid};
use crate::measure::RadialMeasure;
use crate::rng::RngStream;
use crate::volume::Estimate;

/// Relative tolerance of the origin-symmetry check on the direction grid.
pub const SYMMETRY_REL_TOL: f64 = 1e-9;

/// Compares `ν(K°)` with `ν((t_K B)°)`, where `t_K B` is the centered ball of
/// the same volume as `K`. Passes when `ν(K°) ≤ ν((t_K B)°) + 3·stderr`.
pub fn newsan_experiment(
    body: &Body,
    measure: &RadialMeasure,
    budget: u64,
    seed: u64,
    estimator: EstimatorChoice,
) -> Result<ExperimentReport> {
    let n = body.dim();
    crate::error::check_dim(n, measure.dim())?;
    if n > 3 {
        return Err(Error::Unsupported("volume-normalized comparison needs n ≤ 3".into()));
    }
    let grid = DirectionGrid::default_for(n)?;
    for theta in grid.iter() {
        let minus: Vec<f64> = theta.iter().map(|c| -c).collect();
        let (a, b) = (body.support_value(theta)?, body.support_value(&minus)?);
        if (a - b).abs() > SYMMETRY_REL_TOL * a.abs().max(b.abs()).max(1.0) {
            return Err(invalid("body must be origin-symmetric"));
        }
    }
    let vol = body.volume()?;
    if !(vol > 0.0) {
        return Err(invalid("body must have nonempty interior"));
    }
    let t_k = (vol / unit_ball_volume(n)).powf(1.0 / n as f64);
    let rhs = measure.ball_mass(1.0 / t_k)?;
    let lhs = polar_value(body, measure, budget, RngStream::from_seed(seed).named("newsan"), estimator)?;
    let bound = rhs + 3.0 * lhs.stderr + 1e-12 * rhs;
    let mut report = ExperimentReport::new(Mode::Newsan, seed, vec![Check::at_most("polar_measure_body", lhs.value, bound)]);
    let er = Estimate::exact(rhs);
    report.work.add(&lhs);
    report.work.add(&er);
    report.sides = vec![SideSummary::from_estimates("X", &[lhs]), SideSummary::from_estimates("Z", &[er])];
    report.notes.push(format!("volume = {vol}, t_K = {t_k}"));
    Ok(report)
}
