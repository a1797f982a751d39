use super::{draw_columns, Check, ConvergencePath, ExperimentConfig, ExperimentReport, Mode, SideSummary};
use crate::error::{invalid, Error, Result};
use crate::geom::{hausdorff_estimate, unit_volume_ball_radius, Body, CoefficientGauge, DirectionGrid};
use crate::measure::PnDensity;
use crate::rng::RngStream;
use crate::volume::{exact_polar_measure, Estimate};

/// Minimum Kendall rank correlation between `δ^H(K_N, K_final)` and
/// `|ν(K_N°) − ν(K_final°)|` along the path.
pub const MIN_PATH_TAU: f64 = 0.5;

/// Kendall's tau-b between two equally long samples.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len().min(b.len());
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..k {
        for j in i + 1..k {
            let da = (a[i] - a[j]).signum() * ((a[i] != a[j]) as i32 as f64);
            let db = (b[i] - b[j]).signum() * ((b[i] != b[j]) as i32 as f64);
            if da == 0.0 && db == 0.0 {
                continue;
            } else if da == 0.0 {
                ties_a += 1.0;
            } else if db == 0.0 {
                ties_b += 1.0;
            } else if da == db {
                concordant += 1.0;
            } else {
                discordant += 1.0;
            }
        }
    }
    let denom = ((concordant + discordant + ties_a) * (concordant + discordant + ties_b)).sqrt();
    if denom == 0.0 {
        1.0
    } else {
        (concordant - discordant) / denom
    }
}

/// Follows one seeded path `Z_1, Z_2, …` uniform on `D_n` and records
/// `ν((conv{±Z_1, …, ±Z_N} + rB)°)` with the exact oracle at every `N` of
/// the schedule. Passes when the values are nonincreasing, the last one is
/// within `band` (relative) of the limit `ν(((r_n + r)B)°)`, and the path
/// values approach the final one in step with the Hausdorff distance.
pub fn convergence_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if cfg.mode != Mode::Convergence {
        return Err(invalid("configuration mode must be convergence"));
    }
    if cfg.n > 3 {
        return Err(Error::Unsupported("exact polar oracle needs n ≤ 3".into()));
    }
    let n = cfg.n;
    let n_max = *cfg.schedule.last().expect("validated nonempty");
    let path = draw_columns(&PnDensity::UniformDn { dim: n }, n_max, RngStream::from_seed(cfg.seed).named("path"))?;

    let bodies: Vec<Body> = cfg
        .schedule
        .iter()
        .map(|&k| Body::matrix_image(&path[..k], CoefficientGauge::lq(k, 1.0)?, cfg.rball))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = bodies.iter().map(|b| exact_polar_measure(b, &cfg.measure)).collect::<Result<_>>()?;

    let grid = DirectionGrid::default_for(n)?;
    let last = bodies.last().expect("nonempty");
    let hausdorff: Vec<f64> = bodies.iter().map(|b| hausdorff_estimate(b, last, &grid)).collect::<Result<_>>()?;

    let target = cfg.measure.ball_mass(1.0 / (unit_volume_ball_radius(n) + cfg.rball))?;
    let v_last = *values.last().expect("nonempty");

    let worst_increase = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let gaps: Vec<f64> = values.iter().map(|v| (v - v_last).abs()).collect();
    let k = values.len().saturating_sub(1);
    let tau = kendall_tau(&hausdorff[..k], &gaps[..k]);

    let mut checks = Vec::new();
    if values.len() > 1 {
        // set inclusion makes the path exactly monotone; allow rounding of the oracle
        checks.push(Check::at_most("largest_increase", worst_increase, 1e-12 * values[0].abs()));
    }
    checks.push(Check::at_most("final_relative_gap", (v_last - target).abs() / target, cfg.band));
    if k >= 2 {
        checks.push(Check::at_least("hausdorff_gap_kendall_tau", tau, MIN_PATH_TAU));
    }

    let mut report = ExperimentReport::new(Mode::Convergence, cfg.seed, checks);
    let estimates: Vec<Estimate> = values.iter().map(|&v| Estimate::exact(v)).collect();
    for e in &estimates {
        report.work.add(e);
    }
    report.sides = vec![SideSummary::from_estimates("Z", &estimates)];
    report.convergence = Some(ConvergencePath {
        schedule: cfg.schedule.clone(),
        values,
        target,
        hausdorff_to_final: hausdorff,
        kendall_tau: tau,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_tau_extremes() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau(&a, &a), 1.0);
        let b = [4.0, 3.0, 2.0, 1.0];
        assert_eq!(kendall_tau(&a, &b), -1.0);
    }
}
