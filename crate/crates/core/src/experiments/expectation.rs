use super::{side_trials, Check, ExperimentConfig, ExperimentReport, Mode, SideSummary, SurvivalCurves, WorkCounters};
use crate::error::{invalid, Result};
use crate::measure::PnDensity;
use crate::volume::Estimate;

/// Number of combined standard errors a comparison may be violated by before
/// it counts as a failure.
pub const SIGMA_SLACK: f64 = 3.0;

fn uniform_dn(n: usize) -> PnDensity {
    PnDensity::UniformDn { dim: n }
}

fn count_work(work: &mut WorkCounters, estimates: &[Estimate]) {
    for e in estimates {
        work.add(e);
    }
}

fn require_mode(cfg: &ExperimentConfig, modes: &[Mode]) -> Result<()> {
    cfg.validate()?;
    if modes.contains(&cfg.mode) {
        Ok(())
    } else {
        Err(invalid(format!("configuration mode {:?} does not match this experiment", cfg.mode)))
    }
}

/// `mean_Z - mean_X ≥ -3·sqrt(se_X² + se_Z²)`, where each side averages
/// `ν(([X_1 ⋯ X_N]C + rB)°)` over independent trials, `X_i ~ law_x` and
/// `Z_i` uniform on `D_n`.
pub fn santalo_expectation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    require_mode(cfg, &[Mode::Expectation, Mode::Dominance])?;
    let x = side_trials(cfg, &cfg.law_x, "X")?;
    let z = side_trials(cfg, &uniform_dn(cfg.n), "Z")?;
    let sx = SideSummary::from_estimates("X", &x);
    let sz = SideSummary::from_estimates("Z", &z);
    let combined = sx.stderr.hypot(sz.stderr);
    let mut report = ExperimentReport::new(
        Mode::Expectation,
        cfg.seed,
        vec![Check::at_least("mean_z_minus_mean_x", sz.mean - sx.mean, -SIGMA_SLACK * combined)],
    );
    count_work(&mut report.work, &x);
    count_work(&mut report.work, &z);
    report.sides = vec![sx, sz];
    Ok(report)
}

/// Fraction of `values` that are `≥ t`.
fn survival(values: &[f64], t: f64) -> f64 {
    values.iter().filter(|&&v| v >= t).count() as f64 / values.len() as f64
}

/// Empirical survival functions of both sides on `levels` equally spaced
/// points spanning the pooled range, with the pooled two-proportion
/// standard error at each point.
pub fn survival_curves(x: &[f64], z: &[f64], levels: usize) -> SurvivalCurves {
    let lo = x.iter().chain(z).cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().chain(z).cloned().fold(f64::NEG_INFINITY, f64::max);
    let grid: Vec<f64> = (0..levels)
        .map(|i| if levels == 1 { lo } else { lo + (hi - lo) * i as f64 / (levels - 1) as f64 })
        .collect();
    let (mut s_x, mut s_z, mut tolerance) = (Vec::new(), Vec::new(), Vec::new());
    let (kx, kz) = (x.len() as f64, z.len() as f64);
    for &t in &grid {
        let a = survival(x, t);
        let b = survival(z, t);
        let pooled = (a * kx + b * kz) / (kx + kz);
        let se = (pooled * (1.0 - pooled) * (1.0 / kx + 1.0 / kz)).sqrt();
        s_x.push(a);
        s_z.push(b);
        tolerance.push(SIGMA_SLACK * se);
    }
    SurvivalCurves { grid, s_x, s_z, tolerance }
}

/// `S_X(t) ≤ S_Z(t) + 3·SE(t)` on a shared grid of survival levels, where
/// `S` is the empirical probability that the polar measure is at least `t`.
pub fn stochastic_dominance_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    require_mode(cfg, &[Mode::Dominance])?;
    let x = side_trials(cfg, &cfg.law_x, "X")?;
    let z = side_trials(cfg, &uniform_dn(cfg.n), "Z")?;
    let sx = SideSummary::from_estimates("X", &x);
    let sz = SideSummary::from_estimates("Z", &z);
    let curves = survival_curves(&sx.values, &sz.values, cfg.survival_levels);
    // worst margin S_Z + tol - S_X over the grid
    let margin = (0..curves.grid.len())
        .map(|i| curves.s_z[i] + curves.tolerance[i] - curves.s_x[i])
        .fold(f64::INFINITY, f64::min);
    let mut report = ExperimentReport::new(Mode::Dominance, cfg.seed, vec![Check::at_least("survival_margin", margin, 0.0)]);
    count_work(&mut report.work, &x);
    count_work(&mut report.work, &z);
    report.sides = vec![sx, sz];
    report.survival = Some(curves);
    Ok(report)
}

/// Three-way comparison `E ν(K_X°) ≤ E ν(K_{X*}°) ≤ E ν(K_Z°)`, with `X*`
/// drawn from the symmetric decreasing rearrangement of `law_x`; each step
/// is judged with the same `3σ` rule as the expectation experiment.
pub fn rearrangement_ladder_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    require_mode(cfg, &[Mode::Expectation, Mode::Dominance])?;
    let x = side_trials(cfg, &cfg.law_x, "X")?;
    let xs = side_trials(cfg, &cfg.law_x.rearranged_density(), "Xstar")?;
    let z = side_trials(cfg, &uniform_dn(cfg.n), "Z")?;
    let sx = SideSummary::from_estimates("X", &x);
    let sxs = SideSummary::from_estimates("Xstar", &xs);
    let sz = SideSummary::from_estimates("Z", &z);
    let checks = vec![
        Check::at_least("mean_xstar_minus_mean_x", sxs.mean - sx.mean, -SIGMA_SLACK * sx.stderr.hypot(sxs.stderr)),
        Check::at_least("mean_z_minus_mean_xstar", sz.mean - sxs.mean, -SIGMA_SLACK * sxs.stderr.hypot(sz.stderr)),
    ];
    let mut report = ExperimentReport::new(Mode::Expectation, cfg.seed, checks);
    for side in [&x, &xs, &z] {
        count_work(&mut report.work, side);
    }
    report.sides = vec![sx, sxs, sz];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_of_identical_samples_has_no_margin_violation() {
        let v: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let c = survival_curves(&v, &v, 50);
        assert_eq!(c.grid.len(), 50);
        assert_eq!(c.s_x[0], 1.0);
        for i in 0..50 {
            assert_eq!(c.s_x[i], c.s_z[i]);
        }
    }

    #[test]
    fn shifted_sample_is_detected() {
        let x: Vec<f64> = (0..400).map(|i| 1.0 + i as f64 / 400.0).collect();
        let z: Vec<f64> = (0..400).map(|i| i as f64 / 400.0).collect();
        let c = survival_curves(&x, &z, 50);
        let worst = (0..50).map(|i| c.s_z[i] + c.tolerance[i] - c.s_x[i]).fold(f64::INFINITY, f64::min);
        assert!(worst < 0.0);
    }
}
