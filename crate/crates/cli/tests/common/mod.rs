//! Helpers shared by the command-line test targets.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_randpolar");

/// Small configurations exercising every subcommand.
pub const SMALL_CONFIGS: &[(&str, &str)] = &[
    (
        "polar-volume",
        r#"{"body": {"kind": "ball", "n": 2, "radius": 0.5641895835477563},
            "measure": {"kind": "lebesgue"}, "method": "monte_carlo", "budget": 20000,
            "expected": 9.869604401089358}"#,
    ),
    (
        "santalo",
        r#"{"n": 2, "N": 4, "law_x": {"kind": "uniform_cube"}, "measure": {"kind": "lebesgue_ball", "R": 5},
            "trials": 20, "budget_per_trial": 2000, "estimator": "monte_carlo"}"#,
    ),
    (
        "dominance",
        r#"{"n": 2, "N": 3, "law_x": {"kind": "uniform_cube"}, "measure": {"kind": "lebesgue_ball", "R": 5},
            "trials": 50, "budget_per_trial": 2000, "estimator": "monte_carlo"}"#,
    ),
    ("converge", r#"{"n": 2, "measure": {"kind": "lebesgue"}, "schedule": [4, 8, 16, 32], "band": 0.5}"#),
    (
        "shadow",
        r#"{"theta": [0, 1], "base_positions": [[1, 0], [0.5, 0], [-0.7, 0]],
            "measure": {"kind": "lebesgue_ball", "R": 2}, "direction": [0.48, 0.6, -0.64]}"#,
    ),
    ("busemann", r#"{"n": 2, "density": {"kind": "box", "half": 0.5}, "pairs": 10}"#),
    ("gauge", r#"{"gauge": "ball_bobkov", "n": 2, "density": {"kind": "gaussian", "sigma": 1}, "p": 2, "points": 10}"#),
    ("brunn", r#"{"phi": {"kind": "quadratic", "c": 1}, "alpha": 1, "n": 1}"#),
    (
        "rbll",
        r#"{"cases": [{"functions": [[[-1, 0, 1]], [[0.5, 1.5, 1]]], "coeffs": [[1, -1], [0, 1]], "half_width": 2}]}"#,
    ),
    ("centroid", r#"{"n": 2, "mu": {"kind": "uniform_cube"}, "p": 1, "measure": {"kind": "lebesgue"}}"#),
    (
        "newsan",
        r#"{"body": {"kind": "cube", "n": 2, "half": 1}, "measure": {"kind": "lebesgue"},
            "estimator": "monte_carlo", "budget": 20000}"#,
    ),
];

pub struct Run {
    pub code: i32,
    pub out: PathBuf,
    pub stderr: String,
}

impl Run {
    pub fn report(&self) -> Value {
        serde_json::from_str(&self.report_text()).expect("report.json is JSON")
    }

    pub fn report_text(&self) -> String {
        std::fs::read_to_string(self.out.join("report.json")).expect("report.json exists")
    }

    pub fn file(&self, name: &str) -> String {
        std::fs::read_to_string(self.out.join(name)).unwrap_or_else(|_| panic!("{name} exists"))
    }
}

/// Write `config` into `dir`, run `command` with `extra` flags, output to `dir/out_name`.
pub fn run(dir: &Path, command: &str, config: &str, out_name: &str, extra: &[&str]) -> Run {
    let cfg = dir.join(format!("{out_name}.json"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(out_name);
    let output = Command::new(BIN)
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .expect("binary runs");
    Run {
        code: output.status.code().unwrap_or(-1),
        out,
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}
