// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::config::{Mode, SweepConfig};
use super::run::compute_rows;
use crate::error::{Error, Result};

/// Threshold above which a Monte Carlo point is flagged.
pub const Z_FLAG: f64 = 5.0;

/// Smallest shot count the comparison accepts.
pub const MIN_COMPARE_SHOTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZScore {
    pub sweep_value: f64,
    pub exact: f64,
    pub mc_mean: f64,
    pub sem: f64,
    pub z: f64,
    pub flagged: bool,
}

/// `(MC mean − exact)/sem` of the `C` column at every grid point.
pub fn compare_exact_mc(config: &SweepConfig) -> Result<Vec<ZScore>> {
    compare_exact_mc_scaled(config, 1.0)
}

/// As [`compare_exact_mc`], with the Monte Carlo ancilla calibration factors
/// multiplied by `cal_scale`. Used to check that the harness notices a
/// miscalibrated estimator.
pub fn compare_exact_mc_scaled(config: &SweepConfig, cal_scale: f64) -> Result<Vec<ZScore>> {
    if config.mode != Mode::MonteCarlo {
        return Err(Error::Config("comparison needs mode = monte-carlo".into()));
    }
    if !config.experiment.is_blgi() {
        return Err(Error::Config(format!(
            "comparison supports the four-qubit correlator experiments, not {}",
            config.experiment
        )));
    }
    if config.blgi.n_shots < MIN_COMPARE_SHOTS {
        return Err(Error::Config(format!(
            "comparison needs at least {MIN_COMPARE_SHOTS} shots, got {}",
            config.blgi.n_shots
        )));
    }
    if !cal_scale.is_finite() || cal_scale <= 0.0 {
        return Err(Error::Config(format!(
            "calibration scale {cal_scale} must be positive"
        )));
    }
    let exact_cfg = SweepConfig {
        mode: Mode::Exact,
        ..config.clone()
    };
    let exact = compute_rows(&exact_cfg, 1.0)?;
    let mc = compute_rows(config, cal_scale)?;
    Ok(exact
        .iter()
        .zip(&mc)
        .map(|(e, m)| {
            let z = if m.sem > 0.0 {
                (m.c - e.c) / m.sem
            } else if m.c == e.c {
                0.0
            } else {
                f64::INFINITY.copysign(m.c - e.c)
            };
            ZScore {
                sweep_value: e.sweep_value,
                exact: e.c,
                mc_mean: m.c,
                sem: m.sem,
                z,
                flagged: z.abs() > Z_FLAG,
            }
        })
        .collect())
}
