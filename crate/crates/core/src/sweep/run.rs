// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{config_error, Experiment, Mode, SweepConfig};
use crate::error::{Error, Result};
use crate::estimator::{
    apply_blgi_calibration, empirical_terms, estimate_blgi_shots, estimate_term, BlgiTerms,
    CorrelatorEstimate, CLASSICAL_BOUND,
};
use crate::noise::NoiseModel;
use crate::protocol::{
    calibration_factors, calibration_point, chsh_correlation, evaluate_blgi, lgi_combination,
    run_lgi, run_lgi_weak, sample_blgi, BlgiConfig, ChshConfig, DetectorConvention,
};
use crate::sim::{sample_shots_sharded, ProbabilityTable};

/// Macrorealist upper bound of `E12 + E23 − E13`.
pub const LGI_BOUND: f64 = 1.0;

/// One output line. Column meanings per experiment are listed in the README.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub raw: [f64; 4],
    pub cal: [f64; 4],
    pub c: f64,
    pub sem: f64,
    /// Omitted in exact mode.
    pub sigmas: Option<f64>,
    pub n_shots: u64,
    pub mode: Mode,
}

/// Seed of grid point `index`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn significance(mean: f64, sem: f64, bound: f64) -> f64 {
    let excess = mean - bound;
    if sem > 0.0 {
        excess / sem
    } else if excess > 0.0 {
        f64::INFINITY
    } else if excess < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    }
}

/// The BLGI configuration and noise model of one grid point.
pub fn blgi_point(config: &SweepConfig, value: f64) -> Result<(BlgiConfig, NoiseModel)> {
    let mut noise = config.noise.build()?;
    let mut blgi = config.blgi.clone();
    match config.experiment {
        Experiment::BlgiPhiSweep => blgi = blgi.with_phi(value),
        Experiment::DephasingSweep => noise.window_dephasing = value,
        Experiment::VisibilitySweep => {
            noise = noise.with_visibility(value).map_err(config_error)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "{other} is not a four-qubit correlator experiment"
            )))
        }
    }
    Ok((blgi, noise))
}

fn blgi_row(config: &SweepConfig, value: f64, seed: u64, cal_scale: f64) -> Result<SweepRow> {
    let (blgi, noise) = blgi_point(config, value)?;
    match config.mode {
        Mode::Exact => {
            let eval = evaluate_blgi(&blgi, &noise)?;
            Ok(SweepRow {
                sweep_value: value,
                raw: eval.raw.as_array(),
                cal: eval.calibrated.as_array(),
                c: eval.correlator,
                sem: 0.0,
                sigmas: None,
                n_shots: 0,
                mode: Mode::Exact,
            })
        }
        Mode::MonteCarlo => {
            let (cal1, cal2) = calibration_factors(&blgi, &noise)?;
            let (cal1, cal2) = (cal1 * cal_scale, cal2 * cal_scale);
            let shots = sample_blgi(&blgi, &noise, seed, config.shards)?;
            let raw = empirical_terms(&shots)?;
            let est = estimate_blgi_shots(&shots, cal1, cal2)?;
            Ok(SweepRow {
                sweep_value: value,
                raw: raw.as_array(),
                cal: apply_blgi_calibration(raw, cal1, cal2).as_array(),
                c: est.mean,
                sem: est.sem,
                sigmas: Some(est.sigmas_above_classical),
                n_shots: est.n,
                mode: Mode::MonteCarlo,
            })
        }
    }
}

/// Monte Carlo estimate of a product of two columns from a two-or-more-bit
/// distribution.
fn sampled_term(
    dist: &ProbabilityTable,
    cols: (usize, usize),
    scale: f64,
    n: usize,
    seed: u64,
    shards: usize,
) -> Result<CorrelatorEstimate> {
    let shots = sample_shots_sharded(dist, n, seed, shards)?;
    estimate_term(&shots, cols.0, cols.1, scale)
}

/// Combined estimate of `Σ sign_k · X_k` for independent estimates.
fn combine(terms: &[(f64, CorrelatorEstimate)]) -> (f64, f64, u64) {
    let mean = terms.iter().map(|(s, e)| s * e.mean).sum();
    let sem = terms.iter().map(|(_, e)| e.sem * e.sem).sum::<f64>().sqrt();
    let n = terms.iter().map(|(_, e)| e.n).sum();
    (mean, sem, n)
}

fn chsh_row(config: &SweepConfig, theta: f64, seed: u64) -> Result<SweepRow> {
    let cfg = ChshConfig {
        theta,
        ..config.chsh.clone()
    };
    cfg.validate().map_err(config_error)?;
    let noise = config.noise.build()?;
    let [a, b, ap, bp] = cfg.angles();
    let settings = [(a, b), (ap, b), (a, bp), (ap, bp)];
    let signs = [1.0, 1.0, 1.0, -1.0];
    match config.mode {
        Mode::Exact => {
            let mut e = [0.0; 4];
            for (k, &(x, y)) in settings.iter().enumerate() {
                e[k] =
                    chsh_correlation(cfg.bell_variant, x, y, &noise, DetectorConvention::RESOLVED)?;
            }
            let c = e.iter().zip(signs).map(|(v, s)| v * s).sum();
            Ok(SweepRow {
                sweep_value: theta,
                raw: e,
                cal: e,
                c,
                sem: 0.0,
                sigmas: None,
                n_shots: 0,
                mode: Mode::Exact,
            })
        }
        Mode::MonteCarlo => {
            let mut terms = Vec::with_capacity(4);
            for (k, &(x, y)) in settings.iter().enumerate() {
                let e =
                    chsh_correlation(cfg.bell_variant, x, y, &noise, DetectorConvention::RESOLVED)?;
                let dist = two_bit(e)?;
                let seed_k = point_seed(seed, k);
                terms.push((
                    signs[k],
                    sampled_term(&dist, (0, 1), 1.0, cfg.n_shots, seed_k, config.shards)?,
                ));
            }
            let e: [f64; 4] = std::array::from_fn(|k| terms[k].1.mean);
            let (c, sem, n) = combine(&terms);
            Ok(SweepRow {
                sweep_value: theta,
                raw: e,
                cal: e,
                c,
                sem,
                sigmas: Some(significance(c, sem, CLASSICAL_BOUND)),
                n_shots: n,
                mode: Mode::MonteCarlo,
            })
        }
    }
}

/// A symmetric two-bit distribution with correlation `e`; only the parity
/// statistics of a two-detector experiment enter `E`.
fn two_bit(e: f64) -> Result<ProbabilityTable> {
    let same = (1.0 + e) / 4.0;
    let diff = (1.0 - e) / 4.0;
    ProbabilityTable::new(vec!["x".into(), "y".into()], vec![same, diff, diff, same])
}

fn lgi_row(config: &SweepConfig, spacing: f64, seed: u64) -> Result<SweepRow> {
    let noise = config.noise.build()?;
    let angles = [0.0, spacing, 2.0 * spacing];
    let prep = config.lgi.state_prep;
    let (result, scale) = match config.lgi.phi {
        None => (run_lgi(prep, angles, &noise)?, 1.0),
        Some(phi) => (run_lgi_weak(prep, angles, phi, &noise)?, phi.sin()),
    };
    // Raw columns hold the uncalibrated ancilla correlations.
    let raw = [result.e12 * scale, result.e23 * scale, result.e13, 0.0];
    let cal = [result.e12, result.e23, result.e13, 0.0];
    match config.mode {
        Mode::Exact => Ok(SweepRow {
            sweep_value: spacing,
            raw,
            cal,
            c: result.combination,
            sem: 0.0,
            sigmas: None,
            n_shots: 0,
            mode: Mode::Exact,
        }),
        Mode::MonteCarlo => {
            let n = config.lgi.n_shots;
            let cal_factor = 1.0 / scale;
            let mut terms = Vec::with_capacity(3);
            for (k, (&r, factor)) in raw[..3]
                .iter()
                .zip([cal_factor, cal_factor, 1.0])
                .enumerate()
            {
                let dist = two_bit(r)?;
                let est =
                    sampled_term(&dist, (0, 1), factor, n, point_seed(seed, k), config.shards)?;
                terms.push(([1.0, 1.0, -1.0][k], est));
            }
            let sampled_cal: [f64; 4] =
                std::array::from_fn(|k| if k < 3 { terms[k].1.mean } else { 0.0 });
            let sampled_raw: [f64; 4] = std::array::from_fn(|k| match k {
                0 | 1 => sampled_cal[k] * scale,
                2 => sampled_cal[2],
                _ => 0.0,
            });
            let (c, sem, n_total) = combine(&terms);
            debug_assert!(
                (c - lgi_combination(sampled_cal[0], sampled_cal[1], sampled_cal[2])).abs() < 1e-9
            );
            Ok(SweepRow {
                sweep_value: spacing,
                raw: sampled_raw,
                cal: sampled_cal,
                c,
                sem,
                sigmas: Some(significance(c, sem, LGI_BOUND)),
                n_shots: n_total,
                mode: Mode::MonteCarlo,
            })
        }
    }
}

/// Calibration-curve columns: raw |0⟩ and |1⟩ ancilla means and their
/// `1/sin φ` rescalings, with `C` the empirical-zero calibrated |1⟩ mean of α1.
fn calibration_row(config: &SweepConfig, phi: f64, seed: u64) -> Result<SweepRow> {
    let noise = config.noise.build()?;
    let point = calibration_point(phi, phi, &noise)?;
    let exact_raw = [point.zero[0], point.one[0], point.zero[1], point.one[1]];
    let (raw, sem, n_shots, mode) = match config.mode {
        Mode::Exact => (exact_raw, 0.0, 0, Mode::Exact),
        Mode::MonteCarlo => {
            let n = config.blgi.n_shots;
            let mut raw = [0.0; 4];
            let mut sems = [0.0; 4];
            for (k, &z) in exact_raw.iter().enumerate() {
                let p1 = ((1.0 - z) / 2.0).clamp(0.0, 1.0);
                let dist = ProbabilityTable::new(vec!["a".into()], vec![1.0 - p1, p1])?;
                let shots = sample_shots_sharded(&dist, n, point_seed(seed, k), config.shards)?;
                let values: Vec<(f64, u64)> = shots
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(o, &c)| (if o == 0 { 1.0 } else { -1.0 }, c))
                    .collect();
                let est = CorrelatorEstimate::from_weighted(values)?;
                raw[k] = est.mean;
                sems[k] = est.sem;
            }
            // Delta-method error of the ratio raw[1] / raw[0].
            let ratio = raw[1] / raw[0];
            let sem = (sems[1].powi(2) + (ratio * sems[0]).powi(2)).sqrt() / raw[0].abs();
            (raw, sem, (4 * n) as u64, Mode::MonteCarlo)
        }
    };
    let s = phi.sin();
    let cal = raw.map(|z| z / s);
    let c = raw[1] / raw[0];
    Ok(SweepRow {
        sweep_value: phi,
        raw,
        cal,
        c,
        sem,
        sigmas: None,
        n_shots,
        mode,
    })
}

fn row_at(config: &SweepConfig, index: usize, value: f64, cal_scale: f64) -> Result<SweepRow> {
    let seed = point_seed(config.seed, index);
    match config.experiment {
        Experiment::BlgiPhiSweep | Experiment::DephasingSweep | Experiment::VisibilitySweep => {
            blgi_row(config, value, seed, cal_scale)
        }
        Experiment::ChshThetaSweep => chsh_row(config, value, seed),
        Experiment::Lgi => lgi_row(config, value, seed),
        Experiment::CalibrationCurves => calibration_row(config, value, seed),
    }
}

pub(crate) fn compute_rows(config: &SweepConfig, cal_scale: f64) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let grid = config.grid.values();
    let job = || {
        grid.par_iter()
            .enumerate()
            .map(|(i, &v)| row_at(config, i, v, cal_scale))
            .collect::<Result<Vec<_>>>()
    };
    match config.workers {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// Computes one row per grid value, in grid order. Output does not depend
/// on the worker count.
pub fn compute_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    compute_rows(config, 1.0)
}

/// Computes the sweep and, when `config.out` is set, writes it atomically.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let rows = compute_sweep(config)?;
    if let Some(path) = &config.out {
        super::emit_report(&rows, config.output_format(), path)?;
    }
    Ok(rows)
}

/// The calibrated term means of a four-qubit row, as [`BlgiTerms`].
pub fn row_terms(row: &SweepRow) -> BlgiTerms {
    BlgiTerms::new(row.cal[0], row.cal[1], row.cal[2], row.cal[3])
}
