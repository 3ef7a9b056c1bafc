// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::weak::check_strength;
use super::{apply_layer, prepare_bell, BellVariant, DetectorConvention};
use crate::error::{invalid, Result};
use crate::estimator::{
    apply_blgi_calibration, calibration_factor, BlgiTerms, CalibrationCurve, CalibrationMode, ROLES,
};
use crate::noise::{dephasing_channel, flip_shots, readout_confusion, NoiseModel};
use crate::sim::{sample_shots_sharded, DensityMatrix, Gate, ProbabilityTable, ShotTable};

/// Register positions of the chain `α1 – β1 – β2 – α2`.
pub const ALPHA1: usize = 0;
pub const BETA1: usize = 1;
pub const BETA2: usize = 2;
pub const ALPHA2: usize = 3;

const N_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlgiConfig {
    pub angle_a: f64,
    pub angle_b: f64,
    pub angle_a_prime: f64,
    pub angle_b_prime: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub bell_variant: BellVariant,
    pub n_shots: usize,
    pub calibration_mode: CalibrationMode,
    /// Offsets added to `(a, b, a′, b′)`.
    pub detector_trim: [f64; 4],
    /// Inserts an X echo on both Bell qubits right after preparation.
    pub echo: bool,
}

impl Default for BlgiConfig {
    fn default() -> Self {
        Self {
            angle_a: 0.0,
            angle_b: FRAC_PI_4,
            angle_a_prime: FRAC_PI_2,
            angle_b_prime: 3.0 * FRAC_PI_4,
            phi1: 0.45,
            phi2: 0.45,
            bell_variant: BellVariant::PsiMinus,
            n_shots: 600_000,
            calibration_mode: CalibrationMode::EmpiricalZero,
            detector_trim: [0.0; 4],
            echo: false,
        }
    }
}

impl BlgiConfig {
    /// Same strength on both ancillas.
    pub fn with_phi(&self, phi: f64) -> Self {
        Self {
            phi1: phi,
            phi2: phi,
            ..self.clone()
        }
    }

    /// Detector offsets of the kind a pulse optimiser leaves behind: `b` a
    /// few degrees below π/4 and ~3° on both final rotations.
    pub fn experimental_trim() -> [f64; 4] {
        let deg = PI / 180.0;
        [0.0, -3.0 * deg, 3.0 * deg, 3.0 * deg]
    }

    pub fn validate(&self) -> Result<()> {
        check_strength(self.phi1)?;
        check_strength(self.phi2)?;
        if self.n_shots == 0 {
            return Err(invalid("n_shots must be at least 1"));
        }
        let angles = [
            self.angle_a,
            self.angle_b,
            self.angle_a_prime,
            self.angle_b_prime,
        ];
        if angles
            .iter()
            .chain(&self.detector_trim)
            .any(|x| !x.is_finite())
        {
            return Err(invalid("detector angles must be finite"));
        }
        Ok(())
    }

    /// Trimmed `(a, b, a′, b′)`.
    pub fn effective_angles(&self) -> [f64; 4] {
        let t = self.detector_trim;
        [
            self.angle_a + t[0],
            self.angle_b + t[1],
            self.angle_a_prime + t[2],
            self.angle_b_prime + t[3],
        ]
    }
}

/// Register snapshots at the stages of one noiseless-or-noisy run.
#[derive(Debug, Clone)]
pub struct BlgiTrace {
    /// Right after Bell preparation.
    pub prepared: DensityMatrix,
    /// After the first-basis rotations (and ancilla strength rotations).
    pub first_basis: DensityMatrix,
    /// After the simultaneous CZ layer.
    pub after_weak: DensityMatrix,
    /// Before readout.
    pub final_state: DensityMatrix,
}

fn check_noise(noise: &NoiseModel) -> Result<()> {
    noise.validate()?;
    if noise.n_qubits() != N_QUBITS {
        return Err(invalid(format!(
            "noise model covers {} qubits, the chain has {N_QUBITS}",
            noise.n_qubits()
        )));
    }
    Ok(())
}

/// Runs the circuit with an explicit detector convention.
pub fn trace_blgi_with_convention(
    config: &BlgiConfig,
    noise: &NoiseModel,
    convention: DetectorConvention,
) -> Result<BlgiTrace> {
    config.validate()?;
    check_noise(noise)?;
    let [a, b, a_prime, b_prime] = config.effective_angles();

    let mut rho = DensityMatrix::thermal(N_QUBITS, &noise.thermal_pops)?;
    prepare_bell(&mut rho, BETA1, BETA2, config.bell_variant, noise)?;
    let prepared = rho.clone();

    if config.echo {
        apply_layer(&mut rho, &[Gate::rx(BETA1, PI), Gate::rx(BETA2, PI)], noise)?;
    }

    apply_layer(
        &mut rho,
        &[
            Gate::ry(ALPHA1, config.phi1),
            convention.first(BETA1, a),
            convention.first(BETA2, b),
            Gate::ry(ALPHA2, config.phi2),
        ],
        noise,
    )?;
    let first_basis = rho.clone();

    apply_layer(
        &mut rho,
        &[Gate::cz(BETA1, ALPHA1), Gate::cz(BETA2, ALPHA2)],
        noise,
    )?;
    if noise.window_dephasing > 0.0 {
        for q in [BETA1, BETA2] {
            dephasing_channel(&mut rho, q, noise.window_dephasing / 2.0)?;
        }
    }
    let after_weak = rho.clone();

    apply_layer(
        &mut rho,
        &[
            Gate::ry(ALPHA1, -FRAC_PI_2),
            convention.relative(BETA1, a, a_prime),
            convention.relative(BETA2, b, b_prime),
            Gate::ry(ALPHA2, -FRAC_PI_2),
        ],
        noise,
    )?;

    Ok(BlgiTrace {
        prepared,
        first_basis,
        after_weak,
        final_state: rho,
    })
}

pub fn trace_blgi(config: &BlgiConfig, noise: &NoiseModel) -> Result<BlgiTrace> {
    trace_blgi_with_convention(config, noise, DetectorConvention::RESOLVED)
}

/// Sixteen-outcome distribution over `(α1, β1, β2, α2)` before readout error.
pub fn blgi_pre_readout(config: &BlgiConfig, noise: &NoiseModel) -> Result<ProbabilityTable> {
    let trace = trace_blgi(config, noise)?;
    trace
        .final_state
        .outcome_distribution(&[ALPHA1, BETA1, BETA2, ALPHA2])?
        .with_roles(&ROLES)
}

/// Sixteen-outcome distribution over `(α1, β1, β2, α2)` as reported.
pub fn run_blgi(config: &BlgiConfig, noise: &NoiseModel) -> Result<ProbabilityTable> {
    let dist = blgi_pre_readout(config, noise)?;
    readout_confusion(&dist, &noise.readout)
}

/// Reported ancilla means for definite target preparations at one pair of
/// strengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    /// `⟨Z⟩` of (α1, α2) with both targets prepared in `|0⟩`.
    pub zero: [f64; 2],
    /// `⟨Z⟩` of (α1, α2) with both targets prepared in `|1⟩`.
    pub one: [f64; 2],
}

/// Simulates the ancilla calibration experiment: the targets are prepared in
/// `|0⟩` (or flipped to `|1⟩`), then probed with exactly the layers the
/// correlator run uses.
pub fn calibration_point(phi1: f64, phi2: f64, noise: &NoiseModel) -> Result<CalibrationPoint> {
    check_strength(phi1)?;
    check_strength(phi2)?;
    check_noise(noise)?;
    let mut point = CalibrationPoint {
        zero: [0.0; 2],
        one: [0.0; 2],
    };
    for excited in [false, true] {
        let mut rho = DensityMatrix::thermal(N_QUBITS, &noise.thermal_pops)?;
        if excited {
            apply_layer(&mut rho, &[Gate::rx(BETA1, PI), Gate::rx(BETA2, PI)], noise)?;
        }
        apply_layer(
            &mut rho,
            &[Gate::ry(ALPHA1, phi1), Gate::ry(ALPHA2, phi2)],
            noise,
        )?;
        apply_layer(
            &mut rho,
            &[Gate::cz(BETA1, ALPHA1), Gate::cz(BETA2, ALPHA2)],
            noise,
        )?;
        apply_layer(
            &mut rho,
            &[Gate::ry(ALPHA1, -FRAC_PI_2), Gate::ry(ALPHA2, -FRAC_PI_2)],
            noise,
        )?;
        let dist = rho.outcome_distribution(&[ALPHA1, ALPHA2])?;
        let reported = readout_confusion(&dist, &[noise.readout[ALPHA1], noise.readout[ALPHA2]])?;
        let z = [reported.expectation_z(0)?, reported.expectation_z(1)?];
        if excited {
            point.one = z;
        } else {
            point.zero = z;
        }
    }
    Ok(point)
}

/// Calibration curves of (α1, α2) over a strength grid, same φ on both.
pub fn calibration_curves(phi_grid: &[f64], noise: &NoiseModel) -> Result<[CalibrationCurve; 2]> {
    let points = phi_grid
        .iter()
        .map(|&phi| calibration_point(phi, phi, noise))
        .collect::<Result<Vec<_>>>()?;
    let curve = |k: usize| {
        CalibrationCurve::new(
            phi_grid.to_vec(),
            points.iter().map(|p| p.zero[k]).collect(),
            points.iter().map(|p| p.one[k]).collect(),
        )
    };
    Ok([curve(0)?, curve(1)?])
}

/// Exact distribution plus raw and calibrated correlator terms.
#[derive(Debug, Clone)]
pub struct BlgiEvaluation {
    pub distribution: ProbabilityTable,
    pub raw: BlgiTerms,
    pub calibrated: BlgiTerms,
    pub correlator: f64,
    pub cal1: f64,
    pub cal2: f64,
}

/// Ancilla calibration factors for the configured mode.
pub fn calibration_factors(config: &BlgiConfig, noise: &NoiseModel) -> Result<(f64, f64)> {
    match config.calibration_mode {
        CalibrationMode::SinPhi => Ok((
            calibration_factor(config.phi1, CalibrationMode::SinPhi, None)?,
            calibration_factor(config.phi2, CalibrationMode::SinPhi, None)?,
        )),
        CalibrationMode::EmpiricalZero => {
            let point = calibration_point(config.phi1, config.phi2, noise)?;
            let curve = |phi: f64, k: usize| {
                CalibrationCurve::new(vec![phi], vec![point.zero[k]], vec![point.one[k]])
            };
            Ok((
                calibration_factor(
                    config.phi1,
                    CalibrationMode::EmpiricalZero,
                    Some(&curve(config.phi1, 0)?),
                )?,
                calibration_factor(
                    config.phi2,
                    CalibrationMode::EmpiricalZero,
                    Some(&curve(config.phi2, 1)?),
                )?,
            ))
        }
    }
}

pub fn evaluate_blgi(config: &BlgiConfig, noise: &NoiseModel) -> Result<BlgiEvaluation> {
    let distribution = run_blgi(config, noise)?;
    let raw = BlgiTerms::from_distribution(&distribution)?;
    let (cal1, cal2) = calibration_factors(config, noise)?;
    let calibrated = apply_blgi_calibration(raw, cal1, cal2);
    Ok(BlgiEvaluation {
        distribution,
        raw,
        correlator: calibrated.correlator(),
        calibrated,
        cal1,
        cal2,
    })
}

/// Monte Carlo shots: samples the pre-readout distribution, then applies
/// readout error bit by bit.
pub fn sample_blgi(
    config: &BlgiConfig,
    noise: &NoiseModel,
    seed: u64,
    shards: usize,
) -> Result<ShotTable> {
    let dist = blgi_pre_readout(config, noise)?;
    let mut shots = sample_shots_sharded(&dist, config.n_shots, seed, shards)?;
    flip_shots(&mut shots, &noise.readout, readout_seed(seed))?;
    Ok(shots)
}

fn readout_seed(seed: u64) -> u64 {
    seed.rotate_left(32) ^ 0x005E_ED0F_F11B
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn ideal() -> NoiseModel {
        NoiseModel::ideal(4)
    }

    #[test]
    fn weak_limit_reaches_tsirelson() {
        let cfg = BlgiConfig::default().with_phi(0.001);
        let eval = evaluate_blgi(&cfg, &ideal()).unwrap();
        assert!(
            (eval.correlator - 2.0 * SQRT_2).abs() < 1e-3,
            "{}",
            eval.correlator
        );
    }

    #[test]
    fn projective_limit_collapses() {
        let cfg = BlgiConfig::default().with_phi(FRAC_PI_2);
        let eval = evaluate_blgi(&cfg, &ideal()).unwrap();
        assert!((eval.calibrated.aa.abs() - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!(eval.correlator < 2.0);
    }

    #[test]
    fn noiseless_correlator_follows_back_action_curve() {
        // (1 + cos φ)² / √2 for the ideal singlet.
        for k in 1..=10 {
            let phi = FRAC_PI_2 * k as f64 / 10.0;
            let eval = evaluate_blgi(&BlgiConfig::default().with_phi(phi), &ideal()).unwrap();
            let want = (1.0 + phi.cos()).powi(2) / SQRT_2;
            assert!((eval.correlator - want).abs() < 1e-10);
        }
    }

    #[test]
    fn empirical_and_sine_calibration_agree_without_noise() {
        for k in 0..12 {
            let phi = 0.05 + 0.13 * k as f64;
            let base = BlgiConfig::default().with_phi(phi);
            let sin = calibration_factors(
                &BlgiConfig {
                    calibration_mode: CalibrationMode::SinPhi,
                    ..base.clone()
                },
                &ideal(),
            )
            .unwrap();
            let emp = calibration_factors(&base, &ideal()).unwrap();
            assert!((sin.0 - emp.0).abs() * phi.sin() < 1e-9);
            assert!((sin.1 - emp.1).abs() * phi.sin() < 1e-9);
        }
    }

    #[test]
    fn zero_strength_needs_no_calibration_but_cannot_be_calibrated() {
        let cfg = BlgiConfig::default().with_phi(0.0);
        assert!(run_blgi(&cfg, &ideal()).is_ok());
        assert!(evaluate_blgi(&cfg, &ideal()).is_err());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(run_blgi(&BlgiConfig::default().with_phi(2.0), &ideal()).is_err());
        let cfg = BlgiConfig {
            n_shots: 0,
            ..BlgiConfig::default()
        };
        assert!(run_blgi(&cfg, &ideal()).is_err());
        assert!(run_blgi(&BlgiConfig::default(), &NoiseModel::ideal(3)).is_err());
    }

    #[test]
    fn echo_leaves_ideal_singlet_correlations_alone() {
        let base = BlgiConfig::default().with_phi(0.3);
        let a = run_blgi(&base, &ideal()).unwrap();
        let b = run_blgi(&BlgiConfig { echo: true, ..base }, &ideal()).unwrap();
        for (x, y) in a.probs().iter().zip(b.probs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_shots_are_reproducible() {
        let cfg = BlgiConfig {
            n_shots: 5_000,
            ..BlgiConfig::default()
        };
        let noise = NoiseModel::paper_like();
        let a = sample_blgi(&cfg, &noise, 42, 4).unwrap();
        let b = sample_blgi(&cfg, &noise, 42, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n_shots(), 5_000);
    }
}
