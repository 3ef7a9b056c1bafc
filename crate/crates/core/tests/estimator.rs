// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

use proptest::prelude::*;

use blgi_core::estimator::{
    apply_blgi_calibration, empirical_terms, estimate_blgi_shots, estimate_term, CalibrationMode,
    ROLES,
};
use blgi_core::noise::NoiseModel;
use blgi_core::protocol::{calibration_factors, calibration_point, run_blgi, BlgiConfig};
use blgi_core::sim::{sample_shots, ProbabilityTable};

fn four_bit(weights: Vec<f64>) -> ProbabilityTable {
    let total: f64 = weights.iter().sum();
    let probs = weights.iter().map(|w| w / total).collect();
    ProbabilityTable::new(ROLES.iter().map(|r| r.to_string()).collect(), probs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn per_shot_mean_equals_termwise_correlator(
        weights in prop::collection::vec(0.01..1.0f64, 16),
        cal1 in 1.0..20.0f64,
        cal2 in 1.0..20.0f64,
        n in 2usize..5000,
        seed in any::<u64>(),
    ) {
        let shots = sample_shots(&four_bit(weights), n, seed).unwrap();
        let per_shot = estimate_blgi_shots(&shots, cal1, cal2).unwrap().mean;
        let termwise = apply_blgi_calibration(empirical_terms(&shots).unwrap(), cal1, cal2)
            .correlator();
        prop_assert!((per_shot - termwise).abs() < 1e-12 * (1.0 + cal1 * cal2));
    }

    #[test]
    fn empirical_zero_pins_zero_trace(phi in 0.01..=FRAC_PI_2, preset in 0usize..3) {
        let noise = [NoiseModel::device(), NoiseModel::paper_like(), NoiseModel::ideal(4)][preset]
            .clone();
        let cfg = BlgiConfig {
            calibration_mode: CalibrationMode::EmpiricalZero,
            ..BlgiConfig::default()
        }
        .with_phi(phi);
        let (cal1, cal2) = calibration_factors(&cfg, &noise).unwrap();
        let zero = calibration_point(phi, phi, &noise).unwrap().zero;
        prop_assert!((zero[0] * cal1 - 1.0).abs() < 1e-12);
        prop_assert!((zero[1] * cal2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn calibrations_agree_without_noise(phi in 0.05..=FRAC_PI_2) {
        let noise = NoiseModel::ideal(4);
        let factors = |mode| {
            let cfg = BlgiConfig { calibration_mode: mode, ..BlgiConfig::default() }.with_phi(phi);
            calibration_factors(&cfg, &noise).unwrap()
        };
        let (s1, s2) = factors(CalibrationMode::SinPhi);
        let (e1, e2) = factors(CalibrationMode::EmpiricalZero);
        // compare the calibrated signals, not the factors themselves
        prop_assert!((phi.sin() * (s1 - e1)).abs() < 1e-9);
        prop_assert!((phi.sin() * (s2 - e2)).abs() < 1e-9);
    }
}

#[test]
fn ancilla_term_noise_grows_with_inverse_strength() {
    let noise = NoiseModel::ideal(4);
    let n = 200_000;
    let scaled: Vec<f64> = [FRAC_PI_2, FRAC_PI_3, FRAC_PI_6]
        .iter()
        .enumerate()
        .map(|(k, &phi)| {
            let dist = run_blgi(&BlgiConfig::default().with_phi(phi), &noise).unwrap();
            let shots = sample_shots(&dist, n, 40 + k as u64).unwrap();
            let cal = 1.0 / phi.sin();
            let sem = estimate_term(&shots, 0, 3, cal * cal).unwrap().sem;
            sem * phi.sin() * phi.sin()
        })
        .collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    for s in &scaled {
        assert!((s / mean - 1.0).abs() < 0.2, "{scaled:?}");
    }
}
