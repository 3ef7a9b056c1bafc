// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::{apply_layer, prepare_bell, BellVariant, DetectorConvention, BETA1, BETA2};
use crate::error::{invalid, Result};
use crate::estimator::correlation_e;
use crate::noise::{readout_confusion, NoiseModel};
use crate::sim::DensityMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshConfig {
    /// `a − b`, in `[0, π]`.
    pub theta: f64,
    pub bell_variant: BellVariant,
    pub n_shots: usize,
    pub angle_a: f64,
}

impl Default for ChshConfig {
    fn default() -> Self {
        Self {
            theta: PI / 4.0,
            bell_variant: BellVariant::PhiPlus,
            n_shots: 100_000,
            angle_a: 0.0,
        }
    }
}

impl ChshConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !(0.0..=PI).contains(&self.theta) {
            return Err(invalid(format!("theta = {} outside [0, pi]", self.theta)));
        }
        if !self.angle_a.is_finite() {
            return Err(invalid("angle_a must be finite"));
        }
        if self.n_shots == 0 {
            return Err(invalid("n_shots must be at least 1"));
        }
        Ok(())
    }

    /// `(a, b, a′, b′)` with `b = a − θ`, `a′ = a + π/2`, `b′ = b + π/2`.
    pub fn angles(&self) -> [f64; 4] {
        let a = self.angle_a;
        let b = a - self.theta;
        [a, b, a + FRAC_PI_2, b + FRAC_PI_2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    pub e_ab: f64,
    pub e_a_prime_b: f64,
    pub e_a_b_prime: f64,
    pub e_a_prime_b_prime: f64,
    /// `E(a,b) + E(a′,b) + E(a,b′) − E(a′,b′)`.
    pub chsh: f64,
}

/// One two-qubit projective experiment on the central Bell pair.
pub fn chsh_correlation(
    variant: BellVariant,
    x: f64,
    y: f64,
    noise: &NoiseModel,
    convention: DetectorConvention,
) -> Result<f64> {
    let pair = noise.restrict(&[BETA1, BETA2])?;
    pair.validate()?;
    let mut rho = DensityMatrix::thermal(2, &pair.thermal_pops)?;
    prepare_bell(&mut rho, 0, 1, variant, &pair)?;
    apply_layer(
        &mut rho,
        &[convention.first(0, x), convention.first(1, y)],
        &pair,
    )?;
    let dist = readout_confusion(&rho.outcome_distribution(&[0, 1])?, &pair.readout)?;
    correlation_e(&dist)
}

/// Runs the four settings of a CHSH test at detector difference `θ`.
pub fn run_chsh_with_convention(
    config: &ChshConfig,
    noise: &NoiseModel,
    convention: DetectorConvention,
) -> Result<ChshResult> {
    config.validate()?;
    let [a, b, a_prime, b_prime] = config.angles();
    let e = |x, y| chsh_correlation(config.bell_variant, x, y, noise, convention);
    let e_ab = e(a, b)?;
    let e_a_prime_b = e(a_prime, b)?;
    let e_a_b_prime = e(a, b_prime)?;
    let e_a_prime_b_prime = e(a_prime, b_prime)?;
    Ok(ChshResult {
        e_ab,
        e_a_prime_b,
        e_a_b_prime,
        e_a_prime_b_prime,
        chsh: e_ab + e_a_prime_b + e_a_b_prime - e_a_prime_b_prime,
    })
}

pub fn run_chsh(config: &ChshConfig, noise: &NoiseModel) -> Result<ChshResult> {
    run_chsh_with_convention(config, noise, DetectorConvention::RESOLVED)
}
