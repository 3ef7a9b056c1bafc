// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_2;

use super::apply_layer;
use crate::error::{invalid, Result};
use crate::noise::NoiseModel;
use crate::sim::{DensityMatrix, Gate};

/// The three layers of a tunable-strength ancilla probe of `target`.
///
/// `Ry(φ)` on the ancilla sets the strength, CZ couples it to the target, and
/// `Ry(−π/2)` maps the ancilla's phase onto its Z axis, so that
/// `⟨Z⟩_ancilla = sin φ · ⟨Z⟩_target`.
pub fn weak_measurement_layers(target: usize, ancilla: usize, phi: f64) -> [Vec<Gate>; 3] {
    [
        vec![Gate::ry(ancilla, phi)],
        vec![Gate::cz(target, ancilla)],
        vec![Gate::ry(ancilla, -FRAC_PI_2)],
    ]
}

pub(crate) fn check_strength(phi: f64) -> Result<()> {
    if !phi.is_finite() || !(0.0..=FRAC_PI_2 + 1e-12).contains(&phi) {
        return Err(invalid(format!(
            "measurement strength {phi} outside [0, pi/2]"
        )));
    }
    Ok(())
}

/// Weakly measures `target` with `ancilla` (assumed near its ground state).
///
/// `phi = π/2` is a CNOT-style projective readout; `phi = 0` leaves the
/// target untouched.
pub fn weak_measure(
    rho: &mut DensityMatrix,
    target: usize,
    ancilla: usize,
    phi: f64,
    noise: &NoiseModel,
) -> Result<()> {
    check_strength(phi)?;
    for layer in weak_measurement_layers(target, ancilla, phi) {
        apply_layer(rho, &layer, noise)?;
    }
    Ok(())
}
