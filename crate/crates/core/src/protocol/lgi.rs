// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::weak::check_strength;
use super::{apply_layer, weak_measure};
use crate::error::{invalid, Result};
use crate::estimator::correlation_e;
use crate::noise::{readout_confusion, NoiseModel};
use crate::sim::{DensityMatrix, Gate};

const SYSTEM: usize = 0;
const FIRST: usize = 1;
const SECOND: usize = 2;

/// Two-time correlators and `E12 + E23 − E13`, bounded by `[−3, 1]` under
/// macrorealism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgiResult {
    pub e12: f64,
    pub e23: f64,
    pub e13: f64,
    pub combination: f64,
}

impl LgiResult {
    fn new(e12: f64, e23: f64, e13: f64) -> Self {
        Self {
            e12,
            e23,
            e13,
            combination: lgi_combination(e12, e23, e13),
        }
    }
}

pub fn lgi_combination(e12: f64, e23: f64, e13: f64) -> f64 {
    e12 + e23 - e13
}

fn check_angles(state_prep: f64, basis_angles: &[f64; 3]) -> Result<()> {
    if !state_prep.is_finite() || basis_angles.iter().any(|x| !x.is_finite()) {
        return Err(invalid("LGI angles must be finite"));
    }
    Ok(())
}

fn system_register(state_prep: f64, noise: &NoiseModel) -> Result<(DensityMatrix, NoiseModel)> {
    if noise.n_qubits() < 3 {
        return Err(invalid(format!(
            "LGI needs a noise model of at least 3 qubits, got {}",
            noise.n_qubits()
        )));
    }
    let sub = noise.restrict(&[SYSTEM, FIRST, SECOND])?;
    sub.validate()?;
    let mut rho = DensityMatrix::thermal(3, &sub.thermal_pops)?;
    apply_layer(&mut rho, &[Gate::ry(SYSTEM, state_prep)], &sub)?;
    Ok((rho, sub))
}

/// Measures the system along `cos θ·Z + sin θ·X` into `register` with
/// strength `phi`; `phi = π/2` is projective, i.e. the system is dephased in
/// that basis and the outcome is kept in the register.
fn measure_along(
    rho: &mut DensityMatrix,
    theta: f64,
    register: usize,
    phi: f64,
    noise: &NoiseModel,
) -> Result<()> {
    apply_layer(rho, &[Gate::ry(SYSTEM, -theta)], noise)?;
    weak_measure(rho, SYSTEM, register, phi, noise)?;
    apply_layer(rho, &[Gate::ry(SYSTEM, theta)], noise)
}

fn read_pair(rho: &DensityMatrix, qubits: [usize; 2], noise: &NoiseModel) -> Result<f64> {
    let dist = rho.outcome_distribution(&qubits)?;
    let reported = readout_confusion(&dist, &[noise.readout[qubits[0]], noise.readout[qubits[1]]])?;
    correlation_e(&reported)
}

fn two_time(state_prep: f64, first: f64, second: f64, noise: &NoiseModel) -> Result<f64> {
    let (mut rho, sub) = system_register(state_prep, noise)?;
    let projective = std::f64::consts::FRAC_PI_2;
    measure_along(&mut rho, first, FIRST, projective, &sub)?;
    measure_along(&mut rho, second, SECOND, projective, &sub)?;
    read_pair(&rho, [FIRST, SECOND], &sub)
}

/// Three two-time experiments with projective measurements, each on a fresh
/// system qubit (qubit 0) with outcomes kept in registers (qubits 1 and 2).
pub fn run_lgi(state_prep: f64, basis_angles: [f64; 3], noise: &NoiseModel) -> Result<LgiResult> {
    check_angles(state_prep, &basis_angles)?;
    let [t1, t2, t3] = basis_angles;
    Ok(LgiResult::new(
        two_time(state_prep, t1, t2, noise)?,
        two_time(state_prep, t2, t3, noise)?,
        two_time(state_prep, t1, t3, noise)?,
    ))
}

/// Single-run variant: projective at `t1` (register 1), ancilla probe of
/// strength `phi` at `t2` (register 2), direct system readout at `t3`.
/// `E12` and `E23` are rescaled by `1/sin φ`.
pub fn run_lgi_weak(
    state_prep: f64,
    basis_angles: [f64; 3],
    phi: f64,
    noise: &NoiseModel,
) -> Result<LgiResult> {
    check_angles(state_prep, &basis_angles)?;
    check_strength(phi)?;
    if phi.sin() < 1e-12 {
        return Err(invalid("weak LGI needs phi > 0"));
    }
    let [t1, t2, t3] = basis_angles;
    let (mut rho, sub) = system_register(state_prep, noise)?;
    measure_along(&mut rho, t1, FIRST, std::f64::consts::FRAC_PI_2, &sub)?;
    measure_along(&mut rho, t2, SECOND, phi, &sub)?;
    apply_layer(&mut rho, &[Gate::ry(SYSTEM, -t3)], &sub)?;
    let cal = 1.0 / phi.sin();
    Ok(LgiResult::new(
        read_pair(&rho, [FIRST, SECOND], &sub)? * cal,
        read_pair(&rho, [SECOND, SYSTEM], &sub)? * cal,
        read_pair(&rho, [FIRST, SYSTEM], &sub)?,
    ))
}
