// SPDX-License-Identifier: Apache-2.0

//! Circuit builders for the hybrid Bell-Leggett-Garg experiment, the
//! standalone CHSH and Leggett-Garg experiments, and a classical
//! local-hidden-variable baseline.

mod bell;
mod blgi;
mod chsh;
mod convention;
mod lgi;
pub mod lhv;
mod weak;

pub use bell::{prepare_bell, BellVariant};
pub use blgi::{
    blgi_pre_readout, calibration_curves, calibration_factors, calibration_point, evaluate_blgi,
    run_blgi, sample_blgi, trace_blgi, trace_blgi_with_convention, BlgiConfig, BlgiEvaluation,
    BlgiTrace, CalibrationPoint, ALPHA1, ALPHA2, BETA1, BETA2,
};
pub use chsh::{chsh_correlation, run_chsh, run_chsh_with_convention, ChshConfig, ChshResult};
pub use convention::DetectorConvention;
pub use lgi::{lgi_combination, run_lgi, run_lgi_weak, LgiResult};
pub use weak::{weak_measure, weak_measurement_layers};

use crate::error::Result;
use crate::noise::NoiseModel;
use crate::sim::{DensityMatrix, Gate};

/// Applies one layer of simultaneous gates, then the per-layer noise on
/// every qubit the layer touched.
pub fn apply_layer(rho: &mut DensityMatrix, gates: &[Gate], noise: &NoiseModel) -> Result<()> {
    let mut touched: Vec<usize> = Vec::with_capacity(gates.len() * 2);
    for g in gates {
        g.validate(rho.n_qubits())?;
        for q in g.targets() {
            if touched.contains(&q) {
                return Err(crate::error::invalid(format!(
                    "qubit {q} appears twice in one layer"
                )));
            }
            touched.push(q);
        }
    }
    for g in gates {
        rho.apply_gate(g)?;
    }
    noise.after_layer(rho, &touched)
}
