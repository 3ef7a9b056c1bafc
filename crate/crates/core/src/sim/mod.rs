// SPDX-License-Identifier: Apache-2.0

//! Dense density-matrix simulation of a small qubit register.
//!
//! Conventions used throughout the crate:
//!
//! * Rotations are `R_axis(θ) = exp(−i·θ·σ_axis/2)` with
//!   `σ_y = [[0, −i], [i, 0]]`.
//! * Qubit 0 is the most significant bit of a basis-state index, so outcome
//!   strings read left to right in qubit order.
//! * Measurement bit 0 maps to the eigenvalue +1 and bit 1 to −1.

mod distribution;
mod gate;
mod shots;
mod state;

pub use distribution::ProbabilityTable;
pub use gate::{Axis, Gate};
pub use shots::{sample_shots, sample_shots_sharded, shot_rng, ShotTable};
pub use state::DensityMatrix;

/// Largest register the dense representation accepts (64 × 64 matrices).
pub const MAX_QUBITS: usize = 6;

/// Tolerance for algebraic identities (trace, Hermiticity).
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Tolerance on the smallest eigenvalue of a physical state.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Tolerance on probability normalisation.
pub const NORMALISATION_TOL: f64 = 1e-10;
