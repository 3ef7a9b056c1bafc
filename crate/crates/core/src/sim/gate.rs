// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// `exp(−i·angle·σ/2)` as a row-major 2×2 matrix.
    pub fn rotation(self, angle: f64) -> [[Complex64; 2]; 2] {
        let c = (angle / 2.0).cos();
        let s = (angle / 2.0).sin();
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            Axis::X => [
                [re(c), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), re(c)],
            ],
            Axis::Y => [[re(c), re(-s)], [re(s), re(c)]],
            Axis::Z => [
                [Complex64::new(c, -s), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(c, s)],
            ],
        }
    }
}

/// A single circuit element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Rotation {
        axis: Axis,
        qubit: usize,
        angle: f64,
    },
    Cz(usize, usize),
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rotation {
            axis: Axis::X,
            qubit,
            angle,
        }
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Gate::Rotation {
            axis: Axis::Y,
            qubit,
            angle,
        }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rotation {
            axis: Axis::Z,
            qubit,
            angle,
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::Cz(a, b)
    }

    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::Rotation { qubit, .. } => vec![qubit],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// Checks target ranges and distinctness for an `n_qubits` register.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match *self {
            Gate::Rotation { qubit, angle, .. } => {
                if qubit >= n_qubits {
                    return Err(invalid(format!(
                        "rotation target {qubit} out of range for {n_qubits} qubits"
                    )));
                }
                if !angle.is_finite() {
                    return Err(invalid(format!("rotation angle {angle} is not finite")));
                }
            }
            Gate::Cz(a, b) => {
                if a >= n_qubits || b >= n_qubits {
                    return Err(invalid(format!(
                        "CZ targets ({a}, {b}) out of range for {n_qubits} qubits"
                    )));
                }
                if a == b {
                    return Err(invalid(format!("CZ targets must differ, got ({a}, {b})")));
                }
            }
        }
        Ok(())
    }
}
