// SPDX-License-Identifier: Apache-2.0

use crate::sim::{Axis, Gate};

/// How a detector angle becomes a physical pre-readout rotation.
///
/// A qubit measured at angle `θ` is rotated by `R_axis(first_sense · θ)`.
/// When a qubit is measured a second time at `θ'`, the extra rotation is
/// relative to the first basis: `R_axis(second_sense · (θ' − θ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConvention {
    pub axis: Axis,
    pub first_sense: f64,
    pub second_sense: f64,
}

impl DetectorConvention {
    /// A convention under which the textbook detector angles give the
    /// maximal `2√2` for both the CHSH sum on `|Φ+⟩` and the hybrid
    /// correlator on `|Ψ−⟩`. Among [`Self::candidates`] only this one and its
    /// sense-swapped mirror pass, and the two yield identical distributions.
    pub const RESOLVED: DetectorConvention = DetectorConvention {
        axis: Axis::X,
        first_sense: 1.0,
        second_sense: -1.0,
    };

    /// Every axis/sense combination considered when fixing [`Self::RESOLVED`].
    pub fn candidates() -> Vec<DetectorConvention> {
        let mut out = Vec::with_capacity(8);
        for axis in [Axis::X, Axis::Y] {
            for first_sense in [1.0, -1.0] {
                for second_sense in [1.0, -1.0] {
                    out.push(DetectorConvention {
                        axis,
                        first_sense,
                        second_sense,
                    });
                }
            }
        }
        out
    }

    pub fn first(&self, qubit: usize, angle: f64) -> Gate {
        Gate::Rotation {
            axis: self.axis,
            qubit,
            angle: self.first_sense * angle,
        }
    }

    pub fn relative(&self, qubit: usize, from: f64, to: f64) -> Gate {
        Gate::Rotation {
            axis: self.axis,
            qubit,
            angle: self.second_sense * (to - from),
        }
    }
}
