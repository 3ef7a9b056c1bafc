// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::apply_layer;
use crate::error::{invalid, Error, Result};
use crate::noise::NoiseModel;
use crate::sim::{DensityMatrix, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellVariant {
    /// `(|01⟩ − |10⟩)/√2`
    PsiMinus,
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus,
}

impl BellVariant {
    pub const ALL: [BellVariant; 4] = [
        BellVariant::PsiMinus,
        BellVariant::PsiPlus,
        BellVariant::PhiPlus,
        BellVariant::PhiMinus,
    ];

    /// Two-qubit amplitudes in `|00⟩, |01⟩, |10⟩, |11⟩` order.
    pub fn amplitudes(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellVariant::PsiMinus => [z, h, -h, z],
            BellVariant::PsiPlus => [z, h, h, z],
            BellVariant::PhiPlus => [h, z, z, h],
            BellVariant::PhiMinus => [h, z, z, -h],
        }
    }

    /// Three gate layers preparing the variant from `|00⟩`.
    ///
    /// `Ry(±π/2) ⊗ Ry(π/2)`, then CZ, then `Ry(±π/2)` on the second qubit.
    pub fn layers(self, q1: usize, q2: usize) -> [Vec<Gate>; 3] {
        let (first, last) = match self {
            BellVariant::PsiMinus => (-FRAC_PI_2, FRAC_PI_2),
            BellVariant::PsiPlus => (FRAC_PI_2, FRAC_PI_2),
            BellVariant::PhiPlus => (-FRAC_PI_2, -FRAC_PI_2),
            BellVariant::PhiMinus => (FRAC_PI_2, -FRAC_PI_2),
        };
        [
            vec![Gate::ry(q1, first), Gate::ry(q2, FRAC_PI_2)],
            vec![Gate::cz(q1, q2)],
            vec![Gate::ry(q2, last)],
        ]
    }
}

impl FromStr for BellVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi-minus" => Ok(Self::PsiMinus),
            "psi-plus" => Ok(Self::PsiPlus),
            "phi-plus" => Ok(Self::PhiPlus),
            "phi-minus" => Ok(Self::PhiMinus),
            other => Err(invalid(format!("unknown Bell variant {other:?}"))),
        }
    }
}

/// Entangles `q1`, `q2` (assumed in their ground state) into `variant`,
/// with per-layer noise.
pub fn prepare_bell(
    rho: &mut DensityMatrix,
    q1: usize,
    q2: usize,
    variant: BellVariant,
    noise: &NoiseModel,
) -> Result<()> {
    for layer in variant.layers(q1, q2) {
        apply_layer(rho, &layer, noise)?;
    }
    Ok(())
}
