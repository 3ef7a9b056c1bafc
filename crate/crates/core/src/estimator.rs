// SPDX-License-Identifier: Apache-2.0

//! Correlators, ancilla calibration, per-shot statistics and violation
//! significance.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sim::{ProbabilityTable, ShotTable};

/// Classical bound on the four-term correlator.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// Role labels of the four-qubit chain, in register order.
pub const ROLES: [&str; 4] = ["alpha1", "beta1", "beta2", "alpha2"];

/// Maps a measured bit to its Z eigenvalue: 0 → +1, 1 → −1.
pub fn bit_value(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `E = P(00) − P(01) − P(10) + P(11)` of a two-bit distribution.
pub fn correlation_e(dist: &ProbabilityTable) -> Result<f64> {
    if dist.n_bits() != 2 {
        return Err(invalid(format!(
            "correlation needs a 2-bit distribution, got {} bits",
            dist.n_bits()
        )));
    }
    let p = dist.probs();
    Ok((p[0] - p[1] - p[2] + p[3]).clamp(-1.0, 1.0))
}

/// The four two-point terms of the hybrid correlator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlgiTerms {
    /// `E(α1, α2)`
    pub aa: f64,
    /// `E(α1, β2)`
    pub ab: f64,
    /// `E(β1, α2)`
    pub ba: f64,
    /// `E(β1, β2)`
    pub bb: f64,
}

impl BlgiTerms {
    pub fn new(aa: f64, ab: f64, ba: f64, bb: f64) -> Self {
        Self { aa, ab, ba, bb }
    }

    /// Reads the four terms off a distribution labelled with [`ROLES`].
    pub fn from_distribution(dist: &ProbabilityTable) -> Result<Self> {
        let e = |a: &str, b: &str| correlation_e(&dist.marginal_by_role(&[a, b])?);
        Ok(Self {
            aa: e("alpha1", "alpha2")?,
            ab: e("alpha1", "beta2")?,
            ba: e("beta1", "alpha2")?,
            bb: e("beta1", "beta2")?,
        })
    }

    pub fn correlator(&self) -> f64 {
        blgi_correlator(self.aa, self.ab, self.ba, self.bb)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.aa, self.ab, self.ba, self.bb]
    }
}

/// `⟨C⟩ = −E(α1,α2) − E(α1,β2) + E(β1,α2) − E(β1,β2)`.
pub fn blgi_correlator(e_aa: f64, e_ab: f64, e_ba: f64, e_bb: f64) -> f64 {
    -e_aa - e_ab + e_ba - e_bb
}

/// How raw ancilla signals are rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    /// Divide by `sin φ`.
    SinPhi,
    /// Divide by the measured ancilla mean with the target prepared in `|0⟩`.
    EmpiricalZero,
}

impl std::str::FromStr for CalibrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin-phi" => Ok(Self::SinPhi),
            "empirical-zero" => Ok(Self::EmpiricalZero),
            other => Err(invalid(format!("unknown calibration mode {other:?}"))),
        }
    }
}

/// Raw ancilla `⟨Z⟩` against measurement strength for definite target states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub phi_grid: Vec<f64>,
    pub zero_state_trace: Vec<f64>,
    pub one_state_trace: Vec<f64>,
}

impl CalibrationCurve {
    pub fn new(phi_grid: Vec<f64>, zero: Vec<f64>, one: Vec<f64>) -> Result<Self> {
        if phi_grid.len() != zero.len() || phi_grid.len() != one.len() {
            return Err(invalid("calibration traces must match the phi grid"));
        }
        if zero.iter().chain(&one).any(|z| !(-1.0..=1.0).contains(z)) {
            return Err(invalid("calibration traces must lie in [-1, 1]"));
        }
        Ok(Self {
            phi_grid,
            zero_state_trace: zero,
            one_state_trace: one,
        })
    }

    fn index_of(&self, phi: f64) -> Option<usize> {
        self.phi_grid.iter().position(|&p| (p - phi).abs() <= 1e-12)
    }

    pub fn zero_trace_at(&self, phi: f64) -> Option<f64> {
        self.index_of(phi).map(|i| self.zero_state_trace[i])
    }

    pub fn one_trace_at(&self, phi: f64) -> Option<f64> {
        self.index_of(phi).map(|i| self.one_state_trace[i])
    }
}

/// Rescaling that maps a raw ancilla signal back to the target's `⟨Z⟩`.
pub fn calibration_factor(
    phi: f64,
    mode: CalibrationMode,
    curve: Option<&CalibrationCurve>,
) -> Result<f64> {
    if !phi.is_finite() || !(0.0..=FRAC_PI_2 + 1e-12).contains(&phi) {
        return Err(invalid(format!("phi = {phi} outside (0, pi/2]")));
    }
    if phi == 0.0 {
        return Err(Error::SingularCalibration { phi });
    }
    match mode {
        CalibrationMode::SinPhi => Ok(1.0 / phi.sin()),
        CalibrationMode::EmpiricalZero => {
            let curve = curve
                .ok_or_else(|| invalid("empirical-zero calibration needs a calibration curve"))?;
            let trace = curve
                .zero_trace_at(phi)
                .ok_or_else(|| invalid(format!("calibration curve has no point at phi = {phi}")))?;
            if trace <= 0.0 {
                return Err(Error::DegenerateCalibration { phi, trace });
            }
            Ok(1.0 / trace)
        }
    }
}

/// Scales each term by the calibrations of the ancillas it involves.
pub fn apply_blgi_calibration(raw: BlgiTerms, cal1: f64, cal2: f64) -> BlgiTerms {
    BlgiTerms {
        aa: raw.aa * cal1 * cal2,
        ab: raw.ab * cal1,
        ba: raw.ba * cal2,
        bb: raw.bb,
    }
}

/// Single-realisation correlator for bits ordered `(α1, β1, β2, α2)`.
pub fn per_shot_correlator(bits: [u8; 4], cal1: f64, cal2: f64) -> f64 {
    let a1 = cal1 * bit_value(bits[0]);
    let b1 = bit_value(bits[1]);
    let b2 = bit_value(bits[2]);
    let a2 = cal2 * bit_value(bits[3]);
    -a1 * a2 - a1 * b2 + b1 * a2 - b1 * b2
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sample mean with its standard error and distance above the classical bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    pub mean: f64,
    pub sem: f64,
    pub n: u64,
    pub sigmas_above_classical: f64,
}

impl CorrelatorEstimate {
    /// Builds an estimate from `(value, multiplicity)` pairs.
    pub fn from_weighted(values: impl IntoIterator<Item = (f64, u64)> + Clone) -> Result<Self> {
        let n: u64 = values.clone().into_iter().map(|(_, c)| c).sum();
        if n < 2 {
            return Err(invalid(format!("need at least 2 samples, got {n}")));
        }
        let mean = values
            .clone()
            .into_iter()
            .map(|(v, c)| v * c as f64)
            .collect::<CompensatedSum>()
            .value()
            / n as f64;
        let ss = values
            .into_iter()
            .map(|(v, c)| (v - mean).powi(2) * c as f64)
            .collect::<CompensatedSum>()
            .value();
        let sem = (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt();
        Ok(Self::from_moments(mean, sem, n))
    }

    pub fn from_samples(values: &[f64]) -> Result<Self> {
        Self::from_weighted(values.iter().map(|&v| (v, 1u64)))
    }

    pub fn from_moments(mean: f64, sem: f64, n: u64) -> Self {
        let sigmas_above_classical = sigmas_above(mean, sem);
        Self {
            mean,
            sem,
            n,
            sigmas_above_classical,
        }
    }
}

fn sigmas_above(mean: f64, sem: f64) -> f64 {
    let excess = mean - CLASSICAL_BOUND;
    if sem > 0.0 {
        excess / sem
    } else if excess > 0.0 {
        f64::INFINITY
    } else if excess < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    }
}

/// Violation significance in standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Significance {
    pub sigmas: f64,
    /// Set when the standard error vanished and `sigmas` is a sentinel.
    pub zero_sem: bool,
}

/// `(mean − 2)/sem`.
pub fn violation_significance(estimate: &CorrelatorEstimate) -> Result<Significance> {
    if estimate.n < 2 {
        return Err(invalid(format!(
            "significance needs at least 2 samples, got {}",
            estimate.n
        )));
    }
    Ok(Significance {
        sigmas: sigmas_above(estimate.mean, estimate.sem),
        zero_sem: estimate.sem == 0.0,
    })
}

fn shot_bits(outcome: usize) -> [u8; 4] {
    [
        (outcome >> 3 & 1) as u8,
        (outcome >> 2 & 1) as u8,
        (outcome >> 1 & 1) as u8,
        (outcome & 1) as u8,
    ]
}

fn check_blgi_table(shots: &ShotTable) -> Result<()> {
    if shots.n_bits() != 4 {
        return Err(invalid(format!(
            "expected 4-bit shots (alpha1, beta1, beta2, alpha2), got {} bits",
            shots.n_bits()
        )));
    }
    Ok(())
}

/// Per-shot correlator statistics over a four-bit shot table.
pub fn estimate_blgi_shots(shots: &ShotTable, cal1: f64, cal2: f64) -> Result<CorrelatorEstimate> {
    check_blgi_table(shots)?;
    let counts = shots.counts();
    let weighted = counts
        .iter()
        .enumerate()
        .map(|(o, &c)| (per_shot_correlator(shot_bits(o), cal1, cal2), c));
    CorrelatorEstimate::from_weighted(weighted)
}

/// Empirical (uncalibrated) terms of a four-bit shot table.
pub fn empirical_terms(shots: &ShotTable) -> Result<BlgiTerms> {
    check_blgi_table(shots)?;
    let counts = shots.counts();
    let n = shots.n_shots() as f64;
    let term = |i: usize, j: usize| {
        counts
            .iter()
            .enumerate()
            .map(|(o, &c)| {
                let b = shot_bits(o);
                bit_value(b[i]) * bit_value(b[j]) * c as f64
            })
            .collect::<CompensatedSum>()
            .value()
            / n
    };
    Ok(BlgiTerms {
        aa: term(0, 3),
        ab: term(0, 2),
        ba: term(1, 3),
        bb: term(1, 2),
    })
}

/// Statistics of `scale · v_i · v_j` over the shots, for bit columns `i`, `j`.
pub fn estimate_term(
    shots: &ShotTable,
    i: usize,
    j: usize,
    scale: f64,
) -> Result<CorrelatorEstimate> {
    if i >= shots.n_bits() || j >= shots.n_bits() || i == j {
        return Err(invalid(format!("bad column pair ({i}, {j})")));
    }
    let n_bits = shots.n_bits();
    let bit = |o: usize, c: usize| ((o >> (n_bits - 1 - c)) & 1) as u8;
    let counts = shots.counts();
    let weighted = counts
        .iter()
        .enumerate()
        .map(|(o, &c)| (scale * bit_value(bit(o, i)) * bit_value(bit(o, j)), c));
    CorrelatorEstimate::from_weighted(weighted)
}

/// Exact mean and per-shot variance of the single-realisation correlator
/// under a four-bit distribution over `(α1, β1, β2, α2)`.
pub fn exact_shot_moments(dist: &ProbabilityTable, cal1: f64, cal2: f64) -> Result<(f64, f64)> {
    if dist.n_bits() != 4 {
        return Err(invalid(format!(
            "expected a 4-bit distribution, got {} bits",
            dist.n_bits()
        )));
    }
    let p = dist.probs();
    let mean = (0..16)
        .map(|o| p[o] * per_shot_correlator(shot_bits(o), cal1, cal2))
        .collect::<CompensatedSum>()
        .value();
    let variance = (0..16)
        .map(|o| p[o] * (per_shot_correlator(shot_bits(o), cal1, cal2) - mean).powi(2))
        .collect::<CompensatedSum>()
        .value();
    Ok((mean, variance))
}

/// Expected significance of `n_shots` realisations drawn from `dist`.
pub fn predicted_significance(
    dist: &ProbabilityTable,
    cal1: f64,
    cal2: f64,
    n_shots: u64,
) -> Result<f64> {
    let (mean, variance) = exact_shot_moments(dist, cal1, cal2)?;
    Ok(sigmas_above(mean, (variance / n_shots as f64).sqrt()))
}
