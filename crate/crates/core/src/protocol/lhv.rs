// SPDX-License-Identifier: Apache-2.0

//! Deterministic local-hidden-variable baseline.
//!
//! A hidden state `λ` is drawn per realisation and each side answers every
//! detector angle with a fixed `±1`. Any correlator built from such answers
//! obeys the classical bounds realisation by realisation.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lgi::lgi_combination;
use super::ChshConfig;
use crate::error::{invalid, Result};
use crate::estimator::{per_shot_correlator, CorrelatorEstimate};
use crate::sim::shot_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HiddenVariable {
    /// `λ` uniform on `[0, 2π)`.
    UniformAngle,
    /// `λ = angles[k]` with probability proportional to `weights[k]`.
    Discrete { angles: Vec<f64>, weights: Vec<f64> },
}

/// Deterministic detector answer `A(λ, θ) ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Response {
    /// Same answer for every `λ` and angle.
    Constant { value: f64 },
    /// `sign · sgn cos(λ − orientation·θ − offset)`, with `sgn 0 = +1`.
    Sign {
        sign: f64,
        orientation: f64,
        offset: f64,
    },
    /// An arbitrary fixed lookup of `(λ, θ)`, keyed by their bit patterns.
    Hashed { salt: u64 },
}

impl Response {
    pub fn answer(&self, lambda: f64, theta: f64) -> f64 {
        match *self {
            Response::Constant { value } => value,
            Response::Sign {
                sign,
                orientation,
                offset,
            } => {
                if (lambda - orientation * theta - offset).cos() >= 0.0 {
                    sign
                } else {
                    -sign
                }
            }
            Response::Hashed { salt } => {
                let h = splitmix(splitmix(lambda.to_bits() ^ salt) ^ theta.to_bits());
                if h & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let unit = |x: f64| x == 1.0 || x == -1.0;
        match *self {
            Response::Constant { value } if !unit(value) => {
                Err(invalid(format!("constant response {value} is not ±1")))
            }
            Response::Sign {
                sign,
                orientation,
                offset,
            } if !unit(sign) || !unit(orientation) || !offset.is_finite() => Err(invalid(
                "sign response needs sign and orientation in {-1, +1} and a finite offset",
            )),
            _ => Ok(()),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    pub hidden: HiddenVariable,
    pub side1: Response,
    pub side2: Response,
}

impl LhvModel {
    /// Uniform `λ` with opposite-handed sign detectors; gives the linear
    /// `E = 1 − 2|x + y|/π` and saturates the CHSH bound.
    pub fn sawtooth() -> Self {
        Self {
            hidden: HiddenVariable::UniformAngle,
            side1: Response::Sign {
                sign: 1.0,
                orientation: 1.0,
                offset: 0.0,
            },
            side2: Response::Sign {
                sign: 1.0,
                orientation: -1.0,
                offset: 0.0,
            },
        }
    }

    /// `λ`-independent answers.
    pub fn constant(value1: f64, value2: f64) -> Self {
        Self {
            hidden: HiddenVariable::UniformAngle,
            side1: Response::Constant { value: value1 },
            side2: Response::Constant { value: value2 },
        }
    }

    /// A random deterministic model: discrete or uniform `λ`, and sign,
    /// constant or lookup responses per side.
    pub fn random(seed: u64) -> Self {
        let mut rng = shot_rng(seed, 0x1_0000_0000);
        let hidden = if rng.gen_bool(0.5) {
            HiddenVariable::UniformAngle
        } else {
            let k = rng.gen_range(1..=8);
            HiddenVariable::Discrete {
                angles: (0..k).map(|_| rng.gen_range(0.0..TAU)).collect(),
                weights: (0..k).map(|_| rng.gen_range(0.05..1.0)).collect(),
            }
        };
        let side = |rng: &mut ChaCha8Rng| {
            let pm = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            match rng.gen_range(0..5) {
                0 => Response::Constant { value: pm(rng) },
                1 => Response::Hashed { salt: rng.gen() },
                _ => Response::Sign {
                    sign: pm(rng),
                    orientation: pm(rng),
                    offset: rng.gen_range(0.0..TAU),
                },
            }
        };
        let side1 = side(&mut rng);
        let side2 = side(&mut rng);
        Self {
            hidden,
            side1,
            side2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.side1.validate()?;
        self.side2.validate()?;
        if let HiddenVariable::Discrete { angles, weights } = &self.hidden {
            if angles.is_empty() || angles.len() != weights.len() {
                return Err(invalid(
                    "discrete hidden variable needs matching, non-empty angles and weights",
                ));
            }
            if angles.iter().any(|a| !a.is_finite())
                || weights.iter().any(|w| !w.is_finite() || *w < 0.0)
                || weights.iter().sum::<f64>() <= 0.0
            {
                return Err(invalid(
                    "discrete hidden variable has bad angles or weights",
                ));
            }
        }
        Ok(())
    }

    fn sampler(&self) -> Result<LambdaSampler> {
        self.validate()?;
        Ok(match &self.hidden {
            HiddenVariable::UniformAngle => LambdaSampler::Uniform,
            HiddenVariable::Discrete { angles, weights } => LambdaSampler::Discrete {
                angles: angles.clone(),
                index: WeightedIndex::new(weights)
                    .map_err(|e| invalid(format!("hidden-variable weights: {e}")))?,
            },
        })
    }
}

enum LambdaSampler {
    Uniform,
    Discrete {
        angles: Vec<f64>,
        index: WeightedIndex<f64>,
    },
}

impl LambdaSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            LambdaSampler::Uniform => rng.gen_range(0.0..TAU),
            LambdaSampler::Discrete { angles, index } => angles[index.sample(rng)],
        }
    }
}

fn check_samples(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 samples, got {n}")));
    }
    Ok(())
}

fn estimate(
    model: &LhvModel,
    n: usize,
    seed: u64,
    mut value: impl FnMut(f64, &mut ChaCha8Rng) -> f64,
) -> Result<CorrelatorEstimate> {
    check_samples(n)?;
    let sampler = model.sampler()?;
    let mut rng = shot_rng(seed, 0);
    let values: Vec<f64> = (0..n)
        .map(|_| {
            let lambda = sampler.draw(&mut rng);
            value(lambda, &mut rng)
        })
        .collect();
    CorrelatorEstimate::from_samples(&values)
}

/// `⟨A1(λ, x)·A2(λ, y)⟩`.
pub fn lhv_correlation(
    model: &LhvModel,
    x: f64,
    y: f64,
    n: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    estimate(model, n, seed, |l, _| {
        model.side1.answer(l, x) * model.side2.answer(l, y)
    })
}

/// Per-realisation CHSH sum at `(a, b, a′, b′)`; each sample is ±2.
pub fn lhv_chsh(
    model: &LhvModel,
    angles: [f64; 4],
    n: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    let [a, b, ap, bp] = angles;
    estimate(model, n, seed, |l, _| {
        let (x, xp) = (model.side1.answer(l, a), model.side1.answer(l, ap));
        let (y, yp) = (model.side2.answer(l, b), model.side2.answer(l, bp));
        x * y + xp * y + x * yp - xp * yp
    })
}

/// Per-realisation hybrid correlator at `(a, b, a′, b′)`.
///
/// The first-basis answers are reported through noisy ancilla detectors:
/// each reads `±cal` with `P(+) = (1 + A/cal)/2`, so the calibrated mean
/// equals the hidden answer. `ancilla_cal = 1` reports the answers directly.
pub fn lhv_blgi(
    model: &LhvModel,
    angles: [f64; 4],
    ancilla_cal: f64,
    n: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    if !ancilla_cal.is_finite() || ancilla_cal < 1.0 {
        return Err(invalid(format!(
            "ancilla calibration {ancilla_cal} below 1"
        )));
    }
    let [a, b, ap, bp] = angles;
    let ancilla_bit = |answer: f64, rng: &mut ChaCha8Rng| -> u8 {
        let p_plus = 0.5 * (1.0 + answer / ancilla_cal);
        u8::from(!rng.gen_bool(p_plus))
    };
    let bit = |answer: f64| u8::from(answer < 0.0);
    estimate(model, n, seed, |l, rng| {
        let alpha1 = ancilla_bit(model.side1.answer(l, a), rng);
        let alpha2 = ancilla_bit(model.side2.answer(l, b), rng);
        let beta1 = bit(model.side1.answer(l, ap));
        let beta2 = bit(model.side2.answer(l, bp));
        per_shot_correlator([alpha1, beta1, beta2, alpha2], ancilla_cal, ancilla_cal)
    })
}

/// Classical two-state trajectory probed at three times by side 1's
/// detector: `A(λ, t1)A(λ, t2) + A(λ, t2)A(λ, t3) − A(λ, t1)A(λ, t3)`, which
/// is 1 or −3 for every realisation.
pub fn lhv_lgi(
    model: &LhvModel,
    times: [f64; 3],
    n: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    let [t1, t2, t3] = times;
    estimate(model, n, seed, |l, _| {
        let q = [t1, t2, t3].map(|t| model.side1.answer(l, t));
        lgi_combination(q[0] * q[1], q[1] * q[2], q[0] * q[2])
    })
}

/// One θ of the classical baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhvPoint {
    pub theta: f64,
    /// `E(a, b)` with `b = a − θ`.
    pub e: CorrelatorEstimate,
    pub chsh: CorrelatorEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvBaseline {
    pub points: Vec<LhvPoint>,
    /// Hybrid correlator at `a = 0, b = π/4, a′ = π/2, b′ = 3π/4`.
    pub blgi: CorrelatorEstimate,
}

/// E(θ), the CHSH sum at every θ, and the hybrid correlator at the
/// standard detector angles, each from `n_samples` hidden states.
pub fn lhv_baseline(
    theta_grid: &[f64],
    model: &LhvModel,
    n_samples: usize,
    seed: u64,
) -> Result<LhvBaseline> {
    let mut points = Vec::with_capacity(theta_grid.len());
    for (i, &theta) in theta_grid.iter().enumerate() {
        let cfg = ChshConfig {
            theta,
            ..ChshConfig::default()
        };
        cfg.validate()?;
        let angles = cfg.angles();
        let point_seed = seed ^ ((i as u64 + 1) << 40);
        points.push(LhvPoint {
            theta,
            e: lhv_correlation(model, angles[0], angles[1], n_samples, point_seed)?,
            chsh: lhv_chsh(model, angles, n_samples, point_seed)?,
        });
    }
    let blgi = lhv_blgi(
        model,
        [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4],
        1.0,
        n_samples,
        seed,
    )?;
    Ok(LhvBaseline { points, blgi })
}

/// Exact sawtooth correlation `1 − 2|d|/π` with `d = x + y` wrapped to `[−π, π]`.
pub fn sawtooth_correlation(x: f64, y: f64) -> f64 {
    let d = (x + y + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    1.0 - 2.0 * d.abs() / std::f64::consts::PI
}
