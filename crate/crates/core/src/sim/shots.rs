// SPDX-License-Identifier: Apache-2.0

//! Seeded shot sampling.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded
//! through `SeedableRng::seed_from_u64`. A sharded run gives shard `w`
//! ChaCha stream `w` under the run's key, so the merged table depends only
//! on the seed and the shard count, never on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ProbabilityTable;
use crate::error::{invalid, Result};

/// Generator for worker `worker` of a run seeded with `seed`. Workers get
/// disjoint ChaCha streams under one key, so no two `(seed, worker)` pairs
/// share a stream.
pub fn shot_rng(seed: u64, worker: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Sampled outcomes, one outcome index per repetition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotTable {
    roles: Vec<String>,
    outcomes: Vec<u32>,
    seed: u64,
}

impl ShotTable {
    pub fn from_outcomes(roles: Vec<String>, outcomes: Vec<u32>, seed: u64) -> Result<Self> {
        let limit = 1u64 << roles.len();
        if let Some(bad) = outcomes.iter().find(|&&o| u64::from(o) >= limit) {
            return Err(invalid(format!(
                "outcome {bad} does not fit {} bits",
                roles.len()
            )));
        }
        Ok(Self {
            roles,
            outcomes,
            seed,
        })
    }

    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_shots(&self) -> usize {
        self.outcomes.len()
    }

    pub fn n_bits(&self) -> usize {
        self.roles.len()
    }

    pub fn outcomes(&self) -> &[u32] {
        &self.outcomes
    }

    pub fn bit(&self, row: usize, col: usize) -> u8 {
        ((self.outcomes[row] >> (self.n_bits() - 1 - col)) & 1) as u8
    }

    pub fn row(&self, row: usize) -> Vec<u8> {
        (0..self.n_bits()).map(|c| self.bit(row, c)).collect()
    }

    /// Occurrences of every outcome index.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; 1 << self.n_bits()];
        for &o in &self.outcomes {
            counts[o as usize] += 1;
        }
        counts
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_shots() as f64;
        self.counts().into_iter().map(|c| c as f64 / n).collect()
    }

    pub(crate) fn outcomes_mut(&mut self) -> &mut [u32] {
        &mut self.outcomes
    }
}

/// Draws `n_shots` independent rows from `dist` on a single stream.
pub fn sample_shots(dist: &ProbabilityTable, n_shots: usize, seed: u64) -> Result<ShotTable> {
    sample_shots_sharded(dist, n_shots, seed, 1)
}

/// Draws `n_shots` rows split over `shards` streams sampled in parallel.
///
/// Output is identical for identical `(dist, n_shots, seed, shards)`.
pub fn sample_shots_sharded(
    dist: &ProbabilityTable,
    n_shots: usize,
    seed: u64,
    shards: usize,
) -> Result<ShotTable> {
    if n_shots == 0 {
        return Err(invalid("shot count must be positive"));
    }
    if shards == 0 {
        return Err(invalid("shard count must be positive"));
    }
    let cdf: Vec<f64> = dist
        .probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let total = *cdf.last().expect("tables are never empty");
    let last_nonzero = dist
        .probs()
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("tables sum to one");

    let base = n_shots / shards;
    let extra = n_shots % shards;
    let chunks: Vec<Vec<u32>> = (0..shards)
        .into_par_iter()
        .map(|w| {
            let len = base + usize::from(w < extra);
            let mut rng = shot_rng(seed, w as u64);
            (0..len)
                .map(|_| {
                    let u = rng.gen::<f64>() * total;
                    let k = cdf.partition_point(|&c| c <= u);
                    k.min(last_nonzero) as u32
                })
                .collect()
        })
        .collect();
    let outcomes = chunks.concat();
    ShotTable::from_outcomes(dist.roles().to_vec(), outcomes, seed)
}
