// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::NORMALISATION_TOL;
use crate::error::{invalid, Result};

/// Joint computational-basis distribution over an ordered list of qubit roles.
///
/// The first role is the most significant bit of an outcome index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTable {
    roles: Vec<String>,
    probs: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(roles: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if roles.is_empty() || roles.len() > 16 {
            return Err(invalid(format!("unsupported role count {}", roles.len())));
        }
        if probs.len() != 1 << roles.len() {
            return Err(invalid(format!(
                "{} roles need {} probabilities, got {}",
                roles.len(),
                1usize << roles.len(),
                probs.len()
            )));
        }
        let mut probs = probs;
        for p in &mut probs {
            if !p.is_finite() || *p < -NORMALISATION_TOL || *p > 1.0 + NORMALISATION_TOL {
                return Err(invalid(format!("probability {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALISATION_TOL {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { roles, probs })
    }

    pub fn with_roles(mut self, roles: &[&str]) -> Result<Self> {
        if roles.len() != self.roles.len() {
            return Err(invalid(format!(
                "expected {} role labels, got {}",
                self.roles.len(),
                roles.len()
            )));
        }
        self.roles = roles.iter().map(|r| r.to_string()).collect();
        Ok(self)
    }

    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_bits(&self) -> usize {
        self.roles.len()
    }

    pub fn position(&self, role: &str) -> Option<usize> {
        self.roles.iter().position(|r| r == role)
    }

    /// Whether outcome `index` has bit `position` set.
    pub fn bit(&self, index: usize, position: usize) -> bool {
        index >> (self.n_bits() - 1 - position) & 1 == 1
    }

    /// Marginal over the given role positions, in the order listed.
    pub fn marginal(&self, positions: &[usize]) -> Result<ProbabilityTable> {
        if positions.is_empty() {
            return Err(invalid("marginal over no positions"));
        }
        for (k, &p) in positions.iter().enumerate() {
            if p >= self.n_bits() {
                return Err(invalid(format!("position {p} out of range")));
            }
            if positions[..k].contains(&p) {
                return Err(invalid(format!("position {p} listed twice")));
            }
        }
        let mut probs = vec![0.0; 1 << positions.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            let sub = positions
                .iter()
                .fold(0, |acc, &pos| (acc << 1) | usize::from(self.bit(i, pos)));
            probs[sub] += p;
        }
        let roles = positions.iter().map(|&p| self.roles[p].clone()).collect();
        ProbabilityTable::new(roles, probs)
    }

    pub fn marginal_by_role(&self, roles: &[&str]) -> Result<ProbabilityTable> {
        let positions = roles
            .iter()
            .map(|r| {
                self.position(r)
                    .ok_or_else(|| invalid(format!("unknown role {r}")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.marginal(&positions)
    }

    /// `⟨Z⟩ = 1 − 2·P(bit = 1)` at `position`.
    pub fn expectation_z(&self, position: usize) -> Result<f64> {
        let m = self.marginal(&[position])?;
        Ok(1.0 - 2.0 * m.probs[1])
    }
}
