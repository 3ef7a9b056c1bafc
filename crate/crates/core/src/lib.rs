// SPDX-License-Identifier: Apache-2.0

//! Density-matrix simulation of a weak-measurement Bell-Leggett-Garg
//! experiment on a four-qubit chain, with noise models, calibration,
//! shot statistics and parameter sweeps.

pub mod error;
pub mod estimator;
pub mod noise;
pub mod protocol;
pub mod sim;
pub mod sweep;

pub use error::{Error, Result};
