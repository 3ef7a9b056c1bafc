// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular calibration: measurement strength phi = {phi} carries no signal")]
    SingularCalibration { phi: f64 },

    #[error("degenerate calibration at phi = {phi}: zero-state trace {trace} is not positive")]
    DegenerateCalibration { phi: f64, trace: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable category, printed by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::SingularCalibration { .. } => "singular-calibration",
            Error::DegenerateCalibration { .. } => "degenerate-calibration",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 3,
            Error::InvalidArgument(_) => 4,
            Error::SingularCalibration { .. } | Error::DegenerateCalibration { .. } => 5,
            Error::Parse(_) => 6,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
