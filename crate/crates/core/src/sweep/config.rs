// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::CalibrationMode;
use crate::noise::{ConfusionMatrix, NoiseModel};
use crate::protocol::{BlgiConfig, ChshConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    BlgiPhiSweep,
    ChshThetaSweep,
    Lgi,
    DephasingSweep,
    VisibilitySweep,
    CalibrationCurves,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::BlgiPhiSweep,
        Experiment::ChshThetaSweep,
        Experiment::Lgi,
        Experiment::DephasingSweep,
        Experiment::VisibilitySweep,
        Experiment::CalibrationCurves,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::BlgiPhiSweep => "blgi-phi-sweep",
            Experiment::ChshThetaSweep => "chsh-theta-sweep",
            Experiment::Lgi => "lgi",
            Experiment::DephasingSweep => "dephasing-sweep",
            Experiment::VisibilitySweep => "visibility-sweep",
            Experiment::CalibrationCurves => "calibration-curves",
        }
    }

    /// Whether rows carry the hybrid correlator of the four-qubit chain.
    pub fn is_blgi(self) -> bool {
        matches!(
            self,
            Experiment::BlgiPhiSweep | Experiment::DephasingSweep | Experiment::VisibilitySweep
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "monte-carlo",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "monte-carlo" => Ok(Mode::MonteCarlo),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected exact or monte-carlo)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// `.json` selects JSON; anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Sweep values: an explicit list, or `points` evenly spaced values from
/// `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid {
    Values {
        values: Vec<f64>,
    },
    Range {
        start: f64,
        stop: f64,
        points: usize,
    },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values { ref values } => values.clone(),
            Grid::Range {
                start,
                stop,
                points,
            } => match points {
                0 => Vec::new(),
                1 => vec![start],
                // endpoint pinned so `stop` at a domain edge stays inside it
                n => (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            stop
                        } else {
                            start + (stop - start) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            },
        }
    }
}

/// Noise section: a named preset plus optional field overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub preset: String,
    pub gate_dephasing_p: Option<f64>,
    pub t1_gamma: Option<f64>,
    pub window_dephasing: Option<f64>,
    /// Symmetric readout error per qubit.
    pub readout_errors: Option<Vec<f64>>,
    pub thermal_pops: Option<Vec<f64>>,
    /// Symmetric readout visibility applied to every qubit.
    pub visibility: Option<f64>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            preset: "ideal".into(),
            gate_dephasing_p: None,
            t1_gamma: None,
            window_dephasing: None,
            readout_errors: None,
            thermal_pops: None,
            visibility: None,
        }
    }
}

impl NoiseSection {
    pub fn preset(name: &str) -> Self {
        Self {
            preset: name.into(),
            ..Self::default()
        }
    }

    pub fn build(&self) -> Result<NoiseModel> {
        let mut noise = NoiseModel::preset(&self.preset).map_err(config_error)?;
        if let Some(p) = self.gate_dephasing_p {
            noise.gate_dephasing_p = p;
        }
        if let Some(g) = self.t1_gamma {
            noise.t1_gamma = g;
        }
        if let Some(e) = self.window_dephasing {
            noise.window_dephasing = e;
        }
        if let Some(errors) = &self.readout_errors {
            noise.readout = errors
                .iter()
                .map(|&e| ConfusionMatrix::new(e, e))
                .collect::<Result<_>>()
                .map_err(config_error)?;
        }
        if let Some(pops) = &self.thermal_pops {
            noise.thermal_pops = pops.clone();
        }
        if let Some(v) = self.visibility {
            check_visibility(v)?;
            noise = noise.with_visibility(v).map_err(config_error)?;
        }
        noise.validate().map_err(config_error)?;
        Ok(noise)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LgiSection {
    /// `Ry` angle preparing the system qubit.
    pub state_prep: f64,
    /// When set, runs the single-configuration weak variant at this strength.
    pub phi: Option<f64>,
    pub n_shots: usize,
}

impl Default for LgiSection {
    fn default() -> Self {
        Self {
            state_prep: 0.0,
            phi: None,
            n_shots: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub grid: Grid,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Shot streams per Monte Carlo point; fixes the output for a given seed
    /// regardless of thread count.
    #[serde(default = "default_shards")]
    pub shards: usize,
    /// Thread count; defaults to all cores.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Inferred from the `out` extension when absent.
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub blgi: BlgiConfig,
    #[serde(default)]
    pub chsh: ChshConfig,
    #[serde(default)]
    pub lgi: LgiSection,
    #[serde(default)]
    pub noise: NoiseSection,
}

fn default_seed() -> u64 {
    2017
}

fn default_shards() -> usize {
    8
}

pub(crate) fn config_error(e: Error) -> Error {
    match e {
        Error::InvalidArgument(msg) => Error::Config(msg),
        other => other,
    }
}

fn check_visibility(v: f64) -> Result<()> {
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!("visibility {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_phi(phi: f64, what: &str) -> Result<()> {
    if !phi.is_finite() || !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(Error::Config(format!("{what} {phi} outside [0, pi/2]")));
    }
    Ok(())
}

impl SweepConfig {
    /// A runnable configuration with the documented defaults for `experiment`.
    pub fn template(experiment: Experiment) -> Self {
        let base = |grid: Grid, noise: &str| SweepConfig {
            experiment,
            grid,
            mode: Mode::Exact,
            seed: default_seed(),
            shards: default_shards(),
            workers: None,
            out: None,
            format: None,
            blgi: BlgiConfig::default(),
            chsh: ChshConfig::default(),
            lgi: LgiSection::default(),
            noise: NoiseSection::preset(noise),
        };
        match experiment {
            Experiment::BlgiPhiSweep => base(
                Grid::Range {
                    start: 0.05,
                    stop: FRAC_PI_2,
                    points: 20,
                },
                "paper-like",
            ),
            Experiment::ChshThetaSweep => base(
                Grid::Range {
                    start: 0.0,
                    stop: PI,
                    points: 33,
                },
                "ideal",
            ),
            Experiment::Lgi => base(
                Grid::Range {
                    start: 0.0,
                    stop: FRAC_PI_2,
                    points: 13,
                },
                "ideal",
            ),
            Experiment::DephasingSweep => {
                let mut cfg = base(
                    Grid::Values {
                        values: vec![0.0, 0.1, 0.2, 0.3],
                    },
                    "ideal",
                );
                cfg.blgi = BlgiConfig {
                    calibration_mode: CalibrationMode::SinPhi,
                    ..BlgiConfig::default().with_phi(0.05)
                };
                cfg
            }
            Experiment::VisibilitySweep => {
                let mut cfg = base(
                    Grid::Values {
                        values: vec![1.0, 0.95, 0.9, 0.85, 0.8],
                    },
                    "paper-like",
                );
                cfg.blgi = BlgiConfig {
                    calibration_mode: CalibrationMode::SinPhi,
                    ..BlgiConfig::default().with_phi(0.3)
                };
                cfg
            }
            Experiment::CalibrationCurves => base(
                Grid::Values {
                    values: vec![
                        0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.2, 1.4,
                        FRAC_PI_2,
                    ],
                },
                "paper-like",
            ),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn output_format(&self) -> OutputFormat {
        self.format
            .or_else(|| self.out.as_deref().map(OutputFormat::from_path))
            .unwrap_or(OutputFormat::Csv)
    }

    /// Rejects anything that would fail mid-sweep for a reason knowable
    /// up front.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.values();
        if grid.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("grid value {x} is not finite")));
        }
        if self.shards == 0 {
            return Err(Error::Config("shards must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.noise.build()?;
        match self.experiment {
            Experiment::BlgiPhiSweep => {
                for &phi in &grid {
                    check_phi(phi, "grid phi")?;
                }
            }
            Experiment::CalibrationCurves => {
                for &phi in &grid {
                    check_phi(phi, "grid phi")?;
                    if phi == 0.0 {
                        return Err(Error::Config(
                            "calibration curves need phi > 0 (the sine calibration is singular at 0)"
                                .into(),
                        ));
                    }
                }
            }
            Experiment::ChshThetaSweep => {
                if let Some(t) = grid.iter().find(|t| !(0.0..=PI).contains(*t)) {
                    return Err(Error::Config(format!("grid theta {t} outside [0, pi]")));
                }
                let probe = ChshConfig {
                    theta: grid[0],
                    ..self.chsh.clone()
                };
                probe.validate().map_err(config_error)?;
            }
            Experiment::Lgi => {
                if !self.lgi.state_prep.is_finite() {
                    return Err(Error::Config("lgi.state_prep must be finite".into()));
                }
                if let Some(phi) = self.lgi.phi {
                    check_phi(phi, "lgi.phi")?;
                    if phi == 0.0 {
                        return Err(Error::Config("lgi.phi must be positive".into()));
                    }
                }
                if self.lgi.n_shots < 2 {
                    return Err(Error::Config("lgi.n_shots must be at least 2".into()));
                }
            }
            Experiment::DephasingSweep => {
                if let Some(e) = grid.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                    return Err(Error::Config(format!("grid dephasing {e} outside [0, 1]")));
                }
            }
            Experiment::VisibilitySweep => {
                for &v in &grid {
                    check_visibility(v)?;
                }
            }
        }
        if self.experiment != Experiment::ChshThetaSweep && self.experiment != Experiment::Lgi {
            check_phi(self.blgi.phi1, "blgi.phi1")?;
            check_phi(self.blgi.phi2, "blgi.phi2")?;
            self.blgi.validate().map_err(config_error)?;
        }
        if self.mode == Mode::MonteCarlo {
            let shots = match self.experiment {
                Experiment::ChshThetaSweep => self.chsh.n_shots,
                Experiment::Lgi => self.lgi.n_shots,
                _ => self.blgi.n_shots,
            };
            if shots < 2 {
                return Err(Error::Config(
                    "monte-carlo mode needs at least 2 shots per point".into(),
                ));
            }
        }
        Ok(())
    }

    /// Sets every shot count in the file.
    pub fn set_shots(&mut self, n: usize) {
        self.blgi.n_shots = n;
        self.chsh.n_shots = n;
        self.lgi.n_shots = n;
    }
}
