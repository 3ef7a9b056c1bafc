// SPDX-License-Identifier: Apache-2.0

//! Configuration-driven parameter sweeps and their CSV/JSON reports.

mod compare;
mod config;
mod report;
mod run;

pub use compare::{compare_exact_mc, compare_exact_mc_scaled, ZScore, MIN_COMPARE_SHOTS, Z_FLAG};
pub use config::{Experiment, Grid, LgiSection, Mode, NoiseSection, OutputFormat, SweepConfig};
pub use report::{
    emit_report, format_number, parse_csv, parse_json, parse_report, render, round_trip_value,
    to_csv, to_json, COLUMNS,
};
pub use run::{blgi_point, compute_sweep, point_seed, row_terms, run_sweep, SweepRow, LGI_BOUND};
