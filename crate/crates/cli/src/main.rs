// SPDX-License-Identifier: Apache-2.0

//! `blgi`: runs the configured sweeps and writes CSV or JSON reports.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blgi_core::sweep::{
    compare_exact_mc, render, run_sweep, Experiment, Mode, NoiseSection, SweepConfig,
};
use blgi_core::Error;

/// Exit code when the exact-vs-Monte-Carlo comparison flags a point.
const EXIT_FLAGGED: u8 = 7;

#[derive(Parser)]
#[command(
    name = "blgi",
    version,
    about = "Weak-measurement Bell-Leggett-Garg sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// ⟨C⟩ against ancilla measurement strength φ.
    BlgiPhiSweep(RunArgs),
    /// CHSH terms and sum against detector difference θ.
    ChshThetaSweep(RunArgs),
    /// Leggett-Garg combination against basis spacing.
    Lgi(RunArgs),
    /// ⟨C⟩ against Bell-qubit dephasing over the measurement window.
    DephasingSweep(RunArgs),
    /// ⟨C⟩ against symmetric readout visibility.
    VisibilitySweep(RunArgs),
    /// Ancilla |0⟩ and |1⟩ traces and both calibrations against φ.
    CalibrationCurves(RunArgs),
    /// Runs a sweep in both modes and prints per-point z-scores.
    Compare(RunArgs),
    /// Prints a config file with every default filled in.
    Template {
        #[arg(default_value = "blgi-phi-sweep")]
        experiment: String,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per point (every experiment section).
    #[arg(long)]
    shots: Option<usize>,
    /// exact or monte-carlo.
    #[arg(long)]
    mode: Option<String>,
    /// Output path; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise preset: ideal, device, table-one or paper-like.
    #[arg(long)]
    preset: Option<String>,
    /// csv or json; inferred from --out otherwise.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

fn load(experiment: Option<Experiment>, args: &RunArgs) -> Result<SweepConfig, Error> {
    let mut cfg = match (&args.config, experiment) {
        (Some(path), expected) => {
            let cfg = SweepConfig::load(path)?;
            if let Some(e) = expected {
                if cfg.experiment != e {
                    return Err(Error::Config(format!(
                        "{} describes a {} run, not {e}",
                        path.display(),
                        cfg.experiment
                    )));
                }
            }
            cfg
        }
        (None, Some(e)) => SweepConfig::template(e),
        (None, None) => SweepConfig::template(Experiment::BlgiPhiSweep),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.shots {
        cfg.set_shots(n);
    }
    if let Some(mode) = &args.mode {
        cfg.mode = mode.parse()?;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(preset) = &args.preset {
        cfg.noise = NoiseSection::preset(preset);
    }
    if let Some(format) = &args.format {
        cfg.format = Some(format.parse()?);
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

fn sweep(experiment: Experiment, args: &RunArgs) -> Result<ExitCode, Error> {
    let cfg = load(Some(experiment), args)?;
    let rows = run_sweep(&cfg)?;
    if cfg.out.is_none() {
        let text = render(&rows, cfg.output_format())?;
        std::io::stdout().write_all(text.as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn compare(args: &RunArgs) -> Result<ExitCode, Error> {
    let mut cfg = load(None, args)?;
    if args.mode.is_none() {
        cfg.mode = Mode::MonteCarlo;
    }
    let scores = compare_exact_mc(&cfg)?;
    let mut out = String::from("sweep_value,exact,mc_mean,sem,z,flagged\n");
    for s in &scores {
        out.push_str(&format!(
            "{:.11e},{:.11e},{:.11e},{:.11e},{:.6},{}\n",
            s.sweep_value, s.exact, s.mc_mean, s.sem, s.z, s.flagged
        ));
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => std::io::stdout().write_all(out.as_bytes())?,
    }
    if scores.iter().any(|s| s.flagged) {
        eprintln!(
            "error[mc-mismatch]: a Monte Carlo point lies more than 5 SEM from the exact value"
        );
        return Ok(ExitCode::from(EXIT_FLAGGED));
    }
    Ok(ExitCode::SUCCESS)
}

fn template(name: &str) -> Result<ExitCode, Error> {
    let cfg = SweepConfig::template(name.parse()?);
    print!("{}", cfg.to_toml()?);
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::BlgiPhiSweep(a) => sweep(Experiment::BlgiPhiSweep, &a),
        Command::ChshThetaSweep(a) => sweep(Experiment::ChshThetaSweep, &a),
        Command::Lgi(a) => sweep(Experiment::Lgi, &a),
        Command::DephasingSweep(a) => sweep(Experiment::DephasingSweep, &a),
        Command::VisibilitySweep(a) => sweep(Experiment::VisibilitySweep, &a),
        Command::CalibrationCurves(a) => sweep(Experiment::CalibrationCurves, &a),
        Command::Compare(a) => compare(&a),
        Command::Template { experiment } => template(&experiment),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
