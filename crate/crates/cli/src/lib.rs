//! Command-line front end for `nfpf-core`.
//!
//! Every command renders to a `String` so output can be compared
//! byte-for-byte; `main` only prints it and maps errors to exit codes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod analyze;
pub mod args;
mod error;
mod output;
mod simulate;
mod spectrum;
mod tnpf;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nfpf_core::bundled::{builtin, BUILTIN_NAMES};
use nfpf_core::{LoadedModel, ModelFile, DEFAULT_DENOM_TOL, DEFAULT_SIGMA_HZ};

pub use analyze::{analyze, AnalysisReport, AnalyzeOptions};
pub use error::{CliError, CliResult};
pub use output::num;
pub use simulate::{simulate, SimulateOptions};
pub use spectrum::{spectrum, SpectrumOptions};
pub use tnpf::{tnpf, ModeSelect, TnpfOptions};

use args::{Alpha, Grid, InitialState, TimeGrid};

#[derive(Debug, Parser)]
#[command(
    name = "nfpf",
    version,
    about = "Normal-form participation factors for quadratic and swing models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode table, PF tables, resonance ledger and ranking changes.
    Analyze(AnalyzeArgs),
    /// Participation spectrum of one state and its convolved curve.
    Spectrum(SpectrumArgs),
    /// Time-varying participation at one mode.
    Tnpf(TnpfArgs),
    /// Integrate from a perturbation and compare with the normal form.
    Simulate(SimulateArgs),
    /// Print a bundled model file, or list them.
    Builtin { name: Option<String> },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file (JSON), or `builtin:<name>`.
    pub model: String,
    /// Denominators at or below this magnitude are treated as resonant.
    #[arg(long, default_value_t = DEFAULT_DENOM_TOL)]
    pub denom_tol: f64,
    /// Excitation scale per state: one value or a comma separated list.
    #[arg(long, default_value = "1")]
    pub alpha: Alpha,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also list active triples with denominators up to this magnitude.
    #[arg(long, default_value_t = 0.5)]
    pub near_tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// State index (1-based).
    #[arg(long)]
    pub state: usize,
    #[arg(long, default_value_t = 0.0)]
    pub time: f64,
    /// Kernel width (Hz).
    #[arg(long, default_value_t = DEFAULT_SIGMA_HZ)]
    pub sigma: f64,
    /// fmin:fmax:step (Hz).
    #[arg(long, default_value = "0:3:0.01")]
    pub grid: Grid,
    /// Keep 0 Hz resonance points in the curve.
    #[arg(long)]
    pub include_dc: bool,
}

#[derive(Debug, Args)]
pub struct TnpfArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Target mode frequency (Hz).
    #[arg(
        long,
        conflicts_with = "mode_index",
        required_unless_present = "mode_index"
    )]
    pub mode_freq: Option<f64>,
    /// Mode index (1-based, as in the mode table).
    #[arg(long)]
    pub mode_index: Option<usize>,
    /// Accepted distance between --mode-freq and a mode (Hz).
    #[arg(long, default_value_t = 0.05)]
    pub freq_tol: f64,
    /// t0:t1:steps.
    #[arg(long, default_value = "0:10:100")]
    pub times: TimeGrid,
    #[arg(long, default_value_t = DEFAULT_SIGMA_HZ)]
    pub sigma: f64,
    #[arg(long)]
    pub include_dc: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model file (JSON), or `builtin:<name>`.
    pub model: String,
    /// `ek:<index>:<scale>` (1-based) or a comma separated deviation vector.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: InitialState,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = DEFAULT_DENOM_TOL)]
    pub denom_tol: f64,
    /// Integrate the full swing equations rather than the quadratic model.
    #[arg(long)]
    pub full: bool,
}

/// Reads a model file or resolves `builtin:<name>`.
pub fn load_model(spec: &str) -> CliResult<LoadedModel> {
    let file = match spec.strip_prefix("builtin:") {
        Some(name) => builtin(name).ok_or_else(|| unknown_builtin(name))?,
        None => {
            let path = PathBuf::from(spec);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            ModelFile::from_json(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
    };
    Ok(file.load()?)
}

fn unknown_builtin(name: &str) -> CliError {
    CliError::Input(format!(
        "unknown builtin {name:?}; available: {}",
        BUILTIN_NAMES.join(", ")
    ))
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> CliResult<String> {
    let loaded = load_model(&a.model.model)?;
    let opts = AnalyzeOptions {
        alpha: a.model.alpha.clone(),
        denom_tol: a.model.denom_tol,
        near_tol: a.near_tol,
    };
    let report = analyze(&loaded, &opts)?;
    Ok(if a.json {
        report.render_json()
    } else {
        report.render_text()
    })
}

pub fn cmd_spectrum(a: &SpectrumArgs) -> CliResult<String> {
    let loaded = load_model(&a.model.model)?;
    spectrum(
        &loaded,
        &SpectrumOptions {
            state: a.state,
            time: a.time,
            sigma: a.sigma,
            grid: a.grid,
            alpha: a.model.alpha.clone(),
            denom_tol: a.model.denom_tol,
            include_dc: a.include_dc,
        },
    )
}

pub fn cmd_tnpf(a: &TnpfArgs) -> CliResult<String> {
    let loaded = load_model(&a.model.model)?;
    let mode = match (a.mode_freq, a.mode_index) {
        (Some(hz), _) => ModeSelect::Frequency {
            hz,
            tol: a.freq_tol,
        },
        (None, Some(i)) => ModeSelect::Index(i),
        (None, None) => return Err(CliError::Input("need --mode-freq or --mode-index".into())),
    };
    tnpf(
        &loaded,
        &TnpfOptions {
            mode,
            times: a.times,
            sigma: a.sigma,
            alpha: a.model.alpha.clone(),
            denom_tol: a.model.denom_tol,
            include_dc: a.include_dc,
        },
    )
}

pub fn cmd_simulate(a: &SimulateArgs) -> CliResult<String> {
    let loaded = load_model(&a.model)?;
    simulate(
        &loaded,
        &SimulateOptions {
            x0: a.x0.clone(),
            dt: a.dt,
            t_end: a.t_end,
            denom_tol: a.denom_tol,
            full: a.full,
        },
    )
}

pub fn cmd_builtin(name: Option<&str>) -> CliResult<String> {
    match name {
        None => Ok(BUILTIN_NAMES.iter().map(|n| format!("{n}\n")).collect()),
        Some(n) => Ok(builtin(n)
            .ok_or_else(|| unknown_builtin(n))?
            .to_json_pretty()
            + "\n"),
    }
}

pub fn execute(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Tnpf(a) => cmd_tnpf(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Builtin { name } => cmd_builtin(name.as_deref()),
    }
}
