//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags or incompatible
//! parameters), 2 for data errors (unreadable or invalid input files, plans
//! that cannot be built). Every failure writes one JSON line to stderr:
//! `{"error":"usage"|"data","message":"..."}`.

pub mod commands;
pub mod config;
pub mod json;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use commands::{FitMode, PlanSettings, SimulateArgs};
use config::Config;

use crate::loadsim::Topology;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data(_) => "data",
        }
    }

    /// Single-line JSON error record.
    pub fn to_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        serde_json::json!({ "error": self.kind(), "message": msg }).to_string()
    }
}

#[derive(Debug, Parser)]
#[command(name = "vlplan", version, about = "Token, packing and placement planner for vision-language data")]
pub struct Cli {
    /// TOML file with planning defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan images and videos from a JSONL manifest and pack their tokens.
    Plan(PlanArgs),
    /// Balance encoder work from a plan across devices.
    Balance(BalanceArgs),
    /// Fit a scaling law or a loss-to-metric line from a two-column CSV.
    Fit(FitArgs),
    /// Simulate data-loader reads and host-to-device traffic for a plan.
    Simulate(SimArgs),
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Visual token budget per video.
    #[arg(long)]
    budget: Option<u64>,
    /// Capacity of one packed sequence, in tokens.
    #[arg(long)]
    max_len: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(long)]
    cost_alpha: Option<f64>,
    #[arg(long)]
    cost_beta: Option<f64>,
}

#[derive(Debug, Args)]
struct BalanceArgs {
    /// Plan file written by `plan`.
    plan: PathBuf,
    #[arg(long)]
    devices: usize,
    /// Devices per balancing group; defaults to all devices.
    #[arg(long)]
    group_size: Option<usize>,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with a header row and two numeric columns.
    csv: PathBuf,
    #[arg(long, value_enum)]
    mode: FitMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Plan file written by `plan`.
    plan: PathBuf,
    #[arg(long, default_value_t = 1)]
    dp: u64,
    #[arg(long, default_value_t = 1)]
    pp: u64,
    #[arg(long, default_value_t = 1)]
    tp: u64,
    /// Bytes each data-parallel replica reads per step.
    #[arg(long, default_value_t = 0)]
    bytes_per_rank: u64,
    /// Place images with the FLOP balancer instead of round-robin.
    #[arg(long)]
    balanced: bool,
    #[command(flatten)]
    cost: CostArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let text = json::to_canonical_string(value).map_err(|e| CliError::Data(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Plan(a) => {
            let settings = PlanSettings {
                policy: cfg.policy(a.budget)?,
                max_len: cfg.max_len(a.max_len),
            };
            let plan = commands::plan(&a.manifest, &settings)?;
            emit(&plan, a.out.as_deref(), stdout)
        }
        Command::Balance(a) => {
            let model = cfg.cost_model(a.cost.cost_alpha, a.cost.cost_beta)?;
            let report = commands::balance(&a.plan, a.devices, a.group_size, model)?;
            emit(&report, a.out.as_deref(), stdout)
        }
        Command::Fit(a) => {
            let report = commands::fit(&a.csv, a.mode)?;
            emit(&report, a.out.as_deref(), stdout)
        }
        Command::Simulate(a) => {
            let args = SimulateArgs {
                plan: &a.plan,
                topology: Topology {
                    dp: a.dp,
                    pp: a.pp,
                    tp: a.tp,
                },
                bytes_per_dp_rank: a.bytes_per_rank,
                balanced: a.balanced,
                model: cfg.cost_model(a.cost.cost_alpha, a.cost.cost_beta)?,
            };
            let report = commands::simulate(&args)?;
            emit(&report, a.out.as_deref(), stdout)
        }
    }
}

/// Run the CLI and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            let err = CliError::Usage(first.to_owned());
            let _ = writeln!(stderr, "{}", err.to_line());
            return err.exit_code();
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", err.to_line());
            err.exit_code()
        }
    }
}
