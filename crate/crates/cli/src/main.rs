//! `cfgauge`: beam mechanics calculators, break-in experiment simulation and
//! gauge-factor analysis.

mod commands;
mod output;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "cfgauge", version, about = "Embedded carbon-fiber strain gauge toolkit")]
pub struct Cli {
    /// Configuration file; repeat to layer, later files override earlier ones.
    #[arg(long = "config", global = true, value_name = "PATH")]
    pub configs: Vec<PathBuf>,
    /// Shipped sample preset used as the base layer.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<Preset>,
    /// Seed for stochastic commands (overrides the configuration).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output file (standard output when omitted, except for `simulate`).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Short,
    Medium,
    Tall,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Short => "short",
            Preset::Medium => "medium",
            Preset::Tall => "tall",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transformed-section properties of each sample.
    Section,
    /// Three-point bending response at a given force.
    Bend {
        /// Midspan force (N).
        #[arg(long, allow_negative_numbers = true)]
        force: f64,
        #[arg(long, value_enum, default_value_t = OrientationArg::Initial)]
        orientation: OrientationArg,
    },
    /// Residual thermal stress on the composite lines.
    Thermal,
    /// Simulate a break-in experiment and write the record with its metadata.
    Simulate {
        /// Run this many consecutive seeds in parallel, one file per seed.
        #[arg(long, value_name = "N")]
        sweep: Option<u32>,
        /// Worker threads for `--sweep` (defaults to the available cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Fit gauge factors to a recorded time series.
    Analyze {
        /// Record CSV; its `.meta.json` sidecar is used when present.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = StrainModeArg::Absolute)]
        strain_mode: StrainModeArg,
        /// Also write the SVG charts to this file.
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Compare model output with the published reference tables.
    Reproduce {
        #[arg(value_enum)]
        table: Table,
        /// Simulated runs per sample for `table4-trends`.
        #[arg(long, default_value_t = 8)]
        runs: u32,
    },
    /// Print the JSON schema of a machine-readable output.
    Schema {
        #[arg(value_enum)]
        kind: output::SchemaKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    Initial,
    Flipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrainModeArg {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Table3,
    #[value(name = "table4-trends")]
    Table4Trends,
}

/// Bad flags or inputs that clap cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

/// Process outcome other than an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    AcceptanceFailed,
}

const EXIT_ACCEPTANCE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PHYSICS: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<cfgauge_core::Error>() {
        return if e.is_input_error() { EXIT_USAGE } else { EXIT_PHYSICS };
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AcceptanceFailed) => ExitCode::from(EXIT_ACCEPTANCE),
        Err(err) => {
            let code = exit_code(&err);
            let kind = if code == EXIT_PHYSICS { "physics error" } else { "error" };
            eprintln!("cfgauge: {kind}: {err:#}");
            ExitCode::from(code)
        }
    }
}
