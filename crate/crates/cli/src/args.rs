use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curesim::config::ModelChoice;

#[derive(Debug, Parser)]
#[command(
    name = "curesim",
    version,
    about = "Simulation-based design of survival trials with a cure proportion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Logrank power and analysis timing at one or more event counts.
    Power {
        #[command(flatten)]
        common: Common,
        /// Comma-separated event counts; defaults to `design.events`.
        #[arg(long, value_delimiter = ',')]
        events: Vec<u32>,
    },
    /// Smallest event count reaching the target power.
    EventsSearch {
        #[command(flatten)]
        common: Common,
        /// Defaults to `design.power`.
        #[arg(long)]
        target: Option<f64>,
        /// Defaults to `design.d_lo`, else the Schoenfeld count for the
        /// median-implied hazard ratio.
        #[arg(long)]
        d_lo: Option<u32>,
        /// Defaults to `design.d_hi`, else twice the lower bound.
        #[arg(long)]
        d_hi: Option<u32>,
    },
    /// Stop/continue probabilities and overall power across interim boundaries.
    InterimOc {
        #[command(flatten)]
        common: Common,
        /// Final analysis event count; defaults to `design.events`.
        #[arg(long)]
        events: Option<u32>,
    },
    /// Power of fixed-time survival comparisons.
    MilestonePower {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        events: Option<u32>,
        /// Comma-separated landmark months; defaults to `milestone.times`.
        #[arg(long, value_delimiter = ',')]
        t0: Vec<f64>,
        /// identity, log, cloglog or arcsine; defaults to `milestone.transform`.
        #[arg(long)]
        transform: Option<String>,
    },
    /// Survival, hazard and hazard-ratio functions on a time grid.
    Curves {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 60.0)]
        max_time: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Patient-level datasets of simulated trials cut at d events.
    Trials {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        events: Option<u32>,
    },
    /// Closed-form event count and minimal detectable hazard ratio.
    Schoenfeld {
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.8)]
        power: f64,
        #[arg(long)]
        hr: f64,
        /// Allocation ratio experimental : control.
        #[arg(long, default_value_t = 1.0)]
        ratio: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (sectioned text or JSON written by an earlier run).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub scenario: Option<PathBuf>,
    /// Bundled scenario: mirros or mirros-ph.
    #[arg(long)]
    pub preset: Option<String>,
    /// Survival model; `interim-oc` defaults to mechanistic, everything
    /// else to sample-size.
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Simulated trials.
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, env = "CURESIM_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    SampleSize,
    Mechanistic,
}

impl From<Model> for ModelChoice {
    fn from(m: Model) -> Self {
        match m {
            Model::SampleSize => ModelChoice::SampleSize,
            Model::Mechanistic => ModelChoice::Mechanistic,
        }
    }
}
