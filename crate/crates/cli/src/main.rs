//! `tvws`: analytic metrics, parameter sweeps, Monte Carlo runs and channel
//! planning for CSMA/CA networks in TV white space.

mod metrics;
mod plan;
mod simulate;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tvws_core::{Error, NetworkConfig};

#[derive(Parser)]
#[command(name = "tvws", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Network config file (flat TOML keys, units in key names)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Monte Carlo replications per estimate
    #[arg(long, global = true, default_value_t = 10_000)]
    reps: usize,

    /// Allow powers and heights above the FCC caps
    #[arg(long, global = true)]
    override_regulatory: bool,

    #[arg(long, global = true, value_enum, default_value_t = ToleranceProfile::Paper)]
    tolerance_profile: ToleranceProfile,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceProfile {
    /// Three standard errors of the simulation
    Strict,
    /// Fixed absolute gaps per quantity
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic metrics of one configuration
    Analyze,
    /// Analytic metrics over a grid of AP power, height and density
    Sweep(metrics::SweepArgs),
    /// Monte Carlo estimates with standard errors
    Simulate(simulate::SimulateArgs),
    /// Compare analytic values against simulation
    Validate,
    /// Channels needed to serve a set of households
    Plan(plan::PlanArgs),
}

/// Failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical { .. } | Error::Rejection { .. } | Error::Domain(_) => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl GlobalArgs {
    /// The config file (or defaults) with the override flag applied, validated.
    pub fn network_config(&self) -> Result<NetworkConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => NetworkConfig::parse(&read(path)?)?,
            None => NetworkConfig::default(),
        };
        cfg.override_regulatory |= self.override_regulatory;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn output(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(path) => Box::new(io::BufWriter::new(File::create(path).map_err(|e| {
                Failure::Usage(format!("{}: {e}", path.display()))
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Analyze => metrics::analyze(&cli.global),
        Command::Sweep(args) => metrics::sweep(&cli.global, args),
        Command::Simulate(args) => simulate::simulate(&cli.global, args),
        Command::Validate => simulate::validate(&cli.global),
        Command::Plan(args) => plan::plan(&cli.global, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tvws: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
