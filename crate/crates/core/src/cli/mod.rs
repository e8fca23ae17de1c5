//! Command-line front end. Every command writes a `run.toml` echo that
//! `sdnguard run --config` replays.
//!
//! Exit codes: 0 success, 2 user or configuration error, 1 internal error.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_detect, cmd_generate, cmd_report, cmd_simulate, execute, read_suspicious};
pub use config::{
    DetectConfig, DetectInput, GenerateConfig, RunConfig, SimulateConfig, SimulateInput,
};

use crate::pipeline::{ModelKind, PipelineConfig};
use crate::sdnsim::SimConfig;
use crate::trafficgen::ScenarioConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USER: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sdnguard",
    version,
    about = "Packet-injection detection and SDN mitigation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled packet trace from a scenario.
    Generate(GenerateArgs),
    /// Characterize a trace, then detect and identify attackers.
    Detect(DetectArgs),
    /// Replay a trace through the SDN simulator.
    Simulate(SimulateArgs),
    /// Merge metrics of finished runs into comparison tables.
    Report(ReportArgs),
    /// Replay a run from its `run.toml` echo.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Scenario TOML; built-in defaults when omitted.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Switches in the generated chain topology.
    #[arg(long, default_value_t = 4)]
    pub switches: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    Rf,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Packet trace CSV.
    #[arg(long, conflicts_with = "flows", required_unless_present = "flows")]
    pub packets: Option<PathBuf>,
    /// External flow table CSV.
    #[arg(long)]
    pub flows: Option<PathBuf>,
    /// Column mapping TOML for `--flows`.
    #[arg(long, requires = "flows")]
    pub mapping: Option<PathBuf>,
    /// Pipeline TOML; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long, value_enum)]
    pub baseline: Option<Baseline>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub run_id: Option<String>,
    /// Comma-separated per-class training sizes, e.g. `50,250,500`.
    #[arg(long, value_delimiter = ',')]
    pub vary_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Packet trace CSV with `src_mac,dst_mac` columns.
    #[arg(
        long,
        conflicts_with = "scenario",
        requires = "topology",
        required_unless_present = "scenario"
    )]
    pub trace: Option<PathBuf>,
    /// Scenario TOML to generate the trace inline.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Chain length when no topology is given.
    #[arg(long, default_value_t = 4)]
    pub switches: usize,
    /// Simulator TOML; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mitigation: Option<Switch>,
    /// Suspicious-node list (`src_ip,src_port,label`) from `detect`.
    #[arg(long)]
    pub detector_feed: Option<PathBuf>,
    #[arg(long)]
    pub feed_time: Option<f64>,
    #[arg(long)]
    pub budget: Option<u32>,
    #[arg(long)]
    pub latency: Option<f64>,
    #[arg(long)]
    pub idle_timeout: Option<f64>,
    #[arg(long)]
    pub log_events: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directories containing `metrics.csv`.
    pub runs: Vec<PathBuf>,
    /// Directory for the merged tables; stdout only when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory overriding the echoed one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_text(path: &PathBuf, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("cannot read {what} {}: {e}", path.display())))
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &PathBuf, what: &str) -> Result<T, CliError> {
    toml::from_str(&read_text(path, what)?)
        .map_err(|e| CliError::User(format!("{what} {}: {e}", path.display())))
}

fn scenario_from(path: Option<&PathBuf>) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => ScenarioConfig::from_toml(&read_text(p, "scenario")?)
            .map_err(|e| CliError::User(format!("{}: {e}", p.display()))),
        None => Ok(ScenarioConfig::default()),
    }
}

/// Turns parsed arguments into a resolved run config (report excepted).
pub fn resolve(command: Command) -> Result<Option<RunConfig>, CliError> {
    Ok(Some(match command {
        Command::Generate(a) => {
            let scenario = scenario_from(a.scenario.as_ref())?;
            let seed = a.seed.or(scenario.seed).unwrap_or(0);
            RunConfig::Generate(GenerateConfig {
                seed,
                out: a.out,
                switches: a.switches,
                scenario,
            })
        }
        Command::Detect(a) => {
            let mut pipeline: PipelineConfig = match &a.config {
                Some(p) => parse_toml(p, "pipeline config")?,
                None => PipelineConfig::default(),
            };
            if let Some(m) = a.model {
                pipeline.model = m;
            }
            if a.baseline == Some(Baseline::Rf) {
                pipeline.baseline_rf = true;
            }
            let input = match (a.packets, a.flows) {
                (Some(path), _) => DetectInput::Packets { path },
                (None, Some(path)) => DetectInput::Flows {
                    path,
                    mapping: a.mapping,
                },
                (None, None) => {
                    return Err(CliError::User("detect needs --packets or --flows".into()))
                }
            };
            let run_id = a
                .run_id
                .unwrap_or_else(|| format!("{}-s{}", pipeline.model.as_str(), a.seed));
            RunConfig::Detect(DetectConfig {
                seed: a.seed,
                out: a.out,
                run_id,
                input,
                vary_sizes: a.vary_sizes,
                pipeline,
            })
        }
        Command::Simulate(a) => {
            let mut sim: SimConfig = match &a.config {
                Some(p) => parse_toml(p, "simulator config")?,
                None => SimConfig::default(),
            };
            if let Some(m) = a.mitigation {
                sim.mitigation = m == Switch::On;
            }
            if let Some(t) = a.feed_time {
                sim.feed_time = t;
            }
            if let Some(b) = a.budget {
                sim.packet_in_budget = b;
            }
            if let Some(l) = a.latency {
                sim.control_latency = l;
            }
            if a.idle_timeout.is_some() {
                sim.idle_timeout = a.idle_timeout;
            }
            sim.log_events |= a.log_events;
            let (input, seed) = match (a.trace, a.topology) {
                (Some(trace), Some(topology)) => (
                    SimulateInput::Trace { trace, topology },
                    a.seed.unwrap_or(0),
                ),
                (Some(_), None) => return Err(CliError::User("--trace needs --topology".into())),
                (None, topology) => {
                    let scenario = scenario_from(a.scenario.as_ref())?;
                    let seed = a.seed.or(scenario.seed).unwrap_or(0);
                    (
                        SimulateInput::Scenario {
                            scenario,
                            topology,
                            switches: a.switches,
                        },
                        seed,
                    )
                }
            };
            RunConfig::Simulate(SimulateConfig {
                seed,
                out: a.out,
                input,
                detector_feed: a.detector_feed,
                sim,
            })
        }
        Command::Run(a) => {
            let mut cfg = RunConfig::from_toml(&read_text(&a.config, "run config")?)?;
            if let Some(out) = a.out {
                cfg.set_out(out);
            }
            cfg
        }
        Command::Report(_) => return Ok(None),
    }))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Report(a) => cmd_report(&a.runs, a.out.as_deref()).map(|text| print!("{text}")),
        other => resolve(other).and_then(|cfg| match cfg {
            Some(cfg) => execute(&cfg).map(|summary| print!("{summary}")),
            None => Ok(()),
        }),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sdnguard: {e}");
            e.exit_code()
        }
    }
}
