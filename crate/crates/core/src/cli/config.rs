use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::pipeline::PipelineConfig;
use crate::sdnsim::SimConfig;
use crate::trafficgen::ScenarioConfig;

/// Fully resolved parameters of one command. Written as `run.toml` next to
/// the outputs and accepted back by `sdnguard run --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Generate(GenerateConfig),
    Detect(DetectConfig),
    Simulate(SimulateConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateConfig {
    pub seed: u64,
    pub out: PathBuf,
    /// Length of the switch chain written to `topology.txt`.
    pub switches: usize,
    pub scenario: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectInput {
    Packets {
        path: PathBuf,
    },
    /// External flow table; without a mapping the CICIDS2017 column names
    /// are assumed.
    Flows {
        path: PathBuf,
        mapping: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub run_id: String,
    pub input: DetectInput,
    /// Per-class training sizes for the size sweep; empty skips it.
    #[serde(default)]
    pub vary_sizes: Vec<usize>,
    pub pipeline: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SimulateInput {
    Trace {
        trace: PathBuf,
        topology: PathBuf,
    },
    /// Generates the trace inline; the topology defaults to a chain over the
    /// scenario hosts.
    Scenario {
        scenario: ScenarioConfig,
        topology: Option<PathBuf>,
        switches: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub input: SimulateInput,
    pub detector_feed: Option<PathBuf>,
    pub sim: SimConfig,
}

impl RunConfig {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self)
            .map_err(|e| CliError::Internal(format!("serializing run config: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::User(format!("run config: {e}")))
    }

    pub fn out(&self) -> &PathBuf {
        match self {
            RunConfig::Generate(c) => &c.out,
            RunConfig::Detect(c) => &c.out,
            RunConfig::Simulate(c) => &c.out,
        }
    }

    pub fn set_out(&mut self, out: PathBuf) {
        match self {
            RunConfig::Generate(c) => c.out = out,
            RunConfig::Detect(c) => c.out = out,
            RunConfig::Simulate(c) => c.out = out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let configs = [
            RunConfig::Generate(GenerateConfig {
                seed: 7,
                out: "g".into(),
                switches: 4,
                scenario: ScenarioConfig::default(),
            }),
            RunConfig::Detect(DetectConfig {
                seed: 1,
                out: "d".into(),
                run_id: "gcn-s1".into(),
                input: DetectInput::Flows {
                    path: "f.csv".into(),
                    mapping: None,
                },
                vary_sizes: vec![50, 250],
                pipeline: PipelineConfig::default(),
            }),
            RunConfig::Simulate(SimulateConfig {
                seed: 3,
                out: "s".into(),
                input: SimulateInput::Scenario {
                    scenario: ScenarioConfig::default(),
                    topology: None,
                    switches: 4,
                },
                detector_feed: Some("suspicious.csv".into()),
                sim: SimConfig::default(),
            }),
        ];
        for c in configs {
            let text = c.to_toml().unwrap();
            assert_eq!(RunConfig::from_toml(&text).unwrap(), c, "{text}");
        }
    }
}
