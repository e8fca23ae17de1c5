//! Discrete-event model of reactive SDN switches and a mitigating
//! controller.

mod controller;
mod sim;
mod switch;
mod topology;
mod tuple;

pub use controller::{Action, ControllerState, PacketIn};
pub use sim::{
    mirror, resolve_feed, run_scenario, Disposition, DropReason, SimConfig, SimReport, Window,
    DEFAULT_PACKET_IN_BUDGET, TIMESERIES_COLUMNS,
};
pub use switch::{Install, Lookup, Rule, RuleKind, SwitchState};
pub use topology::{Network, SwitchSpec, DEFAULT_RULE_CAPACITY};
pub use tuple::{Attach, HostTuple};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("topology: {0}")]
    Topology(String),
    #[error("simulation config: {0}")]
    Config(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
