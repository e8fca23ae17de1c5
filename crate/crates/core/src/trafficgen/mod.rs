//! Seeded generation of benign traffic and attack variants with ground
//! truth.

mod attack;
mod benign;
mod scenario;

use thiserror::Error;

pub use attack::{gen_attack, host_ip, Pacing, Variant, VariantSpec};
pub use benign::{gen_benign, gen_host_flows, BenignParams, EPHEMERAL_BASE};
pub use scenario::{
    gen_scenario, truth_table, write_hosts, write_truth, AttackerGroup, Host, Role, Scenario,
    ScenarioConfig, ATTACK_PORT_BASE,
};

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("{0}")]
    Config(String),
}
