//! Declarative scenarios: host roles, attacker groups, duration and seed.
//!
//! ```toml
//! duration = 60.0
//! benign_hosts = 20
//! victims = 4
//!
//! [[attackers]]
//! variant = "fast_dc_ddos"
//! count = 2
//! sessions = 6
//! sleep = [3.0, 10.0]
//! ```

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::net::Ipv4Addr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::attack::{gen_attack, host_ip, Pacing, Variant, VariantSpec};
use super::benign::{gen_host_flows, BenignParams};
use super::TrafficError;
use crate::flowkit::{Endpoint, Label, MacAddr, PacketRecord};
use crate::rng;

/// First source port used by attack sessions; session `s` uses base + s.
pub const ATTACK_PORT_BASE: u16 = 50000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackerGroup {
    pub variant: Variant,
    pub count: usize,
    /// Sessions per attacker; each uses its own source port.
    pub sessions: usize,
    /// Explicit addresses (the rest of `count` is auto-assigned).
    pub ips: Vec<Ipv4Addr>,
    pub rate: Option<(f64, f64)>,
    pub sleep: Option<(f64, f64)>,
    pub burst: Option<(f64, f64)>,
    pub session_duration: Option<(f64, f64)>,
    pub port_range: Option<(u16, u16)>,
    pub payload: Option<(u32, u32)>,
    /// Victim port under attack; defaults to the first benign service port.
    pub target_port: Option<u16>,
    /// The two variants a hybrid session runs back to back.
    pub parts: Vec<Variant>,
}

impl Default for AttackerGroup {
    fn default() -> Self {
        AttackerGroup {
            variant: Variant::FastDdos,
            count: 1,
            sessions: 6,
            ips: Vec::new(),
            rate: None,
            sleep: None,
            burst: None,
            session_duration: None,
            port_range: None,
            payload: None,
            target_port: None,
            parts: vec![Variant::SlowDdos, Variant::FastDdos],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub duration: f64,
    /// Used when no seed is given on the command line.
    pub seed: Option<u64>,
    pub benign_hosts: usize,
    pub victims: usize,
    pub benign_ips: Vec<Ipv4Addr>,
    pub victim_ips: Vec<Ipv4Addr>,
    /// Attack packets carry random destination MACs.
    pub forge_attack_dst_mac: bool,
    pub pacing: Pacing,
    pub benign: BenignParams,
    pub attackers: Vec<AttackerGroup>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            duration: 60.0,
            seed: None,
            benign_hosts: 20,
            victims: 4,
            benign_ips: Vec::new(),
            victim_ips: Vec::new(),
            forge_attack_dst_mac: true,
            pacing: Pacing::default(),
            benign: BenignParams::default(),
            attackers: Variant::DDOS
                .iter()
                .map(|&variant| AttackerGroup {
                    variant,
                    count: 2,
                    ..AttackerGroup::default()
                })
                .collect(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, TrafficError> {
        toml::from_str(text).map_err(|e| TrafficError::Config(format!("scenario: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Benign,
    Victim,
    Attacker(Variant),
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Benign => "benign",
            Role::Victim => "victim",
            Role::Attacker(v) => v.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Host {
    pub ip: Ipv4Addr,
    pub mac: MacAddr,
    pub role: Role,
    /// Index of the attacker group, for attackers.
    pub group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Time-sorted; equal timestamps keep generation order.
    pub packets: Vec<PacketRecord>,
    /// Majority label per source endpoint, sorted by endpoint.
    pub truth: Vec<(Endpoint, Label)>,
    pub hosts: Vec<Host>,
}

fn assign_hosts(cfg: &ScenarioConfig) -> Result<Vec<Host>, TrafficError> {
    let mut taken: HashMap<Ipv4Addr, &'static str> = HashMap::new();
    let mut claim = |ip: Ipv4Addr, role: Role| -> Result<(), TrafficError> {
        if let Some(prev) = taken.insert(ip, role.as_str()) {
            return Err(TrafficError::Config(format!(
                "host {ip} assigned to both `{prev}` and `{}`",
                role.as_str()
            )));
        }
        Ok(())
    };
    let mut groups: Vec<(Role, &[Ipv4Addr], usize, Option<usize>)> = vec![
        (Role::Benign, &cfg.benign_ips, cfg.benign_hosts, None),
        (Role::Victim, &cfg.victim_ips, cfg.victims, None),
    ];
    for (gi, g) in cfg.attackers.iter().enumerate() {
        groups.push((Role::Attacker(g.variant), &g.ips, g.count, Some(gi)));
    }
    for (role, ips, _, _) in &groups {
        for &ip in *ips {
            claim(ip, *role)?;
        }
    }
    let mut next = 0usize;
    let mut hosts = Vec::new();
    for (role, ips, count, group) in groups {
        let mut members: Vec<Ipv4Addr> = ips.to_vec();
        while members.len() < count {
            let ip = host_ip(next);
            next += 1;
            if let std::collections::hash_map::Entry::Vacant(e) = taken.entry(ip) {
                e.insert(role.as_str());
                members.push(ip);
            }
        }
        hosts.extend(members.into_iter().map(|ip| Host {
            ip,
            mac: MacAddr::for_ip(ip),
            role,
            group,
        }));
    }
    Ok(hosts)
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo >= hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn session_spec(
    cfg: &ScenarioConfig,
    g: &AttackerGroup,
    variant: Variant,
    source: Endpoint,
    target: Endpoint,
    start: f64,
    length: f64,
) -> VariantSpec {
    let mut s = VariantSpec::new(variant, source, target, start, length);
    let own = g.variant == variant;
    if own {
        if let Some(r) = g.rate {
            s.rate_range = r;
        }
        if g.sleep.is_some() {
            s.sleep_range = g.sleep;
        }
        if g.burst.is_some() {
            s.burst_range = g.burst;
        }
        if let Some(p) = g.port_range {
            s.port_range = p;
        }
        if let Some(p) = g.payload {
            s.payload_range = p;
        }
    }
    s.pacing = cfg.pacing;
    s.forge_dst_mac = cfg.forge_attack_dst_mac;
    s
}

fn attacker_packets(
    cfg: &ScenarioConfig,
    g: &AttackerGroup,
    ip: Ipv4Addr,
    victims: &[Ipv4Addr],
    rng: &mut impl Rng,
) -> Result<Vec<PacketRecord>, TrafficError> {
    if g.sessions > usize::from(u16::MAX - ATTACK_PORT_BASE) {
        return Err(TrafficError::Config(format!(
            "too many sessions ({})",
            g.sessions
        )));
    }
    let services = &cfg.benign.service_ports;
    let mut out = Vec::new();
    for s in 0..g.sessions {
        let source = Endpoint::new(ip, ATTACK_PORT_BASE + s as u16);
        let victim = victims[rng.random_range(0..victims.len())];
        let target = Endpoint::new(victim, g.target_port.unwrap_or(services[0]));
        let session = g.session_duration.unwrap_or(g.variant.default_session());
        if !(session.0 > 0.0 && session.0 <= session.1) {
            return Err(TrafficError::Config(format!(
                "session_duration [{}, {}] invalid",
                session.0, session.1
            )));
        }
        let length = uniform(rng, session).min(cfg.duration);
        let start = uniform(rng, (0.0, (cfg.duration - length).max(0.0)));
        match g.variant {
            Variant::Hybrid => {
                if g.parts.len() != 2 || g.parts.contains(&Variant::Hybrid) {
                    return Err(TrafficError::Config(
                        "hybrid needs exactly two non-hybrid parts".into(),
                    ));
                }
                let half = length / 2.0;
                for (k, &part) in g.parts.iter().enumerate() {
                    let spec =
                        session_spec(cfg, g, part, source, target, start + k as f64 * half, half);
                    out.extend(gen_attack(&spec, rng)?);
                }
            }
            Variant::PortScan => {
                let spec = session_spec(
                    cfg,
                    g,
                    Variant::PortScan,
                    source,
                    target,
                    uniform(rng, (0.0, cfg.duration / 2.0)),
                    length,
                );
                out.extend(gen_attack(&spec, rng)?);
            }
            v => {
                let spec = session_spec(cfg, g, v, source, target, start, length);
                out.extend(gen_attack(&spec, rng)?);
            }
        }
    }
    Ok(out)
}

/// Generates the scenario's trace and ground truth.
pub fn gen_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<Scenario, TrafficError> {
    if !(cfg.duration > 0.0 && cfg.duration.is_finite()) {
        return Err(TrafficError::Config(format!(
            "duration {} must be positive",
            cfg.duration
        )));
    }
    cfg.benign.validate()?;
    let hosts = assign_hosts(cfg)?;
    let benign: Vec<Ipv4Addr> = hosts
        .iter()
        .filter(|h| h.role == Role::Benign)
        .map(|h| h.ip)
        .collect();
    let victims: Vec<Ipv4Addr> = hosts
        .iter()
        .filter(|h| h.role == Role::Victim)
        .map(|h| h.ip)
        .collect();
    let servers: Vec<Ipv4Addr> = benign.iter().chain(&victims).copied().collect();
    if !cfg
        .attackers
        .iter()
        .all(|g| g.count == 0 || g.sessions == 0)
        && victims.is_empty()
    {
        return Err(TrafficError::Config(
            "attackers configured but no victim host".into(),
        ));
    }

    let mut packets = Vec::new();
    for (i, &h) in benign.iter().enumerate() {
        let peers: Vec<Ipv4Addr> = servers.iter().copied().filter(|&p| p != h).collect();
        let mut rng = rng::indexed_substream(seed, "traffic.benign", i as u64);
        packets.extend(gen_host_flows(
            h,
            &peers,
            cfg.duration,
            &cfg.benign,
            &mut rng,
        )?);
    }
    let mut index = 0u64;
    for (gi, g) in cfg.attackers.iter().enumerate() {
        for h in hosts.iter().filter(|h| h.group == Some(gi)) {
            let mut rng = rng::indexed_substream(seed, "traffic.attack", index);
            index += 1;
            packets.extend(
                attacker_packets(cfg, g, h.ip, &victims, &mut rng)?
                    .into_iter()
                    .filter(|p| p.timestamp < cfg.duration),
            );
        }
    }
    packets.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    let truth = truth_table(&packets);
    Ok(Scenario {
        packets,
        truth,
        hosts,
    })
}

/// Majority label of every source endpoint in `packets`.
pub fn truth_table(packets: &[PacketRecord]) -> Vec<(Endpoint, Label)> {
    let mut by_src: BTreeMap<Endpoint, Vec<Label>> = BTreeMap::new();
    for p in packets {
        by_src
            .entry(Endpoint::new(p.src_ip, p.src_port))
            .or_default()
            .push(p.label);
    }
    by_src
        .into_iter()
        .map(|(e, ls)| (e, Label::majority(ls).expect("non-empty")))
        .collect()
}

pub fn write_truth<W: Write>(w: W, truth: &[(Endpoint, Label)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["src_ip", "src_port", "label"])?;
    for (e, l) in truth {
        out.write_record([e.ip.to_string(), e.port.to_string(), l.as_str().to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_hosts<W: Write>(w: W, hosts: &[Host]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["ip", "mac", "role"])?;
    for h in hosts {
        out.write_record([
            h.ip.to_string(),
            h.mac.to_string(),
            h.role.as_str().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
