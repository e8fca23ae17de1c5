//! Switch graph with host attachments.
//!
//! ```text
//! [switches]
//! S1 capacity=55000
//! S2
//! [links]
//! S1 S2
//! [hosts ip mac switch:port]
//! 10.0.0.1 02:00:0a:00:00:01 S1:1
//! [gateway]
//! S1
//! ```
//!
//! `#` starts a comment. Link endpoints may carry a port (`S1:3 S2:1`).

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::net::Ipv4Addr;

use super::{Attach, HostTuple, SimError};
use crate::flowkit::MacAddr;

pub const DEFAULT_RULE_CAPACITY: usize = 55_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchSpec {
    pub name: String,
    pub capacity: usize,
    pub ports: Option<u16>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub switches: Vec<SwitchSpec>,
    pub links: Vec<(usize, usize)>,
    /// Known hosts in declaration order; this is the controller's
    /// Network_List.
    pub hosts: Vec<HostTuple>,
    pub gateway: usize,
    /// `next_hop[a][b]`: neighbor of `a` on a shortest path to `b`.
    pub next_hop: Vec<Vec<Option<usize>>>,
    by_ip: HashMap<Ipv4Addr, usize>,
    by_mac: HashMap<MacAddr, usize>,
}

fn line_err(line: usize, msg: impl Into<String>) -> SimError {
    SimError::Topology(format!("line {line}: {}", msg.into()))
}

impl Network {
    /// Validates and indexes a topology; computes shortest-path next hops.
    pub fn new(
        switches: Vec<SwitchSpec>,
        links: Vec<(usize, usize)>,
        hosts: Vec<HostTuple>,
        gateway: usize,
    ) -> Result<Self, SimError> {
        let n = switches.len();
        if n == 0 {
            return Err(SimError::Topology("no switches".into()));
        }
        if gateway >= n {
            return Err(SimError::Topology("gateway is not a switch".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &links {
            if a >= n || b >= n || a == b {
                return Err(SimError::Topology(format!("bad link {a}-{b}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        let mut next_hop = vec![vec![None; n]; n];
        for dst in 0..n {
            // BFS from the destination; the parent of `a` is its next hop.
            let mut seen = vec![false; n];
            seen[dst] = true;
            let mut q = VecDeque::from([dst]);
            while let Some(u) = q.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        next_hop[v][dst] = Some(u);
                        q.push_back(v);
                    }
                }
            }
            if let Some(cut) = seen.iter().position(|s| !s) {
                return Err(SimError::Topology(format!(
                    "switch {} is disconnected from {}",
                    switches[cut].name, switches[dst].name
                )));
            }
        }
        let mut by_ip = HashMap::new();
        let mut by_mac = HashMap::new();
        let mut ports = HashMap::new();
        for (i, h) in hosts.iter().enumerate() {
            if h.attach.switch >= n {
                return Err(SimError::Topology(format!(
                    "host {} attached to unknown switch",
                    h.ip
                )));
            }
            if h.attach.port == 0 {
                return Err(SimError::Topology(format!(
                    "host {}: port 0 is reserved",
                    h.ip
                )));
            }
            if let Some(p) = switches[h.attach.switch].ports {
                if h.attach.port > p {
                    return Err(SimError::Topology(format!(
                        "host {}: port {} beyond switch port count {p}",
                        h.ip, h.attach.port
                    )));
                }
            }
            if by_ip.insert(h.ip, i).is_some() {
                return Err(SimError::Topology(format!("duplicate host IP {}", h.ip)));
            }
            if by_mac.insert(h.mac, i).is_some() {
                return Err(SimError::Topology(format!("duplicate host MAC {}", h.mac)));
            }
            if let Some(other) = ports.insert(h.attach, i) {
                return Err(SimError::Topology(format!(
                    "hosts {} and {} share a switch port",
                    hosts[other].ip, h.ip
                )));
            }
        }
        Ok(Network {
            switches,
            links,
            hosts,
            gateway,
            next_hop,
            by_ip,
            by_mac,
        })
    }

    /// A chain `S1 - S2 - ... - Sk` with hosts attached round-robin;
    /// `S1` is the gateway.
    pub fn chain(switch_count: usize, hosts: &[(Ipv4Addr, MacAddr)]) -> Result<Self, SimError> {
        let switches = (1..=switch_count)
            .map(|i| SwitchSpec {
                name: format!("S{i}"),
                capacity: DEFAULT_RULE_CAPACITY,
                ports: None,
            })
            .collect();
        let links = (1..switch_count).map(|i| (i - 1, i)).collect();
        let mut next_port = vec![1u16; switch_count.max(1)];
        let tuples = hosts
            .iter()
            .enumerate()
            .map(|(i, &(ip, mac))| {
                let switch = i % switch_count.max(1);
                let port = next_port[switch];
                next_port[switch] += 1;
                HostTuple {
                    ip,
                    mac,
                    attach: Attach { switch, port },
                }
            })
            .collect();
        Network::new(switches, links, tuples, 0)
    }

    pub fn parse(text: &str) -> Result<Self, SimError> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Switches,
            Links,
            Hosts,
            Gateway,
        }
        let mut section = Section::None;
        let mut switches: Vec<SwitchSpec> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut raw_links: Vec<(usize, String, String)> = Vec::new();
        let mut raw_hosts: Vec<(usize, String, String, String)> = Vec::new();
        let mut gateway: Option<(usize, String)> = None;

        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(head) = line.strip_prefix('[') {
                let head = head
                    .strip_suffix(']')
                    .ok_or_else(|| line_err(line_no, "unterminated section header"))?;
                let name = head.split_whitespace().next().unwrap_or("");
                section = match name {
                    "switches" => Section::Switches,
                    "links" => Section::Links,
                    "hosts" => Section::Hosts,
                    "gateway" => Section::Gateway,
                    other => return Err(line_err(line_no, format!("unknown section `{other}`"))),
                };
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match section {
                Section::None => return Err(line_err(line_no, "entry outside any section")),
                Section::Switches => {
                    let name = fields[0].to_string();
                    let mut spec = SwitchSpec {
                        name: name.clone(),
                        capacity: DEFAULT_RULE_CAPACITY,
                        ports: None,
                    };
                    for opt in &fields[1..] {
                        let (k, v) = opt.split_once('=').ok_or_else(|| {
                            line_err(line_no, format!("expected key=value, got `{opt}`"))
                        })?;
                        match k {
                            "capacity" => {
                                spec.capacity = v
                                    .parse()
                                    .map_err(|_| line_err(line_no, format!("bad capacity `{v}`")))?
                            }
                            "ports" => {
                                spec.ports = Some(v.parse().map_err(|_| {
                                    line_err(line_no, format!("bad port count `{v}`"))
                                })?)
                            }
                            _ => {
                                return Err(line_err(
                                    line_no,
                                    format!("unknown switch option `{k}`"),
                                ))
                            }
                        }
                    }
                    if index.insert(name.clone(), switches.len()).is_some() {
                        return Err(line_err(line_no, format!("duplicate switch `{name}`")));
                    }
                    switches.push(spec);
                }
                Section::Links => {
                    if fields.len() != 2 {
                        return Err(line_err(line_no, "a link is two switch names"));
                    }
                    raw_links.push((line_no, fields[0].to_string(), fields[1].to_string()));
                }
                Section::Hosts => {
                    if fields.len() != 3 {
                        return Err(line_err(line_no, "a host is `ip mac switch:port`"));
                    }
                    raw_hosts.push((
                        line_no,
                        fields[0].to_string(),
                        fields[1].to_string(),
                        fields[2].to_string(),
                    ));
                }
                Section::Gateway => {
                    if gateway.is_some() || fields.len() != 1 {
                        return Err(line_err(line_no, "exactly one gateway switch"));
                    }
                    gateway = Some((line_no, fields[0].to_string()));
                }
            }
        }
        let lookup = |line: usize, name: &str| -> Result<usize, SimError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| line_err(line, format!("unknown switch `{name}`")))
        };
        let mut links = Vec::new();
        for (line, a, b) in &raw_links {
            let sw = |s: &str| s.split(':').next().unwrap_or("").to_string();
            links.push((lookup(*line, &sw(a))?, lookup(*line, &sw(b))?));
        }
        let mut hosts = Vec::new();
        for (line, ip, mac, at) in &raw_hosts {
            let ip: Ipv4Addr = ip
                .parse()
                .map_err(|_| line_err(*line, format!("bad IP `{ip}`")))?;
            let mac: MacAddr = mac.parse().map_err(|e| line_err(*line, format!("{e}")))?;
            let (sw, port) = at
                .split_once(':')
                .ok_or_else(|| line_err(*line, format!("attachment `{at}` is not switch:port")))?;
            let port: u16 = port
                .parse()
                .map_err(|_| line_err(*line, format!("bad port `{port}`")))?;
            hosts.push(HostTuple {
                ip,
                mac,
                attach: Attach {
                    switch: lookup(*line, sw)?,
                    port,
                },
            });
        }
        let gateway = match gateway {
            Some((line, name)) => lookup(line, &name)?,
            None => return Err(SimError::Topology("missing [gateway] section".into())),
        };
        Network::new(switches, links, hosts, gateway)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("[switches]\n");
        for sw in &self.switches {
            let _ = write!(s, "{}", sw.name);
            if sw.capacity != DEFAULT_RULE_CAPACITY {
                let _ = write!(s, " capacity={}", sw.capacity);
            }
            if let Some(p) = sw.ports {
                let _ = write!(s, " ports={p}");
            }
            s.push('\n');
        }
        s.push_str("[links]\n");
        for &(a, b) in &self.links {
            let _ = writeln!(s, "{} {}", self.switches[a].name, self.switches[b].name);
        }
        s.push_str("[hosts ip mac switch:port]\n");
        for h in &self.hosts {
            let _ = writeln!(
                s,
                "{} {} {}:{}",
                h.ip, h.mac, self.switches[h.attach.switch].name, h.attach.port
            );
        }
        let _ = write!(s, "[gateway]\n{}\n", self.switches[self.gateway].name);
        s
    }

    pub fn host_by_ip(&self, ip: Ipv4Addr) -> Option<&HostTuple> {
        self.by_ip.get(&ip).map(|&i| &self.hosts[i])
    }

    pub fn host_by_mac(&self, mac: MacAddr) -> Option<&HostTuple> {
        self.by_mac.get(&mac).map(|&i| &self.hosts[i])
    }

    /// Where traffic from an unknown address enters.
    pub fn outside(&self) -> Attach {
        Attach {
            switch: self.gateway,
            port: 0,
        }
    }

    /// Switches traversed from `a` to `b`, both included.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let mut p = vec![a];
        let mut at = a;
        while at != b {
            at = self.next_hop[at][b].expect("connected topology");
            p.push(at);
        }
        p
    }
}
