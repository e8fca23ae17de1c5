use std::fmt;
use std::net::Ipv4Addr;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FlowError;

/// Ground-truth class of a packet, flow or node.
///
/// Declaration order is significant: majority-vote ties resolve to the
/// attack class with the lowest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Benign,
    NoflowBenign,
    DDoS,
    PortScan,
    SlowDDoS,
    FastDDoS,
    SlowDcDDoS,
    FastDcDDoS,
}

impl Label {
    pub const ALL: [Label; 8] = [
        Label::Benign,
        Label::NoflowBenign,
        Label::DDoS,
        Label::PortScan,
        Label::SlowDDoS,
        Label::FastDDoS,
        Label::SlowDcDDoS,
        Label::FastDcDDoS,
    ];

    /// The four rate/continuity variants of DDoS.
    pub const DDOS_VARIANTS: [Label; 4] = [
        Label::SlowDDoS,
        Label::FastDDoS,
        Label::SlowDcDDoS,
        Label::FastDcDDoS,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_attack(self) -> bool {
        !matches!(self, Label::Benign | Label::NoflowBenign)
    }

    /// Layer-1 projection.
    pub fn binary(self) -> BinaryClass {
        if self.is_attack() {
            BinaryClass::Attack
        } else {
            BinaryClass::Benign
        }
    }

    /// Any flavor of DDoS (the generic CICIDS class or one of the variants).
    pub fn is_ddos_family(self) -> bool {
        matches!(
            self,
            Label::DDoS | Label::SlowDDoS | Label::FastDDoS | Label::SlowDcDDoS | Label::FastDcDDoS
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Benign => "Benign",
            Label::NoflowBenign => "NoflowBenign",
            Label::DDoS => "DDoS",
            Label::PortScan => "PortScan",
            Label::SlowDDoS => "SlowDDoS",
            Label::FastDDoS => "FastDDoS",
            Label::SlowDcDDoS => "SlowDcDDoS",
            Label::FastDcDDoS => "FastDcDDoS",
        }
    }

    /// Majority vote over `labels` with the crate's tie rule: among tied
    /// winners prefer the attack class with the lowest index, otherwise the
    /// lowest index overall. Returns `None` for empty input.
    pub fn majority<I: IntoIterator<Item = Label>>(labels: I) -> Option<Label> {
        let mut counts = [0usize; 8];
        let mut any = false;
        for l in labels {
            counts[l.index()] += 1;
            any = true;
        }
        if !any {
            return None;
        }
        let best = *counts.iter().max().expect("non-empty");
        let tied: Vec<Label> = Label::ALL
            .iter()
            .copied()
            .filter(|l| counts[l.index()] == best)
            .collect();
        tied.iter()
            .copied()
            .find(|l| l.is_attack())
            .or_else(|| tied.first().copied())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FlowError::Parse(format!("unknown label `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinaryClass {
    Benign = 0,
    Attack = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Protocol {
    Tcp,
    Udp,
    Icmp,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Tcp => "TCP",
            Protocol::Udp => "UDP",
            Protocol::Icmp => "ICMP",
        }
    }
}

impl FromStr for Protocol {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TCP" | "6" => Ok(Protocol::Tcp),
            "UDP" | "17" => Ok(Protocol::Udp),
            "ICMP" | "1" => Ok(Protocol::Icmp),
            other => Err(FlowError::Parse(format!("unknown protocol `{other}`"))),
        }
    }
}

/// 48-bit Ethernet address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    /// Locally administered address derived from an IPv4 address.
    pub fn for_ip(ip: Ipv4Addr) -> Self {
        let o = ip.octets();
        MacAddr([0x02, 0x00, o[0], o[1], o[2], o[3]])
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            b[0], b[1], b[2], b[3], b[4], b[5]
        )
    }
}

impl FromStr for MacAddr {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 6];
        let parts: Vec<&str> = s.trim().split([':', '-']).collect();
        if parts.len() != 6 {
            return Err(FlowError::Parse(format!("bad MAC address `{s}`")));
        }
        for (slot, p) in out.iter_mut().zip(parts) {
            *slot = u8::from_str_radix(p, 16)
                .map_err(|_| FlowError::Parse(format!("bad MAC address `{s}`")))?;
        }
        Ok(MacAddr(out))
    }
}

/// An `IP:PORT` endpoint; one graph node per endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub ip: Ipv4Addr,
    pub port: u16,
}

impl Endpoint {
    pub fn new(ip: Ipv4Addr, port: u16) -> Self {
        Endpoint { ip, port }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.ip, self.port)
    }
}

/// Directed endpoint pair identifying a basic flow. `A→B` and `B→A` differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlowKey {
    pub src_ip: Ipv4Addr,
    pub src_port: u16,
    pub dst_ip: Ipv4Addr,
    pub dst_port: u16,
}

impl FlowKey {
    pub fn src(&self) -> Endpoint {
        Endpoint::new(self.src_ip, self.src_port)
    }

    pub fn dst(&self) -> Endpoint {
        Endpoint::new(self.dst_ip, self.dst_port)
    }
}

/// One captured or generated packet.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketRecord {
    pub timestamp: f64,
    pub src_ip: Ipv4Addr,
    pub src_port: u16,
    pub dst_ip: Ipv4Addr,
    pub dst_port: u16,
    pub protocol: Protocol,
    pub payload_bytes: u32,
    pub label: Label,
    /// Present only in simulator traces.
    pub src_mac: Option<MacAddr>,
    pub dst_mac: Option<MacAddr>,
}

impl PacketRecord {
    pub fn key(&self) -> FlowKey {
        FlowKey {
            src_ip: self.src_ip,
            src_port: self.src_port,
            dst_ip: self.dst_ip,
            dst_port: self.dst_port,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !self.timestamp.is_finite() || self.timestamp < 0.0 {
            return Err(FlowError::Invalid(format!(
                "packet timestamp {} must be finite and >= 0",
                self.timestamp
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_ties_prefer_lowest_attack() {
        use Label::*;
        assert_eq!(Label::majority([Benign, FastDDoS]), Some(FastDDoS));
        assert_eq!(Label::majority([FastDDoS, SlowDDoS]), Some(SlowDDoS));
        assert_eq!(Label::majority([Benign, Benign, PortScan]), Some(Benign));
        assert_eq!(Label::majority([Benign, NoflowBenign]), Some(Benign));
        assert_eq!(Label::majority(Vec::new()), None);
    }

    #[test]
    fn binary_projection() {
        for l in Label::ALL {
            let expect = !matches!(l, Label::Benign | Label::NoflowBenign);
            assert_eq!(l.binary() == BinaryClass::Attack, expect, "{l}");
        }
    }

    #[test]
    fn mac_round_trip() {
        let m: MacAddr = "02:00:0a:00:00:01".parse().unwrap();
        assert_eq!(m.to_string(), "02:00:0a:00:00:01");
        assert_eq!(MacAddr::for_ip(Ipv4Addr::new(10, 0, 0, 1)), m);
        assert!("02:00".parse::<MacAddr>().is_err());
    }

    #[test]
    fn label_parse() {
        assert_eq!("slowddos".parse::<Label>().unwrap(), Label::SlowDDoS);
        assert!("nope".parse::<Label>().is_err());
    }
}
