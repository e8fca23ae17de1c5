use std::net::Ipv4Addr;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::TrafficError;
use crate::flowkit::{Label, MacAddr, PacketRecord, Protocol};

/// Request/response traffic model for benign hosts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenignParams {
    /// Poisson rate of new flows per host (flows/s).
    pub flow_rate: f64,
    /// Inclusive range of request packets per flow.
    pub packets: (u32, u32),
    /// Request rate range within a flow (packets/s).
    pub rate: (f64, f64),
    pub service_ports: Vec<u16>,
    pub request_bytes: (u32, u32),
    pub response_bytes: (u32, u32),
    /// Server think time before each response (s).
    pub response_delay: (f64, f64),
}

impl Default for BenignParams {
    fn default() -> Self {
        BenignParams {
            flow_rate: 0.2,
            packets: (5, 50),
            rate: (1.0, 20.0),
            service_ports: vec![80],
            request_bytes: (60, 600),
            response_bytes: (200, 1400),
            response_delay: (0.001, 0.02),
        }
    }
}

impl BenignParams {
    pub fn validate(&self) -> Result<(), TrafficError> {
        let bad = |m: &str| Err(TrafficError::Config(format!("benign model: {m}")));
        if !(self.flow_rate > 0.0 && self.flow_rate.is_finite()) {
            return bad("flow_rate must be positive");
        }
        if self.packets.0 == 0 || self.packets.0 > self.packets.1 {
            return bad("packets range empty");
        }
        if !(self.rate.0 > 0.0 && self.rate.0 <= self.rate.1 && self.rate.1.is_finite()) {
            return bad("rate range empty");
        }
        if self.service_ports.is_empty() {
            return bad("no service ports");
        }
        if self.request_bytes.0 > self.request_bytes.1
            || self.response_bytes.0 > self.response_bytes.1
        {
            return bad("payload range empty");
        }
        if !(self.response_delay.0 >= 0.0 && self.response_delay.0 <= self.response_delay.1) {
            return bad("response delay range empty");
        }
        Ok(())
    }
}

/// Ephemeral client ports are handed out sequentially from here.
pub const EPHEMERAL_BASE: u16 = 32768;

fn packet(t: f64, src: (Ipv4Addr, u16), dst: (Ipv4Addr, u16), bytes: u32) -> PacketRecord {
    PacketRecord {
        timestamp: t,
        src_ip: src.0,
        src_port: src.1,
        dst_ip: dst.0,
        dst_port: dst.1,
        protocol: Protocol::Tcp,
        payload_bytes: bytes,
        label: Label::Benign,
        src_mac: Some(MacAddr::for_ip(src.0)),
        dst_mac: Some(MacAddr::for_ip(dst.0)),
    }
}

/// Flows opened by `client` towards uniformly chosen `peers` over
/// `[0, duration)`. Each request gets a response from the server endpoint.
/// Packets past `duration` are cut. Output is not time-sorted.
pub fn gen_host_flows(
    client: Ipv4Addr,
    peers: &[Ipv4Addr],
    duration: f64,
    params: &BenignParams,
    rng: &mut impl Rng,
) -> Result<Vec<PacketRecord>, TrafficError> {
    params.validate()?;
    if peers.is_empty() {
        return Err(TrafficError::Config(format!("host {client} has no peer")));
    }
    let arrivals = Exp::new(params.flow_rate).expect("validated rate");
    let mut out = Vec::new();
    let mut next_port = EPHEMERAL_BASE;
    let mut t = arrivals.sample(rng);
    while t < duration {
        let peer = peers[rng.random_range(0..peers.len())];
        let service = params.service_ports[rng.random_range(0..params.service_ports.len())];
        let port = next_port;
        next_port = if next_port == u16::MAX {
            EPHEMERAL_BASE
        } else {
            next_port + 1
        };
        let n = rng.random_range(params.packets.0..=params.packets.1);
        let rate = rng.random_range(params.rate.0..=params.rate.1);
        let gap = Exp::new(rate).expect("validated rate");
        let mut at = t;
        for _ in 0..n {
            if at >= duration {
                break;
            }
            let req = rng.random_range(params.request_bytes.0..=params.request_bytes.1);
            out.push(packet(at, (client, port), (peer, service), req));
            let reply_at = at + rng.random_range(params.response_delay.0..=params.response_delay.1);
            let resp = rng.random_range(params.response_bytes.0..=params.response_bytes.1);
            if reply_at < duration {
                out.push(packet(reply_at, (peer, service), (client, port), resp));
            }
            at += gap.sample(rng);
        }
        t += arrivals.sample(rng);
    }
    Ok(out)
}

/// Benign traffic among `hosts` (each talks to every other host).
pub fn gen_benign(
    hosts: &[Ipv4Addr],
    duration: f64,
    params: &BenignParams,
    seed: u64,
) -> Result<Vec<PacketRecord>, TrafficError> {
    if hosts.len() < 2 {
        return Err(TrafficError::Config(
            "benign traffic needs at least two hosts".into(),
        ));
    }
    let mut out = Vec::new();
    for (i, &h) in hosts.iter().enumerate() {
        let peers: Vec<Ipv4Addr> = hosts.iter().copied().filter(|&p| p != h).collect();
        let mut rng = crate::rng::indexed_substream(seed, "traffic.benign", i as u64);
        out.extend(gen_host_flows(h, &peers, duration, params, &mut rng)?);
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_hosts_only_talk_to_each_other() {
        let hosts = [Ipv4Addr::new(10, 0, 0, 1), Ipv4Addr::new(10, 0, 0, 2)];
        let p = gen_benign(&hosts, 60.0, &BenignParams::default(), 3).unwrap();
        assert!(!p.is_empty());
        assert!(p.iter().all(|p| p.src_ip != p.dst_ip
            && hosts.contains(&p.src_ip)
            && hosts.contains(&p.dst_ip)));
        assert!(p.iter().all(|p| p.label == Label::Benign));
    }

    #[test]
    fn single_host_rejected() {
        assert!(gen_benign(
            &[Ipv4Addr::new(10, 0, 0, 1)],
            10.0,
            &BenignParams::default(),
            1
        )
        .is_err());
    }
}
