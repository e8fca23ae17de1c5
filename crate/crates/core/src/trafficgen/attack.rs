use std::net::Ipv4Addr;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::TrafficError;
use crate::flowkit::{Endpoint, Label, MacAddr, PacketRecord, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    SlowDdos,
    FastDdos,
    SlowDcDdos,
    FastDcDdos,
    PortScan,
    /// Two variants run back to back within one session (experimental).
    Hybrid,
}

impl Variant {
    pub const DDOS: [Variant; 4] = [
        Variant::SlowDdos,
        Variant::FastDdos,
        Variant::SlowDcDdos,
        Variant::FastDcDdos,
    ];

    pub fn label(self) -> Option<Label> {
        match self {
            Variant::SlowDdos => Some(Label::SlowDDoS),
            Variant::FastDdos => Some(Label::FastDDoS),
            Variant::SlowDcDdos => Some(Label::SlowDcDDoS),
            Variant::FastDcDdos => Some(Label::FastDcDDoS),
            Variant::PortScan => Some(Label::PortScan),
            Variant::Hybrid => None,
        }
    }

    /// Packet rate range (packets/s).
    pub fn default_rate(self) -> (f64, f64) {
        match self {
            Variant::SlowDdos => (5.0, 100.0),
            Variant::FastDdos | Variant::FastDcDdos => (1000.0, 20000.0),
            Variant::SlowDcDdos => (5.0, 50.0),
            Variant::PortScan => (100.0, 1000.0),
            Variant::Hybrid => (5.0, 20000.0),
        }
    }

    /// Sleep range between bursts (s) for discontinuous variants.
    pub fn default_sleep(self) -> Option<(f64, f64)> {
        match self {
            Variant::SlowDcDdos => Some((3.0, 7.0)),
            Variant::FastDcDdos => Some((3.0, 10.0)),
            _ => None,
        }
    }

    pub fn default_burst(self) -> Option<(f64, f64)> {
        self.default_sleep().map(|_| (2.0, 5.0))
    }

    /// Length range of one attack session (s).
    pub fn default_session(self) -> (f64, f64) {
        match self {
            Variant::SlowDdos => (10.0, 20.0),
            Variant::FastDdos => (3.0, 5.0),
            Variant::SlowDcDdos => (20.0, 30.0),
            Variant::FastDcDdos => (18.0, 24.0),
            Variant::PortScan => (1.0, 1.0),
            Variant::Hybrid => (10.0, 20.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::SlowDdos => "slow_ddos",
            Variant::FastDdos => "fast_ddos",
            Variant::SlowDcDdos => "slow_dc_ddos",
            Variant::FastDcDdos => "fast_dc_ddos",
            Variant::PortScan => "port_scan",
            Variant::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pacing {
    /// Exponential inter-arrivals at the drawn rate.
    #[default]
    Poisson,
    /// Constant interval `1 / rate`.
    Fixed,
}

/// Parameters of one attack session from a single source endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantSpec {
    pub variant: Variant,
    pub rate_range: (f64, f64),
    pub sleep_range: Option<(f64, f64)>,
    /// Burst lengths; for continuous variants a new rate is drawn per burst.
    pub burst_range: Option<(f64, f64)>,
    pub start: f64,
    pub duration: f64,
    pub source: Endpoint,
    pub target: Endpoint,
    pub pacing: Pacing,
    pub payload_range: (u32, u32),
    /// Inclusive destination port sweep (PortScan only).
    pub port_range: (u16, u16),
    /// Replace the destination MAC of every packet by a random one.
    pub forge_dst_mac: bool,
}

impl VariantSpec {
    /// Table defaults for `variant` (Hybrid is not a single spec).
    pub fn new(
        variant: Variant,
        source: Endpoint,
        target: Endpoint,
        start: f64,
        duration: f64,
    ) -> Self {
        VariantSpec {
            variant,
            rate_range: variant.default_rate(),
            sleep_range: variant.default_sleep(),
            burst_range: variant.default_burst(),
            start,
            duration,
            source,
            target,
            pacing: Pacing::default(),
            payload_range: if variant == Variant::PortScan {
                (0, 0)
            } else {
                (32, 128)
            },
            port_range: (1, 1024),
            forge_dst_mac: false,
        }
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        let check = |name: &str, (lo, hi): (f64, f64), strict: bool| {
            let ok = lo.is_finite()
                && hi.is_finite()
                && lo <= hi
                && if strict { lo > 0.0 } else { lo >= 0.0 };
            if ok {
                Ok(())
            } else {
                Err(TrafficError::Config(format!(
                    "{name} range [{lo}, {hi}] is empty or invalid"
                )))
            }
        };
        if self.variant == Variant::Hybrid {
            return Err(TrafficError::Config(
                "hybrid sessions are built from two concrete variants".into(),
            ));
        }
        check("rate", self.rate_range, true)?;
        if let Some(s) = self.sleep_range {
            check("sleep", s, false)?;
        }
        if let Some(b) = self.burst_range {
            check("burst", b, true)?;
        }
        if !(self.duration > 0.0 && self.duration.is_finite())
            || self.start.is_nan()
            || self.start < 0.0
        {
            return Err(TrafficError::Config(format!(
                "session start {} / duration {} invalid",
                self.start, self.duration
            )));
        }
        if self.payload_range.0 > self.payload_range.1 || self.port_range.0 > self.port_range.1 {
            return Err(TrafficError::Config(
                "payload or port range is empty".into(),
            ));
        }
        Ok(())
    }
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

pub(crate) fn forged_mac(rng: &mut impl Rng) -> MacAddr {
    let b: [u8; 4] = rng.random();
    MacAddr([0x02, 0xff, b[0], b[1], b[2], b[3]])
}

fn next_gap(rng: &mut impl Rng, pacing: Pacing, rate: f64) -> f64 {
    match pacing {
        Pacing::Fixed => 1.0 / rate,
        Pacing::Poisson => Exp::new(rate).expect("positive rate").sample(rng),
    }
}

/// Packets of one attack session, in time order.
pub fn gen_attack(
    spec: &VariantSpec,
    rng: &mut impl Rng,
) -> Result<Vec<PacketRecord>, TrafficError> {
    spec.validate()?;
    let label = spec.variant.label().expect("validated non-hybrid");
    let protocol = if spec.variant == Variant::PortScan {
        Protocol::Tcp
    } else {
        Protocol::Udp
    };
    let src_mac = MacAddr::for_ip(spec.source.ip);
    let real_dst_mac = MacAddr::for_ip(spec.target.ip);
    let mut out = Vec::new();
    let mut push = |rng: &mut dyn rand::RngCore, t: f64, dst_port: u16| {
        let payload_bytes = if spec.payload_range.0 == spec.payload_range.1 {
            spec.payload_range.0
        } else {
            rng.random_range(spec.payload_range.0..=spec.payload_range.1)
        };
        let dst_mac = if spec.forge_dst_mac {
            let mut r = rng;
            forged_mac(&mut r)
        } else {
            real_dst_mac
        };
        out.push(PacketRecord {
            timestamp: t,
            src_ip: spec.source.ip,
            src_port: spec.source.port,
            dst_ip: spec.target.ip,
            dst_port,
            protocol,
            payload_bytes,
            label,
            src_mac: Some(src_mac),
            dst_mac: Some(dst_mac),
        });
    };

    if spec.variant == Variant::PortScan {
        let rate = uniform(rng, spec.rate_range);
        let mut t = spec.start;
        for port in spec.port_range.0..=spec.port_range.1 {
            push(rng, t, port);
            t += next_gap(rng, spec.pacing, rate);
        }
        return Ok(out);
    }

    let end = spec.start + spec.duration;
    let mut t = spec.start;
    while t < end {
        let burst_end = match spec.burst_range {
            Some(b) => (t + uniform(rng, b)).min(end),
            None => end,
        };
        let rate = uniform(rng, spec.rate_range);
        let mut at = t;
        while at < burst_end {
            push(rng, at, spec.target.port);
            at += next_gap(rng, spec.pacing, rate);
        }
        t = match spec.sleep_range {
            Some(s) => burst_end + uniform(rng, s),
            None => burst_end,
        };
    }
    Ok(out)
}

/// Endpoint helper for auto-assigned addresses: `10.x.y.z` from an index.
pub fn host_ip(index: usize) -> Ipv4Addr {
    let i = index as u32 + 1;
    Ipv4Addr::new(10, (i >> 16) as u8, (i >> 8) as u8, i as u8)
}
