use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt::Write as _;
use std::io::Write;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use super::controller::{Action, ControllerState, PacketIn};
use super::switch::{Install, Lookup, RuleKind, SwitchState};
use super::topology::Network;
use super::{HostTuple, SimError};
use crate::flowkit::{MacAddr, PacketRecord};

pub const DEFAULT_PACKET_IN_BUDGET: u32 = 600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub mitigation: bool,
    /// Packet-In messages the controller handles per 1 s window.
    pub packet_in_budget: u32,
    /// Delay between a Packet-In and the resulting switch update.
    pub control_latency: f64,
    /// Idle timeout for allow rules; `None` keeps them forever.
    pub idle_timeout: Option<f64>,
    /// When the detector's suspicious list reaches the controller.
    pub feed_time: f64,
    /// Keep a per-event log in the report.
    pub log_events: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mitigation: true,
            packet_in_budget: DEFAULT_PACKET_IN_BUDGET,
            control_latency: 0.001,
            idle_timeout: None,
            feed_time: 0.0,
            log_events: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.packet_in_budget == 0 {
            return Err(SimError::Config("packet_in_budget must be positive".into()));
        }
        if !(self.control_latency.is_finite() && self.control_latency >= 0.0) {
            return Err(SimError::Config(format!(
                "control_latency {} is invalid",
                self.control_latency
            )));
        }
        if let Some(t) = self.idle_timeout {
            if !(t.is_finite() && t > 0.0) {
                return Err(SimError::Config(format!("idle_timeout {t} is invalid")));
            }
        }
        if !(self.feed_time.is_finite() && self.feed_time >= 0.0) {
            return Err(SimError::Config(format!(
                "feed_time {} is invalid",
                self.feed_time
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropReason {
    Blocked,
    Suspicious,
    Overload,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Disposition {
    Forwarded,
    Dropped(DropReason),
    /// Still waiting for a verdict when the trace ended.
    Pending,
}

/// Maps suspicious source addresses to host tuples. Returns the tuples and
/// the addresses that are not in the topology.
pub fn resolve_feed(network: &Network, ips: &[Ipv4Addr]) -> (Vec<HostTuple>, Vec<Ipv4Addr>) {
    let mut tuples = Vec::new();
    let mut unknown = Vec::new();
    for &ip in ips {
        match network.host_by_ip(ip) {
            Some(h) if !tuples.contains(h) => tuples.push(*h),
            Some(_) => {}
            None if !unknown.contains(&ip) => unknown.push(ip),
            None => {}
        }
    }
    (tuples, unknown)
}

/// One second of simulated time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Window {
    pub t: u64,
    pub packet_ins: u64,
    pub processed: u64,
    pub rule_count: u64,
    pub drops: u64,
    pub forwarded: u64,
    pub observing_len: u64,
    pub block_len: u64,
    pub overload: bool,
}

pub const TIMESERIES_COLUMNS: [&str; 8] = [
    "t",
    "packet_in_rate",
    "rule_count",
    "drops",
    "forwarded",
    "observing_len",
    "block_len",
    "overload",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub config: SimConfig,
    pub packets: u64,
    pub windows: Vec<Window>,
    pub dispositions: Vec<Disposition>,
    pub packet_ins: u64,
    pub processed: u64,
    pub dropped: BTreeMap<DropReason, u64>,
    pub forwarded: u64,
    pub pending: u64,
    pub refused_installs: u64,
    pub first_refusal: Option<f64>,
    pub max_rule_count: u64,
    pub comparisons: u64,
    pub observing_list: Vec<HostTuple>,
    pub block_list: Vec<HostTuple>,
    /// Packet-Ins from a source at a switch after that switch got a
    /// blocking rule for it.
    pub blocking_violations: u64,
    /// Blocking rules: (switch, source, install time).
    pub blocks: Vec<(usize, HostTuple, f64)>,
    pub forwarded_by_source: BTreeMap<Ipv4Addr, u64>,
    pub dropped_by_source: BTreeMap<Ipv4Addr, u64>,
    pub feed_size: usize,
    pub events: Vec<String>,
    /// Every emitted Packet-In as (time, switch, source); filled only with
    /// `log_events`.
    pub packet_in_log: Vec<(f64, usize, HostTuple)>,
}

impl SimReport {
    pub fn overload(&self) -> bool {
        self.windows.iter().any(|w| w.overload)
    }

    pub fn peak_packet_in_rate(&self) -> u64 {
        self.windows.iter().map(|w| w.packet_ins).max().unwrap_or(0)
    }

    pub fn mean_processed_rate(&self) -> f64 {
        if self.windows.is_empty() {
            0.0
        } else {
            self.processed as f64 / self.windows.len() as f64
        }
    }

    pub fn write_timeseries<W: Write>(&self, w: W) -> Result<(), SimError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(TIMESERIES_COLUMNS)?;
        for win in &self.windows {
            out.write_record([
                win.t.to_string(),
                win.packet_ins.to_string(),
                win.rule_count.to_string(),
                win.drops.to_string(),
                win.forwarded.to_string(),
                win.observing_len.to_string(),
                win.block_len.to_string(),
                u8::from(win.overload).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Plain-text summary, one `key=value` per line plus list sections.
    pub fn render_summary(&self) -> String {
        let mut s = String::new();
        let d = |r| self.dropped.get(&r).copied().unwrap_or(0);
        let _ = writeln!(s, "mitigation={}", self.config.mitigation);
        let _ = writeln!(s, "packet_in_budget={}", self.config.packet_in_budget);
        let _ = writeln!(s, "packets={}", self.packets);
        let _ = writeln!(s, "forwarded={}", self.forwarded);
        let _ = writeln!(s, "dropped_blocked={}", d(DropReason::Blocked));
        let _ = writeln!(s, "dropped_suspicious={}", d(DropReason::Suspicious));
        let _ = writeln!(s, "dropped_overload={}", d(DropReason::Overload));
        let _ = writeln!(s, "pending={}", self.pending);
        let _ = writeln!(s, "packet_ins={}", self.packet_ins);
        let _ = writeln!(s, "peak_packet_in_rate={}", self.peak_packet_in_rate());
        let _ = writeln!(s, "controller_processed={}", self.processed);
        let _ = writeln!(
            s,
            "controller_mean_processed_per_s={:.3}",
            self.mean_processed_rate()
        );
        let _ = writeln!(s, "overload={}", self.overload());
        let _ = writeln!(
            s,
            "overload_windows={}",
            self.windows.iter().filter(|w| w.overload).count()
        );
        let _ = writeln!(s, "max_rule_count={}", self.max_rule_count);
        let _ = writeln!(s, "refused_installs={}", self.refused_installs);
        if let Some(t) = self.first_refusal {
            let _ = writeln!(s, "first_refusal_t={t}");
        }
        let _ = writeln!(s, "comparisons={}", self.comparisons);
        let _ = writeln!(s, "blocking_violations={}", self.blocking_violations);
        let _ = writeln!(s, "feed_size={}", self.feed_size);
        s.push_str("[observing_list]\n");
        for t in &self.observing_list {
            let _ = writeln!(s, "{t}");
        }
        s.push_str("[block_list]\n");
        for t in &self.block_list {
            let _ = writeln!(s, "{t}");
        }
        s.push_str("[forwarded_by_source]\n");
        for (ip, n) in &self.forwarded_by_source {
            let _ = writeln!(s, "{ip}={n}");
        }
        s.push_str("[dropped_by_source]\n");
        for (ip, n) in &self.dropped_by_source {
            let _ = writeln!(s, "{ip}={n}");
        }
        s
    }

    /// Disposition counts of the packets that arrived in `[t0, t1)`.
    pub fn dispositions_between(
        &self,
        trace: &[PacketRecord],
        t0: f64,
        t1: f64,
    ) -> (u64, u64, u64) {
        let (mut fwd, mut drop, mut pend) = (0, 0, 0);
        for (p, d) in trace.iter().zip(&self.dispositions) {
            if p.timestamp >= t0 && p.timestamp < t1 {
                match d {
                    Disposition::Forwarded => fwd += 1,
                    Disposition::Dropped(_) => drop += 1,
                    Disposition::Pending => pend += 1,
                }
            }
        }
        (fwd, drop, pend)
    }
}

/// Copies of the packets seen in `[t0, t1)`, in trace order.
pub fn mirror(trace: &[PacketRecord], t0: f64, t1: f64) -> Vec<PacketRecord> {
    trace
        .iter()
        .filter(|p| p.timestamp >= t0 && p.timestamp < t1)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Priority {
    Feed,
    Decision,
}

struct Event {
    time: f64,
    priority: Priority,
    seq: u64,
    msg: usize,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // Reversed: the heap pops the earliest event first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then(other.priority.cmp(&self.priority))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Pending {
    packet: usize,
    msg: PacketIn,
    actions: Vec<Action>,
    egress: usize,
}

struct Sim<'a> {
    net: &'a Network,
    trace: &'a [PacketRecord],
    cfg: &'a SimConfig,
    switches: Vec<SwitchState>,
    ctl: ControllerState,
    heap: BinaryHeap<Event>,
    seq: u64,
    pending: Vec<Pending>,
    queued: Vec<usize>,
    cur: Window,
    report: SimReport,
    block_times: HashMap<(usize, HostTuple), f64>,
}

impl Sim<'_> {
    fn tuples(&self, p: &PacketRecord) -> (HostTuple, HostTuple, usize, usize) {
        let outside = self.net.outside();
        let src_host = p
            .src_mac
            .and_then(|m| self.net.host_by_mac(m))
            .or_else(|| self.net.host_by_ip(p.src_ip));
        let src = HostTuple {
            ip: p.src_ip,
            mac: p
                .src_mac
                .or(src_host.map(|h| h.mac))
                .unwrap_or(MacAddr([0; 6])),
            attach: src_host.map_or(outside, |h| h.attach),
        };
        let dst_host = self.net.host_by_ip(p.dst_ip);
        let dest = HostTuple {
            ip: p.dst_ip,
            mac: p
                .dst_mac
                .or(dst_host.map(|h| h.mac))
                .unwrap_or(MacAddr([0; 6])),
            attach: dst_host.map_or(outside, |h| h.attach),
        };
        (src, dest, src.attach.switch, dest.attach.switch)
    }

    fn log(&mut self, t: f64, what: impl FnOnce() -> String) {
        if self.cfg.log_events {
            let line = format!("{t:.6} {}", what());
            self.report.events.push(line);
        }
    }

    fn finish(&mut self, packet: usize, d: Disposition) {
        self.report.dispositions[packet] = d;
        let ip = self.trace[packet].src_ip;
        match d {
            Disposition::Forwarded => {
                self.report.forwarded += 1;
                self.cur.forwarded += 1;
                *self.report.forwarded_by_source.entry(ip).or_insert(0) += 1;
            }
            Disposition::Dropped(r) => {
                *self.report.dropped.entry(r).or_insert(0) += 1;
                self.cur.drops += 1;
                *self.report.dropped_by_source.entry(ip).or_insert(0) += 1;
            }
            Disposition::Pending => {}
        }
    }

    /// Moves a packet hop by hop from `at` toward `egress` until it leaves
    /// the network, is dropped, or misses a rule.
    fn walk(
        &mut self,
        packet: usize,
        src: HostTuple,
        dest: HostTuple,
        mut at: usize,
        egress: usize,
        now: f64,
    ) {
        loop {
            match self.switches[at].lookup(&src, &dest, now) {
                Lookup::Blocked => {
                    return self.finish(packet, Disposition::Dropped(DropReason::Blocked))
                }
                Lookup::Allowed => {
                    if at == egress {
                        return self.finish(packet, Disposition::Forwarded);
                    }
                    at = self.net.next_hop[at][egress].expect("connected topology");
                }
                Lookup::Miss => {
                    return self.packet_in(
                        packet,
                        PacketIn {
                            src,
                            dest,
                            switch: at,
                            time: now,
                        },
                        egress,
                    )
                }
            }
        }
    }

    fn packet_in(&mut self, packet: usize, msg: PacketIn, egress: usize) {
        self.switches[msg.switch].packet_in_count += 1;
        self.report.packet_ins += 1;
        self.cur.packet_ins += 1;
        if self.cfg.log_events {
            self.report
                .packet_in_log
                .push((msg.time, msg.switch, msg.src));
        }
        if self
            .block_times
            .get(&(msg.switch, msg.src))
            .is_some_and(|&t| msg.time >= t)
        {
            self.report.blocking_violations += 1;
        }
        let id = self.pending.len();
        self.pending.push(Pending {
            packet,
            msg,
            actions: Vec::new(),
            egress,
        });
        if self.cur.processed >= u64::from(self.cfg.packet_in_budget) {
            self.cur.overload = true;
            self.queued.push(id);
            return;
        }
        self.cur.processed += 1;
        self.report.processed += 1;
        let actions = if self.cfg.mitigation {
            self.ctl.mitigate(&msg)
        } else {
            vec![
                Action::InstallAllow {
                    switch: msg.switch,
                    dest: msg.dest,
                },
                Action::ForwardPending,
            ]
        };
        self.pending[id].actions = actions;
        self.seq += 1;
        self.heap.push(Event {
            time: msg.time + self.cfg.control_latency,
            priority: Priority::Decision,
            seq: self.seq,
            msg: id,
        });
    }

    fn apply(&mut self, id: usize, now: f64) {
        let actions = std::mem::take(&mut self.pending[id].actions);
        let (packet, msg, egress) = (
            self.pending[id].packet,
            self.pending[id].msg,
            self.pending[id].egress,
        );
        let verdict = actions
            .iter()
            .any(|a| matches!(a, Action::ForwardPending | Action::DropPending));
        for a in actions {
            match a {
                Action::InstallPktBlocking { switch, src } => {
                    match self.switches[switch].install(RuleKind::PktBlocking, src, now, None) {
                        Install::Refused => self.refused(now, switch),
                        Install::Installed => {
                            self.block_times.insert((switch, src), now);
                            self.report.blocks.push((switch, src, now));
                            self.log(now, || format!("block S{switch} {src}"));
                        }
                        Install::AlreadyPresent => {}
                    }
                }
                Action::InstallAllow { switch, dest } => {
                    if self.switches[switch].install(
                        RuleKind::Allow,
                        dest,
                        now,
                        self.cfg.idle_timeout,
                    ) == Install::Refused
                    {
                        self.refused(now, switch);
                    }
                }
                Action::AppendBlockList(t) => self.log(now, || format!("block_list {t}")),
                Action::AppendObservingList(t) => self.log(now, || format!("observing_list {t}")),
                Action::DropPending => {
                    self.finish(packet, Disposition::Dropped(DropReason::Suspicious))
                }
                Action::ForwardPending => {
                    if msg.switch == egress {
                        self.finish(packet, Disposition::Forwarded);
                    } else {
                        let next =
                            self.net.next_hop[msg.switch][egress].expect("connected topology");
                        self.walk(packet, msg.src, msg.dest, next, egress, now);
                    }
                }
            }
        }
        // A verdict that neither forwards nor drops (blocking) discards the
        // held packet.
        if !verdict {
            self.finish(packet, Disposition::Dropped(DropReason::Blocked));
        }
    }

    fn refused(&mut self, now: f64, switch: usize) {
        self.report.refused_installs += 1;
        self.report.first_refusal.get_or_insert(now);
        self.log(now, || format!("refused S{switch} table full"));
    }

    fn close_window(&mut self) {
        let end = (self.cur.t + 1) as f64;
        for id in std::mem::take(&mut self.queued) {
            let packet = self.pending[id].packet;
            self.finish(packet, Disposition::Dropped(DropReason::Overload));
        }
        if self.cfg.idle_timeout.is_some() {
            for s in &mut self.switches {
                s.expire(end);
            }
        }
        let rules: u64 = self.switches.iter().map(|s| s.rule_count() as u64).sum();
        self.report.max_rule_count = self.report.max_rule_count.max(rules);
        self.cur.rule_count = rules;
        self.cur.observing_len = self.ctl.observing_list().len() as u64;
        self.cur.block_len = self.ctl.block_list().len() as u64;
        self.report.windows.push(self.cur);
        self.cur = Window {
            t: self.cur.t + 1,
            ..Window::default()
        };
    }
}

/// Replays `trace` through the network. Packets are taken in timestamp
/// order, ties in input order. `feed` tuples join the Observing_List at
/// `cfg.feed_time`.
pub fn run_scenario(
    network: &Network,
    trace: &[PacketRecord],
    cfg: &SimConfig,
    feed: Option<&[HostTuple]>,
) -> Result<SimReport, SimError> {
    cfg.validate()?;
    let mut order: Vec<usize> = (0..trace.len()).collect();
    order.sort_by(|&a, &b| trace[a].timestamp.total_cmp(&trace[b].timestamp));

    let switches = network
        .switches
        .iter()
        .enumerate()
        .map(|(i, s)| SwitchState::new(i, s.capacity, s.ports))
        .collect();
    let mut sim = Sim {
        net: network,
        trace,
        cfg,
        switches,
        ctl: ControllerState::new(network.hosts.clone(), network.switches.len()),
        heap: BinaryHeap::new(),
        seq: 0,
        pending: Vec::new(),
        queued: Vec::new(),
        cur: Window::default(),
        report: SimReport {
            config: cfg.clone(),
            packets: trace.len() as u64,
            windows: Vec::new(),
            dispositions: vec![Disposition::Pending; trace.len()],
            packet_ins: 0,
            processed: 0,
            dropped: BTreeMap::new(),
            forwarded: 0,
            pending: 0,
            refused_installs: 0,
            first_refusal: None,
            max_rule_count: 0,
            comparisons: 0,
            observing_list: Vec::new(),
            block_list: Vec::new(),
            blocking_violations: 0,
            blocks: Vec::new(),
            forwarded_by_source: BTreeMap::new(),
            dropped_by_source: BTreeMap::new(),
            feed_size: feed.map_or(0, <[_]>::len),
            events: Vec::new(),
            packet_in_log: Vec::new(),
        },
        block_times: HashMap::new(),
    };
    if feed.is_some() {
        sim.heap.push(Event {
            time: cfg.feed_time,
            priority: Priority::Feed,
            seq: 0,
            msg: usize::MAX,
        });
    }

    let mut next = 0;
    loop {
        let arrival = order.get(next).map(|&i| trace[i].timestamp);
        let event = sim.heap.peek().map(|e| e.time);
        let window_end = (sim.cur.t + 1) as f64;
        let Some(t) = [arrival, event].into_iter().flatten().reduce(f64::min) else {
            break;
        };
        if window_end <= t {
            sim.close_window();
            continue;
        }
        if event.is_some_and(|e| e <= t) {
            let ev = sim.heap.pop().expect("peeked");
            match ev.priority {
                Priority::Feed => {
                    for tuple in feed.unwrap_or_default() {
                        sim.ctl.observe(*tuple);
                    }
                    sim.log(ev.time, || "detector feed merged".to_string());
                }
                Priority::Decision => sim.apply(ev.msg, ev.time),
            }
            continue;
        }
        let idx = order[next];
        next += 1;
        let (src, dest, ingress, egress) = sim.tuples(&trace[idx]);
        sim.walk(idx, src, dest, ingress, egress, t);
    }
    if !sim.queued.is_empty()
        || sim.cur.packet_ins > 0
        || sim.cur.forwarded > 0
        || sim.cur.drops > 0
    {
        sim.close_window();
    }

    let mut report = sim.report;
    report.pending = report
        .dispositions
        .iter()
        .filter(|d| **d == Disposition::Pending)
        .count() as u64;
    report.comparisons = sim.ctl.comparisons();
    report.observing_list = sim.ctl.observing_list().to_vec();
    report.block_list = sim.ctl.block_list().to_vec();
    Ok(report)
}
