//! C ABI over `sdnguard`.
//!
//! Objects are opaque handles created by `sg_scenario_generate`,
//! `sg_detect` and `sg_simulate` and released with the matching `sg_*_free`. Every fallible
//! call returns an [`SgStatus`]; on failure `sg_last_error` describes the
//! most recent error on the calling thread. Strings are NUL-terminated
//! UTF-8. Handles are not thread-safe; use one per thread or lock
//! externally.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sdnguard::flowkit::csvio::write_packets;
use sdnguard::flowkit::PacketRecord;
use sdnguard::pipeline::{
    characterize_packets, run_two_layer, Dataset, PipelineConfig, PipelineError, TwoLayerOutcome,
};
use sdnguard::sdnsim::{resolve_feed, run_scenario, Network, SimConfig, SimError, SimReport};
use sdnguard::trafficgen::{gen_scenario, ScenarioConfig};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Config = 5,
    Model = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: SgStatus, msg: impl AsRef<str>) -> SgStatus {
    set_error(msg.as_ref());
    status
}

/// Runs `f`, converting panics into [`SgStatus::Panic`].
fn guard(f: impl FnOnce() -> SgStatus) -> SgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SgStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn opt_str<'a>(s: *const c_char) -> Result<Option<&'a str>, SgStatus> {
    if s.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(s)
        .to_str()
        .map(Some)
        .map_err(|_| fail(SgStatus::InvalidArgument, "string argument is not UTF-8"))
}

unsafe fn req_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, SgStatus> {
    opt_str(s)?.ok_or_else(|| fail(SgStatus::NullArgument, format!("{what} is null")))
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

fn pipeline_status(e: &PipelineError) -> SgStatus {
    match e {
        PipelineError::Model { .. } => SgStatus::Model,
        _ => SgStatus::Config,
    }
}

/// Error message of the last failed call on this thread; empty if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn sg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// A generated trace together with the network its hosts live on.
pub struct SgScenario {
    packets: Vec<PacketRecord>,
    network: Network,
}

/// Generates a scenario. `scenario_toml` may be null for defaults; the
/// network is a chain of `switches` switches over the scenario hosts.
///
/// # Safety
/// `scenario_toml` is null or a valid C string; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_scenario_generate(
    scenario_toml: *const c_char,
    seed: u64,
    switches: u32,
    out: *mut *mut SgScenario,
) -> SgStatus {
    guard(|| {
        if out.is_null() {
            return fail(SgStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        if switches == 0 {
            return fail(SgStatus::InvalidArgument, "switches must be positive");
        }
        let cfg = match try_status!(opt_str(scenario_toml)) {
            Some(t) => try_status!(
                ScenarioConfig::from_toml(t).map_err(|e| fail(SgStatus::Parse, e.to_string()))
            ),
            None => ScenarioConfig::default(),
        };
        let s = try_status!(
            gen_scenario(&cfg, seed).map_err(|e| fail(SgStatus::Config, e.to_string()))
        );
        let pairs: Vec<_> = s.hosts.iter().map(|h| (h.ip, h.mac)).collect();
        let network = try_status!(Network::chain(switches as usize, &pairs)
            .map_err(|e| fail(SgStatus::Config, e.to_string())));
        *out = Box::into_raw(Box::new(SgScenario {
            packets: s.packets,
            network,
        }));
        SgStatus::Ok
    })
}

/// Number of packets, 0 for a null handle.
///
/// # Safety
/// `s` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_scenario_packet_count(s: *const SgScenario) -> u64 {
    s.as_ref().map_or(0, |s| s.packets.len() as u64)
}

/// Number of hosts in the scenario network, 0 for a null handle.
///
/// # Safety
/// `s` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_scenario_host_count(s: *const SgScenario) -> u64 {
    s.as_ref().map_or(0, |s| s.network.hosts.len() as u64)
}

/// Writes the trace as packet CSV with MAC columns.
///
/// # Safety
/// `s` is a live handle; `path` is a valid C string.
#[no_mangle]
pub unsafe extern "C" fn sg_scenario_write_packets(
    s: *const SgScenario,
    path: *const c_char,
) -> SgStatus {
    guard(|| {
        let Some(s) = s.as_ref() else {
            return fail(SgStatus::NullArgument, "scenario is null");
        };
        let path = try_status!(req_str(path, "path"));
        let file = try_status!(std::fs::File::create(Path::new(path))
            .map_err(|e| fail(SgStatus::Io, format!("{path}: {e}"))));
        try_status!(
            write_packets(std::io::BufWriter::new(file), &s.packets, true)
                .map_err(|e| fail(SgStatus::Io, e.to_string()))
        );
        SgStatus::Ok
    })
}

/// # Safety
/// `s` is null or a handle from `sg_scenario_generate`, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_scenario_free(s: *mut SgScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Outcome of the two-layer detector.
pub struct SgDetection {
    data: Dataset,
    outcome: TwoLayerOutcome,
    suspicious: Vec<u32>,
}

/// Runs detection and identification on the scenario trace.
/// `pipeline_toml` may be null for defaults.
///
/// # Safety
/// `s` is a live handle; `pipeline_toml` is null or a valid C string; `out`
/// is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_detect(
    s: *const SgScenario,
    pipeline_toml: *const c_char,
    seed: u64,
    out: *mut *mut SgDetection,
) -> SgStatus {
    guard(|| {
        if out.is_null() {
            return fail(SgStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(s) = s.as_ref() else {
            return fail(SgStatus::NullArgument, "scenario is null");
        };
        let cfg: PipelineConfig = match try_status!(opt_str(pipeline_toml)) {
            Some(t) => try_status!(toml::from_str(t)
                .map_err(|e| fail(SgStatus::Parse, format!("pipeline config: {e}")))),
            None => PipelineConfig::default(),
        };
        let data = try_status!(characterize_packets(&s.packets, cfg.noflow, seed)
            .map_err(|e| fail(pipeline_status(&e), e.to_string())));
        let outcome =
            try_status!(run_two_layer(&data, &cfg, seed)
                .map_err(|e| fail(pipeline_status(&e), e.to_string())));
        let mut suspicious: Vec<u32> = outcome
            .detection
            .attack_nodes()
            .iter()
            .map(|&i| u32::from(data.graph.nodes[i].source.ip))
            .collect();
        suspicious.sort_unstable();
        suspicious.dedup();
        *out = Box::into_raw(Box::new(SgDetection {
            data,
            outcome,
            suspicious,
        }));
        SgStatus::Ok
    })
}

/// Test-set F1 of detection (`stage` 0) or macro F1 of identification
/// (`stage` 1).
///
/// # Safety
/// `d` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_detection_f1(
    d: *const SgDetection,
    stage: u32,
    out: *mut f64,
) -> SgStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return fail(SgStatus::NullArgument, "detection is null");
        };
        if out.is_null() {
            return fail(SgStatus::NullArgument, "out is null");
        }
        let f1 = match stage {
            0 => d.outcome.detection.metrics.f1,
            1 => match &d.outcome.identification {
                Ok(id) => match &id.metrics {
                    Some(m) => m.f1,
                    None => return fail(SgStatus::Model, "identification saw a single class"),
                },
                Err(reason) => {
                    return fail(SgStatus::Model, format!("identification skipped: {reason}"))
                }
            },
            _ => return fail(SgStatus::InvalidArgument, "stage must be 0 or 1"),
        };
        *out = f1;
        SgStatus::Ok
    })
}

/// Number of graph nodes.
///
/// # Safety
/// `d` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_detection_node_count(d: *const SgDetection) -> u64 {
    d.as_ref().map_or(0, |d| d.data.graph.n() as u64)
}

/// Distinct flagged source addresses, ascending.
///
/// # Safety
/// `d` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_detection_suspicious_count(d: *const SgDetection) -> u64 {
    d.as_ref().map_or(0, |d| d.suspicious.len() as u64)
}

/// Flagged address `index` as a host-order IPv4 integer.
///
/// # Safety
/// `d` is a live handle; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_detection_suspicious_ip(
    d: *const SgDetection,
    index: u64,
    out: *mut u32,
) -> SgStatus {
    guard(|| {
        let Some(d) = d.as_ref() else {
            return fail(SgStatus::NullArgument, "detection is null");
        };
        if out.is_null() {
            return fail(SgStatus::NullArgument, "out is null");
        }
        match usize::try_from(index)
            .ok()
            .and_then(|i| d.suspicious.get(i))
        {
            Some(ip) => {
                *out = *ip;
                SgStatus::Ok
            }
            None => fail(
                SgStatus::InvalidArgument,
                format!("index {index} out of range"),
            ),
        }
    })
}

/// # Safety
/// `d` is null or a handle from `sg_detect`, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_detection_free(d: *mut SgDetection) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Result of a simulator run.
pub struct SgSimReport {
    report: SimReport,
}

/// Replays the scenario trace through its network. `sim_toml` may be null
/// for defaults; `feed_ips` (host-order IPv4, `feed_len` entries) may be
/// null when `feed_len` is 0, meaning no detector feed.
///
/// # Safety
/// `s` is a live handle; `sim_toml` is null or a valid C string; `feed_ips`
/// points to `feed_len` integers; `out` is a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_simulate(
    s: *const SgScenario,
    sim_toml: *const c_char,
    mitigation: bool,
    feed_ips: *const u32,
    feed_len: usize,
    out: *mut *mut SgSimReport,
) -> SgStatus {
    guard(|| {
        if out.is_null() {
            return fail(SgStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let Some(s) = s.as_ref() else {
            return fail(SgStatus::NullArgument, "scenario is null");
        };
        let mut cfg: SimConfig = match try_status!(opt_str(sim_toml)) {
            Some(t) => try_status!(toml::from_str(t)
                .map_err(|e| fail(SgStatus::Parse, format!("simulator config: {e}")))),
            None => SimConfig::default(),
        };
        cfg.mitigation = mitigation;
        let feed = if feed_len == 0 {
            None
        } else if feed_ips.is_null() {
            return fail(SgStatus::NullArgument, "feed_ips is null");
        } else {
            let ips: Vec<_> = std::slice::from_raw_parts(feed_ips, feed_len)
                .iter()
                .map(|&x| x.into())
                .collect();
            Some(resolve_feed(&s.network, &ips).0)
        };
        let report = try_status!(run_scenario(&s.network, &s.packets, &cfg, feed.as_deref())
            .map_err(|e| match e {
                SimError::Config(_) | SimError::Topology(_) =>
                    fail(SgStatus::Config, e.to_string()),
                _ => fail(SgStatus::Io, e.to_string()),
            }));
        *out = Box::into_raw(Box::new(SgSimReport { report }));
        SgStatus::Ok
    })
}

/// Whether any 1 s window exceeded the Packet-In budget.
///
/// # Safety
/// `r` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_overload(r: *const SgSimReport) -> bool {
    r.as_ref().is_some_and(|r| r.report.overload())
}

/// # Safety
/// `r` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_peak_packet_in_rate(r: *const SgSimReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.peak_packet_in_rate())
}

/// # Safety
/// `r` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_forwarded(r: *const SgSimReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.forwarded)
}

/// # Safety
/// `r` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_block_count(r: *const SgSimReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.block_list.len() as u64)
}

/// # Safety
/// `r` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_blocking_violations(r: *const SgSimReport) -> u64 {
    r.as_ref().map_or(0, |r| r.report.blocking_violations)
}

/// Writes the per-second time series CSV.
///
/// # Safety
/// `r` is a live handle; `path` is a valid C string.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_write_timeseries(
    r: *const SgSimReport,
    path: *const c_char,
) -> SgStatus {
    guard(|| {
        let Some(r) = r.as_ref() else {
            return fail(SgStatus::NullArgument, "report is null");
        };
        let path = try_status!(req_str(path, "path"));
        let file = try_status!(std::fs::File::create(Path::new(path))
            .map_err(|e| fail(SgStatus::Io, format!("{path}: {e}"))));
        try_status!(r
            .report
            .write_timeseries(file)
            .map_err(|e| fail(SgStatus::Io, e.to_string())));
        SgStatus::Ok
    })
}

/// # Safety
/// `r` is null or a handle from `sg_simulate`, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sg_sim_free(r: *mut SgSimReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Parses a topology description; fails on disconnected graphs or
/// duplicate hosts. Only used for validation from C.
///
/// # Safety
/// `text` is a valid C string; `hosts_out` is null or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sg_topology_validate(
    text: *const c_char,
    hosts_out: *mut u64,
) -> SgStatus {
    guard(|| {
        let text = try_status!(req_str(text, "text"));
        let net =
            try_status!(Network::parse(text).map_err(|e| fail(SgStatus::Parse, e.to_string())));
        if let Some(h) = hosts_out.as_mut() {
            *h = net.hosts.len() as u64;
        }
        SgStatus::Ok
    })
}
