use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};

use super::config::{
    DetectConfig, DetectInput, GenerateConfig, RunConfig, SimulateConfig, SimulateInput,
};
use super::CliError;
use crate::flowkit::csvio::{read_packets, write_packets};
use crate::flowkit::ingest::{read_flow_table, ColumnMapping};
use crate::flowkit::{FlowError, PacketRecord};
use crate::pipeline::report::{read_metric_rows, size_rows, write_metric_rows};
use crate::pipeline::{
    characterize_flows, characterize_packets, run_two_layer, vary_training_size, ExperimentReport,
    MetricRow, PipelineError,
};
use crate::sdnsim::{resolve_feed, run_scenario, Network, SimError};
use crate::trafficgen::{gen_scenario, write_hosts, write_truth, Host, TrafficError};

fn user<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::User(format!("{context}: {e}"))
}

fn pipeline_err(e: PipelineError) -> CliError {
    match e {
        PipelineError::Model { .. } | PipelineError::Evaluation(_) => {
            CliError::Internal(e.to_string())
        }
        _ => CliError::User(e.to_string()),
    }
}

fn traffic_err(e: TrafficError) -> CliError {
    CliError::User(e.to_string())
}

fn sim_err(e: SimError) -> CliError {
    match e {
        SimError::Topology(_) | SimError::Config(_) => CliError::User(e.to_string()),
        _ => CliError::Internal(e.to_string()),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    let mut f = create(dir, name)?;
    f.write_all(body.as_bytes())
        .and_then(|()| f.flush())
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn write_with<F, E>(dir: &Path, name: &str, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), E>,
    E: std::fmt::Display,
{
    let mut w = create(dir, name)?;
    f(&mut w).map_err(|e| {
        CliError::Internal(format!("cannot write {}: {e}", dir.join(name).display()))
    })?;
    w.flush()
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn open(path: &Path, what: &str) -> Result<File, CliError> {
    File::open(path)
        .map_err(|e| CliError::User(format!("cannot read {what} {}: {e}", path.display())))
}

fn load_packets(path: &Path) -> Result<Vec<PacketRecord>, CliError> {
    read_packets(open(path, "packet trace")?).map_err(|e| match e {
        FlowError::Io(_) => CliError::Internal(format!("{}: {e}", path.display())),
        _ => CliError::User(format!("{}: {e}", path.display())),
    })
}

fn chain_for(hosts: &[Host], switches: usize) -> Result<Network, CliError> {
    if switches == 0 {
        return Err(CliError::User("--switches must be at least 1".into()));
    }
    let pairs: Vec<_> = hosts.iter().map(|h| (h.ip, h.mac)).collect();
    Network::chain(switches, &pairs).map_err(sim_err)
}

/// Runs a resolved command; returns a short stdout summary.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg {
        RunConfig::Generate(c) => cmd_generate(c, cfg),
        RunConfig::Detect(c) => cmd_detect(c, cfg),
        RunConfig::Simulate(c) => cmd_simulate(c, cfg),
    }
}

pub fn cmd_generate(c: &GenerateConfig, echo: &RunConfig) -> Result<String, CliError> {
    let s = gen_scenario(&c.scenario, c.seed).map_err(traffic_err)?;
    let net = chain_for(&s.hosts, c.switches)?;
    write_with(&c.out, "packets.csv", |w| {
        write_packets(w, &s.packets, true)
    })?;
    write_with(&c.out, "truth.csv", |w| write_truth(w, &s.truth))?;
    write_with(&c.out, "hosts.csv", |w| write_hosts(w, &s.hosts))?;
    write_file(&c.out, "topology.txt", &net.to_text())?;
    write_file(&c.out, "run.toml", &echo.to_toml()?)?;
    Ok(format!(
        "packets={}\nsources={}\nhosts={}\nout={}\n",
        s.packets.len(),
        s.truth.len(),
        s.hosts.len(),
        c.out.display()
    ))
}

pub fn cmd_detect(c: &DetectConfig, echo: &RunConfig) -> Result<String, CliError> {
    let data = match &c.input {
        DetectInput::Packets { path } => {
            let packets = load_packets(path)?;
            characterize_packets(&packets, c.pipeline.noflow, c.seed).map_err(pipeline_err)?
        }
        DetectInput::Flows { path, mapping } => {
            let mapping = match mapping {
                Some(m) => {
                    let text =
                        std::fs::read_to_string(m).map_err(user(&m.display().to_string()))?;
                    ColumnMapping::from_toml(&text).map_err(user(&m.display().to_string()))?
                }
                None => ColumnMapping::cicids2017(),
            };
            let (flows, stats) = read_flow_table(open(path, "flow table")?, &mapping)
                .map_err(user(&path.display().to_string()))?;
            if stats.skipped_label > 0 {
                eprintln!(
                    "sdnguard: {} rows with unmapped labels skipped",
                    stats.skipped_label
                );
            }
            characterize_flows(flows, c.pipeline.noflow, c.seed).map_err(pipeline_err)?
        }
    };
    let echo_text = echo.to_toml()?;
    let outcome = run_two_layer(&data, &c.pipeline, c.seed).map_err(pipeline_err)?;
    let report = ExperimentReport::new(
        &c.run_id,
        c.seed,
        c.pipeline.model.as_str(),
        &echo_text,
        &data,
        outcome,
    );
    let mut rows = report.metric_rows();
    if !c.vary_sizes.is_empty() {
        let (sizes, warnings) =
            vary_training_size(&data, &c.vary_sizes, &c.pipeline, c.seed).map_err(pipeline_err)?;
        for w in warnings {
            eprintln!("sdnguard: {w}");
        }
        rows.extend(size_rows(&c.run_id, c.pipeline.model.as_str(), &sizes));
    }
    write_file(&c.out, "report.txt", &report.render())?;
    write_with(&c.out, "metrics.csv", |w| write_metric_rows(w, &rows))?;
    write_with(&c.out, "suspicious.csv", |w| report.write_suspicious(w))?;
    write_file(&c.out, "run.toml", &echo_text)?;

    let mut s = String::new();
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.4},{:.4}",
            r.stage, r.algorithm, r.variant, r.train_size, r.accuracy, r.f1
        );
    }
    let _ = writeln!(s, "suspicious={}", report.suspicious().len());
    Ok(s)
}

/// Source addresses from a suspicious-node list (`src_ip,...` header),
/// in file order.
pub fn read_suspicious(path: &Path) -> Result<Vec<Ipv4Addr>, CliError> {
    let ctx = path.display().to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path, "detector feed")?);
    let col = rdr
        .headers()
        .map_err(user(&ctx))?
        .iter()
        .position(|h| h == "src_ip")
        .ok_or_else(|| CliError::User(format!("{ctx}: no src_ip column")))?;
    let mut ips = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(user(&ctx))?;
        let raw = rec.get(col).unwrap_or("");
        ips.push(
            raw.parse()
                .map_err(|_| CliError::User(format!("{ctx} line {}: bad IP `{raw}`", i + 2)))?,
        );
    }
    Ok(ips)
}

pub fn cmd_simulate(c: &SimulateConfig, echo: &RunConfig) -> Result<String, CliError> {
    let load_topology = |p: &PathBuf| -> Result<Network, CliError> {
        let text = std::fs::read_to_string(p).map_err(user(&p.display().to_string()))?;
        Network::parse(&text).map_err(|e| CliError::User(format!("{}: {e}", p.display())))
    };
    let (net, packets) = match &c.input {
        SimulateInput::Trace { trace, topology } => {
            (load_topology(topology)?, load_packets(trace)?)
        }
        SimulateInput::Scenario {
            scenario,
            topology,
            switches,
        } => {
            let s = gen_scenario(scenario, c.seed).map_err(traffic_err)?;
            let net = match topology {
                Some(p) => load_topology(p)?,
                None => chain_for(&s.hosts, *switches)?,
            };
            (net, s.packets)
        }
    };
    let (feed, unknown) = match &c.detector_feed {
        Some(p) => {
            let (t, u) = resolve_feed(&net, &read_suspicious(p)?);
            (Some(t), u)
        }
        None => (None, Vec::new()),
    };
    let report = run_scenario(&net, &packets, &c.sim, feed.as_deref()).map_err(sim_err)?;

    let mut summary = report.render_summary();
    summary.push_str("[feed_unknown]\n");
    for ip in &unknown {
        let _ = writeln!(summary, "{ip}");
    }
    write_with(&c.out, "timeseries.csv", |w| report.write_timeseries(w))?;
    write_file(&c.out, "summary.txt", &summary)?;
    if c.sim.log_events {
        write_file(&c.out, "events.log", &(report.events.join("\n") + "\n"))?;
    }
    write_file(&c.out, "run.toml", &echo.to_toml()?)?;
    Ok(format!(
        "overload={}\npeak_packet_in_rate={}\nforwarded={}\nblock_list={}\nblocking_violations={}\n",
        report.overload(),
        report.peak_packet_in_rate(),
        report.forwarded,
        report.block_list.len(),
        report.blocking_violations
    ))
}

fn table(title: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("## {title}\n{}\n", header.join(","));
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// Merges `metrics.csv` of each run directory. Directories without one are
/// reported on stderr and skipped. Returns the tables as text; with `out`
/// they are also written as CSV files.
pub fn cmd_report(runs: &[PathBuf], out: Option<&Path>) -> Result<String, CliError> {
    let mut all: Vec<MetricRow> = Vec::new();
    let mut skipped = Vec::new();
    for dir in runs {
        let path = dir.join("metrics.csv");
        match File::open(&path) {
            Ok(f) => all.extend(
                read_metric_rows(f)
                    .map_err(|e| CliError::User(format!("{}: {e}", path.display())))?,
            ),
            Err(_) => skipped.push(path),
        }
    }
    for p in &skipped {
        eprintln!("sdnguard: skipping {}: missing metrics file", p.display());
    }
    if all.is_empty() {
        return Err(CliError::User("no metrics to report".into()));
    }
    let num = |x: f64| x.to_string();

    let mut by_algorithm: Vec<Vec<String>> = all
        .iter()
        .filter(|r| r.variant == "all" && r.stage != "training_size")
        .map(|r| {
            vec![
                r.stage.clone(),
                r.algorithm.clone(),
                r.run_id.clone(),
                r.train_size.to_string(),
                num(r.accuracy),
                num(r.f1),
            ]
        })
        .collect();
    by_algorithm.sort_by(|a, b| a[..3].cmp(&b[..3]));
    let mut by_variant: Vec<Vec<String>> = all
        .iter()
        .filter(|r| r.stage == "identification" && r.variant != "all")
        .map(|r| {
            vec![
                r.variant.clone(),
                r.algorithm.clone(),
                r.run_id.clone(),
                num(r.accuracy),
                num(r.f1),
            ]
        })
        .collect();
    by_variant.sort_by(|a, b| a[..3].cmp(&b[..3]));
    let mut sized: Vec<&MetricRow> = all.iter().filter(|r| r.stage == "training_size").collect();
    sized.sort_by(|a, b| {
        (a.train_size, &a.algorithm, &a.run_id).cmp(&(b.train_size, &b.algorithm, &b.run_id))
    });
    let by_size: Vec<Vec<String>> = sized
        .iter()
        .map(|r| {
            vec![
                r.train_size.to_string(),
                r.algorithm.clone(),
                r.run_id.clone(),
                num(r.accuracy),
                num(r.f1),
            ]
        })
        .collect();

    let tables = [
        (
            "by_algorithm",
            vec![
                "stage",
                "algorithm",
                "run_id",
                "train_size",
                "accuracy",
                "f1",
            ],
            by_algorithm,
        ),
        (
            "by_variant",
            vec!["variant", "algorithm", "run_id", "accuracy", "f1"],
            by_variant,
        ),
        (
            "by_training_size",
            vec!["train_size", "algorithm", "run_id", "accuracy", "f1"],
            by_size,
        ),
    ];
    let mut text = String::new();
    for (name, header, rows) in &tables {
        if !rows.is_empty() {
            text.push_str(&table(name, header, rows));
            text.push('\n');
        }
    }
    if let Some(dir) = out {
        write_with(dir, "merged.csv", |w| write_metric_rows(w, &all))?;
        for (name, header, rows) in &tables {
            let body = table(name, header, rows);
            let csv_body = body.split_once('\n').map_or("", |(_, rest)| rest);
            write_file(dir, &format!("{name}.csv"), csv_body)?;
        }
    }
    Ok(text)
}
