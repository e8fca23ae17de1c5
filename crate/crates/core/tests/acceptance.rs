//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero when any fails.

use std::collections::BTreeSet;
use std::net::Ipv4Addr;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdnguard::flowkit::MacAddr;
use sdnguard::gcn::{forward, init_model, loss, loss_gradients, DropoutMasks, Hyperparams};
use sdnguard::netgraph::{normalized_adjacency, Adjacency};
use sdnguard::pipeline::{
    characterize_packets, detect, identify, run_two_layer, vary_training_size, Dataset,
    PipelineConfig,
};
use sdnguard::sdnsim::{
    resolve_feed, run_scenario, Action, Attach, ControllerState, HostTuple, Network, PacketIn,
    SimConfig, SimReport,
};
use sdnguard::trafficgen::{gen_scenario, AttackerGroup, Role, Scenario, ScenarioConfig, Variant};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// 20 benign hosts, three attackers per DDoS variant, 60 s.
fn desk_scenario() -> ScenarioConfig {
    let mut sc = ScenarioConfig {
        ..ScenarioConfig::default()
    };
    for g in &mut sc.attackers {
        g.count = 3;
        g.sessions = 8;
    }
    sc
}

fn dataset(sc: &ScenarioConfig, seed: u64) -> (Scenario, Dataset) {
    let s = gen_scenario(sc, seed).expect("scenario");
    let d = characterize_packets(&s.packets, Default::default(), seed).expect("characterize");
    (s, d)
}

fn detection_quality() -> Verdict {
    let sc = desk_scenario();
    let attackers: usize = sc.attackers.iter().map(|g| g.count).sum();
    let cfg = PipelineConfig {
        baseline_rf: true,
        ..PipelineConfig::default()
    };
    let (mut gcn, mut rf, mut secs) = (Vec::new(), Vec::new(), Vec::new());
    for seed in SEEDS {
        let t = Instant::now();
        let (_, data) = dataset(&sc, seed);
        let d = detect(&data, &cfg, cfg.detect_split, seed).expect("detect");
        gcn.push(d.metrics.f1);
        rf.push(d.rf.expect("rf baseline").f1);
        secs.push(t.elapsed().as_secs_f64());
    }
    let slowest = secs.iter().copied().fold(0.0, f64::max);
    verdict(
        min(&gcn) >= 0.95 && min(&rf) >= 0.95 && slowest <= 300.0,
        format!(
            "{} benign hosts, {attackers} attackers, {} s, {} seeds: gcn f1 mean {:.4} min {:.4}; rf f1 mean {:.4} min {:.4}; slowest seed {slowest:.1} s",
            sc.benign_hosts,
            sc.duration,
            SEEDS.len(),
            mean(&gcn),
            min(&gcn),
            mean(&rf),
            min(&rf)
        ),
    )
}

fn identification_quality() -> Verdict {
    let sc = desk_scenario();
    let cfg = PipelineConfig::default();
    let (mut attack_set, mut chained) = (Vec::new(), Vec::new());
    for seed in SEEDS {
        let (_, data) = dataset(&sc, seed);
        let g = &data.graph;
        let malicious: Vec<usize> = (0..g.n()).filter(|&i| g.labels[i].is_attack()).collect();
        let id = identify(&data, &malicious, &cfg, cfg.identify_split, seed).expect("identify");
        assert_eq!(id.classes.len(), 4, "all four variants present");
        attack_set.push(id.metrics.expect("metrics").f1);
        let two = run_two_layer(&data, &cfg, seed).expect("two-layer");
        chained.push(
            two.identification
                .ok()
                .and_then(|i| i.metrics)
                .map_or(0.0, |m| m.f1),
        );
    }
    verdict(
        min(&attack_set) >= 0.95,
        format!(
            "macro-f1 on malicious nodes, {} seeds: mean {:.4} min {:.4} (after layer-1 flagging: mean {:.4} min {:.4})",
            SEEDS.len(),
            mean(&attack_set),
            min(&attack_set),
            mean(&chained),
            min(&chained)
        ),
    )
}

fn gradient_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=4);
        let h = rng.random_range(1..=5);
        let c = rng.random_range(2..=3);
        let layers = if trial % 5 == 4 { 3 } else { 2 };
        let mut dense = Array2::zeros((n, n));
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.4) {
                    dense[[i, j]] = 1.0;
                    dense[[j, i]] = 1.0;
                }
            }
        }
        let a_hat = normalized_adjacency(&Adjacency::from_dense(&dense).unwrap());
        let x = Array2::from_shape_simple_fn((n, d), || rng.random_range(-2.0..2.0));
        let targets: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let mut mask: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
        mask[0] = true;
        let decay = if trial % 2 == 0 { 5e-4 } else { 0.0 };
        let hp = Hyperparams {
            layers,
            hidden_width: h,
            seed: trial,
            ..Hyperparams::default()
        };
        let mut model = init_model(d, c, &hp);
        let drop = (trial % 3 == 2).then(|| DropoutMasks::sample(n, &model, 0.5, &mut rng));
        let analytic =
            loss_gradients(&x, &a_hat, &model, drop.as_ref(), &targets, &mask, decay).unwrap();
        for (l, grad) in analytic.iter().enumerate() {
            let (r, k) = grad.dim();
            for i in 0..r {
                for j in 0..k {
                    let orig = model.weights[l][[i, j]];
                    let mut at = |v: f64| {
                        model.weights[l][[i, j]] = v;
                        let z = forward(&x, &a_hat, &model, drop.as_ref()).unwrap();
                        loss(&z, &targets, &mask, &model, decay).unwrap()
                    };
                    let numeric = (at(orig + eps) - at(orig - eps)) / (2.0 * eps);
                    model.weights[l][[i, j]] = orig;
                    let a = grad[[i, j]];
                    let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-6);
                    worst = worst.max(rel);
                }
            }
        }
    }
    verdict(
        worst <= 1e-4,
        format!("50 instances, max relative error {worst:.2e}"),
    )
}

fn adjacency_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = rng.random_range(1..=8);
        let density = rng.random_range(0.0..1.0);
        let weighted = trial % 2 == 1;
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density) {
                    let w = if weighted {
                        rng.random_range(0.1..3.0)
                    } else {
                        1.0
                    };
                    a[[i, j]] = w;
                    a[[j, i]] = w;
                }
            }
        }
        let a_tilde = &a + &Array2::<f64>::eye(n);
        let mut d_inv_sqrt = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            d_inv_sqrt[[i, i]] = 1.0 / a_tilde.row(i).sum().sqrt();
        }
        let expect = d_inv_sqrt.dot(&a_tilde).dot(&d_inv_sqrt);
        let got = normalized_adjacency(&Adjacency::from_dense(&a).unwrap()).to_dense();
        let diff = (&expect - &got).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst = worst.max(diff);
    }
    verdict(
        worst <= 1e-12,
        format!("100 graphs with n <= 8, max abs difference {worst:.2e}"),
    )
}

/// Literal nested-loop controller used as the reference.
struct NaiveController {
    network: Vec<HostTuple>,
    observing: Vec<HostTuple>,
    blocked: Vec<HostTuple>,
    k: usize,
}

impl NaiveController {
    fn fields_equal(a: &HostTuple, b: &HostTuple) -> usize {
        usize::from(a.ip == b.ip) + usize::from(a.mac == b.mac) + usize::from(a.attach == b.attach)
    }

    fn handle(&mut self, p: &PacketIn) -> Vec<Action> {
        let e = self.observing.clone();
        let mut block = false;
        let mut observe = false;
        for _switch in 0..self.k {
            let mut i = 0;
            loop {
                if e.is_empty() {
                    // no observed host: only the destination check applies
                } else if i >= e.len() {
                    break;
                } else if e[i] == p.src {
                    block = true;
                    break;
                }
                let mut full = false;
                for n in &self.network {
                    if Self::fields_equal(&p.dest, n) == 3 {
                        full = true;
                    }
                }
                if !full {
                    observe = true;
                }
                i += 1;
                if e.is_empty() {
                    break;
                }
            }
        }
        if block {
            if !self.blocked.contains(&p.src) {
                self.blocked.push(p.src);
            }
            vec![
                Action::InstallPktBlocking {
                    switch: p.switch,
                    src: p.src,
                },
                Action::AppendBlockList(p.src),
            ]
        } else if observe {
            if !self.observing.contains(&p.src) {
                self.observing.push(p.src);
            }
            vec![Action::AppendObservingList(p.src), Action::DropPending]
        } else {
            vec![
                Action::InstallAllow {
                    switch: p.switch,
                    dest: p.dest,
                },
                Action::ForwardPending,
            ]
        }
    }
}

fn tuple(i: u32, switches: usize) -> HostTuple {
    let ip = Ipv4Addr::from(0x0a00_0000 + i);
    HostTuple {
        ip,
        mac: MacAddr::for_ip(ip),
        attach: Attach {
            switch: i as usize % switches,
            port: 1 + i as u16,
        },
    }
}

fn perturb(t: HostTuple, rng: &mut impl Rng) -> HostTuple {
    let mut t = t;
    match rng.random_range(0..3) {
        0 => t.ip = Ipv4Addr::from(u32::from(t.ip) ^ 0x00ff_0000),
        1 => {
            t.mac = MacAddr([
                2,
                0xee,
                rng.random(),
                rng.random(),
                rng.random(),
                rng.random(),
            ])
        }
        _ => t.attach.port = t.attach.port.wrapping_add(1000),
    }
    t
}

fn algorithm_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0usize;
    let mut decisions = 0usize;
    for _ in 0..1000 {
        let k = rng.random_range(1..=8);
        let l = rng.random_range(1..=100);
        let i = rng.random_range(0..=50);
        let network: Vec<HostTuple> = (0..l as u32).map(|j| tuple(j, k)).collect();
        let outsiders: Vec<HostTuple> = (0..20u32).map(|j| tuple(10_000 + j, k)).collect();
        let pool: Vec<HostTuple> = network.iter().chain(&outsiders).copied().collect();
        let mut fast = ControllerState::new(network.clone(), k);
        let mut naive = NaiveController {
            network: network.clone(),
            observing: Vec::new(),
            blocked: Vec::new(),
            k,
        };
        for _ in 0..i {
            let t = pool[rng.random_range(0..pool.len())];
            fast.observe(t);
            if !naive.observing.contains(&t) {
                naive.observing.push(t);
            }
        }
        for step in 0..30 {
            let src = pool[rng.random_range(0..pool.len())];
            let mut dest = network[rng.random_range(0..l)];
            if rng.random_bool(0.4) {
                dest = perturb(dest, &mut rng);
            }
            let msg = PacketIn {
                src,
                dest,
                switch: rng.random_range(0..k),
                time: step as f64,
            };
            decisions += 1;
            if fast.mitigate(&msg) != naive.handle(&msg) {
                mismatches += 1;
            }
        }
        if fast.observing_list() != naive.observing.as_slice()
            || fast.block_list() != naive.blocked.as_slice()
        {
            mismatches += 1;
        }
    }
    verdict(
        mismatches == 0,
        format!("1000 sequences, {decisions} decisions, {mismatches} mismatches"),
    )
}

fn complexity_linearity() -> Verdict {
    let grid = [1usize, 2, 4, 8];
    let mut points = Vec::new();
    for &k in &grid {
        for &i in &grid {
            for &l in &grid {
                let network: Vec<HostTuple> = (0..l as u32).map(|j| tuple(j, k)).collect();
                let mut st = ControllerState::new(network.clone(), k);
                for j in 0..i as u32 {
                    st.observe(tuple(50_000 + j, k));
                }
                let before = st.comparisons();
                let msgs = 10;
                for m in 0..msgs {
                    let p = PacketIn {
                        src: network[m % l],
                        dest: network[(m + 1) % l],
                        switch: 0,
                        time: m as f64,
                    };
                    st.mitigate(&p);
                }
                let per_msg = (st.comparisons() - before) as f64 / msgs as f64;
                points.push(((k * i * l) as f64, per_msg));
            }
        }
    }
    let c = points.iter().map(|(x, y)| x * y).sum::<f64>()
        / points.iter().map(|(x, _)| x * x).sum::<f64>();
    let worst = points
        .iter()
        .map(|(x, y)| (y / (c * x) - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(
        worst <= 0.15,
        format!(
            "64 grid points, fitted c {c:.4}, max deviation {:.2}%",
            100.0 * worst
        ),
    )
}

/// Tuples of the sources layer 1 flags as attack.
fn detector_feed(data: &Dataset, net: &Network, seed: u64) -> Vec<HostTuple> {
    let cfg = PipelineConfig::default();
    let d = detect(data, &cfg, cfg.detect_split, seed).expect("detect");
    let ips: BTreeSet<Ipv4Addr> = d
        .attack_nodes()
        .iter()
        .map(|&i| data.graph.nodes[i].source.ip)
        .collect();
    let ips: Vec<Ipv4Addr> = ips.into_iter().collect();
    resolve_feed(net, &ips).0
}

fn chain(s: &Scenario, switches: usize) -> Network {
    let pairs: Vec<_> = s.hosts.iter().map(|h| (h.ip, h.mac)).collect();
    Network::chain(switches, &pairs).expect("topology")
}

/// Packet-Ins a source emitted at a switch at or after that switch got a
/// blocking rule for it, counted from the raw event log.
fn packet_ins_after_block(r: &SimReport) -> usize {
    r.blocks
        .iter()
        .map(|(sw, src, t)| {
            r.packet_in_log
                .iter()
                .filter(|(pt, psw, psrc)| pt >= t && psw == sw && psrc == src)
                .count()
        })
        .sum()
}

struct SimRuns {
    efficacy: Verdict,
    blocking: Vec<(String, usize, usize)>,
}

fn fast_ddos_scenario() -> ScenarioConfig {
    ScenarioConfig {
        attackers: vec![AttackerGroup {
            variant: Variant::FastDdos,
            count: 8,
            ..AttackerGroup::default()
        }],
        ..ScenarioConfig::default()
    }
}

fn simulation_runs() -> SimRuns {
    let mut blocking = Vec::new();
    let mut record = |name: String, r: &SimReport| {
        assert!(r.config.log_events);
        blocking.push((name, r.blocks.len(), packet_ins_after_block(r)));
    };
    let mut lines = Vec::new();
    let mut ok = true;
    let feed_time = 5.0;
    for seed in [1u64, 2, 3] {
        let (s, data) = dataset(&fast_ddos_scenario(), seed);
        let net = chain(&s, 4);
        let feed = detector_feed(&data, &net, seed);
        let off_cfg = SimConfig {
            mitigation: false,
            log_events: true,
            ..SimConfig::default()
        };
        let off = run_scenario(&net, &s.packets, &off_cfg, None).expect("sim off");
        let on_cfg = SimConfig {
            feed_time,
            log_events: true,
            ..SimConfig::default()
        };
        let on = run_scenario(&net, &s.packets, &on_cfg, Some(&feed)).expect("sim on");
        let steady = on
            .windows
            .iter()
            .filter(|w| w.t >= 10)
            .map(|w| w.packet_ins)
            .max()
            .unwrap_or(0);
        let benign: Vec<Ipv4Addr> = s
            .hosts
            .iter()
            .filter(|h| !matches!(h.role, Role::Attacker(_)))
            .map(|h| h.ip)
            .collect();
        let fwd =
            |r: &SimReport, ip: &Ipv4Addr| r.forwarded_by_source.get(ip).copied().unwrap_or(0);
        let reduced = benign
            .iter()
            .filter(|ip| fwd(&on, ip) < fwd(&off, ip))
            .count();
        let (b_on, b_off): (u64, u64) = (
            benign.iter().map(|ip| fwd(&on, ip)).sum(),
            benign.iter().map(|ip| fwd(&off, ip)).sum(),
        );
        ok &= off.overload()
            && off.peak_packet_in_rate() > 600
            && steady < 600
            && reduced == 0
            && b_on >= b_off;
        lines.push(format!(
            "seed {seed}: off peak {}/s overload {}; on max {steady}/s after 10 s; benign forwarded {b_on} vs {b_off}, {reduced} hosts reduced",
            off.peak_packet_in_rate(),
            off.overload()
        ));
        record(format!("fast-ddos s{seed} off"), &off);
        record(format!("fast-ddos s{seed} on"), &on);
    }
    for seed in [1u64, 2] {
        let (s, data) = dataset(&desk_scenario(), seed);
        for switches in [1usize, 4, 8] {
            let net = chain(&s, switches);
            let feed = detector_feed(&data, &net, seed);
            let cfg = SimConfig {
                log_events: true,
                feed_time: 10.0,
                ..SimConfig::default()
            };
            let with_feed = run_scenario(&net, &s.packets, &cfg, Some(&feed)).expect("sim");
            record(format!("4-variant s{seed} k{switches} feed"), &with_feed);
            let cfg = SimConfig {
                log_events: true,
                ..SimConfig::default()
            };
            let plain = run_scenario(&net, &s.packets, &cfg, None).expect("sim");
            record(format!("4-variant s{seed} k{switches}"), &plain);
        }
    }
    SimRuns {
        efficacy: verdict(ok, lines.join("; ")),
        blocking,
    }
}

fn blocking_completeness(runs: &[(String, usize, usize)]) -> Verdict {
    let violations: usize = runs.iter().map(|r| r.2).sum();
    let rules: usize = runs.iter().map(|r| r.1).sum();
    let bad: Vec<&str> = runs
        .iter()
        .filter(|r| r.2 > 0)
        .map(|r| r.0.as_str())
        .collect();
    verdict(
        violations == 0 && rules > 0,
        format!("{} runs, {rules} blocking rules, {violations} later Packet-Ins from blocked sources {bad:?}", runs.len()),
    )
}

fn size_sweep_scenario() -> ScenarioConfig {
    ScenarioConfig {
        benign_hosts: 100,
        victims: 6,
        attackers: vec![
            AttackerGroup {
                variant: Variant::SlowDdos,
                count: 20,
                sessions: 200,
                ..AttackerGroup::default()
            },
            AttackerGroup {
                variant: Variant::SlowDcDdos,
                count: 20,
                sessions: 200,
                ..AttackerGroup::default()
            },
            AttackerGroup {
                variant: Variant::PortScan,
                count: 4,
                sessions: 20,
                ..AttackerGroup::default()
            },
        ],
        ..ScenarioConfig::default()
    }
}

fn training_size_trend() -> Verdict {
    let sizes = [50usize, 250, 500, 750, 1000];
    let seeds = [1u64, 2, 3];
    let cfg = PipelineConfig::default();
    let mut per_size: Vec<Vec<f64>> = vec![Vec::new(); sizes.len()];
    for seed in seeds {
        let (_, data) = dataset(&size_sweep_scenario(), seed);
        let g = &data.graph;
        let attack = g.labels.iter().filter(|l| l.is_attack()).count();
        assert!(
            attack >= 1000 && g.n() - attack >= 1000,
            "class populations {attack}/{}",
            g.n() - attack
        );
        let (rows, warnings) = vary_training_size(&data, &sizes, &cfg, seed).expect("sweep");
        assert!(warnings.is_empty(), "{warnings:?}");
        for (k, r) in rows.iter().enumerate() {
            per_size[k].push(r.gcn.f1);
        }
    }
    let med: Vec<f64> = per_size.iter().map(|v| median(v)).collect();
    let upper = &med[1..];
    let spread = upper.iter().copied().fold(f64::MIN, f64::max)
        - upper.iter().copied().fold(f64::MAX, f64::min);
    let trend = upper.iter().all(|f| *f >= med[0]);
    let table: Vec<String> = sizes
        .iter()
        .zip(&med)
        .map(|(s, f)| format!("{s}:{f:.4}"))
        .collect();
    verdict(
        trend && spread <= 0.03,
        format!(
            "median gcn f1 over {} seeds {}; spread 250..1000 {spread:.4}",
            seeds.len(),
            table.join(" ")
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn sdnguard(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sdnguard"))
        .args(args)
        .output()
        .expect("spawn sdnguard");
    assert!(
        out.status.success(),
        "sdnguard {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let p = |s: &str| tmp.path().join(s).to_string_lossy().into_owned();
    let scenario = p("scenario.toml");
    let sc = ScenarioConfig {
        duration: 20.0,
        benign_hosts: 10,
        ..ScenarioConfig::default()
    };
    std::fs::write(&scenario, sc.to_toml()).unwrap();
    let commands: Vec<(&str, Vec<String>)> = vec![
        (
            "generate",
            vec![
                "generate".into(),
                "--scenario".into(),
                scenario.clone(),
                "--seed".into(),
                "7".into(),
                "--out".into(),
                p("gen"),
            ],
        ),
        (
            "detect",
            vec![
                "detect".into(),
                "--packets".into(),
                p("gen/packets.csv"),
                "--baseline".into(),
                "rf".into(),
                "--seed".into(),
                "7".into(),
                "--vary-sizes".into(),
                "5,10".into(),
                "--out".into(),
                p("det"),
            ],
        ),
        (
            "simulate",
            vec![
                "simulate".into(),
                "--trace".into(),
                p("gen/packets.csv"),
                "--topology".into(),
                p("gen/topology.txt"),
                "--detector-feed".into(),
                p("det/suspicious.csv"),
                "--feed-time".into(),
                "5".into(),
                "--log-events".into(),
                "--out".into(),
                p("sim"),
            ],
        ),
        (
            "report",
            vec!["report".into(), p("det"), "--out".into(), p("rep")],
        ),
        (
            "run",
            vec![
                "run".into(),
                "--config".into(),
                p("gen/run.toml"),
                "--out".into(),
                p("replay"),
            ],
        ),
    ];
    let mut differing = Vec::new();
    for (name, args) in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out_dir = Path::new(args[args.len() - 1]);
        let first = (sdnguard(&args), snapshot(out_dir));
        let second = (sdnguard(&args), snapshot(out_dir));
        if first != second || first.1.is_empty() {
            differing.push(name.to_string());
        }
    }
    let replay_matches = {
        let a = snapshot(&tmp.path().join("gen"));
        let b = snapshot(&tmp.path().join("replay"));
        let strip = |v: Vec<(String, Vec<u8>)>| -> Vec<(String, Vec<u8>)> {
            v.into_iter().filter(|(n, _)| n != "run.toml").collect()
        };
        strip(a) == strip(b)
    };
    if !replay_matches {
        differing.push("run replay vs generate".into());
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} commands run twice, byte-compared outputs; differing: {differing:?}",
            commands.len()
        ),
    )
}

fn main() {
    let started = Instant::now();
    let mut failed = 0;
    let mut report = |id: usize, name: &str, v: Verdict| {
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} C{id} {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    };
    report(1, "detection quality", detection_quality());
    report(2, "identification quality", identification_quality());
    report(3, "gradient oracle", gradient_oracle());
    report(4, "normalized adjacency oracle", adjacency_oracle());
    report(5, "mitigation loop equivalence", algorithm_equivalence());
    report(6, "comparison count linearity", complexity_linearity());
    let sims = simulation_runs();
    report(7, "mitigation efficacy", sims.efficacy);
    report(
        8,
        "blocking completeness",
        blocking_completeness(&sims.blocking),
    );
    report(9, "training size trend", training_size_trend());
    report(10, "determinism", determinism());
    println!(
        "acceptance: {} of 10 passed in {:.0} s",
        10 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
