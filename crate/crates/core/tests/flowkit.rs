use std::collections::BTreeMap;
use std::net::Ipv4Addr;

use proptest::prelude::*;
use sdnguard::flowkit::csvio::{read_packets, write_packets};
use sdnguard::flowkit::{
    group_activity_flows, group_basic_flows, BinaryClass, Endpoint, Label, MacAddr, PacketRecord,
    Protocol, N_FEATURES,
};

fn packet(t: f64, src: (u8, u16), dst: (u8, u16), bytes: u32, label: Label) -> PacketRecord {
    PacketRecord {
        timestamp: t,
        src_ip: Ipv4Addr::new(10, 0, 0, src.0),
        src_port: src.1,
        dst_ip: Ipv4Addr::new(10, 0, 0, dst.0),
        dst_port: dst.1,
        protocol: Protocol::Udp,
        payload_bytes: bytes,
        label,
        src_mac: None,
        dst_mac: None,
    }
}

/// Independent single-pass recomputation of one flow's statistics.
fn oracle_flow(pkts: &[(f64, u32)]) -> [f64; N_FEATURES] {
    let mut t: Vec<f64> = pkts.iter().map(|p| p.0).collect();
    t.sort_by(f64::total_cmp);
    let n = t.len() as f64;
    let bytes: f64 = pkts.iter().map(|p| p.1 as f64).sum();
    let dur = t[t.len() - 1] - t[0];
    let eff = if dur < 1e-6 { 1e-6 } else { dur };
    let (mut m, mut s) = (0.0, 0.0);
    if t.len() > 1 {
        let g: Vec<f64> = (1..t.len()).map(|i| t[i] - t[i - 1]).collect();
        m = g.iter().sum::<f64>() / g.len() as f64;
        s = (g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / g.len() as f64).sqrt();
    }
    [dur, n / eff, bytes / eff, bytes / n, m, s, n, 1.0]
}

fn label_strategy() -> impl Strategy<Value = Label> {
    prop::sample::select(Label::ALL.to_vec())
}

prop_compose! {
    fn packets()(raw in prop::collection::vec(
        (0.0f64..30.0, 1u8..4, prop::sample::select(vec![80u16, 1000, 2000]), 1u8..4, prop::sample::select(vec![80u16, 443]), 0u32..1500, label_strategy()),
        1..100,
    )) -> Vec<PacketRecord> {
        raw.into_iter().map(|(t, si, sp, di, dp, b, l)| packet(t, (si, sp), (di, dp), b, l)).collect()
    }
}

proptest! {
    #[test]
    fn activity_means_match_brute_force(pkts in packets()) {
        let mut per_flow: BTreeMap<(Endpoint, Endpoint), Vec<(f64, u32)>> = BTreeMap::new();
        for p in &pkts {
            per_flow
                .entry((Endpoint::new(p.src_ip, p.src_port), Endpoint::new(p.dst_ip, p.dst_port)))
                .or_default()
                .push((p.timestamp, p.payload_bytes));
        }
        let mut per_src: BTreeMap<Endpoint, Vec<[f64; N_FEATURES]>> = BTreeMap::new();
        for ((src, _), v) in &per_flow {
            per_src.entry(*src).or_default().push(oracle_flow(v));
        }
        let got = group_activity_flows(&group_basic_flows(&pkts));
        prop_assert_eq!(got.len(), per_src.len());
        for a in &got {
            let flows = &per_src[&a.source];
            for j in 0..N_FEATURES - 1 {
                let want = flows.iter().map(|f| f[j]).sum::<f64>() / flows.len() as f64;
                prop_assert!((a.features[j] - want).abs() <= 1e-9 * want.abs().max(1.0), "feature {} {} vs {}", j, a.features[j], want);
            }
            prop_assert_eq!(a.features[N_FEATURES - 1], flows.len() as f64);
        }
    }

    #[test]
    fn packet_order_is_irrelevant(pkts in packets(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = pkts.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = group_activity_flows(&group_basic_flows(&pkts));
        let b = group_activity_flows(&group_basic_flows(&shuffled));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.source, y.source);
            prop_assert_eq!(x.label, y.label);
            for j in 0..N_FEATURES {
                prop_assert!((x.features[j] - y.features[j]).abs() <= 1e-9 * x.features[j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn labels_project_to_one_binary_class(pkts in packets()) {
        for a in group_activity_flows(&group_basic_flows(&pkts)) {
            let b = a.label.binary();
            prop_assert!(b == BinaryClass::Benign || b == BinaryClass::Attack);
            prop_assert_eq!(b == BinaryClass::Attack, a.label.is_attack());
        }
    }

    #[test]
    fn csv_round_trip(pkts in packets(), macs in any::<bool>()) {
        let pkts: Vec<PacketRecord> = pkts
            .into_iter()
            .map(|mut p| {
                if macs {
                    p.src_mac = Some(MacAddr::for_ip(p.src_ip));
                    p.dst_mac = Some(MacAddr([2, 0, 0, 0, 0, 9]));
                }
                p
            })
            .collect();
        let mut buf = Vec::new();
        write_packets(&mut buf, &pkts, macs).unwrap();
        let back = read_packets(buf.as_slice()).unwrap();
        prop_assert_eq!(back, pkts);
    }
}

#[test]
fn single_flow_aggregates_to_itself() {
    let pkts = vec![
        packet(0.0, (1, 1000), (2, 80), 100, Label::Benign),
        packet(0.5, (1, 1000), (2, 80), 300, Label::Benign),
        packet(2.0, (1, 1000), (2, 80), 200, Label::Benign),
    ];
    let basic = group_basic_flows(&pkts);
    assert_eq!(basic.len(), 1);
    let act = group_activity_flows(&basic);
    assert_eq!(act.len(), 1);
    assert_eq!(act[0].features, basic[0].features);
    assert_eq!(act[0].basic_flow_count, 1);
}

#[test]
fn majority_label_wins_per_flow() {
    let pkts = vec![
        packet(0.0, (1, 1000), (2, 80), 10, Label::FastDDoS),
        packet(0.1, (1, 1000), (2, 80), 10, Label::FastDDoS),
        packet(0.2, (1, 1000), (2, 80), 10, Label::Benign),
    ];
    assert_eq!(group_basic_flows(&pkts)[0].label, Label::FastDDoS);
}

#[test]
fn bad_header_is_rejected() {
    let text = "time,src_ip,src_port,dst_ip,dst_port,protocol,payload_bytes,label\n";
    assert!(read_packets(text.as_bytes()).is_err());
}
