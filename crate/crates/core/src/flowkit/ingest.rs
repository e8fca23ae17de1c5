//! Ingestion of externally extracted flow tables (CICIDS2017-style CSVs).
//!
//! Each row becomes one [`BasicFlow`]. A [`ColumnMapping`] names the endpoint
//! and label columns and maps feature columns onto schema slots; any other
//! column is ignored and unmapped slots stay zero.

use std::collections::BTreeMap;
use std::io::Read;
use std::net::Ipv4Addr;

use serde::{Deserialize, Serialize};

use super::features::{feature_index, DISTINCT_DST_PORTS, N_FEATURES};
use super::{BasicFlow, FlowError, FlowKey, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointColumns {
    pub src_ip: String,
    pub src_port: String,
    pub dst_ip: String,
    pub dst_port: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub endpoints: EndpointColumns,
    /// CSV column name → feature name.
    #[serde(default)]
    pub features: BTreeMap<String, String>,
    /// Optional multiplier per feature name (e.g. microseconds → seconds).
    #[serde(default)]
    pub scale: BTreeMap<String, f64>,
    /// Raw label text → crate label. Empty means parse labels by name.
    /// Rows whose label is not listed are skipped.
    #[serde(default)]
    pub labels: BTreeMap<String, Label>,
}

impl ColumnMapping {
    pub fn from_toml(text: &str) -> Result<Self, FlowError> {
        let m: ColumnMapping =
            toml::from_str(text).map_err(|e| FlowError::Parse(format!("column mapping: {e}")))?;
        for slot in m.features.values().chain(m.scale.keys()) {
            if feature_index(slot).is_none() {
                return Err(FlowError::Parse(format!(
                    "column mapping names unknown feature `{slot}`"
                )));
            }
        }
        Ok(m)
    }

    /// Mapping for the column names used by CICFlowMeter / CICIDS2017.
    pub fn cicids2017() -> Self {
        let features = [
            ("Flow Duration", "flow_duration"),
            ("Flow Packets/s", "packets_per_second"),
            ("Flow Bytes/s", "bytes_per_second"),
            ("Average Packet Size", "mean_packet_size"),
            ("Flow IAT Mean", "mean_inter_arrival"),
            ("Flow IAT Std", "std_inter_arrival"),
            ("Total Fwd Packets", "total_packets"),
        ];
        let scale = [
            ("flow_duration", 1e-6),
            ("mean_inter_arrival", 1e-6),
            ("std_inter_arrival", 1e-6),
        ];
        ColumnMapping {
            endpoints: EndpointColumns {
                src_ip: "Source IP".into(),
                src_port: "Source Port".into(),
                dst_ip: "Destination IP".into(),
                dst_port: "Destination Port".into(),
                label: "Label".into(),
            },
            features: features
                .iter()
                .map(|(c, s)| (c.to_string(), s.to_string()))
                .collect(),
            scale: scale.iter().map(|(s, k)| (s.to_string(), *k)).collect(),
            labels: [
                ("BENIGN", Label::Benign),
                ("DDoS", Label::DDoS),
                ("PortScan", Label::PortScan),
            ]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestStats {
    pub rows: usize,
    pub skipped_label: usize,
    /// Non-finite cells replaced by zero.
    pub non_finite: usize,
}

/// Reads a flow table with `mapping`. Headers are matched after trimming.
pub fn read_flow_table<R: Read>(
    reader: R,
    mapping: &ColumnMapping,
) -> Result<(Vec<BasicFlow>, IngestStats), FlowError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let col = |name: &str| -> Result<usize, FlowError> {
        headers
            .iter()
            .position(|h| h == name.trim())
            .ok_or_else(|| FlowError::Schema {
                position: headers.len(),
                expected: name.to_string(),
                found: "<missing>".into(),
            })
    };
    let e = &mapping.endpoints;
    let (c_sip, c_sport, c_dip, c_dport, c_label) = (
        col(&e.src_ip)?,
        col(&e.src_port)?,
        col(&e.dst_ip)?,
        col(&e.dst_port)?,
        col(&e.label)?,
    );
    let mut slots: Vec<(usize, usize, f64)> = Vec::new();
    for (column, slot) in &mapping.features {
        let s = feature_index(slot)
            .ok_or_else(|| FlowError::Parse(format!("unknown feature `{slot}`")))?;
        let k = mapping.scale.get(slot).copied().unwrap_or(1.0);
        slots.push((col(column)?, s, k));
    }

    let mut stats = IngestStats::default();
    let mut flows = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        stats.rows += 1;
        let get = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let raw_label = get(c_label);
        let label = if mapping.labels.is_empty() {
            raw_label.parse::<Label>().ok()
        } else {
            mapping.labels.get(raw_label).copied()
        };
        let Some(label) = label else {
            stats.skipped_label += 1;
            continue;
        };
        let parse_err =
            |what: &str, v: &str| FlowError::Parse(format!("line {line}: bad {what} `{v}`"));
        let key = FlowKey {
            src_ip: get(c_sip)
                .parse::<Ipv4Addr>()
                .map_err(|_| parse_err("source ip", get(c_sip)))?,
            src_port: get(c_sport)
                .parse::<u16>()
                .map_err(|_| parse_err("source port", get(c_sport)))?,
            dst_ip: get(c_dip)
                .parse::<Ipv4Addr>()
                .map_err(|_| parse_err("destination ip", get(c_dip)))?,
            dst_port: get(c_dport)
                .parse::<u16>()
                .map_err(|_| parse_err("destination port", get(c_dport)))?,
        };
        let mut features = [0.0; N_FEATURES];
        features[DISTINCT_DST_PORTS] = 1.0;
        for &(c, s, k) in &slots {
            let v = get(c).parse::<f64>().unwrap_or(f64::NAN) * k;
            if v.is_finite() {
                features[s] = v;
            } else {
                stats.non_finite += 1;
                features[s] = 0.0;
            }
        }
        flows.push(BasicFlow {
            key,
            features,
            packet_count: 1,
            label,
        });
    }
    Ok((flows, stats))
}
