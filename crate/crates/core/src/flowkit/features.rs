//! Per-flow statistics and the fixed feature schema.

/// Number of features in every flow vector.
pub const N_FEATURES: usize = 8;

/// Ordered feature names; column order of every exported flow table.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "flow_duration",
    "packets_per_second",
    "bytes_per_second",
    "mean_packet_size",
    "mean_inter_arrival",
    "std_inter_arrival",
    "total_packets",
    "distinct_dst_ports",
];

pub const FLOW_DURATION: usize = 0;
pub const PACKETS_PER_SECOND: usize = 1;
pub const BYTES_PER_SECOND: usize = 2;
pub const MEAN_PACKET_SIZE: usize = 3;
pub const MEAN_INTER_ARRIVAL: usize = 4;
pub const STD_INTER_ARRIVAL: usize = 5;
pub const TOTAL_PACKETS: usize = 6;
pub const DISTINCT_DST_PORTS: usize = 7;

/// Rates divide by at least this many seconds.
pub const MIN_DURATION: f64 = 1e-6;

pub type FeatureVector = [f64; N_FEATURES];

/// Index of a feature by name.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// Computes the feature vector of one basic flow from its member packets,
/// given as `(timestamp, payload_bytes)` pairs in any order.
///
/// Panics on an empty slice; callers only build flows from observed packets.
pub fn basic_flow_features(packets: &[(f64, u32)]) -> FeatureVector {
    assert!(!packets.is_empty(), "a basic flow has at least one packet");
    let mut times: Vec<f64> = packets.iter().map(|p| p.0).collect();
    times.sort_by(f64::total_cmp);
    let n = packets.len() as f64;
    let bytes: f64 = packets.iter().map(|p| f64::from(p.1)).sum();
    let duration = times[times.len() - 1] - times[0];
    let effective = duration.max(MIN_DURATION);

    let (iat_mean, iat_std) = if times.len() < 2 {
        (0.0, 0.0)
    } else {
        let gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let m = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / m;
        let var = gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / m;
        (mean, var.sqrt())
    };

    let mut v = [0.0; N_FEATURES];
    v[FLOW_DURATION] = duration;
    v[PACKETS_PER_SECOND] = n / effective;
    v[BYTES_PER_SECOND] = bytes / effective;
    v[MEAN_PACKET_SIZE] = bytes / n;
    v[MEAN_INTER_ARRIVAL] = iat_mean;
    v[STD_INTER_ARRIVAL] = iat_std;
    v[TOTAL_PACKETS] = n;
    v[DISTINCT_DST_PORTS] = 1.0;
    v
}
