//! Packet-trace and activity-flow CSV formats.

use std::io::{Read, Write};
use std::net::Ipv4Addr;

use super::features::FEATURE_NAMES;
use super::{ActivityFlow, FlowError, Label, MacAddr, PacketRecord, Protocol};

pub const PACKET_COLUMNS: [&str; 8] = [
    "timestamp",
    "src_ip",
    "src_port",
    "dst_ip",
    "dst_port",
    "protocol",
    "payload_bytes",
    "label",
];
pub const MAC_COLUMNS: [&str; 2] = ["src_mac", "dst_mac"];

/// Reads a packet trace. Accepts the base header or the base header
/// followed by `src_mac,dst_mac`.
pub fn read_packets<R: Read>(reader: R) -> Result<Vec<PacketRecord>, FlowError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (pos, expected) in PACKET_COLUMNS.iter().enumerate() {
        match headers.get(pos) {
            Some(found) if found == *expected => {}
            found => {
                return Err(FlowError::Schema {
                    position: pos,
                    expected: (*expected).to_string(),
                    found: found.unwrap_or("<missing>").to_string(),
                })
            }
        }
    }
    let with_macs = match headers.len() {
        8 => false,
        10 => {
            for (i, expected) in MAC_COLUMNS.iter().enumerate() {
                let found = &headers[8 + i];
                if found != *expected {
                    return Err(FlowError::Schema {
                        position: 8 + i,
                        expected: (*expected).to_string(),
                        found: found.to_string(),
                    });
                }
            }
            true
        }
        n => {
            return Err(FlowError::Schema {
                position: n.min(8),
                expected: "end of header or src_mac".into(),
                found: headers.get(8).unwrap_or("<missing>").to_string(),
            })
        }
    };

    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let ctx = |e: FlowError| FlowError::Parse(format!("line {line}: {e}"));
        let packet = PacketRecord {
            timestamp: parse_num::<f64>(field(0), "timestamp").map_err(ctx)?,
            src_ip: parse_num::<Ipv4Addr>(field(1), "src_ip").map_err(ctx)?,
            src_port: parse_num::<u16>(field(2), "src_port").map_err(ctx)?,
            dst_ip: parse_num::<Ipv4Addr>(field(3), "dst_ip").map_err(ctx)?,
            dst_port: parse_num::<u16>(field(4), "dst_port").map_err(ctx)?,
            protocol: field(5).parse::<Protocol>().map_err(ctx)?,
            payload_bytes: parse_num::<u32>(field(6), "payload_bytes").map_err(ctx)?,
            label: field(7).parse::<Label>().map_err(ctx)?,
            src_mac: if with_macs {
                Some(field(8).parse::<MacAddr>().map_err(ctx)?)
            } else {
                None
            },
            dst_mac: if with_macs {
                Some(field(9).parse::<MacAddr>().map_err(ctx)?)
            } else {
                None
            },
        };
        packet.validate().map_err(ctx)?;
        out.push(packet);
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, FlowError> {
    s.parse::<T>()
        .map_err(|_| FlowError::Parse(format!("bad {what} `{s}`")))
}

/// Writes a packet trace. MAC columns are emitted when `with_macs` is set;
/// packets without MACs then get an all-zero address.
pub fn write_packets<W: Write>(
    writer: W,
    packets: &[PacketRecord],
    with_macs: bool,
) -> Result<(), FlowError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = PACKET_COLUMNS.to_vec();
    if with_macs {
        header.extend(MAC_COLUMNS);
    }
    w.write_record(&header)?;
    let zero = MacAddr([0; 6]);
    for p in packets {
        let mut row = vec![
            p.timestamp.to_string(),
            p.src_ip.to_string(),
            p.src_port.to_string(),
            p.dst_ip.to_string(),
            p.dst_port.to_string(),
            p.protocol.as_str().to_string(),
            p.payload_bytes.to_string(),
            p.label.as_str().to_string(),
        ];
        if with_macs {
            row.push(p.src_mac.unwrap_or(zero).to_string());
            row.push(p.dst_mac.unwrap_or(zero).to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Exports activity flows: feature columns, then `src_ip,src_port,label`.
pub fn write_activity_flows<W: Write>(writer: W, flows: &[ActivityFlow]) -> Result<(), FlowError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = FEATURE_NAMES.to_vec();
    header.extend(["src_ip", "src_port", "label"]);
    w.write_record(&header)?;
    for f in flows {
        let mut row: Vec<String> = f.features.iter().map(|x| x.to_string()).collect();
        row.push(f.source.ip.to_string());
        row.push(f.source.port.to_string());
        row.push(f.label.as_str().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRACE: &str = "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,payload_bytes,label\n\
                         0.5,10.0.0.1,1234,10.0.0.2,80,TCP,100,Benign\n\
                         1.25,10.0.0.3,5000,10.0.0.2,80,UDP,64,FastDDoS\n";

    #[test]
    fn reads_base_schema() {
        let p = read_packets(TRACE.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].label, Label::FastDDoS);
        assert_eq!(p[1].protocol, Protocol::Udp);
        assert_eq!(p[0].src_mac, None);
    }

    #[test]
    fn round_trip_with_macs() {
        let mut p = read_packets(TRACE.as_bytes()).unwrap();
        p[0].src_mac = Some(MacAddr([2, 0, 0, 0, 0, 1]));
        p[0].dst_mac = Some(MacAddr([2, 0, 0, 0, 0, 2]));
        p[1].src_mac = Some(MacAddr([2, 0, 0, 0, 0, 3]));
        p[1].dst_mac = Some(MacAddr([0xaa, 0, 0, 0, 0, 2]));
        let mut buf = Vec::new();
        write_packets(&mut buf, &p, true).unwrap();
        assert_eq!(read_packets(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn names_first_bad_column() {
        let bad = "timestamp,source,src_port,dst_ip,dst_port,protocol,payload_bytes,label\n";
        match read_packets(bad.as_bytes()) {
            Err(FlowError::Schema {
                position, found, ..
            }) => {
                assert_eq!(position, 1);
                assert_eq!(found, "source");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_timestamp() {
        let bad = "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,payload_bytes,label\n\
                   -1,10.0.0.1,1,10.0.0.2,80,TCP,1,Benign\n";
        assert!(read_packets(bad.as_bytes()).is_err());
    }

    #[test]
    fn rejects_out_of_range_port() {
        let bad = "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,payload_bytes,label\n\
                   0,10.0.0.1,70000,10.0.0.2,80,TCP,1,Benign\n";
        assert!(read_packets(bad.as_bytes()).is_err());
    }
}
