//! Debug dump: `i j weight` edge list plus a node table.

use std::io::Write;

use super::{Adjacency, TrafficGraph};

pub fn write_edge_list<W: Write>(mut w: W, a: &Adjacency) -> std::io::Result<()> {
    for (i, j, weight) in a.edges() {
        writeln!(w, "{i} {j} {weight}")?;
    }
    Ok(())
}

pub fn write_node_table<W: Write>(mut w: W, g: &TrafficGraph) -> std::io::Result<()> {
    writeln!(w, "index,src_ip,src_port,label,basic_flow_count")?;
    for (i, n) in g.nodes.iter().enumerate() {
        writeln!(
            w,
            "{i},{},{},{},{}",
            n.source.ip, n.source.port, n.label, n.basic_flow_count
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_lists_each_edge_once() {
        let a = Adjacency::from_weighted_edges(3, [(0, 1, 1.0), (2, 1, 0.5)]).unwrap();
        let mut out = Vec::new();
        write_edge_list(&mut out, &a).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1 1\n1 2 0.5\n");
    }
}
