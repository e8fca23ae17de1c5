//! Text rendering of experiment results.

use std::fmt::Write as _;
use std::io::Write;

use super::experiment::{Dataset, SizeRow, TwoLayerOutcome};
use super::metrics::Metrics;
use crate::flowkit::{Endpoint, Label};

/// One line of `metrics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub run_id: String,
    pub stage: String,
    pub algorithm: String,
    pub variant: String,
    pub train_size: usize,
    pub accuracy: f64,
    pub f1: f64,
}

pub const METRIC_COLUMNS: [&str; 7] = [
    "run_id",
    "stage",
    "algorithm",
    "variant",
    "train_size",
    "accuracy",
    "f1",
];

pub fn write_metric_rows<W: Write>(w: W, rows: &[MetricRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(METRIC_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.run_id.clone(),
            r.stage.clone(),
            r.algorithm.clone(),
            r.variant.clone(),
            r.train_size.to_string(),
            r.accuracy.to_string(),
            r.f1.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_metric_rows<R: std::io::Read>(r: R) -> Result<Vec<MetricRow>, String> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().ne(METRIC_COLUMNS) {
        return Err(format!(
            "unexpected metrics header `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| format!("bad number `{}`", &rec[i]))
        };
        rows.push(MetricRow {
            run_id: rec[0].to_string(),
            stage: rec[1].to_string(),
            algorithm: rec[2].to_string(),
            variant: rec[3].to_string(),
            train_size: rec[4]
                .parse()
                .map_err(|_| format!("bad train_size `{}`", &rec[4]))?,
            accuracy: num(5)?,
            f1: num(6)?,
        });
    }
    Ok(rows)
}

/// Everything a run reports: metric blocks, suspicious nodes, config echo.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub run_id: String,
    pub seed: u64,
    pub model: String,
    pub config_echo: String,
    pub nodes: usize,
    pub edges: usize,
    pub attack_nodes: usize,
    pub noflow_fell_back: bool,
    pub outcome: TwoLayerOutcome,
    /// Endpoint of every graph node, for the suspicious list.
    endpoints: Vec<Endpoint>,
}

fn confusion_block(out: &mut String, m: &Metrics, names: &[&str]) {
    let _ = writeln!(out, "truth\\pred,{}", names.join(","));
    for (t, row) in m.confusion.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{},{}", names[t], cells.join(","));
    }
}

impl ExperimentReport {
    pub fn new(
        run_id: &str,
        seed: u64,
        model: &str,
        config_echo: &str,
        data: &Dataset,
        outcome: TwoLayerOutcome,
    ) -> Self {
        ExperimentReport {
            run_id: run_id.to_string(),
            seed,
            model: model.to_string(),
            config_echo: config_echo.to_string(),
            nodes: data.graph.n(),
            edges: data.graph.adjacency.edge_count(),
            attack_nodes: data.graph.labels.iter().filter(|l| l.is_attack()).count(),
            noflow_fell_back: data.noflow_fell_back,
            outcome,
            endpoints: data.graph.nodes.iter().map(|n| n.source).collect(),
        }
    }

    /// Flagged nodes with their identified class, in graph order.
    pub fn suspicious(&self) -> Vec<(Endpoint, Option<Label>)> {
        match &self.outcome.identification {
            Ok(id) => id
                .nodes
                .iter()
                .zip(&id.predictions)
                .map(|(&i, &l)| (self.endpoints[i], Some(l)))
                .collect(),
            Err(_) => self
                .outcome
                .detection
                .attack_nodes()
                .into_iter()
                .map(|i| (self.endpoints[i], None))
                .collect(),
        }
    }

    pub fn write_suspicious<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["src_ip", "src_port", "label"])?;
        for (e, l) in self.suspicious() {
            out.write_record([
                e.ip.to_string(),
                e.port.to_string(),
                l.map_or("Attack", Label::as_str).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn metric_rows(&self) -> Vec<MetricRow> {
        let row = |stage: &str,
                   algorithm: &str,
                   variant: &str,
                   train_size: usize,
                   accuracy: f64,
                   f1: f64| MetricRow {
            run_id: self.run_id.clone(),
            stage: stage.into(),
            algorithm: algorithm.into(),
            variant: variant.into(),
            train_size,
            accuracy,
            f1,
        };
        let det = &self.outcome.detection;
        let n_train = det.masks.train_count();
        let mut rows = vec![row(
            "detection",
            &self.model,
            "all",
            n_train,
            det.metrics.accuracy,
            det.metrics.f1,
        )];
        if let Some(rf) = &det.rf {
            rows.push(row("detection", "rf", "all", n_train, rf.accuracy, rf.f1));
        }
        if let Ok(id) = &self.outcome.identification {
            for (algorithm, m) in [
                (self.model.as_str(), id.metrics.as_ref()),
                ("rf", id.rf.as_ref()),
            ] {
                let Some(m) = m else { continue };
                rows.push(row(
                    "identification",
                    algorithm,
                    "all",
                    id.train_count,
                    m.accuracy,
                    m.f1,
                ));
                for (c, label) in id.classes.iter().enumerate() {
                    rows.push(row(
                        "identification",
                        algorithm,
                        label.as_str(),
                        id.train_count,
                        m.class_accuracy(c),
                        m.per_class_f1[c],
                    ));
                }
            }
        }
        rows
    }

    /// Deterministic text body: key=value lines and CSV blocks.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# sdnguard experiment report");
        let _ = writeln!(s, "run_id={}", self.run_id);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "model={}", self.model);
        let _ = writeln!(s, "nodes={}", self.nodes);
        let _ = writeln!(s, "edges={}", self.edges);
        let _ = writeln!(s, "attack_nodes={}", self.attack_nodes);
        let _ = writeln!(s, "noflow_fallback_to_zeros={}", self.noflow_fell_back);

        let det = &self.outcome.detection;
        let _ = writeln!(s, "\n[detection]");
        let _ = writeln!(s, "train_nodes={}", det.masks.train_count());
        let _ = writeln!(s, "test_nodes={}", det.masks.test_count());
        let _ = writeln!(
            s,
            "final_loss={}",
            det.losses.last().copied().unwrap_or(f64::NAN)
        );
        let _ = writeln!(s, "algorithm,accuracy,f1");
        let _ = writeln!(
            s,
            "{},{},{}",
            self.model, det.metrics.accuracy, det.metrics.f1
        );
        if let Some(rf) = &det.rf {
            let _ = writeln!(s, "rf,{},{}", rf.accuracy, rf.f1);
        }
        let _ = writeln!(s, "\n[detection.confusion]");
        confusion_block(&mut s, &det.metrics, &["benign", "attack"]);

        let _ = writeln!(s, "\n[identification]");
        match &self.outcome.identification {
            Err(reason) => {
                let _ = writeln!(s, "skipped={reason}");
            }
            Ok(id) => {
                let names: Vec<&str> = id.classes.iter().map(|l| l.as_str()).collect();
                let _ = writeln!(s, "classes={}", names.join(","));
                let _ = writeln!(s, "degenerate={}", id.degenerate);
                let _ = writeln!(s, "flagged_nodes={}", id.nodes.len());
                let _ = writeln!(s, "train_nodes={}", id.train_count);
                let _ = writeln!(s, "algorithm,class,accuracy,f1");
                for (algorithm, m) in [
                    (self.model.as_str(), id.metrics.as_ref()),
                    ("rf", id.rf.as_ref()),
                ] {
                    let Some(m) = m else { continue };
                    let _ = writeln!(s, "{algorithm},macro,{},{}", m.accuracy, m.f1);
                    for (c, name) in names.iter().enumerate() {
                        let _ = writeln!(
                            s,
                            "{algorithm},{name},{},{}",
                            m.class_accuracy(c),
                            m.per_class_f1[c]
                        );
                    }
                }
                if let Some(m) = &id.metrics {
                    let _ = writeln!(s, "\n[identification.confusion]");
                    confusion_block(&mut s, m, &names);
                }
            }
        }

        let _ = writeln!(s, "\n[suspicious]");
        let _ = writeln!(s, "src_ip,src_port,label");
        for (e, l) in self.suspicious() {
            let _ = writeln!(
                s,
                "{},{},{}",
                e.ip,
                e.port,
                l.map_or("Attack", Label::as_str)
            );
        }

        let _ = writeln!(s, "\n[config]");
        s.push_str(&self.config_echo);
        if !self.config_echo.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

/// Rows of the training-size experiment.
pub fn size_rows(run_id: &str, model: &str, rows: &[SizeRow]) -> Vec<MetricRow> {
    let mut out = Vec::new();
    for r in rows {
        for (algorithm, m) in [(model, Some(&r.gcn)), ("rf", r.rf.as_ref())] {
            if let Some(m) = m {
                out.push(MetricRow {
                    run_id: run_id.to_string(),
                    stage: "training_size".into(),
                    algorithm: algorithm.into(),
                    variant: "all".into(),
                    train_size: r.size,
                    accuracy: m.accuracy,
                    f1: m.f1,
                });
            }
        }
    }
    out
}
