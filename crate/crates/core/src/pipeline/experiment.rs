use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::forest::{ForestConfig, RandomForest};
use super::metrics::{evaluate, Averaging, Metrics};
use super::split::{split, Masks, SplitSpec};
use super::PipelineError;
use crate::flowkit::{
    dedupe_mixed_attackers, group_activity_flows, group_basic_flows, known_endpoints,
    synthesize_noflow_nodes, BasicFlow, BinaryClass, Label, NoflowMode, PacketRecord, Scaling,
    Standardizer,
};
use crate::gcn::{self, Hyperparams};
use crate::netgraph::{
    build_graph, build_hypergraph, hypergraph_expand, normalized_adjacency, Adjacency,
    HyperedgeGrouping, TrafficGraph,
};
use crate::rng;

/// Characterized capture: the traffic graph plus the basic flows it was
/// built from.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: TrafficGraph,
    pub basic: Vec<BasicFlow>,
    pub noflow_fell_back: bool,
}

/// Packets → basic flows → activity flows (+ no-flow nodes) → graph.
pub fn characterize_packets(
    packets: &[PacketRecord],
    noflow: NoflowMode,
    seed: u64,
) -> Result<Dataset, PipelineError> {
    characterize_flows(group_basic_flows(packets), noflow, seed)
}

/// Same as [`characterize_packets`] for already-extracted basic flows.
pub fn characterize_flows(
    basic: Vec<BasicFlow>,
    noflow: NoflowMode,
    seed: u64,
) -> Result<Dataset, PipelineError> {
    let basic = dedupe_mixed_attackers(&basic);
    let mut nodes = group_activity_flows(&basic);
    let synth = synthesize_noflow_nodes(&known_endpoints(&basic), &nodes, noflow, seed);
    nodes.extend(synth.nodes);
    let graph = build_graph(&nodes, &basic)?;
    Ok(Dataset {
        graph,
        basic,
        noflow_fell_back: synth.fell_back_to_zeros,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Gcn,
    /// GCN over the hypergraph expansion instead of the plain traffic graph.
    HyperGcn,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Gcn => "gcn",
            ModelKind::HyperGcn => "hypergcn",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(ModelKind::Gcn),
            "hypergcn" => Ok(ModelKind::HyperGcn),
            _ => Err(format!("unknown model `{s}` (expected gcn or hypergcn)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub model: ModelKind,
    pub scaling: Scaling,
    pub noflow: NoflowMode,
    pub baseline_rf: bool,
    pub detect: Hyperparams,
    pub identify: Hyperparams,
    pub detect_split: SplitSpec,
    pub identify_split: SplitSpec,
    pub forest: ForestConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            model: ModelKind::Gcn,
            scaling: Scaling::default(),
            noflow: NoflowMode::default(),
            baseline_rf: false,
            detect: Hyperparams::default(),
            identify: Hyperparams {
                layers: 3,
                ..Hyperparams::default()
            },
            detect_split: SplitSpec::ratio(),
            identify_split: SplitSpec::ratio(),
            forest: ForestConfig::default(),
        }
    }
}

/// Adjacency the model propagates over, on the full graph.
pub fn propagation_graph(
    data: &Dataset,
    x: &Array2<f64>,
    kind: ModelKind,
) -> Result<Adjacency, PipelineError> {
    Ok(match kind {
        ModelKind::Gcn => data.graph.adjacency.clone(),
        ModelKind::HyperGcn => {
            let h = build_hypergraph(&data.graph, &data.basic, HyperedgeGrouping::ByDestination)?;
            hypergraph_expand(&h, x)?
        }
    })
}

fn rows_of(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| i)
        .collect()
}

fn evaluate_on(
    pred: &[usize],
    truth: &[usize],
    mask: &[bool],
    classes: usize,
    avg: Averaging,
) -> Result<Metrics, PipelineError> {
    let rows = rows_of(mask);
    let p: Vec<usize> = rows.iter().map(|&i| pred[i]).collect();
    let t: Vec<usize> = rows.iter().map(|&i| truth[i]).collect();
    evaluate(&p, &t, classes, avg)
}

/// Trains a GCN and (optionally) the forest on shared masks.
struct Trained {
    predictions: Vec<usize>,
    metrics: Metrics,
    rf: Option<Metrics>,
    losses: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn fit_and_score(
    x_raw: &Array2<f64>,
    adjacency: &Adjacency,
    targets: &[usize],
    masks: &Masks,
    classes: usize,
    hp: &Hyperparams,
    cfg: &PipelineConfig,
    avg: Averaging,
    stage: &'static str,
) -> Result<Trained, PipelineError> {
    let scaler = Standardizer::fit(x_raw, &masks.train, cfg.scaling);
    let x = scaler.transform(x_raw);
    let a_hat = normalized_adjacency(adjacency);
    let trained = gcn::train(&x, &a_hat, targets, &masks.train, classes, hp)
        .map_err(|e| PipelineError::Model { stage, source: e })?;
    let predictions = gcn::predict(&trained.model, &x, &a_hat)
        .map_err(|e| PipelineError::Model { stage, source: e })?;
    let metrics = evaluate_on(&predictions, targets, &masks.test, classes, avg)?;
    let rf = if cfg.baseline_rf {
        let forest = RandomForest::fit(&x, targets, &rows_of(&masks.train), classes, &cfg.forest)?;
        Some(evaluate_on(
            &forest.predict(&x),
            targets,
            &masks.test,
            classes,
            avg,
        )?)
    } else {
        None
    };
    Ok(Trained {
        predictions,
        metrics,
        rf,
        losses: trained.losses,
    })
}

#[derive(Debug, Clone)]
pub struct Detection {
    /// Binary prediction for every node (train nodes included).
    pub predictions: Vec<BinaryClass>,
    pub masks: Masks,
    pub metrics: Metrics,
    pub rf: Option<Metrics>,
    pub losses: Vec<f64>,
}

impl Detection {
    pub fn attack_nodes(&self) -> Vec<usize> {
        self.predictions
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == BinaryClass::Attack)
            .map(|(i, _)| i)
            .collect()
    }
}

fn stage_seed(seed: u64, stage: &str) -> u64 {
    rng::derive_seed(seed, stage)
}

/// Layer 1: benign vs attack over the whole graph.
pub fn detect(
    data: &Dataset,
    cfg: &PipelineConfig,
    split_spec: SplitSpec,
    seed: u64,
) -> Result<Detection, PipelineError> {
    let g = &data.graph;
    let targets: Vec<usize> = g.labels.iter().map(|l| l.binary() as usize).collect();
    let seed = stage_seed(seed, "detect");
    let masks = split(&targets, &vec![true; g.n()], 2, split_spec, seed)?;
    let hp = Hyperparams {
        seed,
        ..cfg.detect.clone()
    };
    let adjacency = propagation_graph(
        data,
        &Standardizer::fit(&g.features, &masks.train, cfg.scaling).transform(&g.features),
        cfg.model,
    )?;
    let t = fit_and_score(
        &g.features,
        &adjacency,
        &targets,
        &masks,
        2,
        &hp,
        cfg,
        Averaging::Binary {
            positive: BinaryClass::Attack as usize,
        },
        "detection",
    )?;
    let predictions = t
        .predictions
        .iter()
        .map(|&p| {
            if p == 1 {
                BinaryClass::Attack
            } else {
                BinaryClass::Benign
            }
        })
        .collect();
    Ok(Detection {
        predictions,
        masks,
        metrics: t.metrics,
        rf: t.rf,
        losses: t.losses,
    })
}

#[derive(Debug, Clone)]
pub struct Identification {
    /// Graph indices of the nodes layer 1 flagged, in graph order.
    pub nodes: Vec<usize>,
    /// Attack class per entry of `nodes`.
    pub predictions: Vec<Label>,
    /// Class order used by the metrics.
    pub classes: Vec<Label>,
    /// `None` when degenerate or when no test node is left.
    pub metrics: Option<Metrics>,
    pub rf: Option<Metrics>,
    /// Fewer than two attack classes among the flagged nodes.
    pub degenerate: bool,
    pub train_count: usize,
}

/// Layer 2: attack class of every flagged node, on the subgraph induced by
/// the flagged nodes. Flagged nodes whose ground truth is benign get a
/// prediction but take part in neither training nor scoring.
pub fn identify(
    data: &Dataset,
    flagged: &[usize],
    cfg: &PipelineConfig,
    split_spec: SplitSpec,
    seed: u64,
) -> Result<Identification, PipelineError> {
    if flagged.is_empty() {
        return Err(PipelineError::Config(
            "identification needs at least one flagged node".into(),
        ));
    }
    let mut nodes = flagged.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let g = &data.graph;
    let truth: Vec<Label> = nodes.iter().map(|&i| g.labels[i]).collect();
    let eligible: Vec<bool> = truth.iter().map(|l| l.is_attack()).collect();
    let mut classes: Vec<Label> = truth.iter().copied().filter(|l| l.is_attack()).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.is_empty() {
        return Err(PipelineError::Config(
            "no flagged node carries an attack label".into(),
        ));
    }
    if classes.len() == 1 {
        return Ok(Identification {
            predictions: vec![classes[0]; nodes.len()],
            nodes,
            classes,
            metrics: None,
            rf: None,
            degenerate: true,
            train_count: 0,
        });
    }
    let targets: Vec<usize> = truth
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap_or(0))
        .collect();
    let seed = stage_seed(seed, "identify");
    let masks = split(&targets, &eligible, classes.len(), split_spec, seed)?;
    let hp = Hyperparams {
        seed,
        ..cfg.identify.clone()
    };
    let x_full =
        Standardizer::fit(&g.features, &vec![true; g.n()], cfg.scaling).transform(&g.features);
    let adjacency = propagation_graph(data, &x_full, cfg.model)?.induced(&nodes);
    let x_sub = g.features.select(Axis(0), &nodes);
    let train_count = masks.train_count();
    if masks.test_count() == 0 {
        return Err(PipelineError::Split(
            "identification split left no test node".into(),
        ));
    }
    let t = fit_and_score(
        &x_sub,
        &adjacency,
        &targets,
        &masks,
        classes.len(),
        &hp,
        cfg,
        Averaging::Macro,
        "identification",
    )?;
    Ok(Identification {
        predictions: t.predictions.iter().map(|&p| classes[p]).collect(),
        nodes,
        classes,
        metrics: Some(t.metrics),
        rf: t.rf,
        degenerate: false,
        train_count,
    })
}

#[derive(Debug, Clone)]
pub struct TwoLayerOutcome {
    pub detection: Detection,
    /// `Err` carries the reason identification was skipped.
    pub identification: Result<Identification, String>,
}

/// Detection followed by identification on the flagged nodes.
pub fn run_two_layer(
    data: &Dataset,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<TwoLayerOutcome, PipelineError> {
    let detection = detect(data, cfg, cfg.detect_split, seed)?;
    let flagged = detection.attack_nodes();
    let identification = if flagged.is_empty() {
        Err("no node was flagged as attack".to_string())
    } else {
        match identify(data, &flagged, cfg, cfg.identify_split, seed) {
            Ok(id) => Ok(id),
            Err(e @ (PipelineError::Config(_) | PipelineError::Split(_))) => Err(e.to_string()),
            Err(e) => return Err(e),
        }
    };
    Ok(TwoLayerOutcome {
        detection,
        identification,
    })
}

#[derive(Debug, Clone)]
pub struct SizeRow {
    pub size: usize,
    pub gcn: Metrics,
    pub rf: Option<Metrics>,
}

/// Repeats detection with `FixedSampling` at each per-class size. Sizes
/// that are zero or exceed a class population are skipped with a warning.
pub fn vary_training_size(
    data: &Dataset,
    sizes: &[usize],
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<(Vec<SizeRow>, Vec<String>), PipelineError> {
    let mut population = [0usize; 2];
    for l in &data.graph.labels {
        population[l.binary() as usize] += 1;
    }
    let smallest = population[0].min(population[1]);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &size in sizes {
        if size == 0 {
            warnings.push("training size 0 skipped".to_string());
            continue;
        }
        if size > smallest {
            warnings.push(format!(
                "training size {size} skipped: smallest class has {smallest} nodes"
            ));
            continue;
        }
        let d = detect(
            data,
            cfg,
            SplitSpec::FixedSampling { per_class: size },
            seed,
        )?;
        rows.push(SizeRow {
            size,
            gcn: d.metrics,
            rf: d.rf,
        });
    }
    Ok((rows, warnings))
}
