//! Batch versus incremental timing sweeps over update ratios.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use teamsim_core::{
    batch_topk_with, BatchOptions, Capacity, DataGraph, DataUpdate, IncrementalEngine, LabelId, NodeId, PNodeId,
    PatternGraph, PatternUpdate, QueryResult,
};

/// Which side of the input an update sweep changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum UpdateKind {
    Pattern,
    Data,
    Both,
    Continuous,
}

impl std::fmt::Display for UpdateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            UpdateKind::Pattern => "pattern",
            UpdateKind::Data => "data",
            UpdateKind::Both => "both",
            UpdateKind::Continuous => "continuous",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub kind: UpdateKind,
    pub ratio: f64,
    pub batch_ms: f64,
    pub incremental_ms: f64,
    pub speedup: f64,
    pub affected_balls: usize,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "kind,ratio,batch_ms,incremental_ms,speedup,affected_balls";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{:.3},{:.3},{:.3},{}",
            self.kind, self.ratio, self.batch_ms, self.incremental_ms, self.speedup, self.affected_balls
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("batch and incremental results differ at ratio {0}")]
    Mismatch(f64),
    #[error(transparent)]
    Engine(#[from] teamsim_core::EngineError),
    #[error(transparent)]
    Query(#[from] teamsim_core::QueryError),
}

/// Size of a data graph as nodes plus edges.
pub fn graph_size(g: &DataGraph) -> usize {
    g.node_count() + g.edge_count()
}

/// A valid data update set of `count` units: mostly edge insertions and deletions, some node churn.
pub fn random_data_updates(g: &DataGraph, labels: u32, count: usize, seed: u64) -> Vec<DataUpdate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = g.clone();
    let mut live: Vec<NodeId> = cur.nodes().collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let roll = rng.gen_range(0..100);
        let u = if roll < 45 {
            let a = *live.choose(&mut rng).expect("live nodes");
            let b = *live.choose(&mut rng).expect("live nodes");
            if a == b || cur.has_edge(a, b) || !cur.contains_node(a) || !cur.contains_node(b) {
                continue;
            }
            DataUpdate::InsertEdge(a, b)
        } else if roll < 90 {
            let a = *live.choose(&mut rng).expect("live nodes");
            let Some(&b) = cur.neighbors(a).choose(&mut rng) else { continue };
            DataUpdate::DeleteEdge(a, b)
        } else if roll < 95 {
            let node = cur.next_node_id();
            live.push(node);
            DataUpdate::InsertNode {
                node,
                labels: vec![LabelId(rng.gen_range(0..labels))],
                anchor: *live[..live.len() - 1].choose(&mut rng).expect("live nodes"),
            }
        } else {
            if live.len() <= 2 {
                continue;
            }
            let i = rng.gen_range(0..live.len());
            DataUpdate::DeleteNode(live.swap_remove(i))
        };
        cur.apply(&u).expect("generated update is valid");
        out.push(u);
    }
    out
}

/// A valid pattern update set of `count` units that keeps the pattern connected.
pub fn random_pattern_updates(p: &PatternGraph, labels: &[LabelId], count: usize, seed: u64) -> Vec<PatternUpdate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let caps = [Capacity::default(), Capacity::bounded(1, 2).expect("valid"), Capacity::bounded(1, 3).expect("valid")];
    let mut cur = p.clone();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let nodes: Vec<PNodeId> = cur.node_ids().collect();
        let u = match rng.gen_range(0..5) {
            0 => {
                let a = *nodes.choose(&mut rng).expect("non-empty");
                let b = *nodes.choose(&mut rng).expect("non-empty");
                if a == b || cur.has_edge(a, b) {
                    continue;
                }
                PatternUpdate::InsertEdge(a, b)
            }
            1 => {
                let edges: Vec<_> = cur.edges().collect();
                let Some(&(a, b)) = edges.choose(&mut rng) else { continue };
                PatternUpdate::DeleteEdge(a, b)
            }
            2 => {
                let node = cur.next_node_id();
                PatternUpdate::InsertNode {
                    node,
                    name: format!("n{}", node.0),
                    label: *labels.choose(&mut rng).expect("labels"),
                    capacity: *caps.choose(&mut rng).expect("caps"),
                    anchor: *nodes.choose(&mut rng).expect("non-empty"),
                }
            }
            3 => {
                if nodes.len() <= 2 {
                    continue;
                }
                PatternUpdate::DeleteNode(*nodes.choose(&mut rng).expect("non-empty"))
            }
            _ => PatternUpdate::SetCapacity(*nodes.choose(&mut rng).expect("non-empty"), *caps.choose(&mut rng).expect("caps")),
        };
        let mut next = cur.clone();
        next.apply(&u).expect("generated update is valid");
        if !next.is_connected() {
            continue;
        }
        cur = next;
        out.push(u);
    }
    out
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs batch on the updated inputs and reports whether it agrees with `result`.
fn time_batch(p: &PatternGraph, g: &DataGraph, r: u32, k: usize, parallel: bool, result: &QueryResult) -> Result<(f64, bool), BenchError> {
    let opts = BatchOptions {
        parallel,
        ..BatchOptions::default()
    };
    let start = Instant::now();
    let (out, _) = batch_topk_with(p, g, r, k, &opts)?;
    let t = ms(start);
    Ok((t, out.teams() == result.topk.teams() && out.is_satisfiable() == result.satisfiable))
}

/// Inputs shared by every row of a sweep.
pub struct BenchInput<'a> {
    pub engine: &'a IncrementalEngine,
    pub labels: u32,
    pub seed: u64,
    pub parallel: bool,
    /// Compare every incremental result with batch and fail on a difference.
    pub verify: bool,
}

/// One row: `ratio` of the data graph (or pattern) changes in a single set, or in five sets for `Continuous`.
pub fn bench_row(input: &BenchInput<'_>, kind: UpdateKind, ratio: f64) -> Result<BenchRow, BenchError> {
    let base = input.engine;
    let r = base.radius();
    let k = base.k();
    let data_count = |ratio: f64| ((ratio * graph_size(base.graph()) as f64).round() as usize).max(1);
    let pattern_size = base.pattern().node_count() + base.pattern().edge_count();
    let pattern_count = ((ratio * pattern_size as f64).round() as usize).max(1);
    let pattern_labels: Vec<LabelId> = base.pattern().nodes().map(|(_, n)| n.label).collect();
    let salt = (ratio * 1e6) as u64;

    let sets: Vec<(Vec<PatternUpdate>, Vec<DataUpdate>)> = match kind {
        UpdateKind::Data => vec![(Vec::new(), random_data_updates(base.graph(), input.labels, data_count(ratio), input.seed ^ salt))],
        UpdateKind::Pattern => vec![(
            random_pattern_updates(base.pattern(), &pattern_labels, pattern_count, input.seed ^ salt),
            Vec::new(),
        )],
        UpdateKind::Both => vec![(
            random_pattern_updates(base.pattern(), &pattern_labels, pattern_count, input.seed ^ salt),
            random_data_updates(base.graph(), input.labels, data_count(ratio), input.seed ^ salt ^ 1),
        )],
        UpdateKind::Continuous => {
            let mut g = base.graph().clone();
            let mut out = Vec::new();
            for step in 0..5u64 {
                let dg = random_data_updates(&g, input.labels, data_count(ratio / 5.0), input.seed ^ salt ^ (step + 2));
                for u in &dg {
                    g.apply(u).expect("generated update is valid");
                }
                out.push((Vec::new(), dg));
            }
            out
        }
    };

    let mut engine = base.clone();
    let mut incremental_ms = 0.0;
    let mut batch_ms = 0.0;
    let mut affected = 0;
    for (dp, dg) in &sets {
        let start = Instant::now();
        let result = engine.dynamic(dp, dg)?;
        incremental_ms += ms(start);
        affected += result.stats.affected_balls;
        let (t, agree) = time_batch(engine.pattern(), engine.graph(), r, k, input.parallel, &result)?;
        batch_ms += t;
        if input.verify && !agree {
            return Err(BenchError::Mismatch(ratio));
        }
    }
    Ok(BenchRow {
        kind,
        ratio,
        batch_ms,
        incremental_ms,
        speedup: batch_ms / incremental_ms.max(1e-6),
        affected_balls: affected,
    })
}

/// The smallest ratio in `rows` whose speedup falls to 1 or below, if any.
pub fn crossover(rows: &[BenchRow]) -> Option<f64> {
    rows.iter().find(|r| r.speedup <= 1.0).map(|r| r.ratio)
}

/// Number of adjacent pairs where speedup increases with the ratio.
pub fn inversions(rows: &[BenchRow]) -> usize {
    rows.windows(2).filter(|w| w[1].speedup > w[0].speedup).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_planted, pattern_from_neighborhood, GenConfig};
    use crate::names::Labels;
    use teamsim_core::EngineOptions;

    #[test]
    fn generated_updates_are_valid_and_sized() {
        let doc = gen_planted(&GenConfig { n: 200, labels: 5, ..GenConfig::default() }, &mut Labels::new()).unwrap();
        let dg = random_data_updates(&doc.graph, 5, 40, 7);
        assert_eq!(dg.len(), 40);
        let mut g = doc.graph.clone();
        for u in &dg {
            g.apply(u).unwrap();
        }
        let p = pattern_from_neighborhood(&doc.graph, 4, Capacity::default(), 1).unwrap();
        let dp = random_pattern_updates(&p, &[LabelId(0), LabelId(1)], 3, 2);
        assert_eq!(dp.len(), 3);
        teamsim_core::pattern::apply_pattern_updates(&p, &dp).unwrap();
    }

    #[test]
    fn rows_agree_with_batch() {
        let doc = gen_planted(&GenConfig { n: 300, labels: 6, ..GenConfig::default() }, &mut Labels::new()).unwrap();
        let p = pattern_from_neighborhood(&doc.graph, 3, Capacity::default(), 4).unwrap();
        let engine = IncrementalEngine::new(p, doc.graph, 2, 5, 2, EngineOptions::default()).unwrap();
        let input = BenchInput {
            engine: &engine,
            labels: 6,
            seed: 3,
            parallel: false,
            verify: true,
        };
        for kind in [UpdateKind::Data, UpdateKind::Pattern, UpdateKind::Both, UpdateKind::Continuous] {
            let row = bench_row(&input, kind, 0.05).unwrap();
            assert!(row.batch_ms > 0.0 && row.incremental_ms > 0.0);
            assert_eq!(row.csv().split(',').count(), 6);
        }
    }
}
