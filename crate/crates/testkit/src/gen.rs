//! Seeded random graphs, patterns, and valid update sets.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teamsim_core::{Capacity, DataGraph, DataUpdate, LabelId, NodeId, PNodeId, PatternGraph, PatternUpdate};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `[1,1]`, `[1,2]`, `[1,*]`, `[2,3]`.
pub fn cap_family() -> Vec<Capacity> {
    vec![
        Capacity::bounded(1, 1).unwrap(),
        Capacity::bounded(1, 2).unwrap(),
        Capacity::at_least(1).unwrap(),
        Capacity::bounded(2, 3).unwrap(),
    ]
}

fn random_labels(rng: &mut TestRng, labels: u32) -> Vec<LabelId> {
    let mut out = vec![LabelId(rng.gen_range(0..labels))];
    if labels > 1 && rng.gen_bool(0.15) {
        out.push(LabelId(rng.gen_range(0..labels)));
    }
    out
}

/// Random graph with about `avg_degree * n / 2` edges.
pub fn random_graph(rng: &mut TestRng, n: usize, avg_degree: f64, labels: u32) -> DataGraph {
    let mut g = DataGraph::new();
    for _ in 0..n {
        let ls = random_labels(rng, labels);
        g.add_node(ls).unwrap();
    }
    let target = ((avg_degree * n as f64) / 2.0).round() as usize;
    let max_edges = n * n.saturating_sub(1) / 2;
    let target = target.min(max_edges);
    while g.edge_count() < target {
        let a = NodeId(rng.gen_range(0..n as u32));
        let b = NodeId(rng.gen_range(0..n as u32));
        if a != b && !g.has_edge(a, b) {
            g.add_edge(a, b).unwrap();
        }
    }
    g
}

/// Random connected pattern: a random tree plus extra edges.
pub fn random_pattern(rng: &mut TestRng, nodes: usize, labels: u32, caps: &[Capacity]) -> PatternGraph {
    let mut p = PatternGraph::new();
    for i in 0..nodes {
        let label = LabelId(rng.gen_range(0..labels));
        let cap = *caps.choose(rng).unwrap();
        p.add_node(format!("u{i}"), label, cap).unwrap();
        if i > 0 {
            let parent = PNodeId(rng.gen_range(0..i as u32));
            p.add_edge(PNodeId(i as u32), parent).unwrap();
        }
    }
    for a in 0..nodes as u32 {
        for b in (a + 1)..nodes as u32 {
            if !p.has_edge(PNodeId(a), PNodeId(b)) && rng.gen_bool(0.15) {
                p.add_edge(PNodeId(a), PNodeId(b)).unwrap();
            }
        }
    }
    p
}

/// Pattern copied from a random connected piece of `g`, so that it has matches.
pub fn pattern_from_graph(rng: &mut TestRng, g: &DataGraph, nodes: usize, caps: &[Capacity]) -> Option<PatternGraph> {
    let all: Vec<NodeId> = g.nodes().collect();
    let start = *all.choose(rng)?;
    let mut chosen = vec![start];
    let mut tree = Vec::new();
    while chosen.len() < nodes {
        let frontier: Vec<(NodeId, NodeId)> = chosen
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().map(move |&w| (v, w)))
            .filter(|(_, w)| !chosen.contains(w))
            .collect();
        let &(from, to) = frontier.choose(rng)?;
        chosen.push(to);
        tree.push((from, to));
    }
    let mut p = PatternGraph::new();
    for (i, &v) in chosen.iter().enumerate() {
        let label = *g.labels(v).choose(rng).unwrap();
        p.add_node(format!("u{i}"), label, *caps.choose(rng).unwrap()).unwrap();
    }
    let pos = |v: NodeId| PNodeId(chosen.iter().position(|&x| x == v).unwrap() as u32);
    for (a, b) in tree {
        p.add_edge(pos(a), pos(b)).unwrap();
    }
    for i in 0..chosen.len() {
        for j in (i + 1)..chosen.len() {
            let (a, b) = (PNodeId(i as u32), PNodeId(j as u32));
            if g.has_edge(chosen[i], chosen[j]) && !p.has_edge(a, b) && rng.gen_bool(0.3) {
                p.add_edge(a, b).unwrap();
            }
        }
    }
    Some(p)
}

fn still_connected_without_edge(p: &PatternGraph, a: PNodeId, b: PNodeId) -> bool {
    let mut q = p.clone();
    q.remove_edge(a, b).unwrap();
    q.is_connected()
}

fn still_connected_without_node(p: &PatternGraph, v: PNodeId) -> bool {
    let mut q = p.clone();
    q.remove_node(v).unwrap();
    q.node_count() > 0 && q.is_connected()
}

/// Kinds of pattern units, in a fixed order.
pub const PATTERN_KINDS: [&str; 5] = ["p+edge", "p-edge", "p+node", "p-node", "p.cap"];
/// Kinds of data units, in a fixed order.
pub const DATA_KINDS: [&str; 4] = ["g+edge", "g-edge", "g+node", "g-node"];

pub fn pattern_kind(u: &PatternUpdate) -> &'static str {
    match u {
        PatternUpdate::InsertEdge(..) => "p+edge",
        PatternUpdate::DeleteEdge(..) => "p-edge",
        PatternUpdate::InsertNode { .. } => "p+node",
        PatternUpdate::DeleteNode(_) => "p-node",
        PatternUpdate::SetCapacity(..) => "p.cap",
    }
}

pub fn data_kind(u: &DataUpdate) -> &'static str {
    match u {
        DataUpdate::InsertEdge(..) => "g+edge",
        DataUpdate::DeleteEdge(..) => "g-edge",
        DataUpdate::InsertNode { .. } => "g+node",
        DataUpdate::DeleteNode(_) => "g-node",
    }
}

/// A valid pattern update set of `count` units; each prefix keeps the pattern connected.
pub fn pattern_updates(
    rng: &mut TestRng,
    p: &PatternGraph,
    labels: u32,
    caps: &[Capacity],
    count: usize,
    max_nodes: usize,
) -> Vec<PatternUpdate> {
    let mut cur = p.clone();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 200 {
        attempts += 1;
        let nodes: Vec<PNodeId> = cur.node_ids().collect();
        let u = match rng.gen_range(0..5) {
            0 => {
                let a = *nodes.choose(rng).unwrap();
                let b = *nodes.choose(rng).unwrap();
                if a == b || cur.has_edge(a, b) {
                    continue;
                }
                PatternUpdate::InsertEdge(a, b)
            }
            1 => {
                let edges: Vec<_> = cur.edges().collect();
                let Some(&(a, b)) = edges.choose(rng) else { continue };
                if !still_connected_without_edge(&cur, a, b) {
                    continue;
                }
                PatternUpdate::DeleteEdge(a, b)
            }
            2 => {
                if cur.node_count() >= max_nodes {
                    continue;
                }
                let node = cur.next_node_id();
                PatternUpdate::InsertNode {
                    node,
                    name: format!("n{}", node.0),
                    label: LabelId(rng.gen_range(0..labels)),
                    capacity: *caps.choose(rng).unwrap(),
                    anchor: *nodes.choose(rng).unwrap(),
                }
            }
            3 => {
                let v = *nodes.choose(rng).unwrap();
                if cur.node_count() <= 1 || !still_connected_without_node(&cur, v) {
                    continue;
                }
                PatternUpdate::DeleteNode(v)
            }
            _ => PatternUpdate::SetCapacity(*nodes.choose(rng).unwrap(), *caps.choose(rng).unwrap()),
        };
        cur.apply(&u).unwrap();
        out.push(u);
    }
    out
}

/// A valid data update set of `count` units.
pub fn data_updates(rng: &mut TestRng, g: &DataGraph, labels: u32, count: usize) -> Vec<DataUpdate> {
    let mut cur = g.clone();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < 500 {
        attempts += 1;
        let nodes: Vec<NodeId> = cur.nodes().collect();
        let u = match rng.gen_range(0..4) {
            0 => {
                let a = *nodes.choose(rng).unwrap();
                let b = *nodes.choose(rng).unwrap();
                if a == b || cur.has_edge(a, b) {
                    continue;
                }
                DataUpdate::InsertEdge(a, b)
            }
            1 => {
                let edges: Vec<_> = cur.edges().collect();
                let Some(&(a, b)) = edges.choose(rng) else { continue };
                DataUpdate::DeleteEdge(a, b)
            }
            2 => DataUpdate::InsertNode {
                node: cur.next_node_id(),
                labels: random_labels(rng, labels),
                anchor: *nodes.choose(rng).unwrap(),
            },
            _ => {
                if cur.node_count() <= 3 {
                    continue;
                }
                DataUpdate::DeleteNode(*nodes.choose(rng).unwrap())
            }
        };
        cur.apply(&u).unwrap();
        out.push(u);
    }
    out
}

/// Distinct labels used by a graph.
pub fn graph_labels(g: &DataGraph) -> BTreeSet<LabelId> {
    g.nodes().flat_map(|v| g.labels(v).to_vec()).collect()
}
