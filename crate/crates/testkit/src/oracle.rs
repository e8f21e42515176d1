//! Naive reference computations over plain sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use teamsim_core::{DataGraph, LabelId, NodeId, PNodeId, PatternGraph, Team};

/// A team in plain integers: `(edges, nodes)` density, sorted nodes and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefTeam {
    pub nodes: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub density: (u64, u64),
    pub center: u32,
    pub radius: u32,
}

impl From<&Team> for RefTeam {
    fn from(t: &Team) -> Self {
        RefTeam {
            nodes: t.nodes().iter().map(|v| v.0).collect(),
            edges: t.edges().iter().map(|(a, b)| (a.0, b.0)).collect(),
            density: (t.density().edges(), t.density().nodes()),
            center: t.center().0,
            radius: t.radius(),
        }
    }
}

pub fn to_ref(teams: &[Team]) -> Vec<RefTeam> {
    teams.iter().map(RefTeam::from).collect()
}

/// Hop distances from `center` up to `radius`, by plain BFS.
pub fn hops(g: &DataGraph, center: NodeId, radius: u32) -> BTreeMap<NodeId, u32> {
    let mut dist = BTreeMap::new();
    dist.insert(center, 0);
    let mut queue = VecDeque::from([center]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        if d == radius {
            continue;
        }
        for &w in g.neighbors(v) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                d + 1
            });
        }
    }
    dist
}

/// Maximum simulation of the pattern inside `nodes` (induced), by repeated sweeps.
pub fn max_sim(p: &PatternGraph, g: &DataGraph, nodes: &BTreeSet<NodeId>) -> BTreeMap<PNodeId, BTreeSet<NodeId>> {
    let mut rel: BTreeMap<PNodeId, BTreeSet<NodeId>> = p
        .nodes()
        .map(|(u, n)| (u, nodes.iter().copied().filter(|&v| g.labels(v).contains(&n.label)).collect()))
        .collect();
    loop {
        let mut changed = false;
        let us: Vec<PNodeId> = p.node_ids().collect();
        for &u in &us {
            let keep: BTreeSet<NodeId> = rel[&u]
                .iter()
                .copied()
                .filter(|&v| {
                    p.neighbors(u).all(|u2| {
                        g.neighbors(v)
                            .iter()
                            .any(|w| nodes.contains(w) && rel[&u2].contains(w))
                    })
                })
                .collect();
            if keep.len() != rel[&u].len() {
                rel.insert(u, keep);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if rel.values().any(|s| s.is_empty()) {
        rel.values_mut().for_each(|s| s.clear());
    }
    rel
}

fn induced_edges(g: &DataGraph, nodes: &BTreeSet<NodeId>) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for &a in nodes {
        for &b in g.neighbors(a) {
            if a < b && nodes.contains(&b) {
                out.push((a.0, b.0));
            }
        }
    }
    out.sort();
    out
}

/// The team of one `(center, t)`, if any.
pub fn ball_team(p: &PatternGraph, g: &DataGraph, center: NodeId, t: u32) -> Option<RefTeam> {
    let nodes: BTreeSet<NodeId> = hops(g, center, t).into_keys().collect();
    let rel = max_sim(p, g, &nodes);
    if rel.values().any(|s| s.is_empty()) {
        return None;
    }
    for (u, n) in p.nodes() {
        let c = rel[&u].len() as u32;
        if c < n.capacity.lower() || n.capacity.upper().is_some_and(|y| c > y) {
            return None;
        }
    }
    let members: BTreeSet<NodeId> = rel.values().flatten().copied().collect();
    let edges = induced_edges(g, &members);
    Some(RefTeam {
        density: (edges.len() as u64, members.len() as u64),
        nodes: members.iter().map(|v| v.0).collect(),
        edges,
        center: center.0,
        radius: t,
    })
}

fn rank(a: &RefTeam, b: &RefTeam) -> std::cmp::Ordering {
    let lhs = a.density.0 as u128 * b.density.1 as u128;
    let rhs = b.density.0 as u128 * a.density.1 as u128;
    rhs.cmp(&lhs)
        .then(a.nodes.len().cmp(&b.nodes.len()))
        .then(a.nodes.cmp(&b.nodes))
        .then(a.radius.cmp(&b.radius))
        .then(a.center.cmp(&b.center))
}

/// Every team over every center and radius, deduplicated and ranked, truncated to `k`.
pub fn topk(p: &PatternGraph, g: &DataGraph, r: u32, k: usize) -> Vec<RefTeam> {
    let mut best: BTreeMap<Vec<u32>, RefTeam> = BTreeMap::new();
    for v in g.nodes() {
        for t in 1..=r {
            if let Some(team) = ball_team(p, g, v, t) {
                match best.get(&team.nodes) {
                    Some(old) if (old.radius, old.center) <= (team.radius, team.center) => {}
                    _ => {
                        best.insert(team.nodes.clone(), team);
                    }
                }
            }
        }
    }
    let mut all: Vec<RefTeam> = best.into_values().collect();
    all.sort_by(rank);
    all.truncate(k);
    all
}

/// Densest subgraph density by trying every non-empty node subset.
pub fn densest_exhaustive(g: &DataGraph) -> (u64, u64) {
    let nodes: Vec<NodeId> = g.nodes().collect();
    let n = nodes.len();
    assert!(n <= 20, "exhaustive search is exponential");
    let mut best = (0u64, 1u64);
    for mask in 1u32..(1 << n) {
        let mut e = 0u64;
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in (i + 1)..n {
                if mask & (1 << j) != 0 && g.has_edge(nodes[i], nodes[j]) {
                    e += 1;
                }
            }
        }
        let c = mask.count_ones() as u64;
        if e as u128 * best.1 as u128 > best.0 as u128 * c as u128 {
            best = (e, c);
        }
    }
    best
}

/// Density of the highest non-empty k-core, by repeated peeling for each k.
pub fn max_core_naive(g: &DataGraph) -> (u64, u64) {
    let mut best = (0u64, g.node_count().max(1) as u64);
    for k in 1.. {
        let mut alive: BTreeSet<NodeId> = g.nodes().collect();
        loop {
            let drop: Vec<NodeId> = alive
                .iter()
                .copied()
                .filter(|&v| g.neighbors(v).iter().filter(|w| alive.contains(w)).count() < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive.remove(&v);
            }
        }
        if alive.is_empty() {
            break;
        }
        best = (induced_edges(g, &alive).len() as u64, alive.len() as u64);
    }
    best
}

/// Labels of a node as a plain set.
pub fn label_set(g: &DataGraph, v: NodeId) -> BTreeSet<LabelId> {
    g.labels(v).iter().copied().collect()
}
