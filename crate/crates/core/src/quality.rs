//! Team quality measures: diameter, density, and pattern satisfaction ratios.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::graph::{diameter_of, DataGraph, Density, GraphError, HopCount, LabelId, LocalGraph, NodeId, Subgraph};
use crate::pattern::{PatternGraph, PatternView};
use crate::simulation::{initial_sets, refine, MatchRelation, Team};

/// A ratio `num / den`; an empty denominator reads as fully satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub fn as_f64(&self) -> f64 {
        if self.den == 0 {
            1.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl Team {
    pub fn subgraph(&self) -> Subgraph {
        Subgraph::new(self.nodes().to_vec(), self.edges().to_vec()).expect("team edges join team nodes")
    }
}

fn restricted(m: &MatchRelation, u: crate::pattern::PNodeId, members: &BTreeSet<NodeId>) -> Vec<NodeId> {
    m.matches(u).iter().copied().filter(|v| members.contains(v)).collect()
}

/// Share of pattern nodes whose matches inside the team fit their capacity.
pub fn node_satisfiability(team: &Subgraph, m: &MatchRelation, pattern: &PatternGraph) -> Ratio {
    let members: BTreeSet<NodeId> = team.nodes().iter().copied().collect();
    let num = pattern
        .nodes()
        .filter(|(u, node)| {
            let count = restricted(m, *u, &members).len();
            count > 0 && node.capacity.contains(count)
        })
        .count();
    Ratio {
        num: num as u32,
        den: pattern.node_count() as u32,
    }
}

/// Share of pattern edges `(u1, u2)` where every team match of either end has a
/// team neighbor matching the other end.
pub fn edge_satisfiability(team: &Subgraph, m: &MatchRelation, pattern: &PatternGraph) -> Ratio {
    let members: BTreeSet<NodeId> = team.nodes().iter().copied().collect();
    let edges: BTreeSet<(NodeId, NodeId)> = team.edges().iter().copied().collect();
    let linked = |a: NodeId, b: NodeId| edges.contains(&if a < b { (a, b) } else { (b, a) });
    let covered = |from: &[NodeId], to: &[NodeId]| from.iter().all(|&a| to.iter().any(|&b| linked(a, b)));
    let mut num = 0;
    let mut den = 0;
    for (u1, u2) in pattern.edges() {
        den += 1;
        let s1 = restricted(m, u1, &members);
        let s2 = restricted(m, u2, &members);
        if !s1.is_empty() && !s2.is_empty() && covered(&s1, &s2) && covered(&s2, &s1) {
            num += 1;
        }
    }
    Ratio { num, den }
}

struct TeamGraph<'a> {
    adjacency: Vec<Vec<u32>>,
    labels: Vec<&'a [LabelId]>,
}

impl LocalGraph for TeamGraph<'_> {
    fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    fn has_label(&self, i: usize, label: LabelId) -> bool {
        self.labels[i].binary_search(&label).is_ok()
    }
}

/// Maximum simulation of `pattern` in the team's own subgraph, with labels from `graph`.
pub fn team_relation(team: &Subgraph, pattern: &PatternGraph, graph: &DataGraph) -> MatchRelation {
    let nodes = team.nodes();
    let mut adjacency = alloc::vec![Vec::new(); nodes.len()];
    for &(a, b) in team.edges() {
        let i = nodes.binary_search(&a).expect("team node");
        let j = nodes.binary_search(&b).expect("team node");
        adjacency[i].push(j as u32);
        adjacency[j].push(i as u32);
    }
    adjacency.iter_mut().for_each(|l| l.sort_unstable());
    let tg = TeamGraph {
        adjacency,
        labels: nodes.iter().map(|&v| graph.labels(v)).collect(),
    };
    let view = PatternView::full(pattern);
    let mut sets = initial_sets(&view, &tg);
    if !refine(&view, &tg, &mut sets) {
        return MatchRelation::empty();
    }
    MatchRelation::from_sets((0..view.len()).map(|s| {
        let ids: Vec<NodeId> = sets[s].iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| nodes[i]).collect();
        (view.id(s), ids)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QualityReport {
    /// Diameter, or that of the largest component when disconnected.
    pub diameter: HopCount,
    pub connected: bool,
    pub density: Density,
    pub node_satisfaction: Ratio,
    pub edge_satisfaction: Ratio,
}

/// Quality of an arbitrary non-empty team against `pattern`.
pub fn quality_report(team: &Subgraph, pattern: &PatternGraph, graph: &DataGraph) -> Result<QualityReport, GraphError> {
    let (diameter, connected) = match diameter_of(team) {
        Ok(d) => (d, true),
        Err(GraphError::Disconnected {
            largest_component_diameter,
        }) => (largest_component_diameter, false),
        Err(e) => return Err(e),
    };
    let m = team_relation(team, pattern, graph);
    Ok(QualityReport {
        diameter,
        connected,
        density: Density::new(team.edges().len() as u64, team.nodes().len() as u64),
        node_satisfaction: node_satisfiability(team, &m, pattern),
        edge_satisfaction: edge_satisfiability(team, &m, pattern),
    })
}
