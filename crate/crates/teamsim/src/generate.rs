//! Seeded planted-partition graphs with community-skewed labels.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teamsim_core::{Capacity, DataGraph, LabelId, NodeId, PNodeId, PatternGraph};

use crate::names::{Labels, NodeNames};
use crate::text::GraphDoc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub avg_degree: f64,
    pub labels: u32,
    pub communities: usize,
    /// Relative weight of edges inside a community.
    pub intra: f64,
    /// Relative weight of edges across communities.
    pub inter: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 1000,
            avg_degree: 10.0,
            labels: 200,
            communities: 20,
            intra: 0.8,
            inter: 0.2,
            seed: 1,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidConfig(m.to_string()));
        if self.n == 0 || self.labels == 0 || !(self.avg_degree >= 1.0) {
            return bad("n, d and l must be at least 1");
        }
        if self.communities == 0 || self.communities > self.n {
            return bad("communities must be between 1 and n");
        }
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.intra) || !prob(self.inter) || self.intra + self.inter == 0.0 {
            return bad("intra and inter must lie in [0,1] and not both be 0");
        }
        let cap = self.max_edges();
        if ((self.avg_degree * self.n as f64) / 2.0).round() as usize > cap {
            return bad("average degree is not reachable with this community layout");
        }
        Ok(())
    }

    fn community_range(&self, c: usize) -> std::ops::Range<usize> {
        (c * self.n / self.communities)..((c + 1) * self.n / self.communities)
    }

    fn max_edges(&self) -> usize {
        let pairs = |s: usize| s * s.saturating_sub(1) / 2;
        let intra: usize = (0..self.communities).map(|c| pairs(self.community_range(c).len())).sum();
        let inter = if self.inter > 0.0 { pairs(self.n) - intra } else { 0 };
        let intra = if self.intra > 0.0 || self.inter == 0.0 { intra } else { 0 };
        intra + inter
    }
}

/// Generates a graph with nodes named `0..n`.
///
/// Each community gets a random spanning tree when the edge budget allows,
/// then edges are sampled inside or across communities by the given weights.
pub fn gen_planted(cfg: &GenConfig, labels: &mut Labels) -> Result<GraphDoc, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let label_ids: Vec<LabelId> = (0..cfg.labels).map(|i| labels.intern(&format!("L{i}"))).collect();
    let ranges: Vec<_> = (0..cfg.communities).map(|c| cfg.community_range(c)).collect();
    let community: Vec<usize> = ranges.iter().enumerate().flat_map(|(c, r)| r.clone().map(move |_| c)).collect();
    let community_of = |v: usize| community[v];
    let per = (cfg.labels as usize / cfg.communities).max(1);

    let mut g = DataGraph::new();
    let mut names = NodeNames::new();
    for v in 0..cfg.n {
        let c = community_of(v);
        let mut ls = Vec::with_capacity(2);
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.7) {
                label_ids[(c * per + rng.gen_range(0..per)) % label_ids.len()]
            } else {
                *label_ids.choose(rng).expect("l >= 1")
            }
        };
        ls.push(pick(&mut rng));
        if rng.gen_bool(0.1) {
            let extra = pick(&mut rng);
            if extra != ls[0] {
                ls.push(extra);
            }
        }
        let id = g.add_node(ls).expect("non-empty labels");
        names.bind(&v.to_string(), id);
    }

    let target = ((cfg.avg_degree * cfg.n as f64) / 2.0).round() as usize;
    if cfg.intra > 0.0 && target >= cfg.n - cfg.communities {
        for r in &ranges {
            let mut order: Vec<usize> = r.clone().collect();
            order.shuffle(&mut rng);
            for i in 1..order.len() {
                let parent = order[rng.gen_range(0..i)];
                g.add_edge(NodeId(order[i] as u32), NodeId(parent as u32)).expect("fresh tree edge");
            }
        }
    }
    let p_intra = cfg.intra / (cfg.intra + cfg.inter);
    let can_intra = ranges.iter().any(|r| r.len() >= 2);
    while g.edge_count() < target {
        let a = rng.gen_range(0..cfg.n);
        let b = if can_intra && rng.gen_bool(p_intra) {
            let r = &ranges[community_of(a)];
            if r.len() < 2 {
                continue;
            }
            rng.gen_range(r.clone())
        } else {
            let b = rng.gen_range(0..cfg.n);
            if community_of(a) == community_of(b) {
                continue;
            }
            b
        };
        let (a, b) = (NodeId(a as u32), NodeId(b as u32));
        if a != b && !g.has_edge(a, b) {
            g.add_edge(a, b).expect("checked edge");
        }
    }
    Ok(GraphDoc { graph: g, names })
}

/// A connected pattern copied from a random neighborhood of `g`, so that it has matches.
///
/// Returns `None` when the start node's component is smaller than `nodes`.
pub fn pattern_from_neighborhood(g: &DataGraph, nodes: usize, cap: Capacity, seed: u64) -> Option<PatternGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<NodeId> = g.nodes().collect();
    for _ in 0..32 {
        let start = *all.choose(&mut rng)?;
        let mut chosen = vec![start];
        let mut tree = Vec::new();
        while chosen.len() < nodes {
            let frontier: Vec<(NodeId, NodeId)> = chosen
                .iter()
                .flat_map(|&v| g.neighbors(v).iter().map(move |&w| (v, w)))
                .filter(|(_, w)| !chosen.contains(w))
                .collect();
            let Some(&(from, to)) = frontier.choose(&mut rng) else { break };
            chosen.push(to);
            tree.push((from, to));
        }
        if chosen.len() < nodes {
            continue;
        }
        let mut p = PatternGraph::new();
        for (i, &v) in chosen.iter().enumerate() {
            let label = *g.labels(v).choose(&mut rng).expect("labelled node");
            p.add_node(format!("u{i}"), label, cap).expect("fresh name");
        }
        let pos = |v: NodeId| PNodeId(chosen.iter().position(|&x| x == v).expect("chosen") as u32);
        for (a, b) in tree {
            p.add_edge(pos(a), pos(b)).expect("tree edge");
        }
        return Some(p);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn components(g: &DataGraph) -> usize {
        let mut seen = vec![false; g.id_bound()];
        let mut count = 0;
        for v in g.nodes() {
            if seen[v.index()] {
                continue;
            }
            count += 1;
            let mut stack = vec![v];
            seen[v.index()] = true;
            while let Some(x) = stack.pop() {
                for &w in g.neighbors(x) {
                    if !seen[w.index()] {
                        seen[w.index()] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    #[test]
    fn disjoint_communities_without_inter_edges() {
        let cfg = GenConfig {
            n: 10,
            avg_degree: 2.0,
            labels: 3,
            communities: 2,
            intra: 1.0,
            inter: 0.0,
            seed: 3,
        };
        let doc = gen_planted(&cfg, &mut Labels::new()).unwrap();
        assert_eq!(components(&doc.graph), 2);
        for (a, b) in doc.graph.edges() {
            assert_eq!(a.0 < 5, b.0 < 5);
        }
    }

    #[test]
    fn same_seed_same_graph() {
        let cfg = GenConfig {
            n: 300,
            ..GenConfig::default()
        };
        let a = gen_planted(&cfg, &mut Labels::new()).unwrap();
        let b = gen_planted(&cfg, &mut Labels::new()).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = gen_planted(&GenConfig { seed: 2, ..cfg }, &mut Labels::new()).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn average_degree_within_tolerance() {
        let cfg = GenConfig {
            n: 10_000,
            ..GenConfig::default()
        };
        let doc = gen_planted(&cfg, &mut Labels::new()).unwrap();
        let d = 2.0 * doc.graph.edge_count() as f64 / doc.graph.node_count() as f64;
        assert!((9.0..=11.0).contains(&d), "{d}");
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            GenConfig { n: 0, ..GenConfig::default() },
            GenConfig { intra: 1.5, ..GenConfig::default() },
            GenConfig { intra: 0.0, inter: 0.0, ..GenConfig::default() },
            GenConfig { n: 4, communities: 2, inter: 0.0, avg_degree: 3.0, ..GenConfig::default() },
        ];
        for cfg in bad {
            assert!(gen_planted(&cfg, &mut Labels::new()).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn neighborhood_pattern_is_connected() {
        let doc = gen_planted(&GenConfig { n: 500, ..GenConfig::default() }, &mut Labels::new()).unwrap();
        let p = pattern_from_neighborhood(&doc.graph, 5, Capacity::default(), 9).unwrap();
        assert_eq!(p.node_count(), 5);
        assert!(p.is_connected());
    }
}
