//! Maximum undirected simulation relations and perfect subgraphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Ball, Density, HopCount, LocalGraph, NodeId};
use crate::pattern::{PNodeId, PatternGraph, PatternView};

/// Candidate membership per pattern slot and local node.
pub(crate) type Sets = Vec<Vec<bool>>;

/// A match relation: for each pattern node, the sorted data nodes matching it.
///
/// The empty relation has no entries at all.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MatchRelation {
    sets: BTreeMap<PNodeId, Vec<NodeId>>,
}

impl MatchRelation {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a relation from explicit sets; empty sets are dropped.
    pub fn from_sets<I, J>(sets: I) -> Self
    where
        I: IntoIterator<Item = (PNodeId, J)>,
        J: IntoIterator<Item = NodeId>,
    {
        let mut out = BTreeMap::new();
        for (u, vs) in sets {
            let mut vs: Vec<NodeId> = vs.into_iter().collect();
            vs.sort_unstable();
            vs.dedup();
            if !vs.is_empty() {
                out.insert(u, vs);
            }
        }
        MatchRelation { sets: out }
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Data nodes matching `u`.
    pub fn matches(&self, u: PNodeId) -> &[NodeId] {
        self.sets.get(&u).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn contains(&self, u: PNodeId, v: NodeId) -> bool {
        self.matches(u).binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PNodeId, &[NodeId])> + '_ {
        self.sets.iter().map(|(&u, v)| (u, v.as_slice()))
    }

    pub fn pattern_nodes(&self) -> impl Iterator<Item = PNodeId> + '_ {
        self.sets.keys().copied()
    }

    /// Union of all matched data nodes.
    pub fn data_nodes(&self) -> BTreeSet<NodeId> {
        self.sets.values().flatten().copied().collect()
    }

    pub fn pair_count(&self) -> usize {
        self.sets.values().map(|v| v.len()).sum()
    }

    pub fn is_subset_of(&self, other: &MatchRelation) -> bool {
        self.iter().all(|(u, vs)| vs.iter().all(|&v| other.contains(u, v)))
    }

    /// Union of several relations.
    pub fn union<'a, I: IntoIterator<Item = &'a MatchRelation>>(parts: I) -> Self {
        let mut out: BTreeMap<PNodeId, Vec<NodeId>> = BTreeMap::new();
        for part in parts {
            for (u, vs) in part.iter() {
                out.entry(u).or_default().extend_from_slice(vs);
            }
        }
        Self::from_sets(out)
    }
}

/// Candidate sets from labels alone.
pub(crate) fn initial_sets<G: LocalGraph>(view: &PatternView, g: &G) -> Sets {
    let n = g.node_count();
    (0..view.len())
        .map(|s| {
            let label = view.label(s);
            (0..n).map(|i| g.has_label(i, label)).collect()
        })
        .collect()
}

/// Shrinks `sets` to the maximum simulation contained in it.
///
/// Returns `false` and clears every set when some pattern slot ends up with
/// no match.
pub(crate) fn refine<G: LocalGraph>(view: &PatternView, g: &G, sets: &mut Sets) -> bool {
    let k = view.len();
    let n = g.node_count();
    for set in sets.iter_mut() {
        set.resize(n, false);
    }
    let mut count = vec![vec![0u32; n]; k];
    for s in 0..k {
        for j in 0..n {
            if sets[s][j] {
                for &i in g.neighbors(j) {
                    count[s][i as usize] += 1;
                }
            }
        }
    }
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for s in 0..k {
        for i in 0..n {
            if sets[s][i] && view.slot_neighbors(s).iter().any(|&s2| count[s2 as usize][i] == 0) {
                sets[s][i] = false;
                stack.push((s, i));
            }
        }
    }
    while let Some((s, j)) = stack.pop() {
        for &i in g.neighbors(j) {
            let i = i as usize;
            count[s][i] -= 1;
            if count[s][i] == 0 {
                for &s2 in view.slot_neighbors(s) {
                    let s2 = s2 as usize;
                    if sets[s2][i] {
                        sets[s2][i] = false;
                        stack.push((s2, i));
                    }
                }
            }
        }
    }
    if sets.iter().any(|set| !set.iter().any(|&b| b)) {
        sets.iter_mut().for_each(|set| set.iter_mut().for_each(|b| *b = false));
        return false;
    }
    true
}

pub(crate) fn relation_from_sets(view: &PatternView, ball: &Ball, sets: &Sets) -> MatchRelation {
    if sets.iter().any(|set| !set.iter().any(|&b| b)) {
        return MatchRelation::empty();
    }
    MatchRelation::from_sets((0..view.len()).map(|s| {
        let ids: Vec<NodeId> = sets[s]
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ball.node(i))
            .collect();
        (view.id(s), ids)
    }))
}

/// Sets over the first `len` local nodes of `ball`; matches outside are dropped.
pub(crate) fn sets_from_relation(view: &PatternView, ball: &Ball, len: usize, m: &MatchRelation) -> Sets {
    (0..view.len())
        .map(|s| {
            let mut set = vec![false; len];
            for &v in m.matches(view.id(s)) {
                if let Some(i) = ball.local_index(v) {
                    if i < len {
                        set[i] = true;
                    }
                }
            }
            set
        })
        .collect()
}

/// Maximum simulation of `view` in `ball`.
pub fn undirg_sim(view: &PatternView, ball: &Ball) -> MatchRelation {
    undirg_sim_within(view, ball, ball.radius())
}

/// Maximum simulation of `view` in the ball of radius `t` around the same center.
pub fn undirg_sim_within(view: &PatternView, ball: &Ball, t: HopCount) -> MatchRelation {
    let prefix = ball.prefix(t);
    let mut sets = initial_sets(view, &prefix);
    refine(view, &prefix, &mut sets);
    relation_from_sets(view, ball, &sets)
}

/// Maximum simulation in radius `t` computed from the one at a larger radius.
pub fn inc_sim_shrink(outer: &MatchRelation, view: &PatternView, ball: &Ball, t: HopCount) -> MatchRelation {
    let prefix = ball.prefix(t);
    let mut sets = sets_from_relation(view, ball, ball.prefix_len(t), outer);
    refine(view, &prefix, &mut sets);
    relation_from_sets(view, ball, &sets)
}

/// Removes pairs that lost support after pattern edges `seeds` appeared.
///
/// `sets` must satisfy every pattern edge except possibly the seeds.
pub(crate) fn propagate_insertions<G: LocalGraph>(view: &PatternView, g: &G, sets: &mut Sets, seeds: &[(usize, usize)]) -> bool {
    let n = g.node_count();
    for set in sets.iter_mut() {
        set.resize(n, false);
    }
    let supported = |sets: &Sets, i: usize, s: usize| g.neighbors(i).iter().any(|&j| sets[s][j as usize]);
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in seeds {
        for (x, y) in [(a, b), (b, a)] {
            for i in 0..n {
                if sets[x][i] && !supported(sets, i, y) {
                    sets[x][i] = false;
                    stack.push((x, i));
                }
            }
        }
    }
    while let Some((s, j)) = stack.pop() {
        for &s2 in view.slot_neighbors(s) {
            let s2 = s2 as usize;
            for &i in g.neighbors(j) {
                let i = i as usize;
                if sets[s2][i] && !supported(sets, i, s) {
                    sets[s2][i] = false;
                    stack.push((s2, i));
                }
            }
        }
    }
    if sets.iter().any(|set| !set.iter().any(|&b| b)) {
        sets.iter_mut().for_each(|set| set.iter_mut().for_each(|b| *b = false));
        return false;
    }
    true
}

/// Sets for `view` seeded from `m`; pattern nodes unknown to `m` start from label candidates.
///
/// Returns the sets and the seed edges that may now be violated.
pub(crate) fn seed_after_insertions(
    view: &PatternView,
    ball: &Ball,
    m: &MatchRelation,
    inserted: &[(PNodeId, PNodeId)],
) -> (Sets, Vec<(usize, usize)>) {
    let mut sets = sets_from_relation(view, ball, ball.len(), m);
    let mut seeds = Vec::new();
    for s in 0..view.len() {
        if m.matches(view.id(s)).is_empty() {
            let label = view.label(s);
            sets[s] = (0..ball.len()).map(|i| ball.has_label(i, label)).collect();
            seeds.extend(view.slot_neighbors(s).iter().map(|&s2| (s, s2 as usize)));
        }
    }
    for &(a, b) in inserted {
        if let (Some(sa), Some(sb)) = (view.slot(a), view.slot(b)) {
            seeds.push((sa, sb));
        }
    }
    (sets, seeds)
}

/// Maximum simulation after inserting pattern edges, starting from the previous one.
///
/// `view` is the pattern after the insertions and `m` the maximum simulation
/// before them; nodes of `view` missing from `m` are treated as newly inserted.
pub fn pat_e_ins(view: &PatternView, ball: &Ball, m: &MatchRelation, inserted: &[(PNodeId, PNodeId)]) -> MatchRelation {
    if m.is_empty() {
        return MatchRelation::empty();
    }
    let (mut sets, seeds) = seed_after_insertions(view, ball, m, inserted);
    propagate_insertions(view, ball, &mut sets, &seeds);
    relation_from_sets(view, ball, &sets)
}

/// Whether every pattern node has a match count inside its capacity.
pub fn capacity_check(pattern: &PatternGraph, m: &MatchRelation) -> bool {
    pattern.nodes().all(|(u, node)| node.capacity.contains(m.matches(u).len()))
}

pub(crate) fn capacity_ok(view: &PatternView, sets: &Sets) -> bool {
    (0..view.len()).all(|s| view.capacity(s).contains(sets[s].iter().filter(|&&b| b).count()))
}

/// A perfect subgraph: the team found in one ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Team {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
    density: Density,
    center: NodeId,
    radius: HopCount,
}

/// A team viewed as the perfect subgraph of its ball.
pub type PerfectSubgraph = Team;

impl Team {
    pub(crate) fn from_sets(ball: &Ball, t: HopCount, sets: &Sets) -> Team {
        let len = ball.prefix_len(t);
        let mut member = vec![false; len];
        for set in sets {
            for (i, &b) in set.iter().enumerate().take(len) {
                if b {
                    member[i] = true;
                }
            }
        }
        let prefix = ball.prefix(t);
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for i in 0..len {
            if !member[i] {
                continue;
            }
            nodes.push(ball.node(i));
            for &j in prefix.neighbors(i) {
                let j = j as usize;
                if member[j] {
                    let (a, b) = (ball.node(i), ball.node(j));
                    if a < b {
                        edges.push((a, b));
                    }
                }
            }
        }
        nodes.sort_unstable();
        edges.sort_unstable();
        let density = Density::new(edges.len() as u64, nodes.len() as u64);
        Team {
            nodes,
            edges,
            density,
            center: ball.center(),
            radius: t,
        }
    }

    /// Builds a team from explicit parts; nodes and edges are normalized.
    pub fn new(mut nodes: Vec<NodeId>, edges: Vec<(NodeId, NodeId)>, center: NodeId, radius: HopCount) -> Team {
        nodes.sort_unstable();
        nodes.dedup();
        let mut edges: Vec<(NodeId, NodeId)> = edges.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        edges.sort_unstable();
        edges.dedup();
        let density = Density::new(edges.len() as u64, nodes.len().max(1) as u64);
        Team {
            nodes,
            edges,
            density,
            center,
            radius,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn density(&self) -> Density {
        self.density
    }

    pub fn center(&self) -> NodeId {
        self.center
    }

    pub fn radius(&self) -> HopCount {
        self.radius
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Teams of every radius `t <= ball.radius()` given the maximum relation at the full radius.
///
/// `sets` must already be refined; teams are returned from the largest radius down.
pub(crate) fn ball_teams(view: &PatternView, ball: &Ball, mut sets: Sets) -> Vec<Team> {
    let mut out = Vec::new();
    if sets.iter().any(|s| !s.iter().any(|&b| b)) {
        return out;
    }
    let r = ball.radius();
    for t in (1..=r).rev() {
        if t < r {
            let len = ball.prefix_len(t);
            sets.iter_mut().for_each(|s| s.truncate(len));
            if !refine(view, &ball.prefix(t), &mut sets) {
                break;
            }
        }
        if capacity_ok(view, &sets) {
            out.push(Team::from_sets(ball, t, &sets));
        }
    }
    out
}

/// Perfect subgraph of `pattern` in `ball`, if the capacities hold.
pub fn team_sim_ball(pattern: &PatternGraph, ball: &Ball) -> Option<Team> {
    team_sim_within(pattern, ball, ball.radius())
}

/// Perfect subgraph of `pattern` in the radius-`t` ball around the same center.
pub fn team_sim_within(pattern: &PatternGraph, ball: &Ball, t: HopCount) -> Option<Team> {
    let view = PatternView::full(pattern);
    let prefix = ball.prefix(t);
    let mut sets = initial_sets(&view, &prefix);
    if !refine(&view, &prefix, &mut sets) || !capacity_ok(&view, &sets) {
        return None;
    }
    Some(Team::from_sets(ball, t.min(ball.radius()), &sets))
}

/// Maximum simulation of the pattern in itself: pairs `(u, v)` where `v` simulates `u`.
pub fn self_simulation(pattern: &PatternGraph) -> BTreeSet<(PNodeId, PNodeId)> {
    let view = PatternView::full(pattern);
    let mut sets = initial_sets(&view, &view);
    refine(&view, &view, &mut sets);
    let mut out = BTreeSet::new();
    for (s, set) in sets.iter().enumerate() {
        for (i, &b) in set.iter().enumerate() {
            if b {
                out.insert((view.id(s), view.id(i)));
            }
        }
    }
    out
}

/// Whether some data graph yields a non-empty perfect subgraph.
///
/// Whenever `v` simulates `u`, every match of `v` also matches `u`, so the
/// least match count of `v` must fit under the upper bound of `u`. That count
/// is the lower bound of `v`, raised to 2 when a neighbor of `v` simulates
/// `v`: each match then needs a distinct neighbor among the matches of `v`.
pub fn pattern_satisfiable(pattern: &PatternGraph) -> bool {
    if pattern.node_count() == 0 {
        return false;
    }
    let sim = self_simulation(pattern);
    let least = |v: PNodeId| {
        let lower = pattern.capacity(v).expect("known node").lower().max(1);
        if pattern.neighbors(v).any(|w| sim.contains(&(v, w))) {
            lower.max(2)
        } else {
            lower
        }
    };
    sim.iter().all(|&(u, v)| pattern.capacity(u).expect("known node").upper().map_or(true, |y| least(v) <= y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, DataGraph, LabelId};
    use crate::pattern::Capacity;

    fn cap(x: u32, y: Option<u32>) -> Capacity {
        Capacity::new(x, y).unwrap()
    }

    fn star_pattern(caps: [Capacity; 3]) -> PatternGraph {
        let mut p = PatternGraph::new();
        let pm = p.add_node("pm", LabelId(0), caps[0]).unwrap();
        let se = p.add_node("se", LabelId(1), caps[1]).unwrap();
        let st = p.add_node("st", LabelId(2), caps[2]).unwrap();
        p.add_edge(pm, se).unwrap();
        p.add_edge(pm, st).unwrap();
        p
    }

    #[test]
    fn star_with_two_testers() {
        let mut g = DataGraph::new();
        let pm = g.add_node([LabelId(0)]).unwrap();
        let se = g.add_node([LabelId(1)]).unwrap();
        let st1 = g.add_node([LabelId(2)]).unwrap();
        let st2 = g.add_node([LabelId(2)]).unwrap();
        for v in [se, st1, st2] {
            g.add_edge(pm, v).unwrap();
        }
        let p = star_pattern([cap(1, Some(1)), cap(1, Some(1)), cap(1, Some(2))]);
        let b = ball(&g, pm, 1).unwrap();
        let team = team_sim_ball(&p, &b).unwrap();
        assert_eq!(team.nodes().len(), 4);
        assert_eq!(team.density(), Density::new(3, 4));

        let tight = star_pattern([cap(1, Some(1)), cap(1, Some(1)), cap(1, Some(1))]);
        assert!(undirg_sim(&PatternView::full(&tight), &b).matches(PNodeId(2)).len() == 2);
        assert!(team_sim_ball(&tight, &b).is_none());
    }

    #[test]
    fn missing_label_gives_empty_relation() {
        let mut g = DataGraph::new();
        let a = g.add_node([LabelId(0)]).unwrap();
        let b = g.add_node([LabelId(1)]).unwrap();
        g.add_edge(a, b).unwrap();
        let p = star_pattern([cap(1, None); 3]);
        assert!(undirg_sim(&PatternView::full(&p), &ball(&g, a, 2).unwrap()).is_empty());
    }

    #[test]
    fn conflicting_bounds_are_unsatisfiable() {
        let mut p = PatternGraph::new();
        let a = p.add_node("a", LabelId(0), cap(1, None)).unwrap();
        let b1 = p.add_node("b1", LabelId(1), cap(2, Some(2))).unwrap();
        let b2 = p.add_node("b2", LabelId(1), cap(1, Some(1))).unwrap();
        p.add_edge(a, b1).unwrap();
        p.add_edge(a, b2).unwrap();
        assert!(!pattern_satisfiable(&p));
        p.set_capacity(b2, cap(1, Some(2))).unwrap();
        assert!(pattern_satisfiable(&p));
    }

    #[test]
    fn self_supporting_nodes_need_two_matches() {
        let mut p = PatternGraph::new();
        let a = p.add_node("a", LabelId(0), cap(1, Some(1))).unwrap();
        let b = p.add_node("b", LabelId(0), cap(1, Some(2))).unwrap();
        p.add_edge(a, b).unwrap();
        assert!(!pattern_satisfiable(&p));
        p.set_capacity(a, cap(1, Some(2))).unwrap();
        assert!(pattern_satisfiable(&p));
    }

    #[test]
    fn unbounded_patterns_are_satisfiable() {
        let p = star_pattern([cap(1, None), cap(3, None), cap(2, None)]);
        assert!(pattern_satisfiable(&p));
    }

    #[test]
    fn shrinking_matches_direct_computation() {
        let mut g = DataGraph::new();
        let ids: Vec<_> = (0..6).map(|i| g.add_node([LabelId(i % 2)]).unwrap()).collect();
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
        let mut p = PatternGraph::new();
        let a = p.add_node("a", LabelId(0), cap(1, None)).unwrap();
        let b = p.add_node("b", LabelId(1), cap(1, None)).unwrap();
        p.add_edge(a, b).unwrap();
        let view = PatternView::full(&p);
        let bl = ball(&g, ids[0], 3).unwrap();
        let outer = undirg_sim(&view, &bl);
        for t in 1..=3 {
            assert_eq!(inc_sim_shrink(&outer, &view, &bl, t), undirg_sim_within(&view, &bl, t));
        }
    }

    #[test]
    fn edge_insertion_prunes_like_recomputation() {
        let mut g = DataGraph::new();
        let a1 = g.add_node([LabelId(0)]).unwrap();
        let b1 = g.add_node([LabelId(1)]).unwrap();
        let c1 = g.add_node([LabelId(2)]).unwrap();
        let a2 = g.add_node([LabelId(0)]).unwrap();
        let c2 = g.add_node([LabelId(2)]).unwrap();
        g.add_edge(a1, b1).unwrap();
        g.add_edge(b1, c1).unwrap();
        g.add_edge(a1, c1).unwrap();
        g.add_edge(a2, b1).unwrap();
        g.add_edge(b1, c2).unwrap();
        let mut p = PatternGraph::new();
        let a = p.add_node("a", LabelId(0), cap(1, None)).unwrap();
        let b = p.add_node("b", LabelId(1), cap(1, None)).unwrap();
        let c = p.add_node("c", LabelId(2), cap(1, None)).unwrap();
        p.add_edge(a, b).unwrap();
        p.add_edge(b, c).unwrap();
        let bl = ball(&g, b1, 1).unwrap();
        let before = undirg_sim(&PatternView::full(&p), &bl);
        assert_eq!(before.pair_count(), 5);
        p.add_edge(a, c).unwrap();
        let view = PatternView::full(&p);
        let after = pat_e_ins(&view, &bl, &before, &[(a, c)]);
        assert_eq!(after, undirg_sim(&view, &bl));
        assert_eq!(after.matches(a), &[a1]);
        assert_eq!(after.matches(c), &[c1]);
    }
}
