//! Incremental top-k maintenance under pattern and data updates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::batch::{bound_excludes, validate_query, QueryError, TopKList};
use crate::fragment::{pfrag, FragmentError, Fragmentation, UpdateTarget};
use crate::graph::{Ball, BallExtractor, DataGraph, DataUpdate, GraphError, HopCount, NodeId};
use crate::index::{bf_apply, build_index_unchecked, fresh_record, BallRecord, IncIndex, IndexError, TypeCode, UpdateId};
use crate::pattern::{PNodeId, PatternError, PatternGraph, PatternUpdate, PatternView};
use crate::simulation::{
    ball_teams, pattern_satisfiable, propagate_insertions, relation_from_sets, seed_after_insertions, sets_from_relation,
    undirg_sim, MatchRelation, Sets,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    /// Stop combining once no remaining ball can reach the top-k.
    pub early_return: bool,
    /// Build the index with worker threads.
    pub parallel: bool,
    /// Monotone nanosecond clock for timing counters.
    pub clock: Option<fn() -> u64>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            early_return: true,
            parallel: false,
            clock: None,
        }
    }
}

/// Balls considered by one update set, by reason.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffectedBalls {
    /// Balls in buckets flagged by pattern updates.
    pub pattern: BTreeSet<NodeId>,
    /// Balls whose node or edge set changed.
    pub structural: BTreeSet<NodeId>,
    /// Fully matched balls revisited because the data changed.
    pub full_match: BTreeSet<NodeId>,
    /// Balls of deleted centers.
    pub retired: BTreeSet<NodeId>,
}

impl AffectedBalls {
    pub fn all(&self) -> BTreeSet<NodeId> {
        self.pattern
            .iter()
            .chain(&self.structural)
            .chain(&self.full_match)
            .copied()
            .collect()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.pattern.contains(&v) || self.structural.contains(&v) || self.full_match.contains(&v)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub affected_balls: usize,
    pub structural_balls: usize,
    pub balls_visited: usize,
    pub balls_combined: usize,
    pub relations_recomputed: usize,
    pub relations_incremental: usize,
    pub balls_created: usize,
    pub balls_retired: usize,
    pub emit_nanos: u64,
    pub total_nanos: u64,
}

/// Cumulative counters over the life of an engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineTotals {
    pub update_sets: u64,
    pub pattern_units: u64,
    pub data_units: u64,
    pub affected_balls: u64,
    pub balls_visited: u64,
    pub balls_combined: u64,
    pub relations_recomputed: u64,
    pub relations_incremental: u64,
    pub early_returns: u64,
    pub rebuilds: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub topk: TopKList,
    pub satisfiable: bool,
    pub early_returned: bool,
    pub affected: AffectedBalls,
    /// Centers whose ball was extracted, in visit order.
    pub visited: Vec<NodeId>,
    pub stats: UpdateStats,
}

/// What a fragment relation needs after pending updates.
enum Pending {
    Unchanged,
    Recompute,
    Insert(Vec<(PNodeId, PNodeId)>),
}

/// Maintains the top-k teams of a pattern over a data graph across update sets.
#[derive(Clone, Debug)]
pub struct IncrementalEngine {
    pattern: PatternGraph,
    fragmentation: Fragmentation,
    graph: DataGraph,
    r: HopCount,
    k: usize,
    index: IncIndex,
    options: EngineOptions,
    satisfiable: bool,
    current: TopKList,
    totals: EngineTotals,
}

impl IncrementalEngine {
    /// Fragments the pattern into `h` parts, builds the index, and computes the initial top-k.
    pub fn new(
        pattern: PatternGraph,
        graph: DataGraph,
        r: HopCount,
        k: usize,
        h: usize,
        options: EngineOptions,
    ) -> Result<Self, EngineError> {
        validate_query(&pattern, r, k)?;
        let fragmentation = pfrag(&pattern, h)?;
        let index = build_index_unchecked(&pattern, &fragmentation, &graph, r, options.parallel);
        let mut engine = IncrementalEngine {
            satisfiable: pattern_satisfiable(&pattern),
            pattern,
            fragmentation,
            graph,
            r,
            k,
            index,
            options,
            current: TopKList::new(k),
            totals: EngineTotals::default(),
        };
        engine.dynamic(&[], &[])?;
        engine.totals = EngineTotals::default();
        Ok(engine)
    }

    /// Resumes from a stored fragmentation and index of `pattern` over `graph`.
    pub fn from_parts(
        pattern: PatternGraph,
        graph: DataGraph,
        fragmentation: Fragmentation,
        index: IncIndex,
        k: usize,
        options: EngineOptions,
    ) -> Result<Self, EngineError> {
        validate_query(&pattern, index.radius(), k)?;
        if fragmentation.h() != index.h() {
            return Err(IndexError::Inconsistent("fragment count").into());
        }
        if pattern.node_ids().any(|u| fragmentation.fragment_of(u).is_none()) {
            return Err(IndexError::Inconsistent("unassigned pattern node").into());
        }
        if index.fbm.len() != graph.node_count() || index.fbm.records().any(|r| !graph.contains_node(r.status.center)) {
            return Err(IndexError::Inconsistent("ball centers").into());
        }
        let mut engine = IncrementalEngine {
            satisfiable: pattern_satisfiable(&pattern),
            r: index.radius(),
            pattern,
            fragmentation,
            graph,
            k,
            index,
            options,
            current: TopKList::new(k),
            totals: EngineTotals::default(),
        };
        engine.run(&[], &[], true)?;
        engine.totals = EngineTotals::default();
        Ok(engine)
    }

    pub fn pattern(&self) -> &PatternGraph {
        &self.pattern
    }

    pub fn graph(&self) -> &DataGraph {
        &self.graph
    }

    pub fn fragmentation(&self) -> &Fragmentation {
        &self.fragmentation
    }

    pub fn index(&self) -> &IncIndex {
        &self.index
    }

    pub fn radius(&self) -> HopCount {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfiable
    }

    /// Top-k after the last processed update set.
    pub fn topk(&self) -> &TopKList {
        &self.current
    }

    pub fn totals(&self) -> EngineTotals {
        self.totals
    }

    pub fn options(&self) -> EngineOptions {
        self.options
    }

    pub fn set_early_return(&mut self, on: bool) {
        self.options.early_return = on;
    }

    fn now(&self) -> u64 {
        self.options.clock.map_or(0, |c| c())
    }

    /// Re-fragments the current pattern into `h` parts and rebuilds the index.
    pub fn rebuild(&mut self, h: usize) -> Result<QueryResult, EngineError> {
        let fragmentation = pfrag(&self.pattern, h)?;
        self.index = build_index_unchecked(&self.pattern, &fragmentation, &self.graph, self.r, self.options.parallel);
        self.fragmentation = fragmentation;
        self.totals.rebuilds += 1;
        self.dynamic(&[], &[])
    }

    pub fn dynamic_p(&mut self, dp: &[PatternUpdate]) -> Result<QueryResult, EngineError> {
        self.dynamic(dp, &[])
    }

    pub fn dynamic_g(&mut self, dg: &[DataUpdate]) -> Result<QueryResult, EngineError> {
        self.dynamic(&[], dg)
    }

    /// Applies one update set atomically and returns the new top-k.
    ///
    /// On error neither the pattern, the graph, nor the index changes.
    pub fn dynamic(&mut self, dp: &[PatternUpdate], dg: &[DataUpdate]) -> Result<QueryResult, EngineError> {
        self.run(dp, dg, false)
    }

    fn run(&mut self, dp: &[PatternUpdate], dg: &[DataUpdate], rescan: bool) -> Result<QueryResult, EngineError> {
        let start = self.now();

        let mut pattern = self.pattern.clone();
        let mut fragmentation = self.fragmentation.clone();
        let mut classified = Vec::with_capacity(dp.len());
        for u in dp {
            let c = fragmentation.classify(&pattern, u)?;
            pattern.apply(u)?;
            fragmentation.commit(u);
            classified.push((u.clone(), c));
        }
        pattern.validate()?;

        let mut affected = AffectedBalls::default();
        let mut undo = Vec::with_capacity(dg.len());
        for u in dg {
            let (touched, applied) = match u {
                DataUpdate::DeleteEdge(a, b) => {
                    let near = self.centers_near_both(*a, *b);
                    (near, self.graph.apply_with_undo(u))
                }
                DataUpdate::DeleteNode(v) => {
                    let near: Vec<NodeId> = self.graph.within(*v, self.r).into_iter().map(|(c, _)| c).collect();
                    (near, self.graph.apply_with_undo(u))
                }
                DataUpdate::InsertEdge(a, b) => {
                    let applied = self.graph.apply_with_undo(u);
                    let near = if applied.is_ok() { self.centers_near_both(*a, *b) } else { Vec::new() };
                    (near, applied)
                }
                DataUpdate::InsertNode { node, .. } => {
                    let applied = self.graph.apply_with_undo(u);
                    let near = if applied.is_ok() {
                        self.graph.within(*node, self.r).into_iter().map(|(c, _)| c).collect()
                    } else {
                        Vec::new()
                    };
                    (near, applied)
                }
            };
            match applied {
                Ok(step) => {
                    undo.push(step);
                    affected.structural.extend(touched);
                    if let DataUpdate::DeleteNode(v) = u {
                        affected.retired.insert(*v);
                    }
                }
                Err(e) => {
                    while let Some(step) = undo.pop() {
                        self.graph.undo(step);
                    }
                    return Err(e.into());
                }
            }
        }
        affected.structural.retain(|&v| self.graph.contains_node(v));
        affected.retired.retain(|&v| !self.graph.contains_node(v));

        self.pattern = pattern;
        self.fragmentation = fragmentation;
        for (u, c) in classified {
            self.index.planner.record(c.target, u.clone());
            for d in c.derived_cut_deletions {
                self.index.planner.record(UpdateTarget::Cut, d);
            }
            bf_apply(&mut self.index.filter, &u, c.target);
        }
        let latest = self.index.planner.latest();
        self.satisfiable = pattern_satisfiable(&self.pattern);

        let h = self.fragmentation.h();
        let views: Vec<PatternView> = (0..h).map(|i| self.fragmentation.view(&self.pattern, i)).collect();
        let mut stats = UpdateStats::default();
        let mut visited = Vec::new();
        let mut extractor = BallExtractor::new();

        for &v in &affected.retired {
            self.index.fbm.remove(v);
        }
        stats.balls_retired = affected.retired.len();
        let mut structural_balls: BTreeMap<NodeId, Ball> = BTreeMap::new();
        for &v in &affected.structural {
            if self.index.fbm.record(v).is_none() {
                stats.balls_created += 1;
            }
            let ball = extractor.extract(&self.graph, v, self.r).expect("live center");
            visited.push(v);
            self.index.fbm.insert(fresh_record(&views, &ball, latest));
            stats.relations_recomputed += h;
            structural_balls.insert(v, ball);
        }
        stats.structural_balls = affected.structural.len();

        self.totals.update_sets += 1;
        self.totals.pattern_units += dp.len() as u64;
        self.totals.data_units += dg.len() as u64;

        if !self.satisfiable {
            self.current = TopKList::new(self.k);
            stats.affected_balls = affected.structural.len();
            stats.balls_visited = visited.len();
            stats.total_nanos = self.now().saturating_sub(start);
            stats.emit_nanos = stats.total_nanos;
            self.accumulate(&stats, false);
            return Ok(QueryResult {
                topk: self.current.clone(),
                satisfiable: false,
                early_returned: false,
                affected,
                visited,
                stats,
            });
        }

        for code in self.index.filter.take_affected() {
            affected.pattern.extend(self.index.fbm.bucket(code).iter().copied());
        }
        if !dg.is_empty() || rescan {
            affected.full_match = self.index.fbm.bucket(TypeCode::full(h)).clone();
        }
        let mut order: Vec<(NodeId, crate::graph::Density)> = affected
            .all()
            .into_iter()
            .filter_map(|v| self.index.fbm.record(v).map(|r| (v, r.status.den)))
            .collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        stats.affected_balls = order.len();

        let full_view = PatternView::full(&self.pattern);
        let cut_seeds: Vec<(usize, usize)> = self
            .fragmentation
            .cut()
            .iter()
            .filter_map(|&(a, b)| Some((full_view.slot(a)?, full_view.slot(b)?)))
            .collect();
        let mut list = TopKList::new(self.k);
        let mut emitted: Option<u64> = None;
        for (v, den) in order {
            if emitted.is_none() && self.options.early_return && bound_excludes(den, list.kth_density()) {
                emitted = Some(self.now());
            }
            let mut ball = structural_balls.remove(&v);
            self.reconcile(v, &views, latest, &mut ball, &mut extractor, &mut stats, &mut visited);
            if emitted.is_some() {
                continue;
            }
            let record = self.index.fbm.record(v).expect("affected ball is indexed");
            if !record.status.type_code.is_full(h) {
                continue;
            }
            let ball = match ball {
                Some(b) => b,
                None => {
                    visited.push(v);
                    extractor.extract(&self.graph, v, self.r).expect("live center")
                }
            };
            stats.balls_combined += 1;
            for team in combine(&full_view, &cut_seeds, &ball, &record.relations) {
                list.insert(team);
            }
        }
        self.compact();
        self.current = list;
        let end = self.now();
        stats.balls_visited = visited.len();
        stats.total_nanos = end.saturating_sub(start);
        stats.emit_nanos = emitted.unwrap_or(end).saturating_sub(start);
        self.accumulate(&stats, emitted.is_some());
        Ok(QueryResult {
            topk: self.current.clone(),
            satisfiable: true,
            early_returned: emitted.is_some(),
            affected,
            visited,
            stats,
        })
    }

    fn accumulate(&mut self, stats: &UpdateStats, early: bool) {
        let t = &mut self.totals;
        t.affected_balls += stats.affected_balls as u64;
        t.balls_visited += stats.balls_visited as u64;
        t.balls_combined += stats.balls_combined as u64;
        t.relations_recomputed += stats.relations_recomputed as u64;
        t.relations_incremental += stats.relations_incremental as u64;
        t.early_returns += early as u64;
    }

    fn centers_near_both(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        let near_a: BTreeSet<NodeId> = self.graph.within(a, self.r).into_iter().map(|(c, _)| c).collect();
        self.graph
            .within(b, self.r)
            .into_iter()
            .map(|(c, _)| c)
            .filter(|c| near_a.contains(c))
            .collect()
    }

    /// Brings one ball's fragment relations up to update `latest`.
    #[allow(clippy::too_many_arguments)]
    fn reconcile(
        &mut self,
        v: NodeId,
        views: &[PatternView],
        latest: UpdateId,
        ball: &mut Option<Ball>,
        extractor: &mut BallExtractor,
        stats: &mut UpdateStats,
        visited: &mut Vec<NodeId>,
    ) {
        let record = self.index.fbm.record(v).expect("affected ball is indexed");
        let cflag = record.status.cflag;
        if cflag == latest {
            return;
        }
        let plans: Vec<Pending> = (0..views.len())
            .map(|i| {
                let pending = self.index.planner.pending(UpdateTarget::Fragment(i), cflag);
                if pending.iter().any(|e| e.update.is_deletion()) {
                    return Pending::Recompute;
                }
                if record.relations[i].is_none() || !pending.iter().any(|e| e.update.is_insertion()) {
                    return Pending::Unchanged;
                }
                let edges = pending
                    .iter()
                    .filter_map(|e| match &e.update {
                        PatternUpdate::InsertEdge(a, b) => Some((*a, *b)),
                        PatternUpdate::InsertNode { node, anchor, .. } => Some((*node, *anchor)),
                        _ => None,
                    })
                    .collect();
                Pending::Insert(edges)
            })
            .collect();
        let mut relations = record.relations.clone();
        if plans.iter().any(|p| !matches!(p, Pending::Unchanged)) {
            if ball.is_none() {
                visited.push(v);
                *ball = Some(extractor.extract(&self.graph, v, self.r).expect("live center"));
            }
            let b = ball.as_ref().expect("extracted");
            for (i, plan) in plans.into_iter().enumerate() {
                match plan {
                    Pending::Unchanged => {}
                    Pending::Recompute => {
                        stats.relations_recomputed += 1;
                        relations[i] = if views[i].is_empty() {
                            Some(MatchRelation::empty())
                        } else {
                            let m = undirg_sim(&views[i], b);
                            (!m.is_empty()).then_some(m)
                        };
                    }
                    Pending::Insert(edges) => {
                        stats.relations_incremental += 1;
                        let old = relations[i].take().expect("matched fragment");
                        let (mut sets, seeds) = seed_after_insertions(&views[i], b, &old, &edges);
                        relations[i] = propagate_insertions(&views[i], b, &mut sets, &seeds)
                            .then(|| relation_from_sets(&views[i], b, &sets));
                    }
                }
            }
        }
        self.index.fbm.relink(v, relations, latest).expect("indexed ball");
    }

    fn compact(&mut self) {
        if self.index.planner.is_empty() {
            return;
        }
        let oldest = self.index.fbm.records().map(|r| r.status.cflag).min().unwrap_or(self.index.planner.latest());
        self.index.planner.compact(oldest);
    }
}

/// Teams of a fully matched ball from its fragment relations.
fn combine(full_view: &PatternView, cut_seeds: &[(usize, usize)], ball: &Ball, relations: &[Option<MatchRelation>]) -> Vec<crate::simulation::Team> {
    let union = MatchRelation::union(relations.iter().flatten());
    let mut sets: Sets = sets_from_relation(full_view, ball, ball.len(), &union);
    if !propagate_insertions(full_view, ball, &mut sets, cut_seeds) {
        return Vec::new();
    }
    ball_teams(full_view, ball, sets)
}

/// Combines fragment relations of one ball into the maximum relation of the whole pattern.
pub fn combine_relations(pattern: &PatternGraph, fragmentation: &Fragmentation, ball: &Ball, relations: &[Option<MatchRelation>]) -> MatchRelation {
    if relations.iter().any(|r| r.is_none()) {
        return MatchRelation::empty();
    }
    let view = PatternView::full(pattern);
    let seeds: Vec<(usize, usize)> = fragmentation
        .cut()
        .iter()
        .filter_map(|&(a, b)| Some((view.slot(a)?, view.slot(b)?)))
        .collect();
    let union = MatchRelation::union(relations.iter().flatten());
    let mut sets = sets_from_relation(&view, ball, ball.len(), &union);
    propagate_insertions(&view, ball, &mut sets, &seeds);
    relation_from_sets(&view, ball, &sets)
}

/// Recomputes every record of `index` from scratch, for consistency checks.
pub fn fresh_records(pattern: &PatternGraph, fragmentation: &Fragmentation, graph: &DataGraph, r: HopCount) -> Vec<BallRecord> {
    let views: Vec<PatternView> = (0..fragmentation.h()).map(|i| fragmentation.view(pattern, i)).collect();
    let mut ex = BallExtractor::new();
    graph
        .nodes()
        .map(|v| fresh_record(&views, &ex.extract(graph, v, r).expect("live node"), 0))
        .collect()
}
