//! Batch top-k team search.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::graph::{Ball, BallExtractor, DataGraph, Density, HopCount, NodeId};
use crate::pattern::{PatternError, PatternGraph, PatternView};
use crate::simulation::{ball_teams, initial_sets, pattern_satisfiable, refine, Team};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("radius must be at least 1")]
    InvalidRadius,
    #[error("k must be at least 1")]
    InvalidK,
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Total order on teams: denser first, then fewer nodes, then node list, radius, center.
pub fn team_order(a: &Team, b: &Team) -> Ordering {
    b.density()
        .cmp(&a.density())
        .then_with(|| a.node_count().cmp(&b.node_count()))
        .then_with(|| a.nodes().cmp(b.nodes()))
        .then_with(|| a.radius().cmp(&b.radius()))
        .then_with(|| a.center().cmp(&b.center()))
}

/// The best `k` teams with distinct node sets, sorted by [`team_order`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopKList {
    k: usize,
    teams: Vec<Team>,
}

impl TopKList {
    pub fn new(k: usize) -> Self {
        TopKList { k, teams: Vec::new() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn teams(&self) -> &[Team] {
        &self.teams
    }

    pub fn len(&self) -> usize {
        self.teams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.teams.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.teams.len() >= self.k
    }

    /// Density of the k-th team, or `None` while fewer than `k` are held.
    pub fn kth_density(&self) -> Option<Density> {
        if self.is_full() {
            self.teams.get(self.k - 1).map(|t| t.density())
        } else {
            None
        }
    }

    /// Offers a team; a node set already present keeps the smaller `(radius, center)`.
    pub fn insert(&mut self, team: Team) -> bool {
        if self.k == 0 {
            return false;
        }
        if let Some(pos) = self.teams.iter().position(|t| t.nodes() == team.nodes()) {
            let old = &self.teams[pos];
            if (team.radius(), team.center()) < (old.radius(), old.center()) {
                self.teams.remove(pos);
            } else {
                return false;
            }
        }
        let pos = self.teams.partition_point(|t| team_order(t, &team) == Ordering::Less);
        if pos >= self.k {
            return false;
        }
        self.teams.insert(pos, team);
        self.teams.truncate(self.k);
        true
    }
}

/// Whether a ball with density bound `bound` can be skipped given the current k-th density.
///
/// Every team in a ball with at least one edge is strictly sparser than the
/// bound, so ties are skipped except at zero, where an isolated center can
/// still tie.
pub fn bound_excludes(bound: Density, kth: Option<Density>) -> bool {
    match kth {
        None => false,
        Some(kth) => bound < kth || (bound == kth && !bound.is_zero()),
    }
}

/// Order in which batch search visits centers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BallOrder {
    #[default]
    CenterAscending,
    BoundDescending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchOptions {
    pub filter: bool,
    pub order: BallOrder,
    pub parallel: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            filter: true,
            order: BallOrder::CenterAscending,
            parallel: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BatchStats {
    pub balls: usize,
    pub filtered: usize,
    pub simulated: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BatchOutcome {
    Unsatisfiable,
    TopK(TopKList),
}

impl BatchOutcome {
    pub fn teams(&self) -> &[Team] {
        match self {
            BatchOutcome::Unsatisfiable => &[],
            BatchOutcome::TopK(list) => list.teams(),
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        matches!(self, BatchOutcome::TopK(_))
    }
}

pub(crate) fn validate_query(pattern: &PatternGraph, r: HopCount, k: usize) -> Result<(), QueryError> {
    if r == 0 {
        return Err(QueryError::InvalidRadius);
    }
    if k == 0 {
        return Err(QueryError::InvalidK);
    }
    pattern.validate()?;
    Ok(())
}

/// Teams of one ball, or nothing when the bound rules the ball out.
fn center_teams(view: &PatternView, ball: &Ball, kth: Option<Density>, filter: bool, stats: &mut BatchStats) -> Vec<Team> {
    stats.balls += 1;
    if filter && bound_excludes(ball.density_bound(), kth) {
        stats.filtered += 1;
        return Vec::new();
    }
    stats.simulated += 1;
    let mut sets = initial_sets(view, ball);
    if !refine(view, ball, &mut sets) {
        return Vec::new();
    }
    ball_teams(view, ball, sets)
}

/// Top-k teams of `pattern` over all balls of radius up to `r`.
pub fn batch_topk(pattern: &PatternGraph, graph: &DataGraph, r: HopCount, k: usize) -> Result<BatchOutcome, QueryError> {
    batch_topk_with(pattern, graph, r, k, &BatchOptions::default()).map(|(o, _)| o)
}

pub fn batch_topk_with(
    pattern: &PatternGraph,
    graph: &DataGraph,
    r: HopCount,
    k: usize,
    options: &BatchOptions,
) -> Result<(BatchOutcome, BatchStats), QueryError> {
    validate_query(pattern, r, k)?;
    let mut stats = BatchStats::default();
    if !pattern_satisfiable(pattern) {
        return Ok((BatchOutcome::Unsatisfiable, stats));
    }
    let view = PatternView::full(pattern);
    let mut extractor = BallExtractor::new();
    let centers: Vec<NodeId> = match options.order {
        BallOrder::CenterAscending => graph.nodes().collect(),
        BallOrder::BoundDescending => {
            let mut keyed: Vec<(Density, NodeId)> = graph
                .nodes()
                .map(|v| (extractor.extract(graph, v, r).expect("live node").density_bound(), v))
                .collect();
            keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            keyed.into_iter().map(|(_, v)| v).collect()
        }
    };
    let mut list = TopKList::new(k);

    #[cfg(feature = "parallel")]
    if options.parallel {
        use rayon::prelude::*;
        for chunk in centers.chunks(256) {
            let kth = list.kth_density();
            let results: Vec<(Vec<Team>, BatchStats)> = chunk
                .par_iter()
                .map_init(BallExtractor::new, |ex, &v| {
                    let mut local = BatchStats::default();
                    let ball = ex.extract(graph, v, r).expect("live node");
                    (center_teams(&view, &ball, kth, options.filter, &mut local), local)
                })
                .collect();
            for (teams, local) in results {
                stats.balls += local.balls;
                stats.filtered += local.filtered;
                stats.simulated += local.simulated;
                for t in teams {
                    list.insert(t);
                }
            }
        }
        return Ok((BatchOutcome::TopK(list), stats));
    }

    for v in centers {
        let ball = extractor.extract(graph, v, r).expect("live node");
        for t in center_teams(&view, &ball, list.kth_density(), options.filter, &mut stats) {
            list.insert(t);
        }
    }
    Ok((BatchOutcome::TopK(list), stats))
}
