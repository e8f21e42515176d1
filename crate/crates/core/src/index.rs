//! Auxiliary structures for incremental maintenance.
//!
//! * [`FbmIndex`] holds every ball's status (center, last processed update,
//!   density bound, type code) and its per-fragment match relations, with
//!   balls bucketed by type code.
//! * [`BallFilter`] keeps one filtering code per bucket.
//! * [`UpdatePlanner`] keeps one stack of recorded pattern updates per
//!   fragment plus one for cut edges.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::batch::{validate_query, QueryError};
use crate::fragment::{FragmentError, Fragmentation, UpdateTarget};
use crate::graph::{Ball, BallExtractor, DataGraph, Density, HopCount, NodeId};
use crate::pattern::{PatternGraph, PatternUpdate, PatternView};
use crate::simulation::{pattern_satisfiable, undirg_sim, MatchRelation};

/// Monotone identifier of a recorded pattern update; 0 means none.
pub type UpdateId = u64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("pattern is unsatisfiable")]
    UnsatisfiablePattern,
    #[error("no ball centered at {0}")]
    UnknownBall(NodeId),
    #[error("inconsistent index: {0}")]
    Inconsistent(&'static str),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// Bit `i` is set when fragment `i` has a non-empty match in the ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TypeCode(pub u32);

impl TypeCode {
    pub fn full(h: usize) -> Self {
        TypeCode(((1u64 << h) - 1) as u32)
    }

    pub fn of(relations: &[Option<MatchRelation>]) -> Self {
        TypeCode(
            relations
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_some())
                .fold(0, |acc, (i, _)| acc | (1 << i)),
        )
    }

    pub fn has(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn is_full(self, h: usize) -> bool {
        self == Self::full(h)
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:b}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BallStatus {
    pub center: NodeId,
    pub cflag: UpdateId,
    pub den: Density,
    pub type_code: TypeCode,
}

/// Status plus per-fragment relations; `None` marks a fragment without a match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallRecord {
    pub status: BallStatus,
    pub relations: Vec<Option<MatchRelation>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FbmIndex {
    h: usize,
    buckets: Vec<BTreeSet<NodeId>>,
    records: Vec<Option<BallRecord>>,
    count: usize,
}

impl FbmIndex {
    pub fn new(h: usize) -> Self {
        FbmIndex {
            h,
            buckets: vec![BTreeSet::new(); 1 << h],
            records: Vec::new(),
            count: 0,
        }
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn bucket(&self, code: TypeCode) -> &BTreeSet<NodeId> {
        &self.buckets[code.0 as usize]
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn record(&self, center: NodeId) -> Option<&BallRecord> {
        self.records.get(center.index()).and_then(|r| r.as_ref())
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Records in ascending center order.
    pub fn records(&self) -> impl Iterator<Item = &BallRecord> + '_ {
        self.records.iter().filter_map(|r| r.as_ref())
    }

    /// Inserts or replaces the record of `record.status.center`.
    pub fn insert(&mut self, record: BallRecord) {
        let center = record.status.center;
        self.remove(center);
        if self.records.len() <= center.index() {
            self.records.resize_with(center.index() + 1, || None);
        }
        self.buckets[record.status.type_code.0 as usize].insert(center);
        self.records[center.index()] = Some(record);
        self.count += 1;
    }

    pub fn remove(&mut self, center: NodeId) -> Option<BallRecord> {
        let old = self.records.get_mut(center.index()).and_then(|r| r.take())?;
        self.buckets[old.status.type_code.0 as usize].remove(&center);
        self.count -= 1;
        Some(old)
    }

    /// Replaces a ball's relations and moves it to the bucket they imply.
    pub fn relink(&mut self, center: NodeId, relations: Vec<Option<MatchRelation>>, cflag: UpdateId) -> Result<(), IndexError> {
        let record = self
            .records
            .get_mut(center.index())
            .and_then(|r| r.as_mut())
            .ok_or(IndexError::UnknownBall(center))?;
        let code = TypeCode::of(&relations);
        if code != record.status.type_code {
            self.buckets[record.status.type_code.0 as usize].remove(&center);
            self.buckets[code.0 as usize].insert(center);
        }
        record.status.type_code = code;
        record.status.cflag = cflag;
        record.relations = relations;
        Ok(())
    }

    pub fn set_den(&mut self, center: NodeId, den: Density) -> Result<(), IndexError> {
        let record = self
            .records
            .get_mut(center.index())
            .and_then(|r| r.as_mut())
            .ok_or(IndexError::UnknownBall(center))?;
        record.status.den = den;
        Ok(())
    }
}

/// Replaces `center`'s relations in `fbm`.
pub fn fbm_relink(fbm: &mut FbmIndex, center: NodeId, relations: Vec<Option<MatchRelation>>, cflag: UpdateId) -> Result<(), IndexError> {
    fbm.relink(center, relations, cflag)
}

/// One filtering code per type-code bucket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallFilter {
    h: usize,
    codes: Vec<u32>,
}

impl BallFilter {
    pub fn new(h: usize) -> Self {
        BallFilter {
            h,
            codes: vec![TypeCode::full(h).0; 1 << h],
        }
    }

    pub fn from_codes(h: usize, codes: Vec<u32>) -> Result<Self, IndexError> {
        if codes.len() != 1 << h || codes.iter().any(|&c| c > TypeCode::full(h).0) {
            return Err(IndexError::Inconsistent("filter codes"));
        }
        Ok(BallFilter { h, codes })
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// Clears bit `fragment` in every code.
    pub fn mark_deletion(&mut self, fragment: usize) {
        for c in &mut self.codes {
            *c &= !(1 << fragment);
        }
    }

    /// Buckets whose type code covers their filtering code; their codes are reset.
    pub fn take_affected(&mut self) -> Vec<TypeCode> {
        let full = TypeCode::full(self.h).0;
        let mut out = Vec::new();
        for (j, fc) in self.codes.iter_mut().enumerate() {
            if (j as u32) & *fc == *fc {
                out.push(TypeCode(j as u32));
                *fc = full;
            }
        }
        out
    }
}

/// Updates a filter for one pattern update landing on `target`.
pub fn bf_apply(filter: &mut BallFilter, update: &PatternUpdate, target: UpdateTarget) {
    if let (true, UpdateTarget::Fragment(i)) = (update.is_deletion(), target) {
        filter.mark_deletion(i);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordedUpdate {
    pub id: UpdateId,
    pub update: PatternUpdate,
}

/// Per-fragment and cut stacks of recorded pattern updates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdatePlanner {
    latest: UpdateId,
    stacks: Vec<Vec<RecordedUpdate>>,
}

impl UpdatePlanner {
    pub fn new(h: usize) -> Self {
        UpdatePlanner {
            latest: 0,
            stacks: vec![Vec::new(); h + 1],
        }
    }

    pub fn from_parts(latest: UpdateId, stacks: Vec<Vec<RecordedUpdate>>) -> Result<Self, IndexError> {
        for s in &stacks {
            if s.windows(2).any(|w| w[0].id >= w[1].id) || s.last().is_some_and(|e| e.id > latest) {
                return Err(IndexError::Inconsistent("update stack order"));
            }
        }
        Ok(UpdatePlanner { latest, stacks })
    }

    pub fn latest(&self) -> UpdateId {
        self.latest
    }

    pub fn stacks(&self) -> &[Vec<RecordedUpdate>] {
        &self.stacks
    }

    fn stack_index(&self, target: UpdateTarget) -> usize {
        match target {
            UpdateTarget::Fragment(i) => i,
            UpdateTarget::Cut => self.stacks.len() - 1,
        }
    }

    pub fn record(&mut self, target: UpdateTarget, update: PatternUpdate) -> UpdateId {
        self.latest += 1;
        let id = self.latest;
        let idx = self.stack_index(target);
        self.stacks[idx].push(RecordedUpdate { id, update });
        id
    }

    /// Updates on `target` newer than `since`.
    pub fn pending(&self, target: UpdateTarget, since: UpdateId) -> &[RecordedUpdate] {
        let stack = &self.stacks[self.stack_index(target)];
        let start = stack.partition_point(|e| e.id <= since);
        &stack[start..]
    }

    /// Drops entries every ball has already processed.
    pub fn compact(&mut self, oldest_cflag: UpdateId) {
        for s in &mut self.stacks {
            s.retain(|e| e.id > oldest_cflag);
        }
    }

    pub fn len(&self) -> usize {
        self.stacks.iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Records `update` on its stack and returns its id.
pub fn up_record(planner: &mut UpdatePlanner, target: UpdateTarget, update: PatternUpdate) -> UpdateId {
    planner.record(target, update)
}

/// Updates on `target` not yet processed by a ball whose flag is `cflag`.
pub fn pending_updates_for(planner: &UpdatePlanner, target: UpdateTarget, cflag: UpdateId) -> &[RecordedUpdate] {
    planner.pending(target, cflag)
}

/// The full auxiliary state for one pattern, graph, and radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncIndex {
    radius: HopCount,
    pub(crate) fbm: FbmIndex,
    pub(crate) filter: BallFilter,
    pub(crate) planner: UpdatePlanner,
}

impl IncIndex {
    pub fn from_parts(radius: HopCount, fbm_records: Vec<BallRecord>, filter: BallFilter, planner: UpdatePlanner) -> Result<Self, IndexError> {
        let h = filter.h;
        if planner.stacks.len() != h + 1 {
            return Err(IndexError::Inconsistent("stack count"));
        }
        let mut fbm = FbmIndex::new(h);
        for record in fbm_records {
            if record.relations.len() != h || TypeCode::of(&record.relations) != record.status.type_code {
                return Err(IndexError::Inconsistent("ball type code"));
            }
            if fbm.record(record.status.center).is_some() {
                return Err(IndexError::Inconsistent("duplicate ball"));
            }
            fbm.insert(record);
        }
        Ok(IncIndex {
            radius,
            fbm,
            filter,
            planner,
        })
    }

    pub fn radius(&self) -> HopCount {
        self.radius
    }

    pub fn h(&self) -> usize {
        self.fbm.h
    }

    pub fn fbm(&self) -> &FbmIndex {
        &self.fbm
    }

    pub fn filter(&self) -> &BallFilter {
        &self.filter
    }

    pub fn planner(&self) -> &UpdatePlanner {
        &self.planner
    }
}

/// Per-fragment relations of one ball; empty fragments match trivially.
pub(crate) fn ball_relations(views: &[PatternView], ball: &Ball) -> Vec<Option<MatchRelation>> {
    views
        .iter()
        .map(|view| {
            if view.is_empty() {
                Some(MatchRelation::empty())
            } else {
                let m = undirg_sim(view, ball);
                (!m.is_empty()).then_some(m)
            }
        })
        .collect()
}

pub(crate) fn fresh_record(views: &[PatternView], ball: &Ball, cflag: UpdateId) -> BallRecord {
    let relations = ball_relations(views, ball);
    BallRecord {
        status: BallStatus {
            center: ball.center(),
            cflag,
            den: ball.density_bound(),
            type_code: TypeCode::of(&relations),
        },
        relations,
    }
}

/// Builds the index without the satisfiability gate.
pub(crate) fn build_index_unchecked(pattern: &PatternGraph, frag: &Fragmentation, graph: &DataGraph, r: HopCount, parallel: bool) -> IncIndex {
    let h = frag.h();
    let views: Vec<PatternView> = (0..h).map(|i| frag.view(pattern, i)).collect();
    let centers: Vec<NodeId> = graph.nodes().collect();
    let records: Vec<BallRecord> = {
        #[cfg(feature = "parallel")]
        {
            if parallel {
                use rayon::prelude::*;
                centers
                    .par_iter()
                    .map_init(BallExtractor::new, |ex, &v| fresh_record(&views, &ex.extract(graph, v, r).expect("live node"), 0))
                    .collect()
            } else {
                let mut ex = BallExtractor::new();
                centers
                    .iter()
                    .map(|&v| fresh_record(&views, &ex.extract(graph, v, r).expect("live node"), 0))
                    .collect()
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = parallel;
            let mut ex = BallExtractor::new();
            centers
                .iter()
                .map(|&v| fresh_record(&views, &ex.extract(graph, v, r).expect("live node"), 0))
                .collect()
        }
    };
    let mut fbm = FbmIndex::new(h);
    for record in records {
        fbm.insert(record);
    }
    IncIndex {
        radius: r,
        fbm,
        filter: BallFilter::new(h),
        planner: UpdatePlanner::new(h),
    }
}

/// Builds the auxiliary structures for a satisfiable pattern.
pub fn build_index(pattern: &PatternGraph, frag: &Fragmentation, graph: &DataGraph, r: HopCount) -> Result<IncIndex, IndexError> {
    validate_query(pattern, r, 1)?;
    if !pattern_satisfiable(pattern) {
        return Err(IndexError::UnsatisfiablePattern);
    }
    Ok(build_index_unchecked(pattern, frag, graph, r, false))
}
