//! Pattern fragmentation into node-disjoint induced parts plus cut edges.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::pattern::{PNodeId, PatternError, PatternGraph, PatternUpdate, PatternView};

/// Largest supported fragment count.
pub const MAX_FRAGMENTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FragmentError {
    #[error("fragment count {h} must be between 1 and min({nodes}, {max})", max = MAX_FRAGMENTS)]
    InvalidH { h: usize, nodes: usize },
    #[error("fragment assignment does not cover pattern node {0}")]
    Uncovered(PNodeId),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Where an update lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateTarget {
    Fragment(usize),
    Cut,
}

/// Target of an update plus the cut edges it removes implicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub target: UpdateTarget,
    pub derived_cut_deletions: Vec<PatternUpdate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragmentation {
    h: usize,
    assignment: BTreeMap<PNodeId, usize>,
    cut: BTreeSet<(PNodeId, PNodeId)>,
}

fn ordered(a: PNodeId, b: PNodeId) -> (PNodeId, PNodeId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Fragmentation {
    /// Builds a fragmentation from an explicit node assignment.
    pub fn from_assignment(pattern: &PatternGraph, h: usize, assignment: BTreeMap<PNodeId, usize>) -> Result<Self, FragmentError> {
        if h == 0 || h > MAX_FRAGMENTS {
            return Err(FragmentError::InvalidH {
                h,
                nodes: pattern.node_count(),
            });
        }
        for v in pattern.node_ids() {
            match assignment.get(&v) {
                Some(&i) if i < h => {}
                _ => return Err(FragmentError::Uncovered(v)),
            }
        }
        let cut = pattern.edges().filter(|(a, b)| assignment[a] != assignment[b]).collect();
        Ok(Fragmentation { h, assignment, cut })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn fragment_of(&self, v: PNodeId) -> Option<usize> {
        self.assignment.get(&v).copied()
    }

    pub fn fragment_nodes(&self, i: usize) -> Vec<PNodeId> {
        self.assignment.iter().filter(|(_, &f)| f == i).map(|(&v, _)| v).collect()
    }

    pub fn fragments(&self) -> Vec<Vec<PNodeId>> {
        let mut out = vec![Vec::new(); self.h];
        for (&v, &f) in &self.assignment {
            out[f].push(v);
        }
        out
    }

    pub fn cut(&self) -> &BTreeSet<(PNodeId, PNodeId)> {
        &self.cut
    }

    /// The fragment as an induced pattern view.
    pub fn view(&self, pattern: &PatternGraph, i: usize) -> PatternView {
        PatternView::induced(pattern, self.fragment_nodes(i))
    }

    /// Classifies `update` against the pattern as it was before the update.
    pub fn classify(&self, before: &PatternGraph, update: &PatternUpdate) -> Result<Classification, FragmentError> {
        let frag = |v: PNodeId| self.fragment_of(v).ok_or(FragmentError::Pattern(PatternError::UnknownNode(v)));
        let mut derived = Vec::new();
        let target = match update {
            PatternUpdate::InsertEdge(a, b) | PatternUpdate::DeleteEdge(a, b) => {
                let (fa, fb) = (frag(*a)?, frag(*b)?);
                if fa == fb {
                    UpdateTarget::Fragment(fa)
                } else {
                    UpdateTarget::Cut
                }
            }
            PatternUpdate::InsertNode { anchor, .. } => UpdateTarget::Fragment(frag(*anchor)?),
            PatternUpdate::DeleteNode(v) => {
                let f = frag(*v)?;
                for w in before.neighbors(*v) {
                    if self.fragment_of(w) != Some(f) {
                        let (a, b) = ordered(*v, w);
                        derived.push(PatternUpdate::DeleteEdge(a, b));
                    }
                }
                UpdateTarget::Fragment(f)
            }
            PatternUpdate::SetCapacity(v, _) => UpdateTarget::Fragment(frag(*v)?),
        };
        Ok(Classification {
            target,
            derived_cut_deletions: derived,
        })
    }

    /// Records the structural effect of an already validated update.
    pub fn commit(&mut self, update: &PatternUpdate) {
        match update {
            PatternUpdate::InsertEdge(a, b) => {
                if self.fragment_of(*a) != self.fragment_of(*b) {
                    self.cut.insert(ordered(*a, *b));
                }
            }
            PatternUpdate::DeleteEdge(a, b) => {
                self.cut.remove(&ordered(*a, *b));
            }
            PatternUpdate::InsertNode { node, anchor, .. } => {
                let f = self.fragment_of(*anchor).expect("anchor assigned");
                self.assignment.insert(*node, f);
            }
            PatternUpdate::DeleteNode(v) => {
                self.assignment.remove(v);
                self.cut.retain(|&(a, b)| a != *v && b != *v);
            }
            PatternUpdate::SetCapacity(..) => {}
        }
    }
}

fn distances(pattern: &PatternGraph, from: PNodeId) -> BTreeMap<PNodeId, usize> {
    let mut dist = BTreeMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for w in pattern.neighbors(v) {
            if let alloc::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Partitions a pattern into `h` balanced fragments with few cut edges.
///
/// Seeds are spread by hop distance, fragments grow breadth-first up to
/// `ceil(n / h)` nodes, then single moves and pairwise swaps that shrink
/// the cut are applied while no fragment exceeds `ceil(n / h) + 1` nodes.
pub fn pfrag(pattern: &PatternGraph, h: usize) -> Result<Fragmentation, FragmentError> {
    let n = pattern.node_count();
    if h == 0 || h > n || h > MAX_FRAGMENTS {
        return Err(FragmentError::InvalidH { h, nodes: n });
    }
    let nodes: Vec<PNodeId> = pattern.node_ids().collect();
    let degree = |v: PNodeId| pattern.neighbors(v).count();
    let cap = n.div_ceil(h);

    let first = *nodes
        .iter()
        .max_by(|&&a, &&b| degree(a).cmp(&degree(b)).then(b.cmp(&a)))
        .expect("non-empty");
    let mut seeds = vec![first];
    let mut seed_dist: BTreeMap<PNodeId, usize> = distances(pattern, first);
    while seeds.len() < h {
        let next = *nodes
            .iter()
            .filter(|v| !seeds.contains(v))
            .max_by(|&&a, &&b| {
                let da = seed_dist.get(&a).copied().unwrap_or(usize::MAX);
                let db = seed_dist.get(&b).copied().unwrap_or(usize::MAX);
                da.cmp(&db).then(degree(a).cmp(&degree(b))).then(b.cmp(&a))
            })
            .expect("h <= n");
        seeds.push(next);
        for (v, d) in distances(pattern, next) {
            let e = seed_dist.entry(v).or_insert(d);
            *e = (*e).min(d);
        }
    }

    let mut assign: BTreeMap<PNodeId, usize> = BTreeMap::new();
    let mut size = vec![0usize; h];
    for (i, &s) in seeds.iter().enumerate() {
        assign.insert(s, i);
        size[i] = 1;
    }
    let links = |v: PNodeId, f: usize, assign: &BTreeMap<PNodeId, usize>| {
        pattern.neighbors(v).filter(|w| assign.get(w) == Some(&f)).count()
    };
    while assign.len() < n {
        let mut progress = false;
        for f in 0..h {
            if size[f] >= cap {
                continue;
            }
            let pick = nodes
                .iter()
                .filter(|v| !assign.contains_key(v))
                .map(|&v| (links(v, f, &assign), v))
                .filter(|&(l, _)| l > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            if let Some((_, v)) = pick {
                assign.insert(v, f);
                size[f] += 1;
                progress = true;
            }
        }
        if !progress {
            let v = *nodes.iter().find(|v| !assign.contains_key(v)).expect("unassigned left");
            let f = (0..h)
                .filter(|&f| size[f] < cap)
                .min_by(|&a, &b| size[a].cmp(&size[b]).then(links(v, b, &assign).cmp(&links(v, a, &assign))).then(a.cmp(&b)))
                .expect("capacity remains");
            assign.insert(v, f);
            size[f] += 1;
        }
    }

    let limit = cap + 1;
    loop {
        let mut best: Option<(isize, PNodeId, Option<PNodeId>)> = None;
        let mut consider = |gain: isize, u: PNodeId, w: Option<PNodeId>| {
            if gain > 0 && best.map_or(true, |(g, bu, bw)| gain > g || (gain == g && (u, w) < (bu, bw))) {
                best = Some((gain, u, w));
            }
        };
        for &u in &nodes {
            let a = assign[&u];
            for b in 0..h {
                if b == a {
                    continue;
                }
                let base = links(u, b, &assign) as isize - links(u, a, &assign) as isize;
                if size[a] >= 2 && size[b] < limit {
                    consider(base, u, None);
                }
                for &w in &nodes {
                    if assign[&w] != b || w <= u {
                        continue;
                    }
                    let adjacent = pattern.has_edge(u, w) as isize;
                    let gain = base + links(w, a, &assign) as isize - links(w, b, &assign) as isize - 2 * adjacent;
                    consider(gain, u, Some(w));
                }
            }
        }
        let Some((_, u, w)) = best else { break };
        match w {
            None => {
                let a = assign[&u];
                let b = (0..h)
                    .filter(|&b| b != a && size[b] < limit)
                    .max_by(|&x, &y| {
                        let gx = links(u, x, &assign);
                        let gy = links(u, y, &assign);
                        gx.cmp(&gy).then(y.cmp(&x))
                    })
                    .expect("move target");
                assign.insert(u, b);
                size[a] -= 1;
                size[b] += 1;
            }
            Some(w) => {
                let (a, b) = (assign[&u], assign[&w]);
                assign.insert(u, b);
                assign.insert(w, a);
            }
        }
    }

    let mut firsts: Vec<(PNodeId, usize)> = (0..h)
        .map(|f| (*assign.iter().find(|(_, &x)| x == f).expect("non-empty fragment").0, f))
        .collect();
    firsts.sort_unstable();
    let mut renumber = vec![0; h];
    for (new, &(_, old)) in firsts.iter().enumerate() {
        renumber[old] = new;
    }
    let assign = assign.into_iter().map(|(v, f)| (v, renumber[f])).collect();
    Fragmentation::from_assignment(pattern, h, assign)
}
