//! Team patterns: connected labeled graphs with capacity bounds.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{LabelId, LocalGraph};

/// Identifier of a pattern node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PNodeId(pub u32);

impl fmt::Display for PNodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("invalid capacity interval [{lower}, {upper}]")]
    InvalidInterval { lower: u32, upper: u32 },
    #[error("unknown pattern node {0}")]
    UnknownNode(PNodeId),
    #[error("pattern node {0} already exists")]
    DuplicateNode(PNodeId),
    #[error("pattern node name {0:?} already in use")]
    DuplicateName(String),
    #[error("pattern edge ({0}, {1}) already exists")]
    DuplicateEdge(PNodeId, PNodeId),
    #[error("pattern edge ({0}, {1}) does not exist")]
    MissingEdge(PNodeId, PNodeId),
    #[error("self-loop on pattern node {0}")]
    SelfLoop(PNodeId),
    #[error("pattern is not connected")]
    Disconnected,
    #[error("pattern has no nodes")]
    Empty,
}

/// Closed interval `[lower, upper]` on team members per pattern node; `upper = None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Capacity {
    lower: u32,
    upper: Option<u32>,
}

impl Capacity {
    pub fn new(lower: u32, upper: Option<u32>) -> Result<Self, PatternError> {
        match upper {
            Some(y) if lower < 1 || y < lower => Err(PatternError::InvalidInterval { lower, upper: y }),
            None if lower < 1 => Err(PatternError::InvalidInterval { lower, upper: u32::MAX }),
            _ => Ok(Capacity { lower, upper }),
        }
    }

    pub fn bounded(lower: u32, upper: u32) -> Result<Self, PatternError> {
        Self::new(lower, Some(upper))
    }

    pub fn at_least(lower: u32) -> Result<Self, PatternError> {
        Self::new(lower, None)
    }

    pub fn lower(&self) -> u32 {
        self.lower
    }

    pub fn upper(&self) -> Option<u32> {
        self.upper
    }

    pub fn contains(&self, count: usize) -> bool {
        count >= self.lower as usize && self.upper.map_or(true, |y| count <= y as usize)
    }
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity { lower: 1, upper: None }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(y) => write!(f, "[{},{}]", self.lower, y),
            None => write!(f, "[{},*]", self.lower),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternNode {
    pub name: String,
    pub label: LabelId,
    pub capacity: Capacity,
}

/// A single pattern update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternUpdate {
    InsertEdge(PNodeId, PNodeId),
    DeleteEdge(PNodeId, PNodeId),
    /// Insert a node connected to `anchor`.
    InsertNode {
        node: PNodeId,
        name: String,
        label: LabelId,
        capacity: Capacity,
        anchor: PNodeId,
    },
    DeleteNode(PNodeId),
    SetCapacity(PNodeId, Capacity),
}

impl PatternUpdate {
    pub fn is_deletion(&self) -> bool {
        matches!(self, PatternUpdate::DeleteEdge(..) | PatternUpdate::DeleteNode(_))
    }

    pub fn is_insertion(&self) -> bool {
        matches!(self, PatternUpdate::InsertEdge(..) | PatternUpdate::InsertNode { .. })
    }
}

/// Connected labeled pattern graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternGraph {
    nodes: BTreeMap<PNodeId, PatternNode>,
    adjacency: BTreeMap<PNodeId, BTreeSet<PNodeId>>,
    next_id: u32,
}

impl PatternGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node with the next free id.
    pub fn add_node(&mut self, name: impl Into<String>, label: LabelId, capacity: Capacity) -> Result<PNodeId, PatternError> {
        let id = PNodeId(self.next_id);
        self.insert_node(id, name, label, capacity)?;
        Ok(id)
    }

    pub fn insert_node(
        &mut self,
        id: PNodeId,
        name: impl Into<String>,
        label: LabelId,
        capacity: Capacity,
    ) -> Result<(), PatternError> {
        let name = name.into();
        if self.nodes.contains_key(&id) {
            return Err(PatternError::DuplicateNode(id));
        }
        if self.nodes.values().any(|n| n.name == name) {
            return Err(PatternError::DuplicateName(name));
        }
        self.nodes.insert(id, PatternNode { name, label, capacity });
        self.adjacency.insert(id, BTreeSet::new());
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    pub fn add_edge(&mut self, a: PNodeId, b: PNodeId) -> Result<(), PatternError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(PatternError::SelfLoop(a));
        }
        if !self.adjacency.get_mut(&a).expect("checked").insert(b) {
            return Err(PatternError::DuplicateEdge(a, b));
        }
        self.adjacency.get_mut(&b).expect("checked").insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, a: PNodeId, b: PNodeId) -> Result<(), PatternError> {
        self.check(a)?;
        self.check(b)?;
        if !self.adjacency.get_mut(&a).expect("checked").remove(&b) {
            return Err(PatternError::MissingEdge(a, b));
        }
        self.adjacency.get_mut(&b).expect("checked").remove(&a);
        Ok(())
    }

    pub fn remove_node(&mut self, v: PNodeId) -> Result<PatternNode, PatternError> {
        self.check(v)?;
        let neighbors = self.adjacency.remove(&v).expect("checked");
        for w in neighbors {
            self.adjacency.get_mut(&w).expect("symmetric").remove(&v);
        }
        Ok(self.nodes.remove(&v).expect("checked"))
    }

    pub fn set_capacity(&mut self, v: PNodeId, capacity: Capacity) -> Result<(), PatternError> {
        self.nodes.get_mut(&v).ok_or(PatternError::UnknownNode(v))?.capacity = capacity;
        Ok(())
    }

    fn check(&self, v: PNodeId) -> Result<(), PatternError> {
        if self.nodes.contains_key(&v) {
            Ok(())
        } else {
            Err(PatternError::UnknownNode(v))
        }
    }

    pub fn contains(&self, v: PNodeId) -> bool {
        self.nodes.contains_key(&v)
    }

    pub fn node(&self, v: PNodeId) -> Option<&PatternNode> {
        self.nodes.get(&v)
    }

    pub fn label(&self, v: PNodeId) -> Option<LabelId> {
        self.nodes.get(&v).map(|n| n.label)
    }

    pub fn capacity(&self, v: PNodeId) -> Option<Capacity> {
        self.nodes.get(&v).map(|n| n.capacity)
    }

    pub fn find(&self, name: &str) -> Option<PNodeId> {
        self.nodes.iter().find(|(_, n)| n.name == name).map(|(&id, _)| id)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = PNodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (PNodeId, &PatternNode)> + '_ {
        self.nodes.iter().map(|(&id, n)| (id, n))
    }

    pub fn neighbors(&self, v: PNodeId) -> impl Iterator<Item = PNodeId> + '_ {
        self.adjacency.get(&v).into_iter().flatten().copied()
    }

    pub fn has_edge(&self, a: PNodeId, b: PNodeId) -> bool {
        self.adjacency.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Edges as `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (PNodeId, PNodeId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, s)| s.iter().copied().filter(move |&b| a < b).map(move |b| (a, b)))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|s| s.len()).sum::<usize>() / 2
    }

    pub fn next_node_id(&self) -> PNodeId {
        PNodeId(self.next_id)
    }

    pub fn labels(&self) -> BTreeSet<LabelId> {
        self.nodes.values().map(|n| n.label).collect()
    }

    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.keys().next() else {
            return false;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// Checks that the pattern is non-empty and connected.
    pub fn validate(&self) -> Result<(), PatternError> {
        if self.nodes.is_empty() {
            Err(PatternError::Empty)
        } else if !self.is_connected() {
            Err(PatternError::Disconnected)
        } else {
            Ok(())
        }
    }

    /// Applies one update without checking connectivity.
    ///
    /// Inserted nodes must use an id never seen by this pattern.
    pub fn apply(&mut self, update: &PatternUpdate) -> Result<(), PatternError> {
        match update {
            PatternUpdate::InsertEdge(a, b) => self.add_edge(*a, *b),
            PatternUpdate::DeleteEdge(a, b) => self.remove_edge(*a, *b),
            PatternUpdate::InsertNode {
                node,
                name,
                label,
                capacity,
                anchor,
            } => {
                self.check(*anchor)?;
                if node.0 < self.next_id {
                    return Err(PatternError::DuplicateNode(*node));
                }
                self.insert_node(*node, name.clone(), *label, *capacity)?;
                self.add_edge(*node, *anchor)
            }
            PatternUpdate::DeleteNode(v) => self.remove_node(*v).map(|_| ()),
            PatternUpdate::SetCapacity(v, c) => self.set_capacity(*v, *c),
        }
    }
}

/// Applies a whole update set; the result must be connected and non-empty.
pub fn apply_pattern_updates(pattern: &PatternGraph, updates: &[PatternUpdate]) -> Result<PatternGraph, PatternError> {
    let mut next = pattern.clone();
    for u in updates {
        next.apply(u)?;
    }
    next.validate()?;
    Ok(next)
}

/// Dense slot-indexed view of a pattern or of an induced part of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternView {
    ids: Vec<PNodeId>,
    labels: Vec<LabelId>,
    capacities: Vec<Capacity>,
    adjacency: Vec<Vec<u32>>,
}

impl PatternView {
    pub fn full(pattern: &PatternGraph) -> Self {
        Self::induced(pattern, pattern.node_ids())
    }

    /// View induced by `nodes`; unknown ids are ignored.
    pub fn induced<I: IntoIterator<Item = PNodeId>>(pattern: &PatternGraph, nodes: I) -> Self {
        let mut ids: Vec<PNodeId> = nodes.into_iter().filter(|&v| pattern.contains(v)).collect();
        ids.sort_unstable();
        ids.dedup();
        let labels = ids.iter().map(|&v| pattern.node(v).expect("filtered").label).collect();
        let capacities = ids.iter().map(|&v| pattern.node(v).expect("filtered").capacity).collect();
        let adjacency = ids
            .iter()
            .map(|&v| {
                pattern
                    .neighbors(v)
                    .filter_map(|w| ids.binary_search(&w).ok().map(|s| s as u32))
                    .collect()
            })
            .collect();
        PatternView {
            ids,
            labels,
            capacities,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[PNodeId] {
        &self.ids
    }

    pub fn id(&self, slot: usize) -> PNodeId {
        self.ids[slot]
    }

    pub fn slot(&self, v: PNodeId) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn label(&self, slot: usize) -> LabelId {
        self.labels[slot]
    }

    pub fn capacity(&self, slot: usize) -> Capacity {
        self.capacities[slot]
    }

    pub fn slot_neighbors(&self, slot: usize) -> &[u32] {
        &self.adjacency[slot]
    }
}

impl LocalGraph for PatternView {
    fn node_count(&self) -> usize {
        self.ids.len()
    }

    fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    fn has_label(&self, i: usize, label: LabelId) -> bool {
        self.labels[i] == label
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap(x: u32, y: Option<u32>) -> Capacity {
        Capacity::new(x, y).unwrap()
    }

    #[test]
    fn capacity_rules() {
        assert!(Capacity::new(0, Some(1)).is_err());
        assert!(Capacity::new(3, Some(2)).is_err());
        assert!(Capacity::new(0, None).is_err());
        let c = cap(2, Some(3));
        assert!(!c.contains(1) && c.contains(2) && c.contains(3) && !c.contains(4));
        assert!(cap(1, None).contains(1000));
        assert_eq!(cap(1, None).to_string(), "[1,*]");
        assert_eq!(c.to_string(), "[2,3]");
    }

    #[test]
    fn connectivity_is_checked_per_set() {
        let mut p = PatternGraph::new();
        let a = p.add_node("a", LabelId(0), cap(1, None)).unwrap();
        let b = p.add_node("b", LabelId(1), cap(1, None)).unwrap();
        let c = p.add_node("c", LabelId(2), cap(1, None)).unwrap();
        p.add_edge(a, b).unwrap();
        p.add_edge(b, c).unwrap();
        let cut = [PatternUpdate::DeleteEdge(a, b)];
        assert_eq!(apply_pattern_updates(&p, &cut), Err(PatternError::Disconnected));
        let rewire = [PatternUpdate::DeleteEdge(a, b), PatternUpdate::InsertEdge(a, c)];
        let q = apply_pattern_updates(&p, &rewire).unwrap();
        assert!(q.has_edge(a, c) && !q.has_edge(a, b));
        assert_eq!(apply_pattern_updates(&p, &[PatternUpdate::DeleteNode(b)]), Err(PatternError::Disconnected));
    }

    #[test]
    fn views_are_induced() {
        let mut p = PatternGraph::new();
        let ids: Vec<_> = (0..4).map(|i| p.add_node(alloc::format!("n{i}"), LabelId(i), cap(1, None)).unwrap()).collect();
        p.add_edge(ids[0], ids[1]).unwrap();
        p.add_edge(ids[1], ids[2]).unwrap();
        p.add_edge(ids[2], ids[3]).unwrap();
        let v = PatternView::induced(&p, [ids[1], ids[3], ids[2]]);
        assert_eq!(v.ids(), &[ids[1], ids[2], ids[3]]);
        assert_eq!(v.slot_neighbors(0), &[1]);
        assert_eq!(v.slot_neighbors(1), &[0, 2]);
    }
}
