//! Labeled undirected data graphs, balls, subgraphs, and density.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Identifier of a data graph node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

/// Interned label identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LabelId(pub u32);

/// Hop distance in a graph.
pub type HopCount = u32;

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("edge ({0}, {1}) already exists")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) does not exist")]
    MissingEdge(NodeId, NodeId),
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("node {0} has an empty label set")]
    EmptyLabelSet(NodeId),
    #[error("subgraph has no nodes")]
    EmptySubgraph,
    #[error("edge ({0}, {1}) has an endpoint outside the subgraph")]
    DanglingEdge(NodeId, NodeId),
    #[error("subgraph is disconnected; largest component has diameter {largest_component_diameter}")]
    Disconnected { largest_component_diameter: HopCount },
}

/// A single data graph update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataUpdate {
    InsertEdge(NodeId, NodeId),
    DeleteEdge(NodeId, NodeId),
    /// Insert a fresh node connected to `anchor`.
    InsertNode {
        node: NodeId,
        labels: Vec<LabelId>,
        anchor: NodeId,
    },
    DeleteNode(NodeId),
}

impl DataUpdate {
    pub fn is_insertion(&self) -> bool {
        matches!(self, DataUpdate::InsertEdge(..) | DataUpdate::InsertNode { .. })
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Undo {
    RemoveEdge(NodeId, NodeId),
    AddEdge(NodeId, NodeId),
    RemoveNode(NodeId),
    RestoreNode {
        node: NodeId,
        labels: Vec<LabelId>,
        neighbors: Vec<NodeId>,
    },
}

/// Undirected graph with label sets on nodes.
///
/// Node ids are dense slots; deleted nodes leave dead slots that may be
/// reused by a later insertion with the same id.
#[derive(Clone, Debug, Default)]
pub struct DataGraph {
    labels: Vec<Vec<LabelId>>,
    adjacency: Vec<Vec<NodeId>>,
    alive: Vec<bool>,
    node_count: usize,
    edge_count: usize,
}

impl PartialEq for DataGraph {
    fn eq(&self, other: &Self) -> bool {
        if self.node_count != other.node_count || self.edge_count != other.edge_count {
            return false;
        }
        self.nodes().eq(other.nodes())
            && self
                .nodes()
                .all(|v| self.labels(v) == other.labels(v) && self.neighbors(v) == other.neighbors(v))
    }
}

impl Eq for DataGraph {}

impl DataGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a node with the next free id.
    pub fn add_node<I: IntoIterator<Item = LabelId>>(&mut self, labels: I) -> Result<NodeId, GraphError> {
        let id = self.next_node_id();
        self.insert_node(id, labels)?;
        Ok(id)
    }

    /// Inserts an isolated node with the given id.
    pub fn insert_node<I: IntoIterator<Item = LabelId>>(&mut self, id: NodeId, labels: I) -> Result<(), GraphError> {
        if self.contains_node(id) {
            return Err(GraphError::DuplicateNode(id));
        }
        let mut labels: Vec<LabelId> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.is_empty() {
            return Err(GraphError::EmptyLabelSet(id));
        }
        let slot = id.index();
        if slot >= self.alive.len() {
            self.labels.resize_with(slot + 1, Vec::new);
            self.adjacency.resize_with(slot + 1, Vec::new);
            self.alive.resize(slot + 1, false);
        }
        self.labels[slot] = labels;
        self.adjacency[slot].clear();
        self.alive[slot] = true;
        self.node_count += 1;
        Ok(())
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId) -> Result<(), GraphError> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        let pos = match self.adjacency[a.index()].binary_search(&b) {
            Ok(_) => return Err(GraphError::DuplicateEdge(a, b)),
            Err(p) => p,
        };
        self.adjacency[a.index()].insert(pos, b);
        let pos = self.adjacency[b.index()].binary_search(&a).unwrap_err();
        self.adjacency[b.index()].insert(pos, a);
        self.edge_count += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, a: NodeId, b: NodeId) -> Result<(), GraphError> {
        self.check_node(a)?;
        self.check_node(b)?;
        let pos = self.adjacency[a.index()]
            .binary_search(&b)
            .map_err(|_| GraphError::MissingEdge(a, b))?;
        self.adjacency[a.index()].remove(pos);
        let pos = self.adjacency[b.index()].binary_search(&a).expect("symmetric adjacency");
        self.adjacency[b.index()].remove(pos);
        self.edge_count -= 1;
        Ok(())
    }

    /// Removes a node and its incident edges, returning its labels and former neighbors.
    pub fn remove_node(&mut self, v: NodeId) -> Result<(Vec<LabelId>, Vec<NodeId>), GraphError> {
        self.check_node(v)?;
        let neighbors = core::mem::take(&mut self.adjacency[v.index()]);
        for &w in &neighbors {
            let list = &mut self.adjacency[w.index()];
            let pos = list.binary_search(&v).expect("symmetric adjacency");
            list.remove(pos);
        }
        self.edge_count -= neighbors.len();
        self.alive[v.index()] = false;
        self.node_count -= 1;
        let labels = core::mem::take(&mut self.labels[v.index()]);
        Ok((labels, neighbors))
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains_node(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(v))
        }
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.contains_node(a) && self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Sorted label set of `v`; empty for unknown nodes.
    pub fn labels(&self, v: NodeId) -> &[LabelId] {
        self.labels.get(v.index()).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn has_label(&self, v: NodeId, label: LabelId) -> bool {
        self.labels(v).binary_search(&label).is_ok()
    }

    /// Sorted neighbor list of `v`; empty for unknown nodes.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        self.adjacency.get(v.index()).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbors(v).len()
    }

    /// Live node ids in ascending order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Edges as `(a, b)` with `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// One past the largest slot ever used.
    pub fn id_bound(&self) -> usize {
        self.alive.len()
    }

    /// Smallest id never used by this graph.
    pub fn next_node_id(&self) -> NodeId {
        NodeId(self.alive.len() as u32)
    }

    /// Applies one update; the graph is unchanged on error.
    pub fn apply(&mut self, update: &DataUpdate) -> Result<(), GraphError> {
        self.apply_with_undo(update).map(|_| ())
    }

    pub(crate) fn apply_with_undo(&mut self, update: &DataUpdate) -> Result<Undo, GraphError> {
        match update {
            DataUpdate::InsertEdge(a, b) => {
                self.add_edge(*a, *b)?;
                Ok(Undo::RemoveEdge(*a, *b))
            }
            DataUpdate::DeleteEdge(a, b) => {
                self.remove_edge(*a, *b)?;
                Ok(Undo::AddEdge(*a, *b))
            }
            DataUpdate::InsertNode { node, labels, anchor } => {
                self.check_node(*anchor)?;
                if node == anchor || self.contains_node(*node) {
                    return Err(GraphError::DuplicateNode(*node));
                }
                self.insert_node(*node, labels.iter().copied())?;
                self.add_edge(*node, *anchor).expect("fresh node edge");
                Ok(Undo::RemoveNode(*node))
            }
            DataUpdate::DeleteNode(v) => {
                let (labels, neighbors) = self.remove_node(*v)?;
                Ok(Undo::RestoreNode {
                    node: *v,
                    labels,
                    neighbors,
                })
            }
        }
    }

    pub(crate) fn undo(&mut self, undo: Undo) {
        match undo {
            Undo::RemoveEdge(a, b) => self.remove_edge(a, b).expect("undo edge insertion"),
            Undo::AddEdge(a, b) => self.add_edge(a, b).expect("undo edge deletion"),
            Undo::RemoveNode(v) => {
                self.remove_node(v).expect("undo node insertion");
            }
            Undo::RestoreNode {
                node,
                labels,
                neighbors,
            } => {
                self.insert_node(node, labels).expect("undo node deletion");
                for w in neighbors {
                    self.add_edge(node, w).expect("undo node deletion edge");
                }
            }
        }
    }

    /// Nodes within `radius` hops of `center` with their distances, in BFS order.
    pub fn within(&self, center: NodeId, radius: HopCount) -> Vec<(NodeId, HopCount)> {
        let mut out = Vec::new();
        if !self.contains_node(center) {
            return out;
        }
        let mut seen = alloc::collections::BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(center);
        queue.push_back((center, 0));
        while let Some((v, d)) = queue.pop_front() {
            out.push((v, d));
            if d == radius {
                continue;
            }
            for &w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back((w, d + 1));
                }
            }
        }
        out
    }
}

/// Applies `update` to `graph`.
pub fn apply_data_update(graph: &mut DataGraph, update: &DataUpdate) -> Result<(), GraphError> {
    graph.apply(update)
}

/// Read access shared by balls, ball prefixes, and pattern views.
pub trait LocalGraph {
    fn node_count(&self) -> usize;
    /// Local neighbor indices in ascending order.
    fn neighbors(&self, i: usize) -> &[u32];
    fn has_label(&self, i: usize, label: LabelId) -> bool;
}

/// The subgraph induced by all nodes within `radius` hops of `center`.
///
/// Local indices follow BFS order, so the ball of any smaller radius is a
/// prefix of this one.
#[derive(Clone, Debug)]
pub struct Ball {
    center: NodeId,
    radius: HopCount,
    nodes: Vec<NodeId>,
    hops: Vec<HopCount>,
    layer_ends: Vec<usize>,
    adj_offsets: Vec<usize>,
    adj_targets: Vec<u32>,
    label_offsets: Vec<usize>,
    label_ids: Vec<LabelId>,
    lookup: Vec<(NodeId, u32)>,
    edge_count: usize,
}

impl Ball {
    pub fn center(&self) -> NodeId {
        self.center
    }

    pub fn radius(&self) -> HopCount {
        self.radius
    }

    /// Global ids in local index order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> NodeId {
        self.nodes[i]
    }

    pub fn hop(&self, i: usize) -> HopCount {
        self.hops[i]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of nodes within `t` hops of the center.
    pub fn prefix_len(&self, t: HopCount) -> usize {
        let t = t.min(self.radius) as usize;
        self.layer_ends[t]
    }

    pub fn local_index(&self, v: NodeId) -> Option<usize> {
        self.lookup
            .binary_search_by_key(&v, |&(g, _)| g)
            .ok()
            .map(|p| self.lookup[p].1 as usize)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.local_index(v).is_some()
    }

    pub fn labels(&self, i: usize) -> &[LabelId] {
        &self.label_ids[self.label_offsets[i]..self.label_offsets[i + 1]]
    }

    /// View of the ball restricted to radius `t`.
    pub fn prefix(&self, t: HopCount) -> BallPrefix<'_> {
        BallPrefix {
            ball: self,
            len: self.prefix_len(t),
        }
    }

    /// Edges of the ball as sorted global pairs.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for i in 0..self.len() {
            for &j in LocalGraph::neighbors(self, i) {
                let (a, b) = (self.nodes[i], self.nodes[j as usize]);
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Twice the max-core density, an upper bound on the densest subgraph density.
    pub fn density_bound(&self) -> Density {
        max_core_density(self).doubled()
    }
}

impl LocalGraph for Ball {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj_targets[self.adj_offsets[i]..self.adj_offsets[i + 1]]
    }

    fn has_label(&self, i: usize, label: LabelId) -> bool {
        self.labels(i).binary_search(&label).is_ok()
    }
}

/// A ball restricted to a smaller radius.
#[derive(Clone, Copy, Debug)]
pub struct BallPrefix<'a> {
    ball: &'a Ball,
    len: usize,
}

impl LocalGraph for BallPrefix<'_> {
    fn node_count(&self) -> usize {
        self.len
    }

    fn neighbors(&self, i: usize) -> &[u32] {
        let all = LocalGraph::neighbors(self.ball, i);
        let end = all.partition_point(|&j| (j as usize) < self.len);
        &all[..end]
    }

    fn has_label(&self, i: usize, label: LabelId) -> bool {
        self.ball.has_label(i, label)
    }
}

/// Reusable scratch space for extracting many balls from one graph.
#[derive(Debug, Default)]
pub struct BallExtractor {
    stamp: Vec<u32>,
    local: Vec<u32>,
    epoch: u32,
}

impl BallExtractor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn extract(&mut self, graph: &DataGraph, center: NodeId, radius: HopCount) -> Result<Ball, GraphError> {
        if !graph.contains_node(center) {
            return Err(GraphError::UnknownNode(center));
        }
        if self.stamp.len() < graph.id_bound() {
            self.stamp.resize(graph.id_bound(), 0);
            self.local.resize(graph.id_bound(), 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;

        let mut nodes = vec![center];
        let mut hops = vec![0];
        let mut layer_ends = Vec::with_capacity(radius as usize + 1);
        self.stamp[center.index()] = epoch;
        self.local[center.index()] = 0;
        let mut head = 0;
        for depth in 0..radius {
            let end = nodes.len();
            layer_ends.push(end);
            while head < end {
                let v = nodes[head];
                head += 1;
                for &w in graph.neighbors(v) {
                    if self.stamp[w.index()] != epoch {
                        self.stamp[w.index()] = epoch;
                        self.local[w.index()] = nodes.len() as u32;
                        nodes.push(w);
                        hops.push(depth + 1);
                    }
                }
            }
        }
        layer_ends.push(nodes.len());

        let mut adj_offsets = Vec::with_capacity(nodes.len() + 1);
        let mut adj_targets = Vec::new();
        let mut label_offsets = Vec::with_capacity(nodes.len() + 1);
        let mut label_ids = Vec::new();
        adj_offsets.push(0);
        label_offsets.push(0);
        for &v in &nodes {
            let start = adj_targets.len();
            for &w in graph.neighbors(v) {
                if self.stamp[w.index()] == epoch {
                    adj_targets.push(self.local[w.index()]);
                }
            }
            adj_targets[start..].sort_unstable();
            adj_offsets.push(adj_targets.len());
            label_ids.extend_from_slice(graph.labels(v));
            label_offsets.push(label_ids.len());
        }
        let mut lookup: Vec<(NodeId, u32)> = nodes.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        lookup.sort_unstable();
        let edge_count = adj_targets.len() / 2;
        Ok(Ball {
            center,
            radius,
            nodes,
            hops,
            layer_ends,
            adj_offsets,
            adj_targets,
            label_offsets,
            label_ids,
            lookup,
            edge_count,
        })
    }
}

/// Extracts the ball of `radius` around `center`.
pub fn ball(graph: &DataGraph, center: NodeId, radius: HopCount) -> Result<Ball, GraphError> {
    BallExtractor::new().extract(graph, center, radius)
}

/// Exact rational `edges / nodes`, ordered by cross-multiplication.
#[derive(Clone, Copy, Debug)]
pub struct Density {
    edges: u64,
    nodes: u64,
}

impl Density {
    /// Panics if `nodes` is zero.
    pub fn new(edges: u64, nodes: u64) -> Self {
        assert!(nodes > 0, "density of an empty node set");
        Density { edges, nodes }
    }

    pub fn zero() -> Self {
        Density { edges: 0, nodes: 1 }
    }

    pub fn edges(&self) -> u64 {
        self.edges
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    pub fn doubled(self) -> Self {
        Density {
            edges: self.edges * 2,
            nodes: self.nodes,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.edges == 0
    }

    pub fn as_f64(&self) -> f64 {
        self.edges as f64 / self.nodes as f64
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.edges as u128 * other.nodes as u128;
        let rhs = other.edges as u128 * self.nodes as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.edges, self.nodes)
    }
}

/// An explicit node and edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Subgraph {
    pub fn new(mut nodes: Vec<NodeId>, edges: Vec<(NodeId, NodeId)>) -> Result<Self, GraphError> {
        nodes.sort_unstable();
        nodes.dedup();
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if nodes.binary_search(&a).is_err() || nodes.binary_search(&b).is_err() {
                return Err(GraphError::DanglingEdge(a, b));
            }
            norm.push(if a < b { (a, b) } else { (b, a) });
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Subgraph { nodes, edges: norm })
    }

    /// Subgraph of `graph` induced by `nodes`; unknown nodes are ignored.
    pub fn induced(graph: &DataGraph, nodes: &[NodeId]) -> Self {
        let mut nodes: Vec<NodeId> = nodes.iter().copied().filter(|&v| graph.contains_node(v)).collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut edges = Vec::new();
        for &a in &nodes {
            for &b in graph.neighbors(a) {
                if a < b && nodes.binary_search(&b).is_ok() {
                    edges.push((a, b));
                }
            }
        }
        Subgraph { nodes, edges }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    fn local_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            let i = self.nodes.binary_search(&a).expect("validated");
            let j = self.nodes.binary_search(&b).expect("validated");
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// `|E| / |V|` of a non-empty subgraph.
pub fn density_of(sub: &Subgraph) -> Result<Density, GraphError> {
    if sub.nodes.is_empty() {
        return Err(GraphError::EmptySubgraph);
    }
    Ok(Density::new(sub.edges.len() as u64, sub.nodes.len() as u64))
}

/// Core numbers by bucket peeling.
pub fn core_numbers<G: LocalGraph>(g: &G) -> Vec<u32> {
    let n = g.node_count();
    let mut degree: Vec<u32> = (0..n).map(|i| g.neighbors(i).len() as u32).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0) as usize;
    let mut bin = vec![0usize; max_degree + 1];
    for &d in &degree {
        bin[d as usize] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        let d = degree[v] as usize;
        pos[v] = bin[d];
        order[pos[v]] = v;
        bin[d] += 1;
    }
    for d in (1..=max_degree).rev() {
        bin[d] = bin[d - 1];
    }
    if max_degree > 0 || n > 0 {
        bin[0] = 0;
    }
    for i in 0..n {
        let v = order[i];
        for &w in g.neighbors(v) {
            let w = w as usize;
            if degree[w] > degree[v] {
                let dw = degree[w] as usize;
                let pw = pos[w];
                let pu = bin[dw];
                let u = order[pu];
                if u != w {
                    order[pu] = w;
                    order[pw] = u;
                    pos[w] = pu;
                    pos[u] = pw;
                }
                bin[dw] += 1;
                degree[w] -= 1;
            }
        }
    }
    degree
}

/// Density of the maximum core (the non-empty k-core with the largest k).
pub fn max_core_density<G: LocalGraph>(g: &G) -> Density {
    let n = g.node_count();
    if n == 0 {
        return Density::zero();
    }
    let core = core_numbers(g);
    let k = core.iter().copied().max().unwrap_or(0);
    let mut nodes = 0u64;
    let mut twice_edges = 0u64;
    for i in 0..n {
        if core[i] == k {
            nodes += 1;
            twice_edges += g.neighbors(i).iter().filter(|&&j| core[j as usize] == k).count() as u64;
        }
    }
    Density::new(twice_edges / 2, nodes)
}

/// Largest hop distance between two nodes of a connected subgraph.
pub fn diameter_of(sub: &Subgraph) -> Result<HopCount, GraphError> {
    if sub.nodes.is_empty() {
        return Err(GraphError::EmptySubgraph);
    }
    let adj = sub.local_adjacency();
    let n = adj.len();
    let mut component = vec![usize::MAX; n];
    let mut comp_diameter: Vec<HopCount> = Vec::new();
    let mut comp_size: Vec<usize> = Vec::new();
    let mut dist = vec![u32::MAX; n];
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut far = 0;
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            far = far.max(dist[v]);
            members.push(v);
            for &w in &adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if component[s] == usize::MAX {
            let id = comp_diameter.len();
            for &m in &members {
                component[m] = id;
            }
            comp_diameter.push(0);
            comp_size.push(members.len());
        }
        let c = component[s];
        comp_diameter[c] = comp_diameter[c].max(far);
    }
    if comp_diameter.len() == 1 {
        return Ok(comp_diameter[0]);
    }
    let mut best = 0;
    for c in 1..comp_size.len() {
        if (comp_size[c], comp_diameter[c]) > (comp_size[best], comp_diameter[best]) {
            best = c;
        }
    }
    Err(GraphError::Disconnected {
        largest_component_diameter: comp_diameter[best],
    })
}
