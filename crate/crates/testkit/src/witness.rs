//! Exhaustive search for tiny data graphs that realize a pattern.
//!
//! Graphs are bitmask adjacency over at most eight nodes with one label
//! each, drawn from the pattern's own labels. A graph witnesses a pattern
//! when its maximum simulation meets every capacity.

use std::collections::BTreeSet;

use teamsim_core::{LabelId, PatternGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TinyPattern {
    labels: Vec<u8>,
    adj: Vec<u8>,
    caps: Vec<(u32, Option<u32>)>,
    label_count: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TinyGraph {
    pub labels: Vec<u8>,
    pub adj: Vec<u8>,
}

impl TinyPattern {
    pub fn new(p: &PatternGraph) -> Self {
        let ids: Vec<_> = p.node_ids().collect();
        assert!(ids.len() <= 8);
        let mut distinct: Vec<LabelId> = ids.iter().map(|&u| p.label(u).unwrap()).collect();
        distinct.sort();
        distinct.dedup();
        let labels = ids
            .iter()
            .map(|&u| distinct.binary_search(&p.label(u).unwrap()).unwrap() as u8)
            .collect();
        let adj = ids
            .iter()
            .map(|&u| {
                ids.iter()
                    .enumerate()
                    .filter(|(_, &w)| p.has_edge(u, w))
                    .fold(0u8, |m, (j, _)| m | (1 << j))
            })
            .collect();
        let caps = ids
            .iter()
            .map(|&u| {
                let c = p.capacity(u).unwrap();
                (c.lower(), c.upper())
            })
            .collect();
        TinyPattern {
            labels,
            adj,
            caps,
            label_count: distinct.len() as u8,
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }
}

/// Maximum simulation as one node mask per pattern node.
pub fn tiny_sim(p: &TinyPattern, g: &TinyGraph) -> Vec<u8> {
    let k = p.len();
    let n = g.labels.len();
    let mut rel: Vec<u8> = (0..k)
        .map(|u| (0..n).filter(|&v| g.labels[v] == p.labels[u]).fold(0u8, |m, v| m | (1 << v)))
        .collect();
    loop {
        let mut changed = false;
        for u in 0..k {
            for v in 0..n {
                if rel[u] & (1 << v) == 0 {
                    continue;
                }
                let ok = (0..k).all(|u2| p.adj[u] & (1 << u2) == 0 || g.adj[v] & rel[u2] != 0);
                if !ok {
                    rel[u] &= !(1 << v);
                    changed = true;
                }
            }
        }
        if !changed {
            return rel;
        }
    }
}

pub fn witnesses(p: &TinyPattern, g: &TinyGraph) -> bool {
    let rel = tiny_sim(p, g);
    rel.iter().zip(&p.caps).all(|(&m, &(x, y))| {
        let c = m.count_ones();
        c >= x && c >= 1 && y.map_or(true, |y| c <= y)
    })
}

fn label_multisets(n: usize, labels: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, labels: u8, min: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for l in min..labels {
            cur.push(l);
            rec(n, labels, l, cur, out);
            cur.pop();
        }
    }
    rec(n, labels, 0, &mut cur, &mut out);
    out
}

/// Calls `f` on every graph with at most `max_nodes` nodes over the pattern's labels until it returns true.
fn any_graph(p: &TinyPattern, max_nodes: usize, mut f: impl FnMut(&TinyGraph) -> bool) -> Option<TinyGraph> {
    for n in 1..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        for labels in label_multisets(n, p.label_count) {
            for mask in 0u32..(1 << pairs.len()) {
                let mut adj = vec![0u8; n];
                for (bit, &(i, j)) in pairs.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        adj[i] |= 1 << j;
                        adj[j] |= 1 << i;
                    }
                }
                let g = TinyGraph { labels: labels.clone(), adj };
                if f(&g) {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// First graph with at most `max_nodes` nodes that witnesses `p`, trying all graphs.
pub fn exhaustive_witness(p: &TinyPattern, max_nodes: usize) -> Option<TinyGraph> {
    any_graph(p, max_nodes, |g| witnesses(p, g))
}

fn counts(rel: &[u8]) -> Option<Vec<u32>> {
    let c: Vec<u32> = rel.iter().map(|m| m.count_ones()).collect();
    c.iter().all(|&x| x >= 1).then_some(c)
}

/// Match-count vectors over every graph with at most `max_nodes` nodes, where every pattern node has a match.
///
/// Capacities are ignored, so one call serves every capacity assignment of
/// the same shape and labels.
pub fn exhaustive_counts(p: &TinyPattern, max_nodes: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    any_graph(p, max_nodes, |g| {
        out.extend(counts(&tiny_sim(p, g)));
        false
    });
    out
}

/// Whether one of `counts` meets every capacity of `p`.
pub fn admits(p: &TinyPattern, counts: &BTreeSet<Vec<u32>>) -> bool {
    counts
        .iter()
        .any(|c| c.iter().zip(&p.caps).all(|(&n, &(x, y))| n >= x && y.map_or(true, |y| n <= y)))
}

fn blowup(p: &TinyPattern, counts: &[usize]) -> TinyGraph {
    let mut labels = Vec::new();
    let mut owner = Vec::new();
    for (u, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            labels.push(p.labels[u]);
            owner.push(u);
        }
    }
    let total = labels.len();
    let adj = (0..total)
        .map(|i| {
            (0..total)
                .filter(|&j| p.adj[owner[i]] & (1 << owner[j]) != 0)
                .fold(0u8, |m, j| m | (1 << j))
        })
        .collect();
    TinyGraph { labels, adj }
}

/// Calls `f` on the blowup of every copy-count vector up to `max_nodes` nodes until it returns true.
fn any_blowup(p: &TinyPattern, max_nodes: usize, mut f: impl FnMut(&TinyGraph) -> bool) -> Option<TinyGraph> {
    let k = p.len();
    let mut counts = vec![1usize; k];
    loop {
        if counts.iter().sum::<usize>() <= max_nodes {
            let g = blowup(p, &counts);
            if f(&g) {
                return Some(g);
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            counts[i] += 1;
            if counts[i] <= max_nodes {
                break;
            }
            counts[i] = 1;
            i += 1;
        }
    }
}

/// Copies of each pattern node joined along pattern edges, for every copy-count vector up to `max_nodes` nodes.
pub fn blowup_witness(p: &TinyPattern, max_nodes: usize) -> Option<TinyGraph> {
    any_blowup(p, max_nodes, |g| witnesses(p, g))
}

/// Match-count vectors over every blowup with at most `max_nodes` nodes.
pub fn blowup_counts(p: &TinyPattern, max_nodes: usize) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    any_blowup(p, max_nodes, |g| {
        out.extend(counts(&tiny_sim(p, g)));
        false
    });
    out
}
