//! Synthetic graph generators for tests, benchmarks and `verify`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::{AttributedGraph, NodeId};
use crate::seed::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Node attribute width is drawn from `0..=max_node_attrs`.
    pub max_node_attrs: usize,
    pub max_edge_attrs: usize,
    /// Attribute values are drawn from `0..=max_value`; 0 is the default.
    pub max_value: i64,
    /// Probability of each non-tree edge.
    pub extra_edge_prob: f64,
    pub directed: bool,
}

impl Default for RandomGraphSpec {
    fn default() -> Self {
        Self {
            min_nodes: 2,
            max_nodes: 12,
            max_node_attrs: 4,
            max_edge_attrs: 3,
            max_value: 5,
            extra_edge_prob: 0.25,
            directed: false,
        }
    }
}

/// A connected simple graph: a random spanning tree plus independent extra
/// edges, with random attributes.
pub fn random_connected(spec: &RandomGraphSpec, rng: &mut Rng) -> AttributedGraph {
    let n = rng.gen_range(spec.min_nodes..=spec.max_nodes);
    from_pieces(spec, &[n], rng)
}

/// Like [`random_connected`] but with `1..=max_components` components,
/// each sized from the spec's node range.
pub fn random_graph(spec: &RandomGraphSpec, max_components: usize, rng: &mut Rng) -> AttributedGraph {
    let count = rng.gen_range(1..=max_components.max(1));
    let sizes: Vec<usize> = (0..count).map(|_| rng.gen_range(spec.min_nodes..=spec.max_nodes)).collect();
    from_pieces(spec, &sizes, rng)
}

fn from_pieces(spec: &RandomGraphSpec, sizes: &[usize], rng: &mut Rng) -> AttributedGraph {
    let mut pairs = HashSet::new();
    let mut offset: NodeId = 0;
    for &n in sizes {
        let end = offset + n as NodeId;
        let mut order: Vec<NodeId> = (offset..end).collect();
        order.shuffle(rng);
        for i in 1..n {
            let parent = order[rng.gen_range(0..i)];
            pairs.insert(key(order[i], parent));
        }
        for a in offset..end {
            for b in a + 1..end {
                if rng.gen_bool(spec.extra_edge_prob) {
                    pairs.insert((a, b));
                }
            }
        }
        offset = end;
    }
    let n = offset as usize;
    let mut edges: Vec<(NodeId, NodeId)> = pairs.into_iter().collect();
    edges.sort_unstable();
    if spec.directed {
        for e in edges.iter_mut() {
            if rng.gen_bool(0.5) {
                *e = (e.1, e.0);
            }
        }
    }
    let nw = rng.gen_range(0..=spec.max_node_attrs);
    let ew = rng.gen_range(0..=spec.max_edge_attrs);
    let mut attrs = |count: usize, width: usize| -> Vec<Vec<i64>> {
        (0..count)
            .map(|_| (0..width).map(|_| rng.gen_range(0..=spec.max_value)).collect())
            .collect()
    };
    let node_attrs = attrs(n, nw);
    let edge_attrs = attrs(edges.len(), ew);
    AttributedGraph::new(n, spec.directed, edges, node_attrs, edge_attrs).expect("generated graph is valid")
}

/// Barabási–Albert preferential attachment: each new node links to `m`
/// distinct existing nodes chosen proportionally to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> AttributedGraph {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = seed::rng(seed);
    let mut edges = Vec::with_capacity(n * m);
    // endpoint list: each node appears once per incident edge
    let mut ends: Vec<NodeId> = Vec::with_capacity(2 * n * m);
    for v in 1..=m as NodeId {
        edges.push((0, v));
        ends.extend([0, v]);
    }
    let mut picked = HashSet::with_capacity(m);
    for v in (m + 1) as NodeId..n as NodeId {
        picked.clear();
        while picked.len() < m {
            picked.insert(ends[rng.gen_range(0..ends.len())]);
        }
        let mut targets: Vec<NodeId> = picked.iter().copied().collect();
        targets.sort_unstable();
        for t in targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    AttributedGraph::from_edges(n, &edges).expect("generated graph is valid")
}

/// Planted-partition graph: dense clusters of `cluster_size` nodes with
/// intra-cluster edge probability `p_in`, plus about `inter_degree * n / 2`
/// uniform random edges between clusters.
pub fn clustered(n: usize, cluster_size: usize, p_in: f64, inter_degree: f64, seed: u64) -> AttributedGraph {
    let mut rng = seed::rng(seed);
    let mut pairs = HashSet::new();
    for start in (0..n).step_by(cluster_size) {
        let end = (start + cluster_size).min(n);
        for a in start..end {
            for b in a + 1..end {
                if rng.gen_bool(p_in) {
                    pairs.insert((a as NodeId, b as NodeId));
                }
            }
        }
    }
    let inter = (inter_degree * n as f64 / 2.0).round() as usize;
    let mut added = 0;
    while added < inter {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a / cluster_size != b / cluster_size && pairs.insert(key(a as NodeId, b as NodeId)) {
            added += 1;
        }
    }
    let mut edges: Vec<(NodeId, NodeId)> = pairs.into_iter().collect();
    edges.sort_unstable();
    AttributedGraph::from_edges(n, &edges).expect("generated graph is valid")
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}
