//! Multi-token node identity codes.
//!
//! A node's global identity is written as `k` semantic tokens. For `k >= 2`
//! slot 0 is the node's cluster and slots `1..k` spell its index inside the
//! cluster in a fixed radix, so the identity vocabulary grows with the
//! cluster count plus `(k - 1)` times the radix instead of with the node
//! count. Clusters come from given labels, an imported partition file, or a
//! seeded capped-size BFS partitioner.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::graph::{AttributedGraph, GraphError, NodeId, SubgraphSample};
use crate::seed;
use crate::vocab::{semantic_token, AttrDim, AttrEncoding, AttrKind, AttrSchema};

pub const IDENTITY_DIM: AttrDim = AttrDim {
    default: -1,
    encoding: AttrEncoding::Discrete,
};

#[derive(Error, Debug)]
pub enum IdentityError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("max_cluster must be at least 1")]
    ZeroCluster,
    #[error("{clusters} clusters of at most {max_cluster} nodes cannot hold {num_nodes} nodes")]
    Capacity {
        clusters: usize,
        max_cluster: usize,
        num_nodes: usize,
    },
    #[error("expected {expected} labels, got {actual}")]
    LabelCount { expected: usize, actual: usize },
    #[error("unknown node id {0}")]
    UnknownNode(u64),
    #[error("token tuple {0:?} is not in the codebook")]
    UnknownTokens(Vec<String>),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// `labels[v]` is the cluster of node `v`.
    GivenLabels(Vec<u32>),
    /// Seeded BFS regions grown up to `max_cluster` nodes each.
    BfsPartition,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIdentityCodebook {
    tag: String,
    k: usize,
    /// Digit base for local-index slots (k >= 2).
    radix: u64,
    partition: Vec<u32>,
    /// Distinct cluster ids, ascending.
    clusters: Vec<u32>,
    local_index: Vec<u64>,
    /// Distinct values each slot takes.
    slot_sizes: Vec<u64>,
    decode: HashMap<Vec<u64>, NodeId>,
}

impl NodeIdentityCodebook {
    /// Builds codes for every node of `g`.
    ///
    /// With `BfsPartition`, every cluster except possibly the last holds
    /// exactly `max_cluster` nodes: when a BFS region runs out of unassigned
    /// neighbors it continues from the next unassigned node in seeded order.
    /// Local indices follow ascending global id within each cluster.
    pub fn build(
        g: &AttributedGraph,
        tag: &str,
        k: usize,
        strategy: &PartitionStrategy,
        max_cluster: usize,
        seed: u64,
    ) -> Result<Self, IdentityError> {
        let partition = match strategy {
            PartitionStrategy::GivenLabels(labels) => {
                if labels.len() != g.num_nodes() {
                    return Err(IdentityError::LabelCount {
                        expected: g.num_nodes(),
                        actual: labels.len(),
                    });
                }
                labels.clone()
            }
            PartitionStrategy::BfsPartition => bfs_partition(g, max_cluster, seed)?,
        };
        Self::from_partition(tag, k, partition, max_cluster)
    }

    pub fn from_partition(
        tag: &str,
        k: usize,
        partition: Vec<u32>,
        max_cluster: usize,
    ) -> Result<Self, IdentityError> {
        if k == 0 {
            return Err(IdentityError::ZeroK);
        }
        if max_cluster == 0 {
            return Err(IdentityError::ZeroCluster);
        }
        let n = partition.len();
        let mut counts: HashMap<u32, u64> = HashMap::new();
        let mut local_index = vec![0u64; n];
        for (v, &c) in partition.iter().enumerate() {
            let slot = counts.entry(c).or_insert(0);
            local_index[v] = *slot;
            *slot += 1;
        }
        let largest = counts.values().copied().max().unwrap_or(0);
        if largest as usize > max_cluster {
            return Err(IdentityError::Capacity {
                clusters: counts.len(),
                max_cluster,
                num_nodes: n,
            });
        }

        let (radix, slot_sizes) = if k == 1 {
            (n as u64, vec![n as u64])
        } else {
            let radix = integer_root_ceil(largest.max(1), (k - 1) as u32);
            // Distinct values each local digit takes over 0..largest, least
            // significant first.
            let mut digits = Vec::with_capacity(k - 1);
            let mut remaining = largest.max(1);
            for _ in 1..k {
                digits.push(remaining.min(radix));
                remaining = remaining.div_ceil(radix);
            }
            let mut sizes = vec![counts.len() as u64];
            sizes.extend(digits.into_iter().rev());
            (radix, sizes)
        };

        let mut clusters: Vec<u32> = counts.keys().copied().collect();
        clusters.sort_unstable();
        let mut cb = Self {
            tag: tag.to_string(),
            clusters,
            k,
            radix,
            partition,
            local_index,
            slot_sizes,
            decode: HashMap::with_capacity(n),
        };
        for v in 0..n {
            let code = cb.code(v as NodeId);
            cb.decode.insert(code, v as NodeId);
        }
        Ok(cb)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_nodes(&self) -> usize {
        self.partition.len()
    }

    pub fn cluster(&self, v: NodeId) -> u32 {
        self.partition[v as usize]
    }

    pub fn local_index(&self, v: NodeId) -> u64 {
        self.local_index[v as usize]
    }

    pub fn num_clusters(&self) -> usize {
        self.slot_sizes[0] as usize
    }

    /// Number of distinct tokens per slot.
    pub fn slot_sizes(&self) -> &[u64] {
        &self.slot_sizes
    }

    /// The `k` integer slot values of node `v`.
    pub fn code(&self, v: NodeId) -> Vec<u64> {
        if self.k == 1 {
            return vec![v as u64];
        }
        let mut out = Vec::with_capacity(self.k);
        out.push(self.partition[v as usize] as u64);
        let mut rest = self.local_index[v as usize];
        let mut digits = vec![0u64; self.k - 1];
        for d in digits.iter_mut().rev() {
            *d = rest % self.radix;
            rest /= self.radix;
        }
        out.extend(digits);
        out
    }

    pub fn encode_node(&self, v: u64) -> Result<Vec<String>, IdentityError> {
        if v as usize >= self.num_nodes() {
            return Err(IdentityError::UnknownNode(v));
        }
        Ok(self
            .code(v as NodeId)
            .into_iter()
            .enumerate()
            .map(|(slot, value)| semantic_token(&self.tag, AttrKind::Node, slot, value as i64))
            .collect())
    }

    pub fn decode_node<S: AsRef<str>>(&self, tokens: &[S]) -> Result<NodeId, IdentityError> {
        let unknown = || IdentityError::UnknownTokens(tokens.iter().map(|t| t.as_ref().to_string()).collect());
        if tokens.len() != self.k {
            return Err(unknown());
        }
        let mut code = Vec::with_capacity(self.k);
        for (slot, tok) in tokens.iter().enumerate() {
            let prefix = format!("{}#node#{slot}#", self.tag);
            let value = tok
                .as_ref()
                .strip_prefix(&prefix)
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(unknown)?;
            code.push(value);
        }
        self.decode.get(&code).copied().ok_or_else(unknown)
    }

    /// Every identity token, slot by slot.
    pub fn semantic_tokens(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.k == 1 {
            out.extend((0..self.num_nodes()).map(|v| semantic_token(&self.tag, AttrKind::Node, 0, v as i64)));
            return out;
        }
        out.extend(
            self.clusters
                .iter()
                .map(|&c| semantic_token(&self.tag, AttrKind::Node, 0, c as i64)),
        );
        for (slot, &size) in self.slot_sizes.iter().enumerate().skip(1) {
            out.extend((0..size).map(|value| semantic_token(&self.tag, AttrKind::Node, slot, value as i64)));
        }
        out
    }

    /// Schema for identity-coded node attributes: `k` discrete dimensions
    /// with an unreachable default so every slot is always emitted.
    pub fn node_schema(&self) -> Vec<AttrDim> {
        vec![IDENTITY_DIM; self.k]
    }

    /// Replaces a sample's node attributes with identity codes.
    pub fn apply(&self, sample: &SubgraphSample) -> Result<AttributedGraph, IdentityError> {
        let rows = sample
            .origin_ids
            .iter()
            .map(|&gid| {
                if gid as usize >= self.num_nodes() {
                    return Err(IdentityError::UnknownNode(gid as u64));
                }
                Ok(self.code(gid).into_iter().map(|v| v as i64).collect())
            })
            .collect::<Result<Vec<Vec<i64>>, _>>()?;
        Ok(sample.graph.with_node_attrs(rows, vec![-1; self.k])?)
    }

    /// Replaces a sample's node attributes with the cluster id only. Nodes in
    /// one cluster become indistinguishable by attributes.
    pub fn apply_coarse(&self, sample: &SubgraphSample) -> Result<AttributedGraph, IdentityError> {
        let rows = sample
            .origin_ids
            .iter()
            .map(|&gid| {
                if gid as usize >= self.num_nodes() {
                    return Err(IdentityError::UnknownNode(gid as u64));
                }
                Ok(vec![self.partition[gid as usize] as i64])
            })
            .collect::<Result<Vec<Vec<i64>>, _>>()?;
        Ok(sample.graph.with_node_attrs(rows, vec![-1])?)
    }

    pub fn coarse_schema(&self, directed: bool, edge: Vec<AttrDim>) -> AttrSchema {
        AttrSchema {
            directed,
            node: vec![IDENTITY_DIM],
            edge,
        }
    }

    /// Attribute schema for graphs produced by [`apply`](Self::apply) from a
    /// parent whose edge schema is `edge`.
    pub fn schema(&self, directed: bool, edge: Vec<AttrDim>) -> AttrSchema {
        AttrSchema {
            directed,
            node: self.node_schema(),
            edge,
        }
    }

    /// "global_id<TAB>tok0<TAB>tok1…" lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for v in 0..self.num_nodes() {
            out.push_str(&v.to_string());
            for tok in self.encode_node(v as u64).expect("node in range") {
                out.push('\t');
                out.push_str(&tok);
            }
            out.push('\n');
        }
        out
    }
}

fn integer_root_ceil(x: u64, k: u32) -> u64 {
    if k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round().max(1.0) as u64;
    while r.checked_pow(k).is_some_and(|p| p < x) {
        r += 1;
    }
    while r > 1 && (r - 1).checked_pow(k).is_some_and(|p| p >= x) {
        r -= 1;
    }
    r
}

/// Greedy capped BFS partition. Deterministic given `seed`.
pub fn bfs_partition(g: &AttributedGraph, max_cluster: usize, seed: u64) -> Result<Vec<u32>, IdentityError> {
    if max_cluster == 0 {
        return Err(IdentityError::ZeroCluster);
    }
    let n = g.num_nodes();
    let adj = g.adjacency();
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    order.shuffle(&mut seed::rng(seed));

    let mut part = vec![u32::MAX; n];
    let mut cluster = 0u32;
    let mut size = 0usize;
    let mut queue = VecDeque::new();
    let mut next_seed = order.iter();
    let mut assigned = 0usize;
    while assigned < n {
        if queue.is_empty() {
            let &start = next_seed
                .by_ref()
                .find(|&&v| part[v as usize] == u32::MAX)
                .expect("unassigned node remains");
            part[start as usize] = cluster;
            assigned += 1;
            size += 1;
            queue.push_back(start);
        }
        while let Some(u) = queue.pop_front() {
            if size == max_cluster {
                break;
            }
            for &(w, _) in &adj[u as usize] {
                if size == max_cluster {
                    break;
                }
                if part[w as usize] == u32::MAX {
                    part[w as usize] = cluster;
                    assigned += 1;
                    size += 1;
                    queue.push_back(w);
                }
            }
        }
        if size == max_cluster {
            cluster += 1;
            size = 0;
            queue.clear();
        }
    }
    Ok(part)
}

/// Reads "global_id<TAB>cluster" lines into a dense label vector.
pub fn load_partition(path: impl AsRef<Path>, num_nodes: usize) -> Result<Vec<u32>, IdentityError> {
    parse_partition(&fs::read_to_string(path)?, num_nodes)
}

pub fn parse_partition(text: &str, num_nodes: usize) -> Result<Vec<u32>, IdentityError> {
    let mut labels = vec![None; num_nodes];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| IdentityError::Parse { line: line_no, msg };
        let mut fields = line.split('\t');
        let (Some(id), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected global_id<TAB>cluster".into()));
        };
        let id: usize = id.parse().map_err(|e| err(format!("bad id: {e}")))?;
        let c: u32 = c.parse().map_err(|e| err(format!("bad cluster: {e}")))?;
        if id >= num_nodes {
            return Err(IdentityError::UnknownNode(id as u64));
        }
        labels[id] = Some(c);
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(v, l)| {
            l.ok_or(IdentityError::Parse {
                line: 0,
                msg: format!("node {v} has no cluster"),
            })
        })
        .collect()
}
