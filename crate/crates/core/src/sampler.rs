//! Ego-subgraph sampling around seed nodes or seed edges.
//!
//! Breadth-first expansion from the roots for `depth` hops; each frontier node
//! draws at most `neighbors` of its neighbors uniformly without replacement.
//! The result is the subgraph induced by every reached node.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{AttributedGraph, NodeId, SubgraphSample};
use crate::seed;

#[derive(Error, Debug)]
pub enum SampleError {
    #[error("root {0} out of range")]
    RootOutOfRange(NodeId),
    #[error("{mode:?} sampling needs {expected} root(s), got {actual}")]
    RootCount {
        mode: SampleMode,
        expected: usize,
        actual: usize,
    },
    #[error("invalid sampler config: {0}")]
    Config(String),
    #[error("graph too small: requested {requested}, available {available}")]
    TooSmall { requested: usize, available: usize },
    #[error("no sample within {max_seq_len} tokens after {attempts} attempts (last length {last_len})")]
    DoesNotFit {
        max_seq_len: usize,
        attempts: usize,
        last_len: usize,
    },
    #[error("measuring a sample failed: {0}")]
    Measure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    NodeEgo,
    EdgeEgo,
}

impl SampleMode {
    pub fn root_count(self) -> usize {
        match self {
            SampleMode::NodeEgo => 1,
            SampleMode::EdgeEgo => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: SampleMode,
    pub depth: usize,
    pub neighbors: usize,
    pub max_seq_len: usize,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.depth == 0 || self.neighbors == 0 || self.max_seq_len == 0 {
            return Err(SampleError::Config(
                "depth, neighbors and max_seq_len must all be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A root tuple drawn for sampling; `positive` is false for negative pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootDraw {
    pub roots: Vec<NodeId>,
    pub positive: bool,
}

/// Read-only sampling index over a parent graph.
pub struct Sampler<'g> {
    graph: &'g AttributedGraph,
    adj: Vec<Vec<NodeId>>,
    edge_set: HashSet<(NodeId, NodeId)>,
}

impl<'g> Sampler<'g> {
    pub fn new(graph: &'g AttributedGraph) -> Self {
        let adj = graph
            .adjacency()
            .into_iter()
            .map(|list| list.into_iter().map(|(v, _)| v).collect())
            .collect();
        let edge_set = graph
            .edges()
            .iter()
            .map(|&(s, d)| (s.min(d), s.max(d)))
            .collect();
        Self {
            graph,
            adj,
            edge_set,
        }
    }

    pub fn graph(&self) -> &'g AttributedGraph {
        self.graph
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.edge_set.contains(&(a.min(b), a.max(b)))
    }

    /// Capped-fanout BFS from `roots` followed by the induced subgraph.
    /// Roots get local ids 0 (and 1); other nodes follow in discovery order.
    pub fn sample(&self, roots: &[NodeId], cfg: &SamplerConfig) -> Result<SubgraphSample, SampleError> {
        cfg.validate()?;
        if roots.len() != cfg.mode.root_count() {
            return Err(SampleError::RootCount {
                mode: cfg.mode,
                expected: cfg.mode.root_count(),
                actual: roots.len(),
            });
        }
        let n = self.graph.num_nodes();
        for &r in roots {
            if r as usize >= n {
                return Err(SampleError::RootOutOfRange(r));
            }
        }
        if roots.len() == 2 && roots[0] == roots[1] {
            return Err(SampleError::Config("edge-ego roots must be distinct".into()));
        }

        let mut rng = seed::rng(cfg.seed);
        let mut reached: Vec<NodeId> = roots.to_vec();
        let mut seen: HashSet<NodeId> = roots.iter().copied().collect();
        let mut frontier = reached.clone();
        for _ in 0..cfg.depth {
            let mut next = Vec::new();
            for &u in &frontier {
                let nbrs = &self.adj[u as usize];
                let take = cfg.neighbors.min(nbrs.len());
                for i in index::sample(&mut rng, nbrs.len(), take) {
                    let w = nbrs[i];
                    if seen.insert(w) {
                        reached.push(w);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }

        Ok(SubgraphSample {
            graph: self.graph.induced(&reached),
            root_nodes: (0..roots.len() as NodeId).collect(),
            origin_ids: reached,
        })
    }

    /// Samples and measures; when the measured length exceeds
    /// `cfg.max_seq_len` the fanout is decremented and sampling retried, then
    /// the depth once the fanout is 1. Never truncates.
    pub fn sample_fitting<F, E>(
        &self,
        roots: &[NodeId],
        cfg: &SamplerConfig,
        mut measure: F,
    ) -> Result<(SubgraphSample, SamplerConfig), SampleError>
    where
        F: FnMut(&SubgraphSample) -> Result<usize, E>,
        E: std::fmt::Display,
    {
        let mut cur = *cfg;
        let mut attempts = 0;
        loop {
            attempts += 1;
            cur.seed = seed::derive(cfg.seed, attempts as u64 - 1);
            let sample = self.sample(roots, &cur)?;
            let len = measure(&sample).map_err(|e| SampleError::Measure(e.to_string()))?;
            if len <= cfg.max_seq_len {
                return Ok((sample, cur));
            }
            if cur.neighbors > 1 {
                cur.neighbors -= 1;
            } else if cur.depth > 1 {
                cur.depth -= 1;
            } else {
                return Err(SampleError::DoesNotFit {
                    max_seq_len: cfg.max_seq_len,
                    attempts,
                    last_len: len,
                });
            }
        }
    }

    /// Draws `count` root tuples. Node-ego: distinct uniform nodes. Edge-ego:
    /// distinct uniform existing edges, followed (if `negatives`) by the same
    /// number of non-edges, each keeping a positive's head and drawing a
    /// random tail.
    pub fn draw_roots(
        &self,
        mode: SampleMode,
        count: usize,
        negatives: bool,
        seed: u64,
    ) -> Result<Vec<RootDraw>, SampleError> {
        let mut rng = seed::rng(seed);
        let g = self.graph;
        match mode {
            SampleMode::NodeEgo => {
                if count > g.num_nodes() {
                    return Err(SampleError::TooSmall {
                        requested: count,
                        available: g.num_nodes(),
                    });
                }
                Ok(index::sample(&mut rng, g.num_nodes(), count)
                    .into_iter()
                    .map(|v| RootDraw {
                        roots: vec![v as NodeId],
                        positive: true,
                    })
                    .collect())
            }
            SampleMode::EdgeEgo => {
                if count > g.num_edges() {
                    return Err(SampleError::TooSmall {
                        requested: count,
                        available: g.num_edges(),
                    });
                }
                let mut out: Vec<RootDraw> = index::sample(&mut rng, g.num_edges(), count)
                    .into_iter()
                    .map(|e| {
                        let (s, d) = g.edge(e);
                        RootDraw {
                            roots: vec![s, d],
                            positive: true,
                        }
                    })
                    .collect();
                if negatives && count > 0 {
                    let n = g.num_nodes();
                    let max_pairs = n * n.saturating_sub(1) / 2;
                    if self.edge_set.len() >= max_pairs {
                        return Err(SampleError::TooSmall {
                            requested: count,
                            available: 0,
                        });
                    }
                    let heads: Vec<NodeId> = out.iter().map(|d| d.roots[0]).collect();
                    for head in heads {
                        out.push(RootDraw {
                            roots: self.negative_pair(head, &mut rng),
                            positive: false,
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    fn negative_pair(&self, head: NodeId, rng: &mut seed::Rng) -> Vec<NodeId> {
        let n = self.graph.num_nodes();
        let mut head = head;
        // A saturated head has no non-neighbor; move to another head then.
        while self.adj[head as usize].len() + 1 >= n {
            head = rng.gen_range(0..n) as NodeId;
        }
        loop {
            let tail = rng.gen_range(0..n) as NodeId;
            if tail != head && !self.has_edge(head, tail) {
                return vec![head, tail];
            }
        }
    }
}

/// Shuffled copy of `items` (used to randomize root order for workers).
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(&mut seed::rng(seed));
    v
}
