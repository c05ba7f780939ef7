//! Connectivity repair, parity repair (Eulerization) and randomized
//! Hierholzer path extraction.
//!
//! The multigraph is the base graph plus synthetic jump edges that chain
//! disconnected components, plus duplicated copies of existing edges. Edge
//! direction is ignored here; the tokenizer records it separately.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::graph::{components_of, connected_components, AttributedGraph, NodeId};
use crate::seed;

/// Exact minimum-weight matching is used up to this many odd-degree nodes.
pub const EXACT_MATCHING_LIMIT: usize = 12;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum EulerError {
    #[error("multigraph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("multigraph has {0} odd-degree nodes; a path needs 0 or 2")]
    Parity(usize),
    #[error("graph has no nodes")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeRef {
    Base(usize),
    Jump(usize),
}

/// One traversable copy of an edge. `ordinal` 0 is the original, later
/// ordinals are duplicates added by Eulerization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeInstance {
    pub edge: EdgeRef,
    pub ordinal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EulerKind {
    Eulerian,
    SemiEulerian,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kind: EulerKind,
    pub odd_nodes: Vec<NodeId>,
}

#[derive(Debug, Clone)]
pub struct EulerizedMultigraph<'g> {
    base: &'g AttributedGraph,
    jump_edges: Vec<(NodeId, NodeId)>,
    duplications: Vec<EdgeRef>,
    minimality_guaranteed: bool,
}

impl<'g> EulerizedMultigraph<'g> {
    /// Wraps a graph with no jump edges and no duplications.
    pub fn new(base: &'g AttributedGraph) -> Self {
        Self {
            base,
            jump_edges: Vec::new(),
            duplications: Vec::new(),
            minimality_guaranteed: true,
        }
    }

    pub fn base(&self) -> &'g AttributedGraph {
        self.base
    }

    pub fn jump_edges(&self) -> &[(NodeId, NodeId)] {
        &self.jump_edges
    }

    pub fn duplications(&self) -> &[EdgeRef] {
        &self.duplications
    }

    /// False when the greedy matching fallback was used.
    pub fn minimality_guaranteed(&self) -> bool {
        self.minimality_guaranteed
    }

    pub fn endpoints(&self, edge: EdgeRef) -> (NodeId, NodeId) {
        match edge {
            EdgeRef::Base(i) => self.base.edge(i),
            EdgeRef::Jump(i) => self.jump_edges[i],
        }
    }

    /// Distinct (non-duplicated) edges: base edges then jump edges.
    fn distinct_edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        (0..self.base.num_edges())
            .map(EdgeRef::Base)
            .chain((0..self.jump_edges.len()).map(EdgeRef::Jump))
    }

    /// All edge instances: originals (ordinal 0) in distinct-edge order, then
    /// each duplication with the next free ordinal for its edge.
    pub fn edge_instances(&self) -> Vec<EdgeInstance> {
        let mut out: Vec<EdgeInstance> = self
            .distinct_edges()
            .map(|edge| EdgeInstance { edge, ordinal: 0 })
            .collect();
        let mut base_count = vec![0u32; self.base.num_edges()];
        let mut jump_count = vec![0u32; self.jump_edges.len()];
        for &edge in &self.duplications {
            let slot = match edge {
                EdgeRef::Base(i) => &mut base_count[i],
                EdgeRef::Jump(i) => &mut jump_count[i],
            };
            *slot += 1;
            out.push(EdgeInstance {
                edge,
                ordinal: *slot,
            });
        }
        out
    }

    pub fn num_nodes(&self) -> usize {
        self.base.num_nodes()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes()];
        for e in self.distinct_edges().chain(self.duplications.iter().copied()) {
            let (s, d) = self.endpoints(e);
            deg[s as usize] += 1;
            deg[d as usize] += 1;
        }
        deg
    }

    pub fn odd_nodes(&self) -> Vec<NodeId> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d % 2 == 1)
            .map(|(v, _)| v as NodeId)
            .collect()
    }

    pub fn num_components(&self) -> usize {
        components_of(
            self.num_nodes(),
            self.distinct_edges().map(|e| self.endpoints(e)),
        )
        .len()
    }

    fn require_connected(&self) -> Result<(), EulerError> {
        match self.num_components() {
            0 | 1 => Ok(()),
            n => Err(EulerError::Disconnected(n)),
        }
    }

    /// Undirected adjacency over distinct edges, sorted for determinism.
    fn adjacency(&self) -> Vec<Vec<(NodeId, EdgeRef)>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for e in self.distinct_edges() {
            let (s, d) = self.endpoints(e);
            adj[s as usize].push((d, e));
            adj[d as usize].push((s, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Chains the components of `g` with synthetic edges: component i is linked
/// to component i + 1 through one uniformly chosen node in each.
pub fn add_jump_edges(g: &AttributedGraph, seed: u64) -> EulerizedMultigraph<'_> {
    let comps = connected_components(g);
    let mut rng = seed::rng(seed);
    let jump_edges = comps
        .windows(2)
        .map(|pair| {
            let a = pair[0][rng.gen_range(0..pair[0].len())];
            let b = pair[1][rng.gen_range(0..pair[1].len())];
            (a, b)
        })
        .collect();
    EulerizedMultigraph {
        jump_edges,
        ..EulerizedMultigraph::new(g)
    }
}

pub fn classify(mg: &EulerizedMultigraph<'_>) -> Result<Classification, EulerError> {
    mg.require_connected()?;
    let odd_nodes = mg.odd_nodes();
    let kind = match odd_nodes.len() {
        0 => EulerKind::Eulerian,
        2 => EulerKind::SemiEulerian,
        _ => EulerKind::Neither,
    };
    Ok(Classification { kind, odd_nodes })
}

/// Duplicates edges along shortest paths between paired odd nodes until at
/// most two odd nodes remain.
///
/// With at most [`EXACT_MATCHING_LIMIT`] odd nodes the pairing is an exact
/// minimum over all pairings, where one pair may be left unmatched (a
/// semi-Eulerian result) when that is strictly cheaper than a closed tour.
/// Larger inputs fall back to greedy nearest-pair matching.
pub fn eulerize<'g>(mut mg: EulerizedMultigraph<'g>) -> Result<EulerizedMultigraph<'g>, EulerError> {
    mg.require_connected()?;
    let odd = mg.odd_nodes();
    if odd.len() <= 2 {
        return Ok(mg);
    }
    let adj = mg.adjacency();
    let trees: Vec<BfsTree> = odd.iter().map(|&o| BfsTree::new(&adj, o)).collect();
    let dist = |i: usize, j: usize| trees[i].dist[odd[j] as usize];

    let (pairs, exact) = if odd.len() <= EXACT_MATCHING_LIMIT {
        (exact_pairing(odd.len(), &dist), true)
    } else {
        (greedy_pairing(odd.len(), &dist), false)
    };

    for (i, j) in pairs {
        mg.duplications.extend(trees[i].path_to(odd[j]));
    }
    mg.minimality_guaranteed = exact;
    Ok(mg)
}

struct BfsTree {
    dist: Vec<u32>,
    parent: Vec<Option<(NodeId, EdgeRef)>>,
}

impl BfsTree {
    fn new(adj: &[Vec<(NodeId, EdgeRef)>], src: NodeId) -> Self {
        let n = adj.len();
        let mut dist = vec![u32::MAX; n];
        let mut parent = vec![None; n];
        let mut queue = VecDeque::from([src]);
        dist[src as usize] = 0;
        while let Some(u) = queue.pop_front() {
            for &(v, e) in &adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    parent[v as usize] = Some((u, e));
                    queue.push_back(v);
                }
            }
        }
        Self { dist, parent }
    }

    fn path_to(&self, mut target: NodeId) -> Vec<EdgeRef> {
        let mut edges = Vec::new();
        while let Some((prev, e)) = self.parent[target as usize] {
            edges.push(e);
            target = prev;
        }
        edges
    }
}

/// Minimum-cost pairing of `k` points allowing at most one unmatched pair.
/// Returns matched index pairs. Exempting a pair is only taken when it is
/// strictly cheaper than a perfect matching.
fn exact_pairing(k: usize, dist: &impl Fn(usize, usize) -> u32) -> Vec<(usize, usize)> {
    const INF: u32 = u32::MAX / 4;
    // memo[mask * 3 + left]: cheapest way to resolve the nodes in `mask`
    // when `left` nodes have already been exempted.
    let full = (1usize << k) - 1;
    let solve = |allow_exempt: bool| -> (u32, Vec<(usize, usize)>) {
        let mut memo = vec![INF; (full + 1) * 3];
        let mut choice = vec![usize::MAX; (full + 1) * 3];
        // Masks are processed in increasing order; every transition removes
        // bits so dependencies are already computed.
        for mask in 0..=full {
            for left in (0..3usize).rev() {
                let slot = mask * 3 + left;
                if mask == 0 {
                    memo[slot] = if left == 1 { INF } else { 0 };
                    continue;
                }
                let i = mask.trailing_zeros() as usize;
                let rest = mask & !(1 << i);
                let mut best = INF;
                let mut pick = usize::MAX;
                if allow_exempt && left < 2 {
                    let c = memo[rest * 3 + left + 1];
                    if c < best {
                        best = c;
                        pick = i;
                    }
                }
                let mut bits = rest;
                while bits != 0 {
                    let j = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let sub = memo[(rest & !(1 << j)) * 3 + left];
                    if sub < INF {
                        let c = sub + dist(i, j);
                        if c < best {
                            best = c;
                            pick = j;
                        }
                    }
                }
                memo[slot] = best;
                choice[slot] = pick;
            }
        }
        let mut pairs = Vec::new();
        let (mut mask, mut left) = (full, 0usize);
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            let j = choice[mask * 3 + left];
            if j == i {
                mask &= !(1 << i);
                left += 1;
            } else {
                pairs.push((i, j));
                mask &= !(1 << i) & !(1 << j);
            }
        }
        (memo[full * 3], pairs)
    };
    let (closed_cost, closed) = solve(false);
    let (open_cost, open) = solve(true);
    if open_cost < closed_cost {
        open
    } else {
        closed
    }
}

/// Repeatedly matches the globally closest remaining pair until two nodes
/// remain; those two stay odd.
fn greedy_pairing(k: usize, dist: &impl Fn(usize, usize) -> u32) -> Vec<(usize, usize)> {
    let mut candidates: Vec<(u32, usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| (dist(i, j), i, j))
        .collect();
    candidates.sort_unstable();
    let mut matched = vec![false; k];
    let mut unmatched = k;
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if unmatched <= 2 {
            break;
        }
        if !matched[i] && !matched[j] {
            matched[i] = true;
            matched[j] = true;
            unmatched -= 2;
            pairs.push((i, j));
        }
    }
    pairs
}

/// A walk covering every edge instance of a multigraph exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerPath {
    /// `edge_instances.len() + 1` nodes.
    pub nodes: Vec<NodeId>,
    /// Indices into [`EulerizedMultigraph::edge_instances`], aligned with
    /// consecutive node pairs.
    pub edge_instances: Vec<usize>,
    pub rng_seed: u64,
}

impl EulerPath {
    pub fn num_edges(&self) -> usize {
        self.edge_instances.len()
    }
}

/// Hierholzer's algorithm with every node's incident edges shuffled by
/// `seed`. Starts at a random odd node when two exist, otherwise at a random
/// node.
pub fn extract_path(mg: &EulerizedMultigraph<'_>, seed: u64) -> Result<EulerPath, EulerError> {
    let n = mg.num_nodes();
    if n == 0 {
        return Err(EulerError::Empty);
    }
    mg.require_connected()?;
    let odd = mg.odd_nodes();
    if !odd.is_empty() && odd.len() != 2 {
        return Err(EulerError::Parity(odd.len()));
    }

    let instances = mg.edge_instances();
    let mut adj: Vec<Vec<(NodeId, usize)>> = vec![Vec::new(); n];
    for (idx, inst) in instances.iter().enumerate() {
        let (s, d) = mg.endpoints(inst.edge);
        adj[s as usize].push((d, idx));
        adj[d as usize].push((s, idx));
    }
    let mut rng = seed::rng(seed);
    for list in &mut adj {
        list.shuffle(&mut rng);
    }
    let start = if odd.is_empty() {
        rng.gen_range(0..n) as NodeId
    } else {
        odd[rng.gen_range(0..2)]
    };

    let mut used = vec![false; instances.len()];
    let mut cursor = vec![0usize; n];
    // (node, edge instance used to reach it)
    let mut stack: Vec<(NodeId, Option<usize>)> = vec![(start, None)];
    let mut nodes = Vec::with_capacity(instances.len() + 1);
    let mut edges = Vec::with_capacity(instances.len());
    while let Some(&(v, via)) = stack.last() {
        let list = &adj[v as usize];
        let c = &mut cursor[v as usize];
        while *c < list.len() && used[list[*c].1] {
            *c += 1;
        }
        if let Some(&(w, e)) = list.get(*c) {
            used[e] = true;
            stack.push((w, Some(e)));
        } else {
            stack.pop();
            nodes.push(v);
            if let Some(e) = via {
                edges.push(e);
            }
        }
    }
    nodes.reverse();
    edges.reverse();
    debug_assert_eq!(edges.len(), instances.len());
    Ok(EulerPath {
        nodes,
        edge_instances: edges,
        rng_seed: seed,
    })
}
