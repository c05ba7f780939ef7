//! Graph reconstruction from token sequences, plus a brute-force
//! isomorphism check for small graphs.
//!
//! Reconstruction reads non-pad tokens in row-major order, so it does not
//! depend on the layout. Consecutive node tokens are edges; `[EDGE_JUMP]`
//! edges are dropped and repeated traversals collapse to one edge. Nodes are
//! numbered by first appearance, so the result equals the source graph only
//! up to relabeling.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{AttributedGraph, GraphError, NodeId};
use crate::tokenizer::{Role, TokenGrid};
use crate::vocab::{AttrKind, AttrSchema, Special, TokenClass, TokenId, Vocabulary};

/// Graphs above this node count are rejected by [`isomorphic`].
pub const ISOMORPHISM_NODE_LIMIT: usize = 12;

#[derive(Error, Debug)]
pub enum DetokenizeError {
    #[error("token id {0} is not in the vocabulary")]
    UnknownToken(TokenId),
    #[error("malformed attribute run at position {0}")]
    MalformedAttribute(usize),
    #[error("cell {0} has role node but holds a non-node token")]
    NonNodeInNodeCell(usize),
    #[error("attribute or edge-type token at position {0} before any node token")]
    Dangling(usize),
    #[error("edge information after the last node (position {0})")]
    TrailingEdge(usize),
    #[error("unexpected token {token:?} at position {pos}")]
    Unexpected { token: String, pos: usize },
    #[error("{kind} attribute dimension {dim} exceeds schema width {width}")]
    DimOutOfRange {
        kind: &'static str,
        dim: usize,
        width: usize,
    },
    #[error("reconstructed graph is invalid: {0}")]
    Graph(#[from] GraphError),
    #[error("isomorphism oracle supports at most {ISOMORPHISM_NODE_LIMIT} nodes, got {0}")]
    TooLarge(usize),
}

#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub graph: AttributedGraph,
    pub dropped_jump_edges: usize,
    pub deduplicated_edges: usize,
    pub warnings: Vec<String>,
    /// Structural token of each reconstructed node.
    pub node_tokens: Vec<TokenId>,
}

#[derive(Default)]
struct PendingEdge {
    edge_type: Option<Special>,
    attrs: Vec<(usize, i64)>,
    pos: usize,
}

/// Reconstructs a graph from a grid, checking that node cells hold node tokens.
pub fn detokenize(
    grid: &TokenGrid,
    vocab: &Vocabulary,
    schema: &AttrSchema,
) -> Result<ReconstructionReport, DetokenizeError> {
    for (cell, tok, role) in grid.cells() {
        if role == Role::Node && vocab.class(tok) != Some(TokenClass::Structural) {
            return Err(DetokenizeError::NonNodeInNodeCell(cell));
        }
    }
    detokenize_tokens(&grid.flatten(), vocab, schema)
}

/// Reconstructs a graph from a flat token sequence (pad tokens are skipped).
pub fn detokenize_tokens(
    tokens: &[TokenId],
    vocab: &Vocabulary,
    schema: &AttrSchema,
) -> Result<ReconstructionReport, DetokenizeError> {
    let pad = vocab.special(Special::Pad);
    let tokens: Vec<TokenId> = tokens.iter().copied().filter(|&t| t != pad).collect();

    let mut node_of: HashMap<TokenId, NodeId> = HashMap::new();
    let mut node_tokens: Vec<TokenId> = Vec::new();
    let mut node_attrs: Vec<Vec<(usize, i64)>> = Vec::new();
    // (from, to, pending edge info) for every consecutive node pair
    let mut steps: Vec<(NodeId, NodeId, PendingEdge)> = Vec::new();
    let mut current: Option<NodeId> = None;
    let mut pending = PendingEdge::default();
    let mut warnings = Vec::new();

    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        let class = vocab.class(tok).ok_or(DetokenizeError::UnknownToken(tok))?;
        match class {
            TokenClass::Structural => {
                let next = *node_of.entry(tok).or_insert_with(|| {
                    node_tokens.push(tok);
                    node_attrs.push(Vec::new());
                    (node_tokens.len() - 1) as NodeId
                });
                if let Some(prev) = current {
                    steps.push((prev, next, std::mem::take(&mut pending)));
                }
                current = Some(next);
                pending.pos = i;
                i += 1;
            }
            TokenClass::Special => {
                let kind = vocab.special_kind(tok).ok_or(DetokenizeError::UnknownToken(tok))?;
                match kind {
                    Special::EdgeJump | Special::Forward | Special::Backward => {
                        if current.is_none() {
                            return Err(DetokenizeError::Dangling(i));
                        }
                        if pending.edge_type.replace(kind).is_some() {
                            return Err(DetokenizeError::Unexpected {
                                token: kind.as_str().to_string(),
                                pos: i,
                            });
                        }
                    }
                    _ => {
                        return Err(DetokenizeError::Unexpected {
                            token: kind.as_str().to_string(),
                            pos: i,
                        })
                    }
                }
                i += 1;
            }
            TokenClass::Digit => return Err(DetokenizeError::MalformedAttribute(i)),
            TokenClass::Semantic => {
                let Some(node) = current else {
                    return Err(DetokenizeError::Dangling(i));
                };
                let sem = vocab
                    .semantic(tok)
                    .ok_or(DetokenizeError::MalformedAttribute(i))?;
                let (value, consumed) = read_value(&tokens[i + 1..], vocab, sem.value)
                    .ok_or(DetokenizeError::MalformedAttribute(i))?;
                match sem.kind {
                    AttrKind::Node => node_attrs[node as usize].push((sem.dim, value)),
                    AttrKind::Edge => pending.attrs.push((sem.dim, value)),
                }
                i += 1 + consumed;
            }
        }
    }
    if pending.edge_type.is_some() || !pending.attrs.is_empty() {
        return Err(DetokenizeError::TrailingEdge(pending.pos));
    }

    let n = node_tokens.len();
    let mut dropped_jump_edges = 0;
    let mut deduplicated_edges = 0;
    let mut edge_index: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut edge_attr_sets: Vec<Vec<(usize, i64)>> = Vec::new();
    for (a, b, info) in steps {
        let (s, d) = match info.edge_type {
            Some(Special::EdgeJump) => {
                dropped_jump_edges += 1;
                if !info.attrs.is_empty() {
                    warnings.push(format!("attributes on jump edge at position {} ignored", info.pos));
                }
                continue;
            }
            Some(Special::Backward) => (b, a),
            Some(_) => (a, b),
            None => {
                if schema.directed {
                    warnings.push(format!("directed edge without direction token at position {}", info.pos));
                }
                (a, b)
            }
        };
        let key = if schema.directed { (s, d) } else { (s.min(d), s.max(d)) };
        match edge_index.get(&key) {
            Some(&e) => {
                deduplicated_edges += 1;
                edge_attr_sets[e].extend(info.attrs);
            }
            None => {
                edge_index.insert(key, edges.len());
                edges.push((s, d));
                edge_attr_sets.push(info.attrs);
            }
        }
    }

    let node_rows = node_attrs
        .into_iter()
        .map(|set| assemble(set, schema, AttrKind::Node, &mut warnings))
        .collect::<Result<Vec<_>, _>>()?;
    let edge_rows = edge_attr_sets
        .into_iter()
        .map(|set| assemble(set, schema, AttrKind::Edge, &mut warnings))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = AttributedGraph::with_defaults(
        n,
        schema.directed,
        edges,
        node_rows,
        edge_rows,
        schema.defaults(AttrKind::Node),
        schema.defaults(AttrKind::Edge),
    )?;
    Ok(ReconstructionReport {
        graph,
        dropped_jump_edges,
        deduplicated_edges,
        warnings,
        node_tokens,
    })
}

/// Value of an attribute whose header has been read. Returns the value and
/// the number of digit tokens consumed; a header without digits is a
/// discrete token carrying `header_value` itself.
fn read_value(rest: &[TokenId], vocab: &Vocabulary, header_value: i64) -> Option<(i64, usize)> {
    let minus = vocab.digit("<->");
    let mut i = 0;
    let negative = rest.first() == Some(&minus);
    if negative {
        i += 1;
    }
    let mut value: i64 = 0;
    let mut digits = 0;
    while let Some(d) = rest.get(i).and_then(|&t| vocab.digit_value(t)) {
        value = value.checked_mul(10)?.checked_add(d as i64)?;
        digits += 1;
        i += 1;
    }
    match (negative, digits) {
        (false, 0) => Some((header_value, 0)),
        (true, 0) => None,
        _ => Some((if negative { -value } else { value }, i)),
    }
}

fn assemble(
    set: Vec<(usize, i64)>,
    schema: &AttrSchema,
    kind: AttrKind,
    warnings: &mut Vec<String>,
) -> Result<Vec<i64>, DetokenizeError> {
    let mut row = schema.defaults(kind);
    let mut seen = vec![false; row.len()];
    for (dim, value) in set {
        if dim >= row.len() {
            return Err(DetokenizeError::DimOutOfRange {
                kind: kind.as_str(),
                dim,
                width: row.len(),
            });
        }
        if seen[dim] && row[dim] != value {
            warnings.push(format!("conflicting {} attribute values on dim {dim}", kind.as_str()));
        }
        seen[dim] = true;
        row[dim] = value;
    }
    Ok(row)
}

/// True iff some node bijection preserves adjacency, direction, and node and
/// edge attributes. Exhaustive backtracking with degree and attribute
/// pruning; intended for graphs of at most [`ISOMORPHISM_NODE_LIMIT`] nodes.
pub fn isomorphic(g1: &AttributedGraph, g2: &AttributedGraph) -> Result<bool, DetokenizeError> {
    for g in [g1, g2] {
        if g.num_nodes() > ISOMORPHISM_NODE_LIMIT {
            return Err(DetokenizeError::TooLarge(g.num_nodes()));
        }
    }
    if g1.num_nodes() != g2.num_nodes()
        || g1.num_edges() != g2.num_edges()
        || g1.is_directed() != g2.is_directed()
        || g1.node_width() != g2.node_width()
        || g1.edge_width() != g2.edge_width()
    {
        return Ok(false);
    }
    let n = g1.num_nodes();
    let a = EdgeTable::new(g1);
    let b = EdgeTable::new(g2);

    // Node signature: attributes, degree, sorted incident edge attributes.
    let sig = |g: &AttributedGraph, t: &EdgeTable, v: usize| {
        let mut incident: Vec<(bool, &[i64])> = t
            .incident(v)
            .map(|(out, e)| (out, g.edge_attrs(e)))
            .collect();
        incident.sort_unstable();
        (g.node_attrs(v as NodeId).to_vec(), incident.into_iter().map(|(o, e)| (o, e.to_vec())).collect::<Vec<_>>())
    };
    let sig1: Vec<_> = (0..n).map(|v| sig(g1, &a, v)).collect();
    let sig2: Vec<_> = (0..n).map(|v| sig(g2, &b, v)).collect();
    let mut s1 = sig1.clone();
    let mut s2 = sig2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Ok(false);
    }

    // Most constrained first: highest degree.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(sig1[v].1.len()));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend(0, &order, &mut map, &mut used, &sig1, &sig2, &a, &b, g1, g2))
}

/// True iff `report` reproduces `g` under the node correspondence fixed by
/// structural tokens: node `v` of `g` carried token `node_tokens[v]`.
/// Works at any size, unlike [`isomorphic`].
pub fn matches_by_tokens(g: &AttributedGraph, node_tokens: &[TokenId], report: &ReconstructionReport) -> bool {
    let r = &report.graph;
    if g.num_nodes() != r.num_nodes()
        || g.num_edges() != r.num_edges()
        || g.is_directed() != r.is_directed()
        || node_tokens.len() != g.num_nodes()
    {
        return false;
    }
    let of_token: HashMap<TokenId, NodeId> =
        report.node_tokens.iter().enumerate().map(|(i, &t)| (t, i as NodeId)).collect();
    let Some(perm) = node_tokens.iter().map(|t| of_token.get(t).copied()).collect::<Option<Vec<NodeId>>>() else {
        return false;
    };
    if (0..g.num_nodes()).any(|v| g.node_attrs(v as NodeId) != r.node_attrs(perm[v])) {
        return false;
    }
    let key = |a: NodeId, b: NodeId| if g.is_directed() || a <= b { (a, b) } else { (b, a) };
    let mut want: Vec<((NodeId, NodeId), &[i64])> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(a, b))| (key(perm[a as usize], perm[b as usize]), g.edge_attrs(e)))
        .collect();
    let mut got: Vec<((NodeId, NodeId), &[i64])> =
        r.edges().iter().enumerate().map(|(e, &(a, b))| (key(a, b), r.edge_attrs(e))).collect();
    want.sort_unstable();
    got.sort_unstable();
    want == got
}

struct EdgeTable {
    // (u, v) -> edge index, stored as given; undirected graphs store both ways
    lookup: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<(bool, usize)>>,
    directed: bool,
}

impl EdgeTable {
    fn new(g: &AttributedGraph) -> Self {
        let mut lookup = HashMap::new();
        let mut adj = vec![Vec::new(); g.num_nodes()];
        for (i, &(s, d)) in g.edges().iter().enumerate() {
            let (s, d) = (s as usize, d as usize);
            lookup.insert((s, d), i);
            if !g.is_directed() {
                lookup.insert((d, s), i);
            }
            adj[s].push((true, i));
            adj[d].push((!g.is_directed(), i));
        }
        Self {
            lookup,
            adj,
            directed: g.is_directed(),
        }
    }

    fn incident(&self, v: usize) -> impl Iterator<Item = (bool, usize)> + '_ {
        self.adj[v].iter().copied()
    }

    fn get(&self, u: usize, v: usize) -> Option<usize> {
        self.lookup.get(&(u, v)).copied()
    }
}

/// Node attributes plus sorted incident (outgoing, edge attrs) pairs.
type NodeSig = (Vec<i64>, Vec<(bool, Vec<i64>)>);

#[allow(clippy::too_many_arguments)]
fn extend(
    depth: usize,
    order: &[usize],
    map: &mut [usize],
    used: &mut [bool],
    sig1: &[NodeSig],
    sig2: &[NodeSig],
    a: &EdgeTable,
    b: &EdgeTable,
    g1: &AttributedGraph,
    g2: &AttributedGraph,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let u = order[depth];
    for cand in 0..map.len() {
        if used[cand] || sig1[u] != sig2[cand] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&w| {
            let mw = map[w];
            let pairs = if a.directed {
                vec![((u, w), (cand, mw)), ((w, u), (mw, cand))]
            } else {
                vec![((u, w), (cand, mw))]
            };
            pairs.into_iter().all(|((x, y), (p, q))| match (a.get(x, y), b.get(p, q)) {
                (None, None) => true,
                (Some(e1), Some(e2)) => g1.edge_attrs(e1) == g2.edge_attrs(e2),
                _ => false,
            })
        });
        if !consistent {
            continue;
        }
        map[u] = cand;
        used[cand] = true;
        if extend(depth + 1, order, map, used, sig1, sig2, a, b, g1, g2) {
            return true;
        }
        used[cand] = false;
        map[u] = usize::MAX;
    }
    false
}
