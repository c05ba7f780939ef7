//! Serializes an Euler path over an attributed multigraph into tokens.
//!
//! Per path position the emitted group is: node index token, node attribute
//! tokens (only at the one occurrence chosen for that node), then for the
//! edge leaving this position an optional edge-type token (`[EDGE_JUMP]`,
//! or `[→]`/`[←]` on directed graphs) and the edge's attribute tokens (only
//! at the one traversal chosen for that edge). Dimensions holding their
//! default value emit nothing.
//!
//! Layouts arrange those groups differently:
//!
//! * `prolonged`: one token per row (`l = 1`), in group order.
//! * `short`: one row per position, `[node, edge-type, edge-attr.., node-attr..]`
//!   with fixed-width attribute slots, `l = 2 + edge_attr + node_attr`.
//! * `long`: a node row `[node, edge-type, pad..]` followed by a node-attribute
//!   row and an edge-attribute row when those are non-empty; width `l` as for
//!   `short`.

use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::{EdgeRef, EulerPath, EulerizedMultigraph};
use crate::graph::{AttributedGraph, NodeId};
use crate::seed::{self, Rng};
use crate::vocab::{
    digit_tokens, semantic_token, AttrEncoding, AttrKind, AttrSchema, Special, TokenId, Vocabulary,
    DIGIT_HEADER_VALUE,
};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum TokenizeError {
    #[error("path visits {nodes} distinct nodes but the index modulus is {modulus}")]
    TooManyNodes { nodes: usize, modulus: u32 },
    #[error("token {0:?} is not in the vocabulary")]
    MissingToken(String),
    #[error("{kind} attributes need {needed} cells but the layout allows {width}")]
    WidthOverflow {
        kind: &'static str,
        needed: usize,
        width: usize,
    },
    #[error("attribute schema does not match the graph (directedness, widths or defaults)")]
    SchemaMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Short,
    Long,
    Prolonged,
}

impl Layout {
    pub const ALL: [Layout; 3] = [Layout::Short, Layout::Long, Layout::Prolonged];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Node,
    EdgeType,
    EdgeAttr,
    NodeAttr,
    Pad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReindexConfig {
    /// Number of structural index tokens, N.
    pub modulus: u32,
    /// Shift first-appearance indices by a random offset modulo N.
    pub cyclic: bool,
}

impl Default for ReindexConfig {
    fn default() -> Self {
        Self {
            modulus: 256,
            cyclic: true,
        }
    }
}

/// Attribute slot widths for the grid layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GridWidths {
    pub edge_attr: usize,
    pub node_attr: usize,
}

impl GridWidths {
    pub fn row_width(&self) -> usize {
        2 + self.edge_attr + self.node_attr
    }

    /// Smallest widths that fit every attribute block of `graphs`.
    pub fn fit<'a>(graphs: impl IntoIterator<Item = &'a AttributedGraph>, schema: &AttrSchema) -> Self {
        let mut w = GridWidths::default();
        for g in graphs {
            for v in 0..g.num_nodes() {
                w.node_attr = w.node_attr.max(attr_token_len(g.node_attrs(v as NodeId), schema, AttrKind::Node));
            }
            for e in 0..g.num_edges() {
                w.edge_attr = w.edge_attr.max(attr_token_len(g.edge_attrs(e), schema, AttrKind::Edge));
            }
        }
        w
    }
}

/// Number of tokens an attribute vector serializes to.
pub fn attr_token_len(row: &[i64], schema: &AttrSchema, kind: AttrKind) -> usize {
    row.iter()
        .zip(schema.dims(kind))
        .filter(|(v, d)| **v != d.default)
        .map(|(&v, d)| match d.encoding {
            AttrEncoding::Discrete => 1,
            AttrEncoding::Digits => 1 + digit_tokens(v).len(),
        })
        .sum()
}

/// A serialized graph: `rows × width` token ids with per-cell roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenGrid {
    pub layout: Layout,
    pub width: usize,
    pub tokens: Vec<Vec<TokenId>>,
    pub roles: Vec<Vec<Role>>,
    /// Structural token of each local node of the source graph.
    pub node_tokens: Vec<TokenId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenGridJson {
    pub layout: Layout,
    pub m: usize,
    pub l: usize,
    pub tokens: Vec<Vec<TokenId>>,
    pub roles: Vec<Vec<Role>>,
    /// Structural token per local node; recovered by first appearance if absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub node_tokens: Vec<TokenId>,
}

impl TokenGrid {
    pub fn rows(&self) -> usize {
        self.tokens.len()
    }

    /// Non-pad tokens in row-major order.
    pub fn flatten(&self) -> Vec<TokenId> {
        self.cells()
            .filter(|(_, _, role)| *role != Role::Pad)
            .map(|(_, tok, _)| tok)
            .collect()
    }

    /// `(flat cell index, token, role)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, TokenId, Role)> + '_ {
        self.tokens
            .iter()
            .zip(&self.roles)
            .enumerate()
            .flat_map(move |(r, (toks, roles))| {
                toks.iter()
                    .zip(roles)
                    .enumerate()
                    .map(move |(c, (&t, &role))| (r * self.width + c, t, role))
            })
    }

    pub fn to_json(&self) -> TokenGridJson {
        TokenGridJson {
            layout: self.layout,
            m: self.rows(),
            l: self.width,
            tokens: self.tokens.clone(),
            roles: self.roles.clone(),
            node_tokens: self.node_tokens.clone(),
        }
    }

    /// Rebuilds a grid from JSON. Without stored node tokens they are
    /// recovered from node cells in first-appearance order.
    pub fn from_json(json: TokenGridJson) -> Result<Self, String> {
        if json.tokens.len() != json.m || json.roles.len() != json.m {
            return Err(format!("expected {} rows", json.m));
        }
        if json.tokens.iter().any(|r| r.len() != json.l) || json.roles.iter().any(|r| r.len() != json.l) {
            return Err(format!("every row must have width {}", json.l));
        }
        let mut grid = Self {
            layout: json.layout,
            width: json.l,
            tokens: json.tokens,
            roles: json.roles,
            node_tokens: json.node_tokens,
        };
        if !grid.node_tokens.is_empty() {
            return Ok(grid);
        }
        let mut seen = std::collections::HashSet::new();
        let firsts: Vec<TokenId> = grid
            .cells()
            .filter(|(_, t, r)| *r == Role::Node && seen.insert(*t))
            .map(|(_, t, _)| t)
            .collect();
        grid.node_tokens = firsts;
        Ok(grid)
    }
}

/// First-appearance re-indexing with an optional cyclic shift.
///
/// Returns `(node, index)` pairs in first-appearance order.
pub fn reindex(
    path: &EulerPath,
    cfg: &ReindexConfig,
    rng: &mut Rng,
) -> Result<Vec<(NodeId, u32)>, TokenizeError> {
    let mut order: Vec<NodeId> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &v in &path.nodes {
        if seen.insert(v) {
            order.push(v);
        }
    }
    if order.len() > cfg.modulus as usize {
        return Err(TokenizeError::TooManyNodes {
            nodes: order.len(),
            modulus: cfg.modulus,
        });
    }
    let shift = if cfg.cyclic {
        rng.gen_range(0..cfg.modulus)
    } else {
        0
    };
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, shifted_index(i as u32, shift, cfg.modulus)))
        .collect())
}

pub fn shifted_index(i: u32, shift: u32, modulus: u32) -> u32 {
    ((i as u64 + shift as u64) % modulus as u64) as u32
}

/// Everything needed to serialize graphs of one dataset.
#[derive(Debug, Clone)]
pub struct Tokenizer<'v> {
    pub vocab: &'v Vocabulary,
    pub schema: &'v AttrSchema,
    pub tag: String,
    pub reindex: ReindexConfig,
    pub widths: GridWidths,
}

struct Group {
    node: TokenId,
    node_attrs: Vec<TokenId>,
    edge_type: Option<TokenId>,
    edge_attrs: Vec<TokenId>,
}

impl<'v> Tokenizer<'v> {
    pub fn new(vocab: &'v Vocabulary, schema: &'v AttrSchema, tag: impl Into<String>) -> Self {
        Self {
            vocab,
            schema,
            tag: tag.into(),
            reindex: ReindexConfig {
                modulus: vocab.modulus(),
                cyclic: true,
            },
            widths: GridWidths::default(),
        }
    }

    pub fn with_reindex(mut self, cfg: ReindexConfig) -> Self {
        self.reindex = cfg;
        self
    }

    pub fn with_widths(mut self, widths: GridWidths) -> Self {
        self.widths = widths;
        self
    }

    fn lookup(&self, token: &str) -> Result<TokenId, TokenizeError> {
        self.vocab
            .id(token)
            .ok_or_else(|| TokenizeError::MissingToken(token.to_string()))
    }

    fn attr_tokens(&self, kind: AttrKind, row: &[i64]) -> Result<Vec<TokenId>, TokenizeError> {
        let mut out = Vec::new();
        for (dim, (&value, spec)) in row.iter().zip(self.schema.dims(kind)).enumerate() {
            if value == spec.default {
                continue;
            }
            match spec.encoding {
                AttrEncoding::Discrete => {
                    out.push(self.lookup(&semantic_token(&self.tag, kind, dim, value))?);
                }
                AttrEncoding::Digits => {
                    out.push(self.lookup(&semantic_token(&self.tag, kind, dim, DIGIT_HEADER_VALUE))?);
                    out.extend(digit_tokens(value).into_iter().map(|d| self.vocab.digit(d)));
                }
            }
        }
        Ok(out)
    }

    /// Serializes `path` over `mg`. All random choices (cyclic shift, which
    /// occurrence carries each attribute block) come from `seed`.
    pub fn tokenize(
        &self,
        path: &EulerPath,
        mg: &EulerizedMultigraph<'_>,
        layout: Layout,
        seed: u64,
    ) -> Result<TokenGrid, TokenizeError> {
        let g = mg.base();
        if !self.schema.matches(g) {
            return Err(TokenizeError::SchemaMismatch);
        }
        let mut rng = seed::rng(seed);
        let index = reindex(path, &self.reindex, &mut rng)?;
        let mut node_tokens = vec![0; g.num_nodes()];
        for &(v, i) in &index {
            node_tokens[v as usize] = self.vocab.structural(i).ok_or(TokenizeError::TooManyNodes {
                nodes: index.len(),
                modulus: self.vocab.modulus(),
            })?;
        }

        // Which occurrence carries each node's / base edge's attributes.
        let mut node_positions: Vec<Vec<usize>> = vec![Vec::new(); g.num_nodes()];
        for (t, &v) in path.nodes.iter().enumerate() {
            node_positions[v as usize].push(t);
        }
        let instances = mg.edge_instances();
        let mut edge_positions: Vec<Vec<usize>> = vec![Vec::new(); g.num_edges()];
        for (t, &inst) in path.edge_instances.iter().enumerate() {
            if let EdgeRef::Base(b) = instances[inst].edge {
                edge_positions[b].push(t);
            }
        }
        let mut node_at: HashMap<usize, NodeId> = HashMap::new();
        for (v, pos) in node_positions.iter().enumerate() {
            if !pos.is_empty() {
                node_at.insert(pos[rng.gen_range(0..pos.len())], v as NodeId);
            }
        }
        let mut edge_at: HashMap<usize, usize> = HashMap::new();
        for (b, pos) in edge_positions.iter().enumerate() {
            if !pos.is_empty() {
                edge_at.insert(pos[rng.gen_range(0..pos.len())], b);
            }
        }

        let mut groups = Vec::with_capacity(path.nodes.len());
        for (t, &v) in path.nodes.iter().enumerate() {
            let node_attrs = match node_at.get(&t) {
                Some(&n) => self.attr_tokens(AttrKind::Node, g.node_attrs(n))?,
                None => Vec::new(),
            };
            let (mut edge_type, mut edge_attrs) = (None, Vec::new());
            if let Some(&inst) = path.edge_instances.get(t) {
                match instances[inst].edge {
                    EdgeRef::Jump(_) => edge_type = Some(self.vocab.special(Special::EdgeJump)),
                    EdgeRef::Base(b) => {
                        if g.is_directed() {
                            let forward = g.edge(b).0 == v;
                            edge_type = Some(self.vocab.special(if forward {
                                Special::Forward
                            } else {
                                Special::Backward
                            }));
                        }
                        if edge_at.get(&t) == Some(&b) {
                            edge_attrs = self.attr_tokens(AttrKind::Edge, g.edge_attrs(b))?;
                        }
                    }
                }
            }
            groups.push(Group {
                node: node_tokens[v as usize],
                node_attrs,
                edge_type,
                edge_attrs,
            });
        }

        let pad = self.vocab.special(Special::Pad);
        let (width, tokens, roles) = match layout {
            Layout::Prolonged => prolonged(&groups),
            Layout::Short => short(&groups, self.widths, pad)?,
            Layout::Long => long(&groups, self.widths, pad)?,
        };
        Ok(TokenGrid {
            layout,
            width,
            tokens,
            roles,
            node_tokens,
        })
    }
}

type Cells = (usize, Vec<Vec<TokenId>>, Vec<Vec<Role>>);

fn prolonged(groups: &[Group]) -> Cells {
    let mut tokens = Vec::new();
    let mut roles = Vec::new();
    let mut push = |t: TokenId, r: Role| {
        tokens.push(vec![t]);
        roles.push(vec![r]);
    };
    for grp in groups {
        push(grp.node, Role::Node);
        grp.node_attrs.iter().for_each(|&t| push(t, Role::NodeAttr));
        if let Some(t) = grp.edge_type {
            push(t, Role::EdgeType);
        }
        grp.edge_attrs.iter().for_each(|&t| push(t, Role::EdgeAttr));
    }
    (1, tokens, roles)
}

fn fill(
    toks: &mut Vec<TokenId>,
    roles: &mut Vec<Role>,
    src: &[TokenId],
    role: Role,
    slots: usize,
    pad: TokenId,
    kind: &'static str,
) -> Result<(), TokenizeError> {
    if src.len() > slots {
        return Err(TokenizeError::WidthOverflow {
            kind,
            needed: src.len(),
            width: slots,
        });
    }
    toks.extend_from_slice(src);
    roles.extend(std::iter::repeat_n(role, src.len()));
    toks.extend(std::iter::repeat_n(pad, slots - src.len()));
    roles.extend(std::iter::repeat_n(Role::Pad, slots - src.len()));
    Ok(())
}

fn head(grp: &Group, pad: TokenId) -> (Vec<TokenId>, Vec<Role>) {
    match grp.edge_type {
        Some(t) => (vec![grp.node, t], vec![Role::Node, Role::EdgeType]),
        None => (vec![grp.node, pad], vec![Role::Node, Role::Pad]),
    }
}

fn short(groups: &[Group], w: GridWidths, pad: TokenId) -> Result<Cells, TokenizeError> {
    let mut tokens = Vec::with_capacity(groups.len());
    let mut roles = Vec::with_capacity(groups.len());
    for grp in groups {
        let (mut t, mut r) = head(grp, pad);
        fill(&mut t, &mut r, &grp.edge_attrs, Role::EdgeAttr, w.edge_attr, pad, "edge")?;
        fill(&mut t, &mut r, &grp.node_attrs, Role::NodeAttr, w.node_attr, pad, "node")?;
        tokens.push(t);
        roles.push(r);
    }
    Ok((w.row_width(), tokens, roles))
}

fn long(groups: &[Group], w: GridWidths, pad: TokenId) -> Result<Cells, TokenizeError> {
    let l = w.row_width();
    let mut tokens = Vec::new();
    let mut roles = Vec::new();
    for grp in groups {
        let (mut t, mut r) = head(grp, pad);
        fill(&mut t, &mut r, &[], Role::Pad, l - 2, pad, "node")?;
        tokens.push(t);
        roles.push(r);
        for (src, role, kind) in [
            (&grp.node_attrs, Role::NodeAttr, "node"),
            (&grp.edge_attrs, Role::EdgeAttr, "edge"),
        ] {
            if src.is_empty() {
                continue;
            }
            let (mut t, mut r) = (Vec::with_capacity(l), Vec::with_capacity(l));
            fill(&mut t, &mut r, src, role, l, pad, kind)?;
            tokens.push(t);
            roles.push(r);
        }
    }
    Ok((l, tokens, roles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{add_jump_edges, eulerize, extract_path};
    use crate::vocab::{build_vocab, AttrEncoding};

    fn names(v: &Vocabulary, grid: &TokenGrid) -> Vec<String> {
        grid.flatten().iter().map(|&t| v.token(t).unwrap().to_string()).collect()
    }

    #[test]
    fn reindex_first_appearance_without_shift() {
        let path = EulerPath {
            nodes: vec![5, 0, 3, 5],
            edge_instances: vec![0, 1, 2],
            rng_seed: 0,
        };
        let cfg = ReindexConfig {
            modulus: 256,
            cyclic: false,
        };
        let idx = reindex(&path, &cfg, &mut seed::rng(1)).unwrap();
        assert_eq!(idx, vec![(5, 0), (0, 1), (3, 2)]);

        let tiny = ReindexConfig {
            modulus: 2,
            cyclic: false,
        };
        assert_eq!(
            reindex(&path, &tiny, &mut seed::rng(1)),
            Err(TokenizeError::TooManyNodes { nodes: 3, modulus: 2 })
        );
    }

    #[test]
    fn shift_formula() {
        assert_eq!(shifted_index(3, 5, 256), 8);
        assert_eq!(shifted_index(250, 10, 256), 4);
    }

    #[test]
    fn c3_short_layout_all_pad_attributes() {
        let g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Digits);
        let vocab = Vocabulary::base(256);
        let tk = Tokenizer::new(&vocab, &schema, "t").with_widths(GridWidths {
            edge_attr: 1,
            node_attr: 1,
        });
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        let path = extract_path(&mg, 0).unwrap();
        let grid = tk.tokenize(&path, &mg, Layout::Short, 0).unwrap();
        assert_eq!(grid.rows(), 4);
        assert_eq!(grid.width, 4);
        let pad = vocab.special(Special::Pad);
        for row in &grid.tokens {
            assert_eq!(&row[1..], &[pad, pad, pad]);
        }
    }

    #[test]
    fn one_attr_each_short_width_is_four() {
        let g = AttributedGraph::new(
            3,
            false,
            vec![(0, 1), (1, 2)],
            vec![vec![1], vec![2], vec![3]],
            vec![vec![4], vec![5]],
        )
        .unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Discrete);
        let widths = GridWidths::fit([&g], &schema);
        assert_eq!(widths.row_width(), 4);
        let vocab = build_vocab([&g], "t", 16, &schema);
        let tk = Tokenizer::new(&vocab, &schema, "t").with_widths(widths);
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        let path = extract_path(&mg, 3).unwrap();
        let grid = tk.tokenize(&path, &mg, Layout::Short, 3).unwrap();
        assert_eq!(grid.width, 4);
        assert_eq!(grid.rows(), 3);
    }

    #[test]
    fn width_overflow_is_an_error() {
        let g = AttributedGraph::new(2, false, vec![(0, 1)], vec![vec![1, 2], vec![3, 4]], Vec::new()).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Discrete);
        let vocab = build_vocab([&g], "t", 16, &schema);
        let tk = Tokenizer::new(&vocab, &schema, "t").with_widths(GridWidths {
            edge_attr: 0,
            node_attr: 1,
        });
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        let path = extract_path(&mg, 0).unwrap();
        {
            let layout = Layout::Short;
            assert!(matches!(
                tk.tokenize(&path, &mg, layout, 0),
                Err(TokenizeError::WidthOverflow { kind: "node", needed: 2, width: 1 })
            ));
        }
        assert!(tk.tokenize(&path, &mg, Layout::Prolonged, 0).is_ok());
        assert!(tk.tokenize(&path, &mg, Layout::Long, 0).is_ok());
    }

    #[test]
    fn missing_value_in_vocab() {
        let g = AttributedGraph::new(2, false, vec![(0, 1)], vec![vec![1], vec![3]], Vec::new()).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Discrete);
        let vocab = Vocabulary::base(16);
        let tk = Tokenizer::new(&vocab, &schema, "t");
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        let path = extract_path(&mg, 0).unwrap();
        assert!(matches!(
            tk.tokenize(&path, &mg, Layout::Prolonged, 0),
            Err(TokenizeError::MissingToken(_))
        ));
    }

    #[test]
    fn jump_and_direction_tokens() {
        let g = AttributedGraph::new(4, true, vec![(0, 1), (3, 2)], Vec::new(), Vec::new()).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Digits);
        let vocab = Vocabulary::base(8);
        let tk = Tokenizer::new(&vocab, &schema, "t");
        let mg = eulerize(add_jump_edges(&g, 2)).unwrap();
        let path = extract_path(&mg, 2).unwrap();
        let grid = tk.tokenize(&path, &mg, Layout::Prolonged, 2).unwrap();
        let seq = names(&vocab, &grid);
        assert_eq!(seq.iter().filter(|t| *t == "[EDGE_JUMP]").count(), 1);
        assert_eq!(seq.iter().filter(|t| *t == "[→]" || *t == "[←]").count(), 2);
        // prolonged count: nodes + type tokens (no attributes here)
        assert_eq!(seq.len(), path.nodes.len() + 3);
    }

    #[test]
    fn cyclic_disabled_starts_at_zero() {
        let g = AttributedGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Digits);
        let vocab = Vocabulary::base(256);
        let tk = Tokenizer::new(&vocab, &schema, "t").with_reindex(ReindexConfig {
            modulus: 256,
            cyclic: false,
        });
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        for s in 0..50 {
            let path = extract_path(&mg, s).unwrap();
            let grid = tk.tokenize(&path, &mg, Layout::Prolonged, s).unwrap();
            assert_eq!(grid.tokens[0][0], 0);
        }
    }

    #[test]
    fn grid_json_round_trip() {
        let g = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let schema = AttrSchema::for_graph(&g, AttrEncoding::Digits);
        let vocab = Vocabulary::base(16);
        let tk = Tokenizer::new(&vocab, &schema, "t").with_widths(GridWidths { edge_attr: 1, node_attr: 0 });
        let mg = eulerize(add_jump_edges(&g, 0)).unwrap();
        let path = extract_path(&mg, 0).unwrap();
        let grid = tk.tokenize(&path, &mg, Layout::Long, 0).unwrap();
        let text = serde_json::to_string(&grid.to_json()).unwrap();
        assert!(text.contains("\"roles\":[[\"node\",\"pad\",\"pad\"]"));
        let back = TokenGrid::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.tokens, grid.tokens);
        let mut first = grid.node_tokens.clone();
        first.sort_unstable();
        let mut got = back.node_tokens.clone();
        got.sort_unstable();
        assert_eq!(first, got);
    }
}
