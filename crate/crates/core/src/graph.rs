//! Attributed graph model, ingest from JSON / edge-TSV, and component search.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = u32;

#[derive(Error, Debug)]
pub enum GraphError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("inconsistent {kind} attribute width at row {row}: expected {expected}, got {actual}")]
    AttrWidth {
        kind: &'static str,
        row: usize,
        expected: usize,
        actual: usize,
    },
    #[error("node id {id} out of range (num_nodes = {num_nodes})")]
    NodeOutOfRange { id: u64, num_nodes: usize },
    #[error("duplicate edge ({src}, {dst}){}", line_suffix(*.line))]
    DuplicateEdge {
        src: NodeId,
        dst: NodeId,
        line: Option<usize>,
    },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("expected {expected} {kind} attribute rows, got {actual}")]
    AttrRowCount {
        kind: &'static str,
        expected: usize,
        actual: usize,
    },
}

fn line_suffix(line: Option<usize>) -> String {
    match line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    }
}

/// Input file formats understood by [`load_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    Json,
    EdgeTsv,
}

/// A simple graph with fixed-width integer attributes on nodes and edges.
///
/// Undirected graphs store every edge once, in the orientation it was given.
/// Instances are only built through [`AttributedGraph::new`], which enforces
/// the invariants (dense ids, no self-loops, no duplicate edges, uniform
/// attribute widths).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributedGraph {
    num_nodes: usize,
    directed: bool,
    edges: Vec<(NodeId, NodeId)>,
    node_attrs: Vec<Vec<i64>>,
    edge_attrs: Vec<Vec<i64>>,
    node_defaults: Vec<i64>,
    edge_defaults: Vec<i64>,
}

impl AttributedGraph {
    /// Validates and builds a graph. Empty attribute lists mean width zero.
    pub fn new(
        num_nodes: usize,
        directed: bool,
        edges: Vec<(NodeId, NodeId)>,
        node_attrs: Vec<Vec<i64>>,
        edge_attrs: Vec<Vec<i64>>,
    ) -> Result<Self, GraphError> {
        let node_width = node_attrs.first().map_or(0, Vec::len);
        let edge_width = edge_attrs.first().map_or(0, Vec::len);
        Self::with_defaults(
            num_nodes,
            directed,
            edges,
            node_attrs,
            edge_attrs,
            vec![0; node_width],
            vec![0; edge_width],
        )
    }

    pub fn with_defaults(
        num_nodes: usize,
        directed: bool,
        edges: Vec<(NodeId, NodeId)>,
        node_attrs: Vec<Vec<i64>>,
        edge_attrs: Vec<Vec<i64>>,
        node_defaults: Vec<i64>,
        edge_defaults: Vec<i64>,
    ) -> Result<Self, GraphError> {
        let node_attrs = fill_rows("node", node_attrs, num_nodes, node_defaults.len())?;
        let edge_attrs = fill_rows("edge", edge_attrs, edges.len(), edge_defaults.len())?;

        let mut seen = HashSet::with_capacity(edges.len());
        for &(s, d) in &edges {
            for id in [s, d] {
                if id as usize >= num_nodes {
                    return Err(GraphError::NodeOutOfRange {
                        id: id as u64,
                        num_nodes,
                    });
                }
            }
            if s == d {
                return Err(GraphError::SelfLoop(s));
            }
            let key = if directed { (s, d) } else { (s.min(d), s.max(d)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge {
                    src: s,
                    dst: d,
                    line: None,
                });
            }
        }

        Ok(Self {
            num_nodes,
            directed,
            edges,
            node_attrs,
            edge_attrs,
            node_defaults,
            edge_defaults,
        })
    }

    /// Attribute-free undirected graph.
    pub fn from_edges(num_nodes: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        Self::new(num_nodes, false, edges.to_vec(), Vec::new(), Vec::new())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (NodeId, NodeId) {
        self.edges[idx]
    }

    pub fn node_attrs(&self, node: NodeId) -> &[i64] {
        &self.node_attrs[node as usize]
    }

    pub fn edge_attrs(&self, idx: usize) -> &[i64] {
        &self.edge_attrs[idx]
    }

    pub fn node_width(&self) -> usize {
        self.node_defaults.len()
    }

    pub fn edge_width(&self) -> usize {
        self.edge_defaults.len()
    }

    pub fn node_defaults(&self) -> &[i64] {
        &self.node_defaults
    }

    pub fn edge_defaults(&self) -> &[i64] {
        &self.edge_defaults
    }

    /// Replaces node attributes (and their defaults) keeping structure intact.
    pub fn with_node_attrs(
        &self,
        node_attrs: Vec<Vec<i64>>,
        node_defaults: Vec<i64>,
    ) -> Result<Self, GraphError> {
        Self::with_defaults(
            self.num_nodes,
            self.directed,
            self.edges.clone(),
            node_attrs,
            self.edge_attrs.clone(),
            node_defaults,
            self.edge_defaults.clone(),
        )
    }

    /// Undirected adjacency lists of `(neighbor, edge index)`, sorted by neighbor.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, usize)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for (i, &(s, d)) in self.edges.iter().enumerate() {
            adj[s as usize].push((d, i));
            adj[d as usize].push((s, i));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            directed: self.directed,
            num_nodes: self.num_nodes,
            edges: self.edges.iter().map(|&(s, d)| [s as u64, d as u64]).collect(),
            node_attrs: self.node_attrs.clone(),
            edge_attrs: self.edge_attrs.clone(),
            attr_defaults: Some(AttrDefaults {
                node: self.node_defaults.clone(),
                edge: self.edge_defaults.clone(),
            }),
        }
    }

    pub fn from_json(json: GraphJson) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(json.edges.len());
        for [s, d] in json.edges {
            for id in [s, d] {
                if id >= json.num_nodes as u64 {
                    return Err(GraphError::NodeOutOfRange {
                        id,
                        num_nodes: json.num_nodes,
                    });
                }
            }
            edges.push((s as NodeId, d as NodeId));
        }
        let (node_defaults, edge_defaults) = match json.attr_defaults {
            Some(d) => (d.node, d.edge),
            None => (
                vec![0; json.node_attrs.first().map_or(0, Vec::len)],
                vec![0; json.edge_attrs.first().map_or(0, Vec::len)],
            ),
        };
        Self::with_defaults(
            json.num_nodes,
            json.directed,
            edges,
            json.node_attrs,
            json.edge_attrs,
            node_defaults,
            edge_defaults,
        )
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let json: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        Self::from_json(json)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("graph json is always serializable")
    }

    /// Parses "src<TAB>dst" lines (any whitespace accepted). Blank lines and
    /// `#` comments are skipped; `num_nodes` is one past the largest id.
    pub fn from_edge_tsv(text: &str, directed: bool) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        let mut max_id: Option<NodeId> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(GraphError::Parse {
                    line,
                    msg: format!("expected 2 fields, got {}", fields.len()),
                });
            }
            let parse = |f: &str| {
                f.parse::<NodeId>().map_err(|e| GraphError::Parse {
                    line,
                    msg: format!("bad node id {f:?}: {e}"),
                })
            };
            let (s, d) = (parse(fields[0])?, parse(fields[1])?);
            if s == d {
                return Err(GraphError::SelfLoop(s));
            }
            let key = if directed { (s, d) } else { (s.min(d), s.max(d)) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge {
                    src: s,
                    dst: d,
                    line: Some(line),
                });
            }
            max_id = Some(max_id.map_or(s.max(d), |m| m.max(s).max(d)));
            edges.push((s, d));
        }
        let num_nodes = max_id.map_or(0, |m| m as usize + 1);
        Self::new(num_nodes, directed, edges, Vec::new(), Vec::new())
    }

    /// Subgraph induced by `nodes` (in the given order, which becomes the
    /// local numbering). Edge order follows the parent's edge order.
    pub fn induced(&self, nodes: &[NodeId]) -> Self {
        let mut local = vec![u32::MAX; self.num_nodes];
        for (i, &n) in nodes.iter().enumerate() {
            local[n as usize] = i as u32;
        }
        let mut edges = Vec::new();
        let mut edge_attrs = Vec::new();
        for (i, &(s, d)) in self.edges.iter().enumerate() {
            let (ls, ld) = (local[s as usize], local[d as usize]);
            if ls != u32::MAX && ld != u32::MAX {
                edges.push((ls, ld));
                edge_attrs.push(self.edge_attrs[i].clone());
            }
        }
        let node_attrs = nodes
            .iter()
            .map(|&n| self.node_attrs[n as usize].clone())
            .collect();
        Self {
            num_nodes: nodes.len(),
            directed: self.directed,
            edges,
            node_attrs,
            edge_attrs,
            node_defaults: self.node_defaults.clone(),
            edge_defaults: self.edge_defaults.clone(),
        }
    }
}

fn fill_rows(
    kind: &'static str,
    rows: Vec<Vec<i64>>,
    count: usize,
    width: usize,
) -> Result<Vec<Vec<i64>>, GraphError> {
    if rows.is_empty() && width == 0 {
        return Ok(vec![Vec::new(); count]);
    }
    if rows.len() != count {
        return Err(GraphError::AttrRowCount {
            kind,
            expected: count,
            actual: rows.len(),
        });
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(GraphError::AttrWidth {
                kind,
                row,
                expected: width,
                actual: r.len(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrDefaults {
    #[serde(default)]
    pub node: Vec<i64>,
    #[serde(default)]
    pub edge: Vec<i64>,
}

/// On-disk JSON form of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default)]
    pub directed: bool,
    pub num_nodes: usize,
    #[serde(default)]
    pub edges: Vec<[u64; 2]>,
    #[serde(default)]
    pub node_attrs: Vec<Vec<i64>>,
    #[serde(default)]
    pub edge_attrs: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attr_defaults: Option<AttrDefaults>,
}

pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<AttributedGraph, GraphError> {
    let text = fs::read_to_string(path)?;
    match format {
        GraphFormat::Json => AttributedGraph::from_json_str(&text),
        GraphFormat::EdgeTsv => AttributedGraph::from_edge_tsv(&text, false),
    }
}

/// Integer code for a continuous attribute: `round(x * scale) - offset`.
/// With `scale = 1000, offset = 1` a three-decimal value in `[0.001, 1]`
/// maps to `0..=999`.
pub fn quantize(x: f64, scale: f64, offset: i64) -> i64 {
    (x * scale).round() as i64 - offset
}

/// Maximal connected node sets, ignoring edge direction. Components are
/// ordered by their smallest node id and each set is sorted.
pub fn connected_components(g: &AttributedGraph) -> Vec<Vec<NodeId>> {
    components_of(g.num_nodes(), g.edges().iter().copied())
}

pub(crate) fn components_of(
    num_nodes: usize,
    edges: impl Iterator<Item = (NodeId, NodeId)>,
) -> Vec<Vec<NodeId>> {
    let mut parent: Vec<usize> = (0..num_nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (s, d) in edges {
        let (a, b) = (find(&mut parent, s as usize), find(&mut parent, d as usize));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for v in 0..num_nodes {
        let root = find(&mut parent, v);
        groups.entry(root).or_default().push(v as NodeId);
    }
    let mut comps: Vec<Vec<NodeId>> = groups.into_values().collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// A subgraph cut out of a larger graph around one node or one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphSample {
    pub graph: AttributedGraph,
    /// Local ids of the seed node(s); one for node-ego, two for edge-ego.
    pub root_nodes: Vec<NodeId>,
    /// `origin_ids[local] = global`.
    pub origin_ids: Vec<NodeId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubgraphSampleJson {
    pub graph: GraphJson,
    pub root_n_id: Vec<NodeId>,
    pub origin_ids: Vec<NodeId>,
}

impl SubgraphSample {
    pub fn to_json(&self) -> SubgraphSampleJson {
        SubgraphSampleJson {
            graph: self.graph.to_json(),
            root_n_id: self.root_nodes.clone(),
            origin_ids: self.origin_ids.clone(),
        }
    }

    pub fn from_json(json: SubgraphSampleJson) -> Result<Self, GraphError> {
        let graph = AttributedGraph::from_json(json.graph)?;
        for &r in &json.root_n_id {
            if r as usize >= graph.num_nodes() {
                return Err(GraphError::NodeOutOfRange {
                    id: r as u64,
                    num_nodes: graph.num_nodes(),
                });
            }
        }
        if json.origin_ids.len() != graph.num_nodes() {
            return Err(GraphError::AttrRowCount {
                kind: "origin id",
                expected: graph.num_nodes(),
                actual: json.origin_ids.len(),
            });
        }
        Ok(Self {
            graph,
            root_nodes: json.root_n_id,
            origin_ids: json.origin_ids,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantize_scaled_decimals() {
        assert_eq!(quantize(0.165, 1000.0, 1), 164);
        assert_eq!(quantize(0.001, 1000.0, 1), 0);
        assert_eq!(quantize(1.0, 1000.0, 1), 999);
    }

    #[test]
    fn json_path_graph() {
        let g = AttributedGraph::from_json_str(r#"{"num_nodes":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.node_width(), 0);
        assert_eq!(g.edge_width(), 0);
        assert!(!g.is_directed());
    }

    #[test]
    fn tsv_duplicate_edge_is_rejected() {
        let err = AttributedGraph::from_edge_tsv("0\t1\n1\t2\n0 1\n", false).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { line: Some(3), .. }), "{err}");
        let err = AttributedGraph::from_edge_tsv("0\t1\n1\t0\n", false).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { .. }));
        // reversed pair is a distinct arc when directed
        assert!(AttributedGraph::from_edge_tsv("0\t1\n1\t0\n", true).is_ok());
    }

    #[test]
    fn tsv_parse_error_has_line() {
        let err = AttributedGraph::from_edge_tsv("0 1\n\n1 x\n", false).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }));
    }

    #[test]
    fn molecule_fixture_loads() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/molpcba_sample.json");
        let g = load_graph(path, GraphFormat::Json).unwrap();
        assert_eq!(g.num_nodes(), 4);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.node_width(), 9);
        assert_eq!(g.edge_width(), 3);
    }

    #[test]
    fn width_and_range_errors() {
        let err = AttributedGraph::from_json_str(
            r#"{"num_nodes":2,"edges":[[0,1]],"node_attrs":[[1,2],[3]]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::AttrWidth { row: 1, .. }));
        let err = AttributedGraph::from_json_str(r#"{"num_nodes":2,"edges":[[0,5]]}"#).unwrap_err();
        assert!(matches!(err, GraphError::NodeOutOfRange { id: 5, .. }));
        let err = AttributedGraph::from_json_str("{\"num_nodes\":2,\n\"edges\":[[0,1]\n").unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
        assert!(matches!(
            AttributedGraph::from_edges(2, &[(1, 1)]),
            Err(GraphError::SelfLoop(1))
        ));
    }

    #[test]
    fn components_examples() {
        let p3 = AttributedGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(connected_components(&p3), vec![vec![0, 1, 2]]);

        let two_tri =
            AttributedGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let comps = connected_components(&two_tri);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.len() == 3));

        let empty = AttributedGraph::from_edges(4, &[]).unwrap();
        assert_eq!(connected_components(&empty), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    fn arb_graph() -> impl Strategy<Value = AttributedGraph> {
        (1usize..9, 0usize..3, 0usize..3, any::<bool>()).prop_flat_map(|(n, an, ae, directed)| {
            let pairs: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|a| (0..n as u32).filter(move |&b| b != a).map(move |b| (a, b)))
                .filter(|&(a, b)| directed || a < b)
                .collect();
            let np = pairs.len();
            (
                proptest::collection::vec(any::<bool>(), np),
                proptest::collection::vec(proptest::collection::vec(-50i64..50, an), n),
                proptest::collection::vec(proptest::collection::vec(-50i64..50, ae), np),
                proptest::collection::vec(-2i64..2, an),
                proptest::collection::vec(-2i64..2, ae),
            )
                .prop_map(move |(keep, na, ea, nd, ed)| {
                    let mut edges = Vec::new();
                    let mut eattrs = Vec::new();
                    for (i, &p) in pairs.iter().enumerate() {
                        if keep[i] {
                            edges.push(p);
                            eattrs.push(ea[i].clone());
                        }
                    }
                    AttributedGraph::with_defaults(n, directed, edges, na, eattrs, nd, ed).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(g in arb_graph()) {
            let back = AttributedGraph::from_json_str(&g.to_json_string()).unwrap();
            prop_assert_eq!(back, g);
        }

        #[test]
        fn components_partition_nodes(g in arb_graph()) {
            let comps = connected_components(&g);
            let mut all: Vec<u32> = comps.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..g.num_nodes() as u32).collect::<Vec<_>>());
            // no edge crosses components
            let mut comp_of = vec![0; g.num_nodes()];
            for (ci, c) in comps.iter().enumerate() {
                for &v in c { comp_of[v as usize] = ci; }
            }
            for &(s, d) in g.edges() {
                prop_assert_eq!(comp_of[s as usize], comp_of[d as usize]);
            }
        }
    }
}
