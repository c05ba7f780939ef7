//! JSONL record types and line-oriented IO.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use eulerseq::graph::{AttributedGraph, GraphJson, NodeId, SubgraphSample, SubgraphSampleJson};
use eulerseq::tokenizer::TokenGridJson;
use eulerseq::vocab::TokenId;

/// A corpus line: a whole graph, or a sampled subgraph with roots.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorpusRecord {
    Sample {
        #[serde(flatten)]
        sample: SubgraphSampleJson,
        #[serde(default, skip_serializing_if = "Value::is_null")]
        label: Value,
    },
    Graph {
        #[serde(flatten)]
        graph: GraphJson,
        #[serde(default, skip_serializing_if = "Value::is_null")]
        label: Value,
    },
}

/// A parsed corpus item.
pub struct CorpusItem {
    pub graph: AttributedGraph,
    pub roots: Vec<NodeId>,
    pub label: Value,
}

impl CorpusRecord {
    pub fn into_item(self) -> anyhow::Result<CorpusItem> {
        Ok(match self {
            CorpusRecord::Sample { sample, label } => {
                let s = SubgraphSample::from_json(sample)?;
                CorpusItem {
                    graph: s.graph,
                    roots: s.root_nodes,
                    label,
                }
            }
            CorpusRecord::Graph { graph, label } => CorpusItem {
                graph: AttributedGraph::from_json(graph)?,
                roots: Vec::new(),
                label,
            },
        })
    }
}

/// A serialized grid plus the tokens of its root nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRecord {
    #[serde(flatten)]
    pub grid: TokenGridJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<Vec<TokenId>>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub label: Value,
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Converts a raw attribute matrix to integers, quantizing with
/// `(scale, offset)` when given and otherwise requiring integral values.
pub fn integer_rows(rows: &Value, quantize: Option<(f64, i64)>, what: &str) -> anyhow::Result<Value> {
    let Some(rows) = rows.as_array() else {
        return Ok(rows.clone());
    };
    let mut out = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let Some(cells) = row.as_array() else {
            bail!("{what} row {r} is not an array");
        };
        let mut ints = Vec::with_capacity(cells.len());
        for cell in cells {
            let x = cell.as_f64().with_context(|| format!("{what} row {r}: {cell} is not a number"))?;
            let v = match quantize {
                Some((scale, offset)) => eulerseq::graph::quantize(x, scale, offset),
                None if x.fract() == 0.0 => x as i64,
                None => bail!("{what} row {r}: {x} is not an integer; set a quantization"),
            };
            ints.push(Value::from(v));
        }
        out.push(Value::Array(ints));
    }
    Ok(Value::Array(out))
}
