//! Fine-tuning sequences for graph, edge and node tasks.
//!
//! The serialized sequence is the grid flattened without pads. A task suffix
//! is appended and the readout is the last position.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenizer::{Role, TokenGrid};
use crate::vocab::TokenId;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum TaskError {
    #[error("node tokens {0:?} do not occur in the sequence")]
    Unresolvable(Vec<TokenId>),
    #[error("source and destination are the same node")]
    SelfLink,
    #[error("empty node token list")]
    EmptyNode,
    #[error("sequence is shorter than its suffix")]
    BadSuffix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Graph,
    Edge,
    Node,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSequence {
    pub task: TaskKind,
    pub tokens: Vec<TokenId>,
    pub readout: usize,
    pub label: serde_json::Value,
    /// Number of appended task tokens.
    pub suffix_len: usize,
}

impl TaskSequence {
    fn new(task: TaskKind, mut tokens: Vec<TokenId>, suffix: &[TokenId], label: serde_json::Value) -> Self {
        tokens.extend_from_slice(suffix);
        Self {
            task,
            readout: tokens.len() - 1,
            tokens,
            label,
            suffix_len: suffix.len(),
        }
    }

    /// The serialized sequence without the task suffix.
    pub fn strip_suffix(&self) -> Result<&[TokenId], TaskError> {
        let n = self
            .tokens
            .len()
            .checked_sub(self.suffix_len)
            .ok_or(TaskError::BadSuffix)?;
        Ok(&self.tokens[..n])
    }

    pub fn suffix(&self) -> &[TokenId] {
        &self.tokens[self.tokens.len() - self.suffix_len..]
    }
}

pub fn format_graph_task(grid: &TokenGrid, gsum: TokenId, label: serde_json::Value) -> TaskSequence {
    TaskSequence::new(TaskKind::Graph, grid.flatten(), &[gsum], label)
}

pub fn format_edge_task(
    grid: &TokenGrid,
    src: &[TokenId],
    dst: &[TokenId],
    label: serde_json::Value,
) -> Result<TaskSequence, TaskError> {
    resolve(grid, src)?;
    resolve(grid, dst)?;
    if src == dst {
        return Err(TaskError::SelfLink);
    }
    let suffix: Vec<TokenId> = src.iter().chain(dst).copied().collect();
    Ok(TaskSequence::new(TaskKind::Edge, grid.flatten(), &suffix, label))
}

pub fn format_node_task(
    grid: &TokenGrid,
    target: &[TokenId],
    label: serde_json::Value,
) -> Result<TaskSequence, TaskError> {
    resolve(grid, target)?;
    Ok(TaskSequence::new(TaskKind::Node, grid.flatten(), target, label))
}

/// A single token must be a node index token of the grid; a longer block
/// must appear contiguously among one node's attribute tokens.
pub fn resolve(grid: &TokenGrid, node: &[TokenId]) -> Result<(), TaskError> {
    match node {
        [] => Err(TaskError::EmptyNode),
        [t] if grid.cells().any(|(_, tok, role)| role == Role::Node && tok == *t) => Ok(()),
        _ if node.len() > 1 && node_attr_blocks(grid).iter().any(|b| b.windows(node.len()).any(|w| w == node)) => {
            Ok(())
        }
        _ => Err(TaskError::Unresolvable(node.to_vec())),
    }
}

/// Node-attribute tokens grouped by owning occurrence, in sequence order.
fn node_attr_blocks(grid: &TokenGrid) -> Vec<Vec<TokenId>> {
    let mut blocks: Vec<Vec<TokenId>> = Vec::new();
    let mut open = false;
    for (_, tok, role) in grid.cells() {
        match role {
            Role::Node => open = false,
            Role::NodeAttr => {
                if !open {
                    blocks.push(Vec::new());
                    open = true;
                }
                blocks.last_mut().expect("opened").push(tok);
            }
            _ => {}
        }
    }
    blocks
}
