//! End-to-end serialization of one graph with per-step derived seeds.

use thiserror::Error;

use crate::euler::{add_jump_edges, eulerize, extract_path, EulerError, EulerPath};
use crate::graph::AttributedGraph;
use crate::seed;
use crate::tokenizer::{Layout, TokenGrid, TokenizeError, Tokenizer};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
}

#[derive(Debug, Clone)]
pub struct Serialized {
    pub grid: TokenGrid,
    pub path: EulerPath,
    pub jump_edges: usize,
    pub duplications: usize,
    pub minimality_guaranteed: bool,
}

/// Jump edges, Eulerization, path extraction and tokenization. `seed` is
/// split into one sub-seed per random step.
pub fn serialize(
    g: &AttributedGraph,
    tokenizer: &Tokenizer<'_>,
    layout: Layout,
    seed: u64,
) -> Result<Serialized, PipelineError> {
    let mg = eulerize(add_jump_edges(g, seed::derive(seed, 0)))?;
    let path = extract_path(&mg, seed::derive(seed, 1))?;
    let grid = tokenizer.tokenize(&path, &mg, layout, seed::derive(seed, 2))?;
    Ok(Serialized {
        grid,
        jump_edges: mg.jump_edges().len(),
        duplications: mg.duplications().len(),
        minimality_guaranteed: mg.minimality_guaranteed(),
        path,
    })
}
