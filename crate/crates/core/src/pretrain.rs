//! Self-supervised example construction.
//!
//! Positions are grid rows for NTP (one row is one step) and flat cell
//! indices (`row * width + col`) for SMTP.

use std::collections::{HashMap, HashSet};
use std::f64::consts::FRAC_PI_2;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::{self, Rng};
use crate::tokenizer::{Role, TokenGrid};
use crate::vocab::TokenId;

#[derive(Error, Debug, PartialEq)]
pub enum PretrainError {
    #[error("example with {rows} rows exceeds the context of {context}")]
    ExampleTooLong { rows: usize, context: usize },
    #[error("examples of width {found} cannot be packed with width {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("grid has no node cells")]
    NoNodes,
    #[error("mask fraction {0} outside (0, 1]")]
    BadFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PretrainTask {
    Ntp,
    Smtp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskSchedule {
    #[default]
    Linear,
    Cosine,
}

impl MaskSchedule {
    /// Maps a uniform variate `u` in `[0, 1)` to a mask fraction in `(0, 1]`.
    pub fn fraction(self, u: f64) -> f64 {
        match self {
            MaskSchedule::Linear => 1.0 - u,
            MaskSchedule::Cosine => (FRAC_PI_2 * u).cos(),
        }
    }

    pub fn draw(self, rng: &mut Rng) -> f64 {
        self.fraction(rng.gen::<f64>())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PretrainExample {
    pub task: PretrainTask,
    pub inputs: TokenGrid,
    pub targets: Vec<(usize, TokenId)>,
    /// Mask fraction, SMTP only.
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PretrainExampleJson {
    pub task: PretrainTask,
    pub inputs: Vec<Vec<TokenId>>,
    pub targets: Vec<(usize, TokenId)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<f64>,
}

impl PretrainExample {
    pub fn to_json(&self) -> PretrainExampleJson {
        PretrainExampleJson {
            task: self.task,
            inputs: self.inputs.tokens.clone(),
            targets: self.targets.clone(),
            r: self.r,
        }
    }
}

/// Next-step targets: row `t` predicts every non-pad token of row `t + 1`.
/// For the prolonged layout this is ordinary shift-by-one.
pub fn build_ntp(grid: &TokenGrid) -> PretrainExample {
    let mut targets = Vec::new();
    for t in 1..grid.rows() {
        for (&tok, &role) in grid.tokens[t].iter().zip(&grid.roles[t]) {
            if role != Role::Pad {
                targets.push((t - 1, tok));
            }
        }
    }
    PretrainExample {
        task: PretrainTask::Ntp,
        inputs: grid.clone(),
        targets,
        r: None,
    }
}

/// Local node that owns each cell: node cells own themselves, node-attribute
/// cells belong to the most recent node cell in row-major order.
pub fn cell_owners(grid: &TokenGrid) -> Vec<Option<TokenId>> {
    let mut owners = vec![None; grid.rows() * grid.width];
    let mut current = None;
    for (pos, tok, role) in grid.cells() {
        match role {
            Role::Node => {
                current = Some(tok);
                owners[pos] = current;
            }
            Role::NodeAttr => owners[pos] = current,
            _ => {}
        }
    }
    owners
}

/// Masks `ceil(r * distinct nodes)` nodes chosen uniformly with `seed`. Every
/// occurrence of a chosen node's index token and all of its node-attribute
/// tokens become `mask`; edge cells are left alone.
pub fn build_smtp(grid: &TokenGrid, r: f64, seed: u64, mask: TokenId) -> Result<PretrainExample, PretrainError> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(PretrainError::BadFraction(r));
    }
    let mut distinct = Vec::new();
    let mut seen = HashSet::new();
    for (_, tok, role) in grid.cells() {
        if role == Role::Node && seen.insert(tok) {
            distinct.push(tok);
        }
    }
    if distinct.is_empty() {
        return Err(PretrainError::NoNodes);
    }
    let count = ((r * distinct.len() as f64).ceil() as usize).clamp(1, distinct.len());
    let mut rng = seed::rng(seed);
    let chosen: HashSet<TokenId> = index::sample(&mut rng, distinct.len(), count)
        .into_iter()
        .map(|i| distinct[i])
        .collect();

    let owners = cell_owners(grid);
    let mut inputs = grid.clone();
    let mut targets = Vec::new();
    for (pos, owner) in owners.iter().enumerate() {
        if let Some(node) = owner {
            if chosen.contains(node) {
                let (row, col) = (pos / grid.width, pos % grid.width);
                targets.push((pos, grid.tokens[row][col]));
                inputs.tokens[row][col] = mask;
            }
        }
    }
    Ok(PretrainExample {
        task: PretrainTask::Smtp,
        inputs,
        targets,
        r: Some(r),
    })
}

/// Index tokens of the nodes masked in an SMTP example.
pub fn masked_nodes(original: &TokenGrid, example: &PretrainExample, mask: TokenId) -> HashSet<TokenId> {
    original
        .cells()
        .filter(|(pos, _, role)| {
            *role == Role::Node && example.inputs.tokens[pos / original.width][pos % original.width] == mask
        })
        .map(|(_, tok, _)| tok)
        .collect()
}

/// Several examples concatenated row-wise, separated by `<eos>` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedBatch {
    pub width: usize,
    pub rows: Vec<Vec<TokenId>>,
    /// Half-open row span of each example.
    pub boundaries: Vec<(usize, usize)>,
    /// Targets re-based to the packed rows (NTP) or cells (SMTP).
    pub targets: Vec<(usize, TokenId)>,
}

impl PackedBatch {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Greedy first-fit packing into entries of at most `context` rows. Each
/// example goes into the first open entry with room for it plus one
/// separator row (`[eos, pad, ..]`), else starts a new entry. Entries are
/// emitted in creation order.
pub fn pack(
    examples: impl IntoIterator<Item = PretrainExample>,
    context: usize,
    eos: TokenId,
    pad: TokenId,
) -> Result<Vec<PackedBatch>, PretrainError> {
    let mut bins: Vec<PackedBatch> = Vec::new();
    let mut width = None;
    for ex in examples {
        let rows = ex.inputs.rows();
        if rows > context {
            return Err(PretrainError::ExampleTooLong { rows, context });
        }
        let w = *width.get_or_insert(ex.inputs.width);
        if ex.inputs.width != w {
            return Err(PretrainError::WidthMismatch {
                expected: w,
                found: ex.inputs.width,
            });
        }
        let slot = bins
            .iter()
            .position(|b| b.rows.len() + 1 + rows <= context);
        let bin = match slot {
            Some(i) => {
                let mut sep = vec![pad; w];
                sep[0] = eos;
                bins[i].rows.push(sep);
                &mut bins[i]
            }
            None => {
                bins.push(PackedBatch {
                    width: w,
                    rows: Vec::new(),
                    boundaries: Vec::new(),
                    targets: Vec::new(),
                });
                bins.last_mut().expect("just pushed")
            }
        };
        let start = bin.rows.len();
        let shift = match ex.task {
            PretrainTask::Ntp => start,
            PretrainTask::Smtp => start * w,
        };
        bin.targets.extend(ex.targets.iter().map(|&(p, t)| (p + shift, t)));
        bin.rows.extend(ex.inputs.tokens);
        bin.boundaries.push((start, bin.rows.len()));
    }
    Ok(bins)
}

/// Token multiset of a grid's rows, including pads.
pub fn token_counts<'a>(rows: impl IntoIterator<Item = &'a Vec<TokenId>>) -> HashMap<TokenId, usize> {
    let mut counts = HashMap::new();
    for row in rows {
        for &t in row {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    counts
}
