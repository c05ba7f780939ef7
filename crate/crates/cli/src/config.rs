use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use eulerseq::sampler::SampleMode;
use eulerseq::tokenizer::Layout;
use eulerseq::vocab::AttrEncoding;

/// Pipeline settings. Loaded from a JSON file; command-line flags override.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset_tag: String,
    pub layout: Layout,
    pub modulus: u32,
    pub cyclic: bool,
    pub seed: u64,
    pub encoding: AttrEncoding,
    pub sampler: SamplerSettings,
    pub identity: IdentitySettings,
    /// Packing context length in rows.
    pub context: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dataset_tag: "graph".into(),
            layout: Layout::Prolonged,
            modulus: 256,
            cyclic: true,
            seed: 0,
            encoding: AttrEncoding::Digits,
            sampler: SamplerSettings::default(),
            identity: IdentitySettings::default(),
            context: 2048,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSettings {
    pub mode: SampleMode,
    pub depth: usize,
    pub neighbors: usize,
    pub max_seq_len: usize,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self {
            mode: SampleMode::NodeEgo,
            depth: 1,
            neighbors: 14,
            max_seq_len: 1024,
        }
    }
}

/// Node identity encoding; `k = 0` disables it.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitySettings {
    pub k: usize,
    /// "global_id<TAB>cluster" file; BFS partitioning when absent.
    pub partition: Option<PathBuf>,
    pub max_cluster: usize,
}

impl Default for IdentitySettings {
    fn default() -> Self {
        Self {
            k: 0,
            partition: None,
            max_cluster: 1024,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
