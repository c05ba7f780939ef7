use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use eulerseq::detok::{detokenize, isomorphic, matches_by_tokens, ISOMORPHISM_NODE_LIMIT};
use eulerseq::euler::{add_jump_edges, eulerize, extract_path};
use eulerseq::graph::{load_graph, AttributedGraph, GraphFormat, GraphJson, SubgraphSample};
use eulerseq::identity::{load_partition, NodeIdentityCodebook, PartitionStrategy};
use eulerseq::pipeline::serialize;
use eulerseq::pretrain::{build_ntp, build_smtp, pack, MaskSchedule, PretrainExample, PretrainTask};
use eulerseq::sampler::{SampleMode, Sampler, SamplerConfig};
use eulerseq::seed;
use eulerseq::synth::{random_graph, RandomGraphSpec};
use eulerseq::taskfmt::{format_edge_task, format_graph_task, format_node_task, TaskKind};
use eulerseq::tokenizer::{GridWidths, Layout, ReindexConfig, TokenGrid, Tokenizer};
use eulerseq::vocab::{build_vocab, semantic_token, AttrKind, AttrSchema, Special, TokenId, VocabBuilder, Vocabulary};

use crate::config::PipelineConfig;
use crate::records::{integer_rows, read_json, read_jsonl, write_json, write_jsonl, CorpusItem, CorpusRecord, GridRecord};

// Sub-seed streams derived from the master seed.
const STREAM_PARTITION: u64 = 1;
const STREAM_ROOTS: u64 = 2;
const STREAM_ITEMS: u64 = 3;

fn item_seed(cfg: &PipelineConfig, i: usize) -> u64 {
    seed::derive(seed::derive(cfg.seed, STREAM_ITEMS), i as u64)
}

pub fn load_parent(path: &Path, directed: bool) -> anyhow::Result<AttributedGraph> {
    let tsv = matches!(path.extension().and_then(|e| e.to_str()), Some("tsv" | "txt"));
    if tsv {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(AttributedGraph::from_edge_tsv(&text, directed)?);
    }
    Ok(load_graph(path, GraphFormat::Json)?)
}

pub fn read_corpus(path: &Path) -> anyhow::Result<Vec<CorpusItem>> {
    read_jsonl::<CorpusRecord>(path)?
        .into_iter()
        .map(CorpusRecord::into_item)
        .collect()
}

fn codebook(cfg: &PipelineConfig, parent: &AttributedGraph) -> anyhow::Result<NodeIdentityCodebook> {
    let strategy = match &cfg.identity.partition {
        Some(p) => PartitionStrategy::GivenLabels(load_partition(p, parent.num_nodes())?),
        None => PartitionStrategy::BfsPartition,
    };
    Ok(NodeIdentityCodebook::build(
        parent,
        &cfg.dataset_tag,
        cfg.identity.k,
        &strategy,
        cfg.identity.max_cluster,
        seed::derive(cfg.seed, STREAM_PARTITION),
    )?)
}

fn whole(parent: &AttributedGraph) -> SubgraphSample {
    SubgraphSample {
        graph: parent.clone(),
        root_nodes: Vec::new(),
        origin_ids: (0..parent.num_nodes() as u32).collect(),
    }
}

fn tokenizer<'v>(cfg: &PipelineConfig, vocab: &'v Vocabulary, schema: &'v AttrSchema, widths: GridWidths) -> Tokenizer<'v> {
    Tokenizer::new(vocab, schema, cfg.dataset_tag.clone())
        .with_reindex(ReindexConfig {
            modulus: vocab.modulus(),
            cyclic: cfg.cyclic,
        })
        .with_widths(widths)
}

// ---------------------------------------------------------------------------

pub struct IngestArgs {
    pub inputs: Vec<PathBuf>,
    pub directed: bool,
    pub quantize_node: Option<(f64, i64)>,
    pub quantize_edge: Option<(f64, i64)>,
    pub output: PathBuf,
}

/// Reads graphs (JSON objects, JSONL, or edge-list TSV), quantizes float
/// attributes, validates, and writes a corpus JSONL.
pub fn ingest(args: &IngestArgs) -> anyhow::Result<usize> {
    let mut out: Vec<CorpusRecord> = Vec::new();
    for path in &args.inputs {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if matches!(ext, "tsv" | "txt") {
            let g = load_parent(path, args.directed)?;
            out.push(CorpusRecord::Graph {
                graph: g.to_json(),
                label: Value::Null,
            });
            continue;
        }
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let values: Vec<Value> = if ext == "jsonl" {
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
                .collect::<anyhow::Result<_>>()?
        } else {
            vec![serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?]
        };
        for mut v in values {
            let label = v.get("label").cloned().unwrap_or(Value::Null);
            if let Some(obj) = v.as_object_mut() {
                for (key, q, what) in [("node_attrs", args.quantize_node, "node"), ("edge_attrs", args.quantize_edge, "edge")] {
                    if let Some(rows) = obj.get(key) {
                        let ints = integer_rows(rows, q, what)?;
                        obj.insert(key.into(), ints);
                    }
                }
            }
            let gj: GraphJson = serde_json::from_value(v).with_context(|| format!("graph in {}", path.display()))?;
            // round through the validating constructor
            let g = AttributedGraph::from_json(gj)?;
            out.push(CorpusRecord::Graph {
                graph: g.to_json(),
                label,
            });
        }
    }
    write_jsonl(&args.output, &out)?;
    Ok(out.len())
}

// ---------------------------------------------------------------------------

pub struct VocabArgs {
    pub corpus: Option<PathBuf>,
    pub parent: Option<PathBuf>,
    pub directed: bool,
    pub output: PathBuf,
    pub schema: PathBuf,
    pub codebook: Option<PathBuf>,
}

/// Builds the vocabulary and attribute schema. With identity encoding the
/// codebook comes from the parent graph and all its tokens are included.
pub fn vocab(cfg: &PipelineConfig, args: &VocabArgs) -> anyhow::Result<usize> {
    let parent = args.parent.as_deref().map(|p| load_parent(p, args.directed)).transpose()?;
    let corpus = args.corpus.as_deref().map(read_corpus).transpose()?.unwrap_or_default();
    let mut b = VocabBuilder::new(cfg.modulus);
    let schema = if cfg.identity.k > 0 {
        let parent = parent.as_ref().ok_or_else(|| anyhow!("identity encoding needs --parent"))?;
        let cb = codebook(cfg, parent)?;
        let schema = cb.schema(parent.is_directed(), AttrSchema::for_graph(parent, cfg.encoding).edge);
        for t in cb.semantic_tokens() {
            b.add_token(t);
        }
        b.observe(&cb.apply(&whole(parent))?, &cfg.dataset_tag, &schema);
        if let Some(path) = &args.codebook {
            std::fs::write(path, cb.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
        }
        schema
    } else {
        let first = parent
            .as_ref()
            .or(corpus.first().map(|c| &c.graph))
            .ok_or_else(|| anyhow!("vocab needs --corpus or --parent"))?;
        let schema = AttrSchema::for_graph(first, cfg.encoding);
        for g in parent.iter().chain(corpus.iter().map(|c| &c.graph)) {
            b.observe(g, &cfg.dataset_tag, &schema);
        }
        schema
    };
    for (i, item) in corpus.iter().enumerate() {
        if !schema.matches(&item.graph) {
            bail!("corpus graph {i} does not match the attribute schema");
        }
    }
    let vocab = b.build();
    vocab.save(&args.output)?;
    write_json(&args.schema, &schema)?;
    Ok(vocab.len())
}

// ---------------------------------------------------------------------------

pub struct SampleArgs {
    pub graph: PathBuf,
    pub directed: bool,
    pub count: usize,
    pub negatives: bool,
    pub vocab: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: PathBuf,
}

/// Draws roots, samples ego subgraphs that fit `max_seq_len`, applies
/// identity codes when enabled. Length is the prolonged token count when a
/// vocabulary is given, else the Euler path length.
pub fn sample(cfg: &PipelineConfig, args: &SampleArgs) -> anyhow::Result<usize> {
    let parent = load_parent(&args.graph, args.directed)?;
    let cb = (cfg.identity.k > 0).then(|| codebook(cfg, &parent)).transpose()?;
    let vocab = args.vocab.as_deref().map(Vocabulary::load).transpose()?;
    let schema: Option<AttrSchema> = args.schema.as_deref().map(read_json).transpose()?;
    let measured = match (&vocab, &schema) {
        (Some(v), Some(s)) => Some(tokenizer(cfg, v, s, GridWidths::default())),
        (None, None) => None,
        _ => bail!("--vocab and --schema go together"),
    };
    let sampler = Sampler::new(&parent);
    let draws = sampler.draw_roots(
        cfg.sampler.mode,
        args.count,
        args.negatives,
        seed::derive(cfg.seed, STREAM_ROOTS),
    )?;
    let finish = |s: &SubgraphSample| -> anyhow::Result<AttributedGraph> {
        Ok(match &cb {
            Some(cb) => cb.apply(s)?,
            None => s.graph.clone(),
        })
    };
    let records: Vec<CorpusRecord> = draws
        .par_iter()
        .enumerate()
        .map(|(i, draw)| -> anyhow::Result<CorpusRecord> {
            let item = item_seed(cfg, i);
            let scfg = SamplerConfig {
                mode: cfg.sampler.mode,
                depth: cfg.sampler.depth,
                neighbors: cfg.sampler.neighbors,
                max_seq_len: cfg.sampler.max_seq_len,
                seed: item,
            };
            let (s, _) = sampler.sample_fitting(&draw.roots, &scfg, |s| -> anyhow::Result<usize> {
                let g = finish(s)?;
                Ok(match &measured {
                    Some(tok) => serialize(&g, tok, Layout::Prolonged, item)?.grid.flatten().len(),
                    None => extract_path(&eulerize(add_jump_edges(&g, item))?, item)?.nodes.len(),
                })
            })?;
            let graph = finish(&s)?;
            let sample = SubgraphSample { graph, ..s };
            let label = match cfg.sampler.mode {
                SampleMode::EdgeEgo => json!(draw.positive),
                SampleMode::NodeEgo => Value::Null,
            };
            Ok(CorpusRecord::Sample {
                sample: sample.to_json(),
                label,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    write_jsonl(&args.output, &records)?;
    Ok(records.len())
}

// ---------------------------------------------------------------------------

pub struct TokenizeArgs {
    pub corpus: PathBuf,
    pub vocab: PathBuf,
    pub schema: PathBuf,
    pub output: PathBuf,
}

/// Root tokens for task formatting: identity tokens when identity encoding
/// is on, else the structural index token.
fn root_tokens(cfg: &PipelineConfig, vocab: &Vocabulary, g: &AttributedGraph, grid: &TokenGrid, roots: &[u32]) -> anyhow::Result<Vec<Vec<TokenId>>> {
    roots
        .iter()
        .map(|&r| {
            if cfg.identity.k == 0 {
                return Ok(vec![grid.node_tokens[r as usize]]);
            }
            g.node_attrs(r)
                .iter()
                .take(cfg.identity.k)
                .enumerate()
                .map(|(dim, &v)| {
                    let t = semantic_token(&cfg.dataset_tag, AttrKind::Node, dim, v);
                    vocab.id(&t).ok_or_else(|| anyhow!("identity token {t} missing from vocabulary"))
                })
                .collect()
        })
        .collect()
}

pub fn tokenize(cfg: &PipelineConfig, args: &TokenizeArgs) -> anyhow::Result<usize> {
    let corpus = read_corpus(&args.corpus)?;
    let vocab = Vocabulary::load(&args.vocab)?;
    let schema: AttrSchema = read_json(&args.schema)?;
    let widths = GridWidths::fit(corpus.iter().map(|c| &c.graph), &schema);
    let tok = tokenizer(cfg, &vocab, &schema, widths);
    let records: Vec<GridRecord> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, item)| -> anyhow::Result<GridRecord> {
            let grid = serialize(&item.graph, &tok, cfg.layout, item_seed(cfg, i))
                .with_context(|| format!("corpus item {i}"))?
                .grid;
            Ok(GridRecord {
                roots: root_tokens(cfg, &vocab, &item.graph, &grid, &item.roots)?,
                grid: grid.to_json(),
                label: item.label.clone(),
            })
        })
        .collect::<anyhow::Result<_>>()?;
    write_jsonl(&args.output, &records)?;
    Ok(records.len())
}

fn read_grids(path: &Path) -> anyhow::Result<Vec<(TokenGrid, GridRecord)>> {
    read_jsonl::<GridRecord>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let grid = TokenGrid::from_json(r.grid.clone()).map_err(|e| anyhow!("grid {i}: {e}"))?;
            Ok((grid, r))
        })
        .collect()
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DetokRecord {
    graph: GraphJson,
    dropped_jump_edges: usize,
    deduplicated_edges: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

pub fn detokenize_grids(grids: &Path, vocab: &Path, schema: &Path, output: &Path) -> anyhow::Result<usize> {
    let grids = read_grids(grids)?;
    let vocab = Vocabulary::load(vocab)?;
    let schema: AttrSchema = read_json(schema)?;
    let records: Vec<DetokRecord> = grids
        .par_iter()
        .enumerate()
        .map(|(i, (grid, _))| -> anyhow::Result<DetokRecord> {
            let report = detokenize(grid, &vocab, &schema).with_context(|| format!("grid {i}"))?;
            Ok(DetokRecord {
                graph: report.graph.to_json(),
                dropped_jump_edges: report.dropped_jump_edges,
                deduplicated_edges: report.deduplicated_edges,
                warnings: report.warnings,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    write_jsonl(output, &records)?;
    Ok(records.len())
}

// ---------------------------------------------------------------------------

pub struct PretrainArgs {
    pub grids: PathBuf,
    pub vocab: PathBuf,
    pub task: PretrainTask,
    pub schedule: MaskSchedule,
    pub pack: bool,
    pub output: PathBuf,
}

pub fn pretrain(cfg: &PipelineConfig, args: &PretrainArgs) -> anyhow::Result<usize> {
    let grids = read_grids(&args.grids)?;
    let vocab = Vocabulary::load(&args.vocab)?;
    let mask = vocab.special(Special::Mask);
    let examples: Vec<PretrainExample> = grids
        .par_iter()
        .enumerate()
        .map(|(i, (grid, _))| -> anyhow::Result<PretrainExample> {
            Ok(match args.task {
                PretrainTask::Ntp => build_ntp(grid),
                PretrainTask::Smtp => {
                    let mut rng = seed::rng(item_seed(cfg, i));
                    let r = args.schedule.draw(&mut rng);
                    build_smtp(grid, r, seed::derive(item_seed(cfg, i), 1), mask).with_context(|| format!("grid {i}"))?
                }
            })
        })
        .collect::<anyhow::Result<_>>()?;
    if args.pack {
        let packed = pack(examples, cfg.context, vocab.special(Special::Eos), vocab.special(Special::Pad))?;
        write_jsonl(&args.output, &packed)?;
        return Ok(packed.len());
    }
    let lines: Vec<_> = examples.iter().map(PretrainExample::to_json).collect();
    write_jsonl(&args.output, &lines)?;
    Ok(lines.len())
}

// ---------------------------------------------------------------------------

pub fn taskfmt(grids: &Path, vocab: &Path, task: TaskKind, output: &Path) -> anyhow::Result<usize> {
    let grids = read_grids(grids)?;
    let vocab = Vocabulary::load(vocab)?;
    let gsum = vocab.special(Special::Gsum);
    let records = grids
        .iter()
        .enumerate()
        .map(|(i, (grid, rec))| -> anyhow::Result<_> {
            let root = |k: usize| rec.roots.get(k).ok_or_else(|| anyhow!("grid {i} has no root {k}"));
            let label = rec.label.clone();
            Ok(match task {
                TaskKind::Graph => format_graph_task(grid, gsum, label),
                TaskKind::Edge => format_edge_task(grid, root(0)?, root(1)?, label).with_context(|| format!("grid {i}"))?,
                TaskKind::Node => format_node_task(grid, root(0)?, label).with_context(|| format!("grid {i}"))?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    write_jsonl(output, &records)?;
    Ok(records.len())
}

// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct VerifyLine {
    pub id: usize,
    pub ok: bool,
    pub dedup: usize,
    pub jumps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn verify_one(cfg: &PipelineConfig, id: usize, g: &AttributedGraph) -> anyhow::Result<VerifyLine> {
    let schema = AttrSchema::for_graph(g, cfg.encoding);
    let vocab = build_vocab([g], &cfg.dataset_tag, cfg.modulus, &schema);
    let tok = tokenizer(cfg, &vocab, &schema, GridWidths::fit([g], &schema));
    let mut line = VerifyLine {
        id,
        ok: true,
        dedup: 0,
        jumps: 0,
        error: None,
    };
    for (l, layout) in Layout::ALL.into_iter().enumerate() {
        let s = serialize(g, &tok, layout, seed::derive(item_seed(cfg, id), l as u64))?;
        let report = detokenize(&s.grid, &vocab, &schema)?;
        let same = if g.num_nodes() <= ISOMORPHISM_NODE_LIMIT {
            isomorphic(g, &report.graph)?
        } else {
            matches_by_tokens(g, &s.grid.node_tokens, &report)
        };
        line.ok &= same;
        line.dedup = line.dedup.max(report.deduplicated_edges);
        line.jumps = report.dropped_jump_edges;
    }
    Ok(line)
}

/// Round-trips every graph through all layouts. Returns per-graph lines.
pub fn verify(cfg: &PipelineConfig, corpus: Option<&Path>, count: usize, max_components: usize) -> anyhow::Result<Vec<VerifyLine>> {
    let graphs: Vec<AttributedGraph> = match corpus {
        Some(p) => read_corpus(p)?.into_iter().map(|c| c.graph).collect(),
        None => {
            let spec = RandomGraphSpec::default();
            (0..count)
                .map(|i| random_graph(&spec, max_components, &mut seed::rng(seed::derive(cfg.seed, i as u64))))
                .collect()
        }
    };
    Ok(graphs
        .par_iter()
        .enumerate()
        .map(|(id, g)| {
            verify_one(cfg, id, g).unwrap_or_else(|e| VerifyLine {
                id,
                ok: false,
                dedup: 0,
                jumps: 0,
                error: Some(format!("{e:#}")),
            })
        })
        .collect())
}
