mod commands;
mod config;
mod records;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use eulerseq::pretrain::{MaskSchedule, PretrainTask};
use eulerseq::sampler::SampleMode;
use eulerseq::taskfmt::TaskKind;
use eulerseq::tokenizer::Layout;
use eulerseq::vocab::AttrEncoding;

use config::PipelineConfig;

#[derive(Parser)]
#[command(name = "eulerseq", version, about = "Serialize graphs into token sequences via Eulerian paths")]
struct Cli {
    /// JSON pipeline config; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    tag: Option<String>,
    #[arg(long, global = true, value_enum)]
    layout: Option<LayoutArg>,
    /// Number of structural index tokens.
    #[arg(long, global = true)]
    modulus: Option<u32>,
    /// Disable the random cyclic shift of node indices.
    #[arg(long, global = true)]
    no_cyclic: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    encoding: Option<EncodingArg>,
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    neighbors: Option<usize>,
    #[arg(long, global = true)]
    max_seq_len: Option<usize>,
    /// Identity tokens per node; 0 disables identity encoding.
    #[arg(long, global = true)]
    identity_k: Option<usize>,
    /// "global_id<TAB>cluster" partition file.
    #[arg(long, global = true)]
    partition: Option<PathBuf>,
    #[arg(long, global = true)]
    max_cluster: Option<usize>,
    /// Packing context in rows.
    #[arg(long, global = true)]
    context: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Short,
    Long,
    Prolonged,
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Digits,
    Discrete,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    NodeEgo,
    EdgeEgo,
}

#[derive(Clone, Copy, ValueEnum)]
enum PretrainArg {
    Ntp,
    Smtp,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Linear,
    Cosine,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Graph,
    Edge,
    Node,
}

#[derive(Subcommand)]
enum Command {
    /// Validate raw graphs and write a corpus JSONL.
    Ingest {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Treat edge-list inputs as directed.
        #[arg(long)]
        directed: bool,
        /// Map float node attributes to round(x*SCALE)-OFFSET, as "SCALE,OFFSET".
        #[arg(long, value_parser = parse_quantize)]
        quantize_node: Option<(f64, i64)>,
        #[arg(long, value_parser = parse_quantize)]
        quantize_edge: Option<(f64, i64)>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build the vocabulary TSV and attribute schema.
    Vocab {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Parent graph; required with identity encoding.
        #[arg(long)]
        parent: Option<PathBuf>,
        #[arg(long)]
        directed: bool,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Also write the identity codebook TSV.
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// Sample ego subgraphs from a parent graph.
    Sample {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        count: usize,
        /// Add one non-edge pair per positive (edge-ego only).
        #[arg(long)]
        negatives: bool,
        /// Measure fit in prolonged tokens with this vocabulary.
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Serialize a corpus into token grids.
    Tokenize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Reconstruct graphs from token grids.
    Detokenize {
        #[arg(long)]
        grids: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build NTP or SMTP pre-training examples, optionally packed.
    Pretrain {
        #[arg(long)]
        grids: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum)]
        task: PretrainArg,
        #[arg(long, value_enum, default_value = "linear")]
        schedule: ScheduleArg,
        /// Pack examples into entries of `context` rows.
        #[arg(long)]
        pack: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Append graph, edge or node task suffixes.
    Taskfmt {
        #[arg(long)]
        grids: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, value_enum)]
        task: TaskArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Round-trip random graphs (or a corpus) through every layout.
    Verify {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Random graphs have up to this many components.
        #[arg(long, default_value_t = 2)]
        max_components: usize,
    },
}

fn parse_quantize(s: &str) -> Result<(f64, i64), String> {
    let (scale, offset) = s.split_once(',').ok_or("expected SCALE,OFFSET")?;
    Ok((
        scale.trim().parse().map_err(|e| format!("scale: {e}"))?,
        offset.trim().parse().map_err(|e| format!("offset: {e}"))?,
    ))
}

fn apply(cfg: &mut PipelineConfig, o: &Overrides) {
    if let Some(v) = &o.tag {
        cfg.dataset_tag = v.clone();
    }
    if let Some(v) = o.layout {
        cfg.layout = match v {
            LayoutArg::Short => Layout::Short,
            LayoutArg::Long => Layout::Long,
            LayoutArg::Prolonged => Layout::Prolonged,
        };
    }
    if let Some(v) = o.modulus {
        cfg.modulus = v;
    }
    if o.no_cyclic {
        cfg.cyclic = false;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.encoding {
        cfg.encoding = match v {
            EncodingArg::Digits => AttrEncoding::Digits,
            EncodingArg::Discrete => AttrEncoding::Discrete,
        };
    }
    if let Some(v) = o.mode {
        cfg.sampler.mode = match v {
            ModeArg::NodeEgo => SampleMode::NodeEgo,
            ModeArg::EdgeEgo => SampleMode::EdgeEgo,
        };
    }
    if let Some(v) = o.depth {
        cfg.sampler.depth = v;
    }
    if let Some(v) = o.neighbors {
        cfg.sampler.neighbors = v;
    }
    if let Some(v) = o.max_seq_len {
        cfg.sampler.max_seq_len = v;
    }
    if let Some(v) = o.identity_k {
        cfg.identity.k = v;
    }
    if let Some(v) = &o.partition {
        cfg.identity.partition = Some(v.clone());
    }
    if let Some(v) = o.max_cluster {
        cfg.identity.max_cluster = v;
    }
    if let Some(v) = o.context {
        cfg.context = v;
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = PipelineConfig::load(cli.config.as_deref())?;
    apply(&mut cfg, &cli.overrides);
    log::debug!("config: {}", serde_json::to_string(&cfg)?);
    match cli.command {
        Command::Ingest {
            inputs,
            directed,
            quantize_node,
            quantize_edge,
            output,
        } => {
            let n = commands::ingest(&commands::IngestArgs {
                inputs,
                directed,
                quantize_node,
                quantize_edge,
                output: output.clone(),
            })?;
            log::info!("ingested {n} graphs into {}", output.display());
        }
        Command::Vocab {
            corpus,
            parent,
            directed,
            output,
            schema,
            codebook,
        } => {
            let n = commands::vocab(
                &cfg,
                &commands::VocabArgs {
                    corpus,
                    parent,
                    directed,
                    output: output.clone(),
                    schema,
                    codebook,
                },
            )?;
            log::info!("wrote {n} tokens to {}", output.display());
        }
        Command::Sample {
            graph,
            directed,
            count,
            negatives,
            vocab,
            schema,
            output,
        } => {
            let n = commands::sample(
                &cfg,
                &commands::SampleArgs {
                    graph,
                    directed,
                    count,
                    negatives,
                    vocab,
                    schema,
                    output: output.clone(),
                },
            )?;
            log::info!("wrote {n} samples to {}", output.display());
        }
        Command::Tokenize {
            corpus,
            vocab,
            schema,
            output,
        } => {
            let n = commands::tokenize(
                &cfg,
                &commands::TokenizeArgs {
                    corpus,
                    vocab,
                    schema,
                    output: output.clone(),
                },
            )?;
            log::info!("wrote {n} grids to {}", output.display());
        }
        Command::Detokenize {
            grids,
            vocab,
            schema,
            output,
        } => {
            let n = commands::detokenize_grids(&grids, &vocab, &schema, &output)?;
            log::info!("wrote {n} graphs to {}", output.display());
        }
        Command::Pretrain {
            grids,
            vocab,
            task,
            schedule,
            pack,
            output,
        } => {
            let n = commands::pretrain(
                &cfg,
                &commands::PretrainArgs {
                    grids,
                    vocab,
                    task: match task {
                        PretrainArg::Ntp => PretrainTask::Ntp,
                        PretrainArg::Smtp => PretrainTask::Smtp,
                    },
                    schedule: match schedule {
                        ScheduleArg::Linear => MaskSchedule::Linear,
                        ScheduleArg::Cosine => MaskSchedule::Cosine,
                    },
                    pack,
                    output: output.clone(),
                },
            )?;
            log::info!("wrote {n} lines to {}", output.display());
        }
        Command::Taskfmt {
            grids,
            vocab,
            task,
            output,
        } => {
            let kind = match task {
                TaskArg::Graph => TaskKind::Graph,
                TaskArg::Edge => TaskKind::Edge,
                TaskArg::Node => TaskKind::Node,
            };
            let n = commands::taskfmt(&grids, &vocab, kind, &output)?;
            log::info!("wrote {n} task sequences to {}", output.display());
        }
        Command::Verify {
            count,
            corpus,
            max_components,
        } => {
            let lines = commands::verify(&cfg, corpus.as_deref(), count, max_components)?;
            for line in &lines {
                println!("{}", serde_json::to_string(line)?);
            }
            let ok = lines.iter().filter(|l| l.ok).count();
            println!("{ok}/{} ok", lines.len());
            if ok != lines.len() {
                bail!("{} of {} graphs failed the round trip", lines.len() - ok, lines.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli).context("eulerseq failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let causes: Vec<String> = e.chain().skip(1).map(|c| c.to_string()).collect();
            let body = serde_json::json!({ "error": causes.first().cloned().unwrap_or_else(|| e.to_string()), "causes": causes });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
