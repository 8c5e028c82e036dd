//! The `kgbench` command line. Each subcommand reads and writes the formats
//! in [`crate::formats`]; JSON summaries go to stdout, diagnostics to stderr.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use kgbench_core::merge::{resolve_embeddings, run_merge_schedule, IndexBackend, IndexConfig, MergeConfig};
use kgbench_core::metrics::{macro_report, JudgeScores, ReportConfig, TaskResult};
use kgbench_core::orwas::{compute_high_frequency_set, select_from_aggregate, ScoreWeights, SelectionConfig, WalkConfig};
use kgbench_core::record::validate_batch;
use kgbench_core::stats::{graph_stats, PathMode};
use kgbench_core::synth::{hub_heavy_graph, SynthParams};
use kgbench_core::taskgen::{bundle_all, validate_benchmark_shape, BenchmarkShape, RoutingConfig, TopicMode};
use kgbench_core::{KnowledgeGraph, NodeKind};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::{load_corpus, read_corpus_dir, DEFAULT_CHUNK_TOKENS};
use crate::formats::agg::{read_agg, write_agg, AggHeader, AGG_FORMAT};
use crate::formats::combos::{combo_records, read_combos, write_combos};
use crate::formats::records::read_records_dir;
use crate::formats::vectors::{inline_vectors, read_node_vectors, write_node_vectors};
use crate::formats::{read_json, read_jsonl, write_json, write_jsonl};
use crate::parallel::walk_parallel;
use crate::server::{spawn, ToolState};
use crate::snapshot::{load_snapshot, save_snapshot, trailer_crc};

#[derive(Debug, Parser)]
#[command(name = "kgbench", version, about = "Build multi-document benchmark tasks from a paper knowledge graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph snapshot from a directory of record files.
    Build(BuildArgs),
    /// Parse and validate records without building.
    Ingest(IngestArgs),
    /// Merge near-duplicate key-information nodes.
    Merge(MergeArgs),
    /// Run random walks and write the pair aggregate.
    Walk(WalkArgs),
    /// Enumerate, score and rank paper combinations from an aggregate.
    Select(SelectArgs),
    /// Structural statistics of a snapshot.
    Stats(StatsArgs),
    /// Route ranked combinations to task families and emit bundles.
    Bundle(BundleArgs),
    /// Serve the search and visit tools over HTTP.
    Serve(ServeArgs),
    /// Macro-averaged scores for a results file.
    Score(ScoreArgs),
    /// List corpus chunk and image ids with their text, for external encoding.
    Chunks(ChunksArgs),
    /// Write a seeded synthetic snapshot.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write inline record embeddings as a sidecar vector file.
    #[arg(long)]
    pub vectors_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub check: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = kgbench_core::merge::DEFAULT_THRESHOLD)]
    pub theta: f32,
    /// Comma-separated kinds, coarse to fine.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<NodeKind>>,
    #[arg(long, value_enum, default_value_t = Backend::Hnsw)]
    pub backend: Backend,
    #[arg(long, default_value_t = 20)]
    pub neighbors: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Backend {
    Hnsw,
    Flat,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    /// Walk length.
    #[arg(long = "L", alias = "length", default_value_t = 100)]
    pub length: usize,
    /// Number of walks.
    #[arg(long = "W", alias = "walks", default_value_t = 10_000)]
    pub walks: usize,
    #[arg(long, default_value_t = 0.3)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.7)]
    pub article_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Degree quantile defining the high-frequency set.
    #[arg(long, default_value_t = kgbench_core::orwas::DEFAULT_QUANTILE)]
    pub quantile: f64,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub agg: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub cap: usize,
    /// Coverage, diversity, consistency, redundancy.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0, 0.5])]
    pub weights: Vec<f64>,
    /// Papers per anchor pool: a number, or `all`. Defaults to k.
    #[arg(long)]
    pub fanout: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub min_support: u32,
    /// Candidate store budget in bytes.
    #[arg(long, default_value_t = 256 << 20)]
    pub memory: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the run report; stderr when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long, conflicts_with = "sample")]
    pub exact: bool,
    /// BFS from this many sampled sources; the diameter becomes a lower bound.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BundleArgs {
    #[arg(long)]
    pub combos: PathBuf,
    /// Target shape JSON, or `published` for the built-in 2400-item shape.
    #[arg(long, default_value = "published")]
    pub shape: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Topic::ByThemeKind)]
    pub topic_mode: Topic,
    /// Exit non-zero when the shape check fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum Topic {
    ByThemeKind,
    Explicit,
    Implicit,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value_t = DEFAULT_CHUNK_TOKENS)]
    pub chunk_tokens: usize,
    #[arg(long, default_value_t = crate::server::DEFAULT_MAX_BATCH)]
    pub max_batch: usize,
    #[arg(long, default_value_t = 2)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub results: PathBuf,
    /// Judge scores (`{"bundle_id": .., "scores": {..}}` per line).
    #[arg(long)]
    pub judge: Option<PathBuf>,
    /// Reasoning, topic induction, summary, solution.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0, 1.0, 1.0])]
    pub weights: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub recall_k: usize,
}

#[derive(Debug, Args)]
pub struct ChunksArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CHUNK_TOKENS)]
    pub chunk_tokens: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2500)]
    pub papers: usize,
    #[arg(long, default_value_t = 40)]
    pub topics: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JudgeLine {
    pub bundle_id: String,
    pub scores: JudgeScores,
}

pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Build(a) => build(a),
        Command::Ingest(a) => ingest(a),
        Command::Merge(a) => merge(a),
        Command::Walk(a) => walk(a),
        Command::Select(a) => select(a),
        Command::Stats(a) => stats(a),
        Command::Bundle(a) => bundle(a),
        Command::Serve(a) => serve(a),
        Command::Score(a) => score(a),
        Command::Chunks(a) => chunks(a),
        Command::Synth(a) => synth(a),
    }
}

fn build(a: BuildArgs) -> Result<ExitCode> {
    let (records, errors) = read_records_dir(&a.records).with_context(|| format!("reading {}", a.records.display()))?;
    for e in &errors {
        eprintln!("{e}");
    }
    ensure!(errors.is_empty(), "{} malformed record line(s)", errors.len());
    let report = validate_batch(&records);
    for w in &report.warnings {
        eprintln!("warning: {}", serde_json::to_string(w)?);
    }
    if !report.accepted() {
        for e in &report.errors {
            eprintln!("{}", serde_json::to_string(e)?);
        }
        bail!("{} record error(s)", report.errors.len());
    }
    let mut g = KnowledgeGraph::new();
    for r in &records {
        g.add_paper_subgraph(r)?;
    }
    let crc = save_snapshot(&g, &a.out)?;
    if let Some(p) = &a.vectors_out {
        write_node_vectors(p, &inline_vectors(&records))?;
    }
    print_json(&json!({
        "papers": g.articles().len(),
        "nodes": g.num_nodes(),
        "edges": g.num_edges(),
        "warnings": report.warnings.len(),
        "snapshot_crc": crc,
    }));
    Ok(ExitCode::SUCCESS)
}

fn ingest(a: IngestArgs) -> Result<ExitCode> {
    let (records, errors) = read_records_dir(&a.check)?;
    let report = validate_batch(&records);
    let ok = errors.is_empty() && report.accepted();
    print_json(&json!({
        "accepted": ok,
        "parse_errors": errors.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "report": report,
    }));
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn merge(a: MergeArgs) -> Result<ExitCode> {
    let mut g = load_snapshot(&a.snapshot)?;
    let by_key = read_node_vectors(&a.vectors)?;
    let table = resolve_embeddings(&g, &by_key);
    let dimension = table.values().next().map_or(0, Vec::len);
    let mut cfg = MergeConfig::with_threshold(a.theta);
    if let Some(s) = a.schedule {
        cfg = cfg.with_schedule(s);
    }
    let index_cfg = IndexConfig {
        dimension,
        neighbors_per_query: a.neighbors,
        backend: match a.backend {
            Backend::Hnsw => IndexBackend::Hnsw,
            Backend::Flat => IndexBackend::Flat,
        },
        ..Default::default()
    };
    let started = Instant::now();
    let (_, report) = run_merge_schedule(&mut g, &table, &cfg, &index_cfg)?;
    save_snapshot(&g, &a.out)?;
    let summary = json!({
        "threshold": a.theta,
        "nodes": g.num_nodes(),
        "edges": g.num_edges(),
        "merged": report.total_merged(),
        "seconds": started.elapsed().as_secs_f64(),
        "report": report,
    });
    if let Some(p) = &a.report {
        write_json(p, &summary)?;
    }
    print_json(&summary);
    Ok(ExitCode::SUCCESS)
}

fn walk(a: WalkArgs) -> Result<ExitCode> {
    let bytes = std::fs::read(&a.snapshot).with_context(|| format!("reading {}", a.snapshot.display()))?;
    let mut g = crate::snapshot::from_bytes(&bytes)?;
    let (hf, warning) = compute_high_frequency_set(&g, a.quantile);
    if let Some(w) = warning {
        eprintln!("warning: {}", serde_json::to_string(&w)?);
    }
    let hf_len = hf.len();
    g.set_high_frequency(hf)?;
    let frozen = g.freeze();
    let cfg = WalkConfig {
        walk_length: a.length,
        num_walks: a.walks,
        bias: a.beta,
        article_start_fraction: a.article_fraction,
        seed: a.seed,
    };
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let started = Instant::now();
    let (agg, stats) = walk_parallel(&frozen, &cfg, workers)?;
    let seconds = started.elapsed().as_secs_f64();
    let header = AggHeader {
        format: AGG_FORMAT.into(),
        snapshot: a.snapshot.clone(),
        snapshot_crc: trailer_crc(&bytes),
        walk: cfg,
        quantile: a.quantile,
        high_frequency: hf_len,
        stats,
    };
    write_agg(&a.out, &header, &agg)?;
    print_json(&json!({
        "pairs": agg.len(),
        "articles": agg.num_articles(),
        "high_frequency": hf_len,
        "walks": header.stats,
        "workers": workers,
        "seconds": seconds,
    }));
    Ok(ExitCode::SUCCESS)
}

fn parse_fanout(s: Option<&str>, k: usize) -> Result<Option<usize>> {
    match s {
        None => Ok(Some(k)),
        Some("all") => Ok(None),
        Some(n) => Ok(Some(n.parse().with_context(|| format!("bad --fanout `{n}`"))?)),
    }
}

fn select(a: SelectArgs) -> Result<ExitCode> {
    let (header, agg) = read_agg(&a.agg)?;
    let snapshot = resolve_relative(&a.agg, &header.snapshot);
    let bytes = std::fs::read(&snapshot).with_context(|| format!("reading snapshot {}", snapshot.display()))?;
    ensure!(
        trailer_crc(&bytes) == header.snapshot_crc,
        "snapshot {} changed since the walks ran",
        snapshot.display()
    );
    let mut g = crate::snapshot::from_bytes(&bytes)?;
    let (hf, _) = compute_high_frequency_set(&g, header.quantile);
    g.set_high_frequency(hf)?;
    let frozen = g.freeze();
    ensure!(a.weights.len() == 4, "--weights needs 4 values, got {}", a.weights.len());
    let weights = ScoreWeights {
        coverage: a.weights[0],
        diversity: a.weights[1],
        consistency: a.weights[2],
        redundancy: a.weights[3],
    };
    let scfg = SelectionConfig {
        combo_size: a.k,
        max_combinations: a.cap,
        weights,
        anchor_fanout: parse_fanout(a.fanout.as_deref(), a.k)?,
        min_support: a.min_support,
        max_candidate_memory: a.memory,
    };
    let started = Instant::now();
    let (ranked, mut report) = select_from_aggregate(&frozen, &agg, &scfg)?;
    report.walks = header.stats.clone();
    let seconds = started.elapsed().as_secs_f64();
    write_combos(&a.out, &combo_records(&ranked, &g))?;
    let out = json!({ "config": scfg, "report": report, "seconds": seconds });
    match &a.report {
        Some(p) => write_json(p, &out)?,
        None => eprintln!("{}", serde_json::to_string_pretty(&out)?),
    }
    Ok(ExitCode::SUCCESS)
}

/// Paths recorded in a file header are taken as given, or relative to the
/// file when they do not exist from the current directory.
fn resolve_relative(file: &Path, recorded: &Path) -> PathBuf {
    if recorded.is_absolute() || recorded.exists() {
        return recorded.to_owned();
    }
    file.parent().map_or_else(|| recorded.to_owned(), |d| d.join(recorded))
}

fn stats(a: StatsArgs) -> Result<ExitCode> {
    let g = load_snapshot(&a.snapshot)?;
    let mode = match a.sample {
        Some(sources) => PathMode::Sampled { sources, seed: a.seed },
        None => PathMode::Exact,
    };
    let started = Instant::now();
    let s = graph_stats(&g.freeze(), mode)?;
    print_json(&json!({ "stats": s, "mode": mode, "seconds": started.elapsed().as_secs_f64() }));
    Ok(ExitCode::SUCCESS)
}

fn bundle(a: BundleArgs) -> Result<ExitCode> {
    let combos = read_combos(&a.combos)?;
    let shape = match a.shape.as_str() {
        "published" => BenchmarkShape::published(),
        p => read_json(Path::new(p))?,
    };
    let cfg = RoutingConfig {
        topic_mode: match a.topic_mode {
            Topic::ByThemeKind => TopicMode::ByThemeKind,
            Topic::Explicit => TopicMode::Explicit,
            Topic::Implicit => TopicMode::Implicit,
        },
        ..Default::default()
    };
    let views: Vec<_> = combos.iter().map(|c| c.view()).collect();
    let (bundles, rejected) = bundle_all(&views, &cfg);
    std::fs::create_dir_all(&a.out)?;
    write_jsonl(&a.out.join("bundles.jsonl"), &bundles)?;
    let report = validate_benchmark_shape(&bundles, &shape);
    write_json(&a.out.join("shape_report.json"), &report)?;
    for r in &rejected {
        eprintln!("skipped: {r}");
    }
    print_json(&json!({
        "bundles": bundles.len(),
        "rejected": rejected.len(),
        "shape_pass": report.pass,
    }));
    Ok(if a.strict && !report.pass { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn serve(a: ServeArgs) -> Result<ExitCode> {
    let docs = load_corpus(&a.corpus, &a.vectors, a.chunk_tokens)?;
    let dim = docs
        .iter()
        .flat_map(|d| d.chunks.iter().filter_map(|c| c.vector.as_ref()))
        .map(Vec::len)
        .next()
        .unwrap_or(0);
    let mut state = ToolState::build(&docs, dim)?;
    state.max_batch = a.max_batch;
    let handle = spawn(Arc::new(state), SocketAddr::new(a.host, a.port), a.workers)?;
    eprintln!("serving {} documents on http://{}", docs.len(), handle.addr);
    handle.wait()?;
    Ok(ExitCode::SUCCESS)
}

fn score(a: ScoreArgs) -> Result<ExitCode> {
    let mut results: Vec<TaskResult> = read_jsonl(&a.results)?;
    if let Some(p) = &a.judge {
        let judged: BTreeMap<String, JudgeScores> =
            read_jsonl::<JudgeLine>(p)?.into_iter().map(|j| (j.bundle_id, j.scores)).collect();
        for r in &mut results {
            if let Some(s) = judged.get(&r.bundle_id) {
                r.judge = Some(s.clone());
            }
        }
    }
    let cfg = ReportConfig {
        recall_k: a.recall_k,
        family_weights: a.weights.as_slice().try_into().context("--weights needs 4 values")?,
    };
    let report = macro_report(&results, &cfg)?;
    print_json(&json!({ "weights": cfg.family_weights, "report": report }));
    Ok(ExitCode::SUCCESS)
}

fn chunks(a: ChunksArgs) -> Result<ExitCode> {
    for d in read_corpus_dir(&a.corpus, a.chunk_tokens)? {
        for c in &d.chunks {
            println!("{}", json!({ "item_id": c.chunk_id, "modality": "text", "content": c.text }));
        }
        for i in &d.images {
            println!("{}", json!({ "item_id": i.image_id, "modality": "image", "path": i.path, "content": i.caption }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(a: SynthArgs) -> Result<ExitCode> {
    let p = SynthParams {
        papers: a.papers,
        topics: a.topics,
        seed: a.seed,
        ..Default::default()
    };
    let g = hub_heavy_graph(&p);
    save_snapshot(&g, &a.out)?;
    print_json(&json!({ "params": p, "nodes": g.num_nodes(), "edges": g.num_edges() }));
    Ok(ExitCode::SUCCESS)
}
