//! Command-line front end. Exit codes: 0 success, 1 runtime failure,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tracelink_core::embedding::write_vectors;
use tracelink_core::pipeline::{embed_corpus, Embedder};
use tracelink_core::{RewardConfig, Tokenizer, TopK};

use crate::error::{Error, Result};
use crate::experiment::{self, grid_points, Backend, DatasetPaths, RunSpec};
use crate::io::{self, read_manifest, read_vectors, write_text};

#[derive(Debug, Parser)]
#[command(name = "tracelink", version, about = "Trace link recovery between source and target artifacts")]
pub struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true, conflicts_with = "quiet")]
    pub verbose: u8,
    /// Errors only on stderr.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, rerank and evaluate one configuration; writes links.tsv,
    /// report.json, rewards.csv and manifest.json.
    Trace(TraceArgs),
    /// Exhaustive (k1, k2) search; writes grid.csv, best.json and
    /// manifest.json.
    Grid(GridArgs),
    /// Compare rewarding on and off; writes with.json, without.json,
    /// stats.json and manifest.json.
    Ablate(AblateArgs),
    /// Write vector files for a corpus using a built-in text backend.
    Embed(EmbedArgs),
    /// Check a vector file against the artifacts of a directory.
    CheckVectors(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Tfidf,
    Lsi,
    Wordvec,
    Vectors,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Dataset manifest with `sources=`, `targets=` and `answers=` lines.
    /// Explicit path flags override its entries.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// Directory of source artifacts (`<id>.txt`).
    #[arg(long, value_name = "DIR")]
    pub sources: Option<PathBuf>,
    /// Directory of target artifacts (`<id>.txt`).
    #[arg(long, value_name = "DIR")]
    pub targets: Option<PathBuf>,
    /// Gold links, one `source<TAB>target` per line.
    #[arg(long, value_name = "FILE")]
    pub answers: Option<PathBuf>,
    /// Dataset label for reports [default: manifest or sources directory name].
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_enum, default_value_t = BackendKind::Tfidf)]
    pub backend: BackendKind,
    /// Source vectors for `--backend vectors`.
    #[arg(long, value_name = "FILE")]
    pub vectors_sa: Option<PathBuf>,
    /// Target vectors for `--backend vectors`.
    #[arg(long, value_name = "FILE")]
    pub vectors_ta: Option<PathBuf>,
    /// Word vector table for `--backend wordvec`.
    #[arg(long, value_name = "FILE")]
    pub wordvec: Option<PathBuf>,
    /// Latent dimensions for `--backend lsi` [default: min(100, docs - 1)].
    #[arg(long, value_name = "N")]
    pub rank: Option<usize>,
    /// Apply Porter stemming to tokens.
    #[arg(long)]
    pub stem: bool,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Fraction of each source list taken as high-probability targets.
    #[arg(long, default_value_t = 0.03)]
    pub k1: f64,
    /// Fraction of each target-target list eligible for a reward.
    #[arg(long, default_value_t = 0.08)]
    pub k2: f64,
    /// Links kept per source in outputs and P/R/F: a positive integer or `all`.
    #[arg(long, value_name = "N|all", default_value = "all", value_parser = parse_top_k)]
    pub top_k: TopK,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    /// Keep the similarity ordering.
    #[arg(long)]
    pub no_reward: bool,
    /// Also write sa_ta.csv, ta_ta.csv, counts.csv and the vector files.
    #[arg(long)]
    pub dump: bool,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Grid spacing on both axes; must divide 1.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long, value_name = "DIR")]
    pub sources: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub targets: PathBuf,
    #[arg(long, value_enum, default_value_t = BackendKind::Tfidf)]
    pub backend: BackendKind,
    /// Word vector table for `--backend wordvec`.
    #[arg(long, value_name = "FILE")]
    pub wordvec: Option<PathBuf>,
    /// Latent dimensions for `--backend lsi`.
    #[arg(long, value_name = "N")]
    pub rank: Option<usize>,
    #[arg(long)]
    pub stem: bool,
    #[arg(long, value_name = "FILE")]
    pub out_sa: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out_ta: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Vector file to check.
    pub file: PathBuf,
    /// Directory whose `<id>.txt` files must all have a vector.
    #[arg(long, value_name = "DIR")]
    pub ids_from: PathBuf,
}

fn parse_top_k(s: &str) -> std::result::Result<TopK, String> {
    s.parse().map_err(|e: tracelink_core::Error| e.to_string())
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn backend_of(d: &DatasetArgs) -> Result<Backend> {
    let stray = |flag: &str, wanted: &str| {
        usage(format!("{flag} only applies to --backend {wanted}"))
    };
    if d.backend != BackendKind::Lsi && d.rank.is_some() {
        return Err(stray("--rank", "lsi"));
    }
    if d.backend != BackendKind::Wordvec && d.wordvec.is_some() {
        return Err(stray("--wordvec", "wordvec"));
    }
    if d.backend != BackendKind::Vectors && (d.vectors_sa.is_some() || d.vectors_ta.is_some()) {
        let flag = if d.vectors_sa.is_some() { "--vectors-sa" } else { "--vectors-ta" };
        return Err(stray(flag, "vectors"));
    }
    if d.rank == Some(0) {
        return Err(usage("--rank must be positive"));
    }
    Ok(match d.backend {
        BackendKind::Tfidf => Backend::Tfidf,
        BackendKind::Lsi => Backend::Lsi { rank: d.rank },
        BackendKind::Wordvec => Backend::WordVec {
            table: d
                .wordvec
                .clone()
                .ok_or_else(|| usage("--backend wordvec requires --wordvec"))?,
        },
        BackendKind::Vectors => Backend::Vectors {
            sources: d
                .vectors_sa
                .clone()
                .ok_or_else(|| usage("--backend vectors requires --vectors-sa"))?,
            targets: d
                .vectors_ta
                .clone()
                .ok_or_else(|| usage("--backend vectors requires --vectors-ta"))?,
        },
    })
}

fn dir_name(p: &Path) -> Option<String> {
    p.file_stem().and_then(|s| s.to_str()).map(str::to_string)
}

/// Builds a run spec from dataset flags. Reading the manifest can fail at
/// runtime; everything else is a usage error.
pub fn spec_from(d: &DatasetArgs, out: &Path) -> Result<RunSpec> {
    let backend = backend_of(d)?;
    let manifest = d.manifest.as_deref().map(read_manifest).transpose()?;
    let pick = |flag: &Option<PathBuf>, from: Option<&PathBuf>, name: &str| {
        flag.clone()
            .or_else(|| from.cloned())
            .ok_or_else(|| usage(format!("--{name} is required unless --manifest provides it")))
    };
    let paths = DatasetPaths {
        sources: pick(&d.sources, manifest.as_ref().map(|m| &m.sources), "sources")?,
        targets: pick(&d.targets, manifest.as_ref().map(|m| &m.targets), "targets")?,
        answers: pick(&d.answers, manifest.as_ref().map(|m| &m.answers), "answers")?,
    };
    let dataset = d
        .dataset
        .clone()
        .or_else(|| d.manifest.as_deref().and_then(dir_name))
        .or_else(|| paths.sources.parent().and_then(dir_name))
        .unwrap_or_else(|| "dataset".to_string());
    let mut spec = RunSpec::new(dataset, paths, backend);
    spec.stem = d.stem;
    spec.out_dir = Some(out.to_path_buf());
    Ok(spec)
}

fn reward_from(t: &ThresholdArgs, enabled: bool) -> Result<RewardConfig> {
    let cfg = RewardConfig {
        k1: t.k1,
        k2: t.k2,
        rewarding_enabled: enabled,
        top_k: t.top_k,
        ..RewardConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn f(x: f64) -> String {
    format!("{x:.4}")
}

fn cmd_trace(a: &TraceArgs) -> Result<String> {
    let mut spec = spec_from(&a.data, &a.out)?;
    spec.reward = reward_from(&a.thresholds, !a.no_reward)?;
    spec.dump = a.dump;
    let out = experiment::run_pipeline(&spec)?;
    let r = &out.report;
    Ok(format!(
        "trace {}: map={} precision={} recall={} f1={} f2={} rewards={} -> {}",
        spec.dataset,
        f(r.map),
        f(r.precision),
        f(r.recall),
        f(r.f1),
        f(r.f2),
        out.trace.records.len(),
        a.out.display()
    ))
}

fn cmd_grid(a: &GridArgs) -> Result<String> {
    let n = grid_points(a.step).ok_or_else(|| usage(format!("--step must divide 1 evenly, got {}", a.step)))?;
    let spec = spec_from(&a.data, &a.out)?;
    let g = experiment::grid_search(&spec, a.step)?;
    Ok(format!(
        "grid {}: {} cells, best k1={} k2={} map={} -> {}",
        spec.dataset,
        n * n,
        g.best.k1,
        g.best.k2,
        f(g.best.map),
        a.out.display()
    ))
}

fn cmd_ablate(a: &AblateArgs) -> Result<String> {
    let mut spec = spec_from(&a.data, &a.out)?;
    spec.reward = reward_from(&a.thresholds, true)?;
    let ab = experiment::ablation(&spec)?;
    let p = match &ab.stats.wilcoxon {
        Ok(w) => format!("{:.4}", w.p_value),
        Err(_) => "n/a".to_string(),
    };
    Ok(format!(
        "ablate {}: map with={} without={} p={} delta={} ({}) -> {}",
        spec.dataset,
        f(ab.with.report.map),
        f(ab.without.report.map),
        p,
        f(ab.stats.cliffs.delta),
        ab.stats.cliffs.magnitude.as_str(),
        a.out.display()
    ))
}

fn cmd_embed(a: &EmbedArgs) -> Result<String> {
    let data = DatasetArgs {
        manifest: None,
        sources: Some(a.sources.clone()),
        targets: Some(a.targets.clone()),
        answers: None,
        dataset: None,
        backend: a.backend,
        vectors_sa: None,
        vectors_ta: None,
        wordvec: a.wordvec.clone(),
        rank: a.rank,
        stem: a.stem,
    };
    if a.backend == BackendKind::Vectors {
        return Err(usage("embed needs a text backend: tfidf, lsi or wordvec"));
    }
    let backend = backend_of(&data)?;
    let sources = io::load_artifacts(&a.sources, tracelink_core::Role::Source)?;
    let targets = io::load_artifacts(&a.targets, tracelink_core::Role::Target)?;
    let corpus = tracelink_core::Corpus::new(sources, targets, Default::default())?;
    let tok = Tokenizer { stem: a.stem };
    let table;
    let embedder = match &backend {
        Backend::Tfidf => Embedder::Tfidf,
        Backend::Lsi { rank } => Embedder::Lsi { rank: *rank },
        Backend::WordVec { table: path } => {
            table = io::read_wordvec_table(path)?;
            Embedder::WordVec(&table)
        }
        Backend::Vectors { .. } => unreachable!("rejected above"),
    };
    let emb = embed_corpus(&corpus, embedder, &tok)?;
    write_text(&a.out_sa, &write_vectors(&emb.sources))?;
    write_text(&a.out_ta, &write_vectors(&emb.targets))?;
    Ok(format!(
        "embed: {} source and {} target vectors, dim {}",
        emb.sources.len(),
        emb.targets.len(),
        emb.sources.dim()
    ))
}

fn cmd_check(a: &CheckArgs) -> Result<String> {
    let arts = io::load_artifacts(&a.ids_from, tracelink_core::Role::Source)?;
    let ids: Vec<String> = arts.into_iter().map(|a| a.id).collect();
    let m = read_vectors(&a.file, &ids)?;
    Ok(format!("ok: {} vectors, dim {}", m.len(), m.dim()))
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = match (quiet, verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format(|buf, rec| writeln!(buf, "{}: {}", rec.level().as_str().to_lowercase(), rec.args()))
        .try_init();
    log::set_max_level(level);
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    init_logging(cli.verbose, cli.quiet);
    let result = match &cli.command {
        Command::Trace(a) => cmd_trace(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Embed(a) => cmd_embed(a),
        Command::CheckVectors(a) => cmd_check(a),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(Error::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            match e.stage() {
                Some(_) => eprintln!("error: stage {e}"),
                None => eprintln!("error: {e}"),
            }
            1
        }
    }
}
