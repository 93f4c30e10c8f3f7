//! Single runs, grid search and ablation over a dataset on disk.

use std::path::PathBuf;

use rayon::prelude::*;
use tracelink_core::embedding::{LsiInfo, Tokenizer};
use tracelink_core::evaluation::evaluate;
use tracelink_core::pipeline::{embed_corpus, CorpusEmbedding, Embedder, Outcome, Ranking};
use tracelink_core::stats::{compare, StatResult};
use tracelink_core::{Corpus, RewardConfig};

use crate::error::{Error, Result, Stage, StageExt};
use crate::io::{load_corpus, read_vectors, read_wordvec_table};
use crate::report;

/// How artifacts are turned into vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Tfidf,
    /// `None` uses the default rank for the corpus size.
    Lsi { rank: Option<usize> },
    WordVec { table: PathBuf },
    Vectors { sources: PathBuf, targets: PathBuf },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Tfidf => "tfidf",
            Backend::Lsi { .. } => "lsi",
            Backend::WordVec { .. } => "wordvec",
            Backend::Vectors { .. } => "vectors",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPaths {
    pub sources: PathBuf,
    pub targets: PathBuf,
    pub answers: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    /// Label written into reports.
    pub dataset: String,
    pub paths: DatasetPaths,
    pub backend: Backend,
    pub stem: bool,
    pub reward: RewardConfig,
    /// Where outputs go; `None` computes without writing.
    pub out_dir: Option<PathBuf>,
    /// Also write similarity matrices, counts and vectors.
    pub dump: bool,
}

impl RunSpec {
    pub fn new(dataset: impl Into<String>, paths: DatasetPaths, backend: Backend) -> Self {
        Self {
            dataset: dataset.into(),
            paths,
            backend,
            stem: false,
            reward: RewardConfig::default(),
            out_dir: None,
            dump: false,
        }
    }

    pub fn tokenizer(&self) -> Tokenizer {
        Tokenizer { stem: self.stem }
    }
}

/// A loaded corpus with its embeddings and similarity lists, shared by
/// every reward configuration.
pub struct Prepared {
    pub corpus: Corpus,
    pub embedding: CorpusEmbedding,
    pub ranking: Ranking,
}

impl Prepared {
    pub fn lsi(&self) -> Option<&LsiInfo> {
        self.embedding.lsi.as_ref()
    }

    /// Reranks and evaluates one configuration.
    pub fn outcome(&self, cfg: &RewardConfig) -> Result<Outcome> {
        let (lists, trace) = self.ranking.rerank(cfg).at(Stage::Rerank)?;
        let report = evaluate(&lists, self.corpus.answers(), cfg.top_k).at(Stage::Evaluate)?;
        Ok(Outcome { lists, trace, report })
    }
}

/// Loads the corpus, embeds it once and builds the similarity lists.
pub fn prepare(spec: &RunSpec) -> Result<Prepared> {
    let p = &spec.paths;
    let corpus = load_corpus(&p.sources, &p.targets, &p.answers).at(Stage::LoadCorpus)?;
    log::info!(
        "loaded {}: {} sources, {} targets, {} links",
        spec.dataset,
        corpus.sources().len(),
        corpus.targets().len(),
        corpus.answers().len()
    );
    let embedding = embed(spec, &corpus).at(Stage::Embed)?;
    if let Some(info) = &embedding.lsi {
        if info.clamped() {
            log::warn!(
                "lsi rank {} clamped to {}",
                info.requested_rank,
                info.effective_rank
            );
        }
    }
    let ranking = Ranking::new(&embedding.sources, &embedding.targets).at(Stage::Similarity)?;
    Ok(Prepared {
        corpus,
        embedding,
        ranking,
    })
}

fn embed(spec: &RunSpec, corpus: &Corpus) -> Result<CorpusEmbedding> {
    let tok = spec.tokenizer();
    let emb = match &spec.backend {
        Backend::Tfidf => embed_corpus(corpus, Embedder::Tfidf, &tok)?,
        Backend::Lsi { rank } => embed_corpus(corpus, Embedder::Lsi { rank: *rank }, &tok)?,
        Backend::WordVec { table } => {
            let table = read_wordvec_table(table)?;
            embed_corpus(corpus, Embedder::WordVec(&table), &tok)?
        }
        Backend::Vectors { sources, targets } => {
            let sources = read_vectors(sources, &corpus.source_ids())?;
            let targets = read_vectors(targets, &corpus.target_ids())?;
            embed_corpus(corpus, Embedder::Precomputed { sources, targets }, &tok)?
        }
    };
    Ok(emb)
}

/// Runs one configuration end to end and writes `links.tsv`,
/// `report.json`, `rewards.csv` and `manifest.json` when an output
/// directory is set.
pub fn run_pipeline(spec: &RunSpec) -> Result<Outcome> {
    let prepared = prepare(spec)?;
    let outcome = prepared.outcome(&spec.reward)?;
    if let Some(dir) = &spec.out_dir {
        report::write_trace_outputs(dir, spec, &prepared, &outcome).at(Stage::Write)?;
    }
    Ok(outcome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub k1: f64,
    pub k2: f64,
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub step: f64,
    /// Ordered by k1, then k2.
    pub cells: Vec<GridCell>,
    pub best: GridCell,
}

/// Number of grid points per axis, if `step` divides 1.
pub fn grid_points(step: f64) -> Option<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return None;
    }
    let n = (1.0 / step).round();
    ((n * step - 1.0).abs() <= 1e-9).then_some(n as usize)
}

/// MAP of every `(k1, k2)` in `{step, 2 step, ..., 1}^2`, on the full
/// reordered lists. The best cell is the first maximum in k1-then-k2 order.
pub fn grid_on(prepared: &Prepared, base: &RewardConfig, step: f64) -> Result<GridResult> {
    let n = grid_points(step)
        .ok_or_else(|| Error::Usage(format!("step must divide 1 evenly, got {step}")))?;
    let axis: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let columns: Vec<Vec<GridCell>> = axis
        .par_iter()
        .map(|&k2| {
            let counts = prepared.ranking.count_table(&RewardConfig { k2, ..*base });
            axis.iter()
                .map(|&k1| {
                    let cfg = RewardConfig { k1, k2, ..*base };
                    let map = prepared.ranking.map(&prepared.corpus, &cfg, &counts)?;
                    Ok(GridCell { k1, k2, map })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()
        .at(Stage::Rerank)?;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        cells.extend(columns.iter().map(|col| col[i]));
    }
    let mut best = cells[0];
    for c in &cells[1..] {
        if c.map > best.map {
            best = *c;
        }
    }
    Ok(GridResult { step, cells, best })
}

/// Embeds once, evaluates every grid cell and writes `grid.csv`,
/// `best.json` and `manifest.json` when an output directory is set.
pub fn grid_search(spec: &RunSpec, step: f64) -> Result<GridResult> {
    if grid_points(step).is_none() {
        return Err(Error::Usage(format!("step must divide 1 evenly, got {step}")));
    }
    let prepared = prepare(spec)?;
    let grid = grid_on(&prepared, &spec.reward, step)?;
    if let Some(dir) = &spec.out_dir {
        report::write_grid_outputs(dir, spec, &grid).at(Stage::Write)?;
    }
    Ok(grid)
}

pub struct Ablation {
    pub with: Outcome,
    pub without: Outcome,
    /// Paired comparison of the two precision-at-recall curves.
    pub stats: StatResult,
}

pub fn ablation_on(prepared: &Prepared, cfg: &RewardConfig) -> Result<Ablation> {
    let with = prepared.outcome(&RewardConfig {
        rewarding_enabled: true,
        ..*cfg
    })?;
    let without = prepared.outcome(&cfg.disabled())?;
    let stats = compare(&with.report.pr_curve, &without.report.pr_curve).at(Stage::Evaluate)?;
    Ok(Ablation { with, without, stats })
}

/// Runs with and without rewarding on the same embeddings and writes
/// `with.json`, `without.json`, `stats.json` and `manifest.json` when an
/// output directory is set.
pub fn ablation(spec: &RunSpec) -> Result<Ablation> {
    let prepared = prepare(spec)?;
    let result = ablation_on(&prepared, &spec.reward)?;
    if let Some(dir) = &spec.out_dir {
        report::write_ablation_outputs(dir, spec, &result).at(Stage::Write)?;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_point_counts() {
        assert_eq!(grid_points(0.25), Some(4));
        assert_eq!(grid_points(0.01), Some(100));
        assert_eq!(grid_points(0.1), Some(10));
        assert_eq!(grid_points(1.0), Some(1));
        assert_eq!(grid_points(0.3), None);
        assert_eq!(grid_points(0.0), None);
        assert_eq!(grid_points(-0.5), None);
        assert_eq!(grid_points(1.5), None);
        assert_eq!(grid_points(f64::NAN), None);
    }
}
