//! In-memory pipeline: embed a corpus, rank, reward, evaluate.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{Artifact, Corpus};
use crate::embedding::{
    default_lsi_rank, embed_lsi, embed_tfidf, embed_wordvec, EmbeddingMatrix, LsiInfo, Tokenizer,
    WordVectorTable,
};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, mean_average_precision, EvalReport};
use crate::rerank::{CountTable, RewardConfig, RewardTrace, TargetGraph};
use crate::similarity::{sa_ta_lists, sa_ta_matrix, ta_ta_lists, RankedList, SimilarityMatrix};

pub enum Embedder<'a> {
    Tfidf,
    /// `None` picks [`default_lsi_rank`].
    Lsi { rank: Option<usize> },
    WordVec(&'a WordVectorTable),
    /// Vectors computed elsewhere, already in canonical order.
    Precomputed {
        sources: EmbeddingMatrix,
        targets: EmbeddingMatrix,
    },
}

pub struct CorpusEmbedding {
    pub sources: EmbeddingMatrix,
    pub targets: EmbeddingMatrix,
    pub lsi: Option<LsiInfo>,
}

/// Embeds sources and targets in one shared space. Text backends build
/// their vocabulary over the union of both sides.
pub fn embed_corpus(corpus: &Corpus, embedder: Embedder<'_>, tokenizer: &Tokenizer) -> Result<CorpusEmbedding> {
    let all: Vec<Artifact> = corpus.all_artifacts().cloned().collect();
    let n_sources = corpus.sources().len();
    let (joint, lsi) = match embedder {
        Embedder::Tfidf => (embed_tfidf(&all, tokenizer).0, None),
        Embedder::Lsi { rank } => {
            let rank = rank.unwrap_or_else(|| default_lsi_rank(all.len()));
            let (m, info) = embed_lsi(&all, rank, tokenizer)?;
            (m, Some(info))
        }
        Embedder::WordVec(table) => (embed_wordvec(&all, table, tokenizer), None),
        Embedder::Precomputed { sources, targets } => {
            if sources.dim() != targets.dim() {
                return Err(Error::DimensionMismatch {
                    expected: sources.dim(),
                    found: targets.dim(),
                });
            }
            let sources = sources.select(&corpus.source_ids())?;
            let targets = targets.select(&corpus.target_ids())?;
            return Ok(CorpusEmbedding {
                sources,
                targets,
                lsi: None,
            });
        }
    };
    let (sources, targets) = joint.split_at(n_sources);
    Ok(CorpusEmbedding {
        sources,
        targets,
        lsi,
    })
}

/// Similarity structures of one corpus, computed once and reused for every
/// reward configuration.
#[derive(Debug, Clone)]
pub struct Ranking {
    pub sa_ta: SimilarityMatrix,
    pub sa_lists: BTreeMap<String, RankedList>,
    pub ta_lists: BTreeMap<String, RankedList>,
    graph: TargetGraph,
}

/// Reordered lists, the reward trace and the metrics of one configuration.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub lists: BTreeMap<String, RankedList>,
    pub trace: RewardTrace,
    pub report: EvalReport,
}

impl Ranking {
    pub fn new(sources: &EmbeddingMatrix, targets: &EmbeddingMatrix) -> Result<Self> {
        let sa_ta = sa_ta_matrix(sources, targets)?;
        let sa_lists = sa_ta_lists(&sa_ta);
        let ta_lists = ta_ta_lists(targets);
        let graph = TargetGraph::new(&ta_lists)?;
        Ok(Self {
            sa_ta,
            sa_lists,
            ta_lists,
            graph,
        })
    }

    pub fn count_table(&self, cfg: &RewardConfig) -> CountTable {
        self.graph.count_table(cfg.k2)
    }

    pub fn rerank(&self, cfg: &RewardConfig) -> Result<(BTreeMap<String, RankedList>, RewardTrace)> {
        let counts = self.count_table(cfg);
        let mut trace = RewardTrace::default();
        let mut lists = BTreeMap::new();
        for (id, list) in &self.sa_lists {
            let (reordered, t) = self.graph.rerank(list, &counts, cfg)?;
            trace.extend(t);
            lists.insert(id.clone(), reordered);
        }
        Ok((lists, trace))
    }

    pub fn run(&self, corpus: &Corpus, cfg: &RewardConfig) -> Result<Outcome> {
        let (lists, trace) = self.rerank(cfg)?;
        let report = evaluate(&lists, corpus.answers(), cfg.top_k)?;
        Ok(Outcome {
            lists,
            trace,
            report,
        })
    }

    /// MAP of the full reordered lists, without trace or report.
    pub fn map(&self, corpus: &Corpus, cfg: &RewardConfig, counts: &CountTable) -> Result<f64> {
        let mut lists = BTreeMap::new();
        for (id, list) in &self.sa_lists {
            lists.insert(id.clone(), self.graph.rerank_untraced(list, counts, cfg)?);
        }
        mean_average_precision(&lists, corpus.answers())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_answers, Role};
    use alloc::vec;

    fn corpus() -> Corpus {
        let a = |id: &str, role, text: &str| Artifact::new(id, role, text).unwrap();
        Corpus::new(
            vec![
                a("UC1", Role::Source, "patient login password"),
                a("UC2", Role::Source, "print invoice report"),
            ],
            vec![
                a("TC1", Role::Target, "login with password"),
                a("TC2", Role::Target, "invoice report printed"),
                a("TC3", Role::Target, "patient record"),
            ],
            parse_answers("UC1\tTC1\nUC1\tTC3\nUC2\tTC2\n").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn backends_share_dimensions() {
        let c = corpus();
        for e in [Embedder::Tfidf, Embedder::Lsi { rank: None }] {
            let emb = embed_corpus(&c, e, &Tokenizer::default()).unwrap();
            assert_eq!(emb.sources.len(), 2);
            assert_eq!(emb.targets.len(), 3);
            assert_eq!(emb.sources.dim(), emb.targets.dim());
            assert_eq!(emb.targets.ids(), &c.target_ids()[..]);
        }
    }

    #[test]
    fn precomputed_requires_all_ids() {
        let c = corpus();
        let m = |ids: &[&str], dim| {
            EmbeddingMatrix::new(ids.iter().map(|s| String::from(*s)).collect(), dim, vec![1.0; ids.len() * dim])
                .unwrap()
        };
        let ok = embed_corpus(
            &c,
            Embedder::Precomputed {
                sources: m(&["UC2", "UC1", "UC9"], 2),
                targets: m(&["TC3", "TC1", "TC2"], 2),
            },
            &Tokenizer::default(),
        )
        .unwrap();
        assert_eq!(ok.sources.ids(), &c.source_ids()[..]);
        let missing = embed_corpus(
            &c,
            Embedder::Precomputed {
                sources: m(&["UC1"], 2),
                targets: m(&["TC1", "TC2", "TC3"], 2),
            },
            &Tokenizer::default(),
        );
        assert!(matches!(missing, Err(Error::MissingVectorForId(id)) if id == "UC2"));
        let dims = embed_corpus(
            &c,
            Embedder::Precomputed {
                sources: m(&["UC1", "UC2"], 2),
                targets: m(&["TC1", "TC2", "TC3"], 3),
            },
            &Tokenizer::default(),
        );
        assert!(matches!(dims, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn map_shortcut_matches_full_run() {
        let c = corpus();
        let emb = embed_corpus(&c, Embedder::Tfidf, &Tokenizer::default()).unwrap();
        let ranking = Ranking::new(&emb.sources, &emb.targets).unwrap();
        for (k1, k2) in [(0.3, 0.5), (1.0, 1.0), (0.01, 0.01)] {
            let cfg = RewardConfig::new(k1, k2).unwrap();
            let full = ranking.run(&c, &cfg).unwrap();
            let quick = ranking.map(&c, &cfg, &ranking.count_table(&cfg)).unwrap();
            assert_eq!(full.report.map.to_bits(), quick.to_bits());
        }
    }
}
