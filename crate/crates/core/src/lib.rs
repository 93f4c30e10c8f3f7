//! Core of the tracelink engine.
//!
//! Everything in this crate is a pure function over in-memory data: artifact
//! sets and gold links, document embeddings (TF-IDF, LSI, mean-pooled word
//! vectors, or externally computed vectors), cosine similarity lists, the
//! specificity-weighted rewarding reranker, and the IR metrics and
//! significance tests used to evaluate link lists.
//!
//! The crate is `no_std` and only needs `alloc`. File IO, the CLI and the
//! experiment harness live in the `tracelink` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod fmt;
pub mod pipeline;
pub mod rerank;
pub mod similarity;
pub mod stats;

pub use corpus::{AnswerSet, Artifact, Corpus, Role};
pub use embedding::{EmbeddingMatrix, Tokenizer, Vocabulary, WordVectorTable};
pub use error::{Error, Result};
pub use evaluation::EvalReport;
pub use rerank::{CountTable, RewardConfig, RewardTrace, TopK};
pub use similarity::{RankedList, SimilarityMatrix};
