//! File formats, experiment harness and command-line front end for the
//! [`tracelink_core`] engine.
//!
//! The core crate does all the arithmetic; this crate reads artifact
//! directories, answer sets and vector files, runs single configurations,
//! grid searches and ablations, and writes TSV/CSV/JSON outputs.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod io;
pub mod report;

pub use error::{Error, Result};
pub use experiment::{ablation, grid_search, prepare, run_pipeline, Backend, DatasetPaths, RunSpec};
pub use io::load_corpus;

/// Name and version written into every run manifest.
pub const ENGINE_VERSION: &str = concat!("tracelink ", env!("CARGO_PKG_VERSION"));
