use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("missing file or directory {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: not valid UTF-8", .0.display())]
    InvalidUtf8(PathBuf),
    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: tracelink_core::Error,
    },
    #[error(transparent)]
    Core(#[from] tracelink_core::Error),
    #[error("{}: line {line}: {msg}", path.display())]
    Manifest { path: PathBuf, line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

/// Pipeline step an error came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    LoadCorpus,
    Embed,
    Similarity,
    Rerank,
    Evaluate,
    Write,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::LoadCorpus => "load-corpus",
            Stage::Embed => "embed",
            Stage::Similarity => "similarity",
            Stage::Rerank => "rerank",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        })
    }
}

impl Error {
    pub fn in_file(path: impl Into<PathBuf>, source: tracelink_core::Error) -> Self {
        Error::InFile {
            path: path.into(),
            source,
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T, E: Into<Error>> StageExt<T> for std::result::Result<T, E> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|e| match e.into() {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}
