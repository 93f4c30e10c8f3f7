//! Reading datasets and vector files from disk.

use std::fs;
use std::path::{Path, PathBuf};

use tracelink_core::corpus::{parse_answers, Artifact, Corpus, Role};
use tracelink_core::embedding::{load_vectors, parse_wordvec_table, EmbeddingMatrix, WordVectorTable};

use crate::error::{Error, Result};

/// Reads a file as strict UTF-8.
pub fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    String::from_utf8(bytes).map_err(|_| Error::InvalidUtf8(path.to_path_buf()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Every `<id>.txt` file in `dir`, as artifacts of `role`. Other files and
/// subdirectories are ignored.
pub fn load_artifacts(dir: &Path, role: Role) -> Result<Vec<Artifact>> {
    if !dir.is_dir() {
        return Err(Error::MissingFile(dir.to_path_buf()));
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::InvalidUtf8(path.clone()))?
                .to_string();
            let text = read_text(&path)?;
            Artifact::new(id, role, text).map_err(|e| Error::in_file(&path, e))
        })
        .collect()
}

/// Loads and validates a dataset. The corpus comes back in canonical order.
pub fn load_corpus(source_dir: &Path, target_dir: &Path, answers_file: &Path) -> Result<Corpus> {
    let sources = load_artifacts(source_dir, Role::Source)?;
    let targets = load_artifacts(target_dir, Role::Target)?;
    let answers = parse_answers(&read_text(answers_file)?).map_err(|e| Error::in_file(answers_file, e))?;
    Ok(Corpus::new(sources, targets, answers)?)
}

/// Paths named by a dataset manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub sources: PathBuf,
    pub targets: PathBuf,
    pub answers: PathBuf,
}

/// Parses a `key=value` dataset manifest with keys `sources`, `targets` and
/// `answers`. Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = read_text(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let err = |line: usize, msg: String| Error::Manifest {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let (mut sources, mut targets, mut answers) = (None, None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(i + 1, format!("expected key=value, got {line:?}")))?;
        let value = value.trim();
        if value.is_empty() {
            return Err(err(i + 1, format!("empty value for {key}")));
        }
        let slot = match key.trim() {
            "sources" => &mut sources,
            "targets" => &mut targets,
            "answers" => &mut answers,
            other => return Err(err(i + 1, format!("unknown key {other:?}"))),
        };
        if slot.replace(base.join(value)).is_some() {
            return Err(err(i + 1, format!("duplicate key {}", key.trim())));
        }
    }
    let need = |v: Option<PathBuf>, key: &str| v.ok_or_else(|| err(0, format!("missing key {key}")));
    Ok(DatasetManifest {
        sources: need(sources, "sources")?,
        targets: need(targets, "targets")?,
        answers: need(answers, "answers")?,
    })
}

/// Reads a vector file and returns rows for `expected_ids` in that order.
pub fn read_vectors(path: &Path, expected_ids: &[String]) -> Result<EmbeddingMatrix> {
    load_vectors(&read_text(path)?, expected_ids).map_err(|e| Error::in_file(path, e))
}

pub fn read_wordvec_table(path: &Path) -> Result<WordVectorTable> {
    parse_wordvec_table(&read_text(path)?).map_err(|e| Error::in_file(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) {
        fs::write(dir.join(name), text).unwrap();
    }

    #[test]
    fn manifest_parsing() {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("dataset.txt");
        write(tmp.path(), "dataset.txt", "# ds\nsources=uc\ntargets = tc\nanswers=links.tsv\n");
        let m = read_manifest(&p).unwrap();
        assert_eq!(m.sources, tmp.path().join("uc"));
        assert_eq!(m.answers, tmp.path().join("links.tsv"));

        write(tmp.path(), "dataset.txt", "sources=uc\ntargets=tc\n");
        assert!(matches!(read_manifest(&p), Err(Error::Manifest { .. })));
        write(tmp.path(), "dataset.txt", "sources=uc\ntargets=tc\nanswers=a\nname=x\n");
        assert!(matches!(read_manifest(&p), Err(Error::Manifest { line: 4, .. })));
        write(tmp.path(), "dataset.txt", "sources=uc\nsources=tc\n");
        assert!(matches!(read_manifest(&p), Err(Error::Manifest { line: 2, .. })));
    }

    #[test]
    fn invalid_utf8_is_rejected() {
        let tmp = tempfile::tempdir().unwrap();
        fs::write(tmp.path().join("A1.txt"), [b'o', b'k', 0xff]).unwrap();
        assert!(matches!(
            load_artifacts(tmp.path(), Role::Source),
            Err(Error::InvalidUtf8(_))
        ));
    }

    #[test]
    fn non_txt_files_are_ignored() {
        let tmp = tempfile::tempdir().unwrap();
        write(tmp.path(), "A1.txt", "alpha");
        write(tmp.path(), "notes.md", "ignored");
        fs::create_dir(tmp.path().join("sub.txt")).unwrap();
        let arts = load_artifacts(tmp.path(), Role::Target).unwrap();
        assert_eq!(arts.len(), 1);
        assert_eq!(arts[0].id, "A1");
    }
}
