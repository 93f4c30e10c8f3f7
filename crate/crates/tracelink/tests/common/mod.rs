#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

pub struct Dataset {
    pub root: PathBuf,
    pub sources: PathBuf,
    pub targets: PathBuf,
    pub answers: PathBuf,
}

impl Dataset {
    pub fn args(&self) -> Vec<String> {
        vec![
            "--sources".into(),
            self.sources.display().to_string(),
            "--targets".into(),
            self.targets.display().to_string(),
            "--answers".into(),
            self.answers.display().to_string(),
        ]
    }
}

pub fn write_dataset(root: &Path, sources: &[(&str, &str)], targets: &[(&str, &str)], links: &[(&str, &str)]) -> Dataset {
    let ds = Dataset {
        root: root.to_path_buf(),
        sources: root.join("sources"),
        targets: root.join("targets"),
        answers: root.join("answers.tsv"),
    };
    fs::create_dir_all(&ds.sources).unwrap();
    fs::create_dir_all(&ds.targets).unwrap();
    for (id, text) in sources {
        fs::write(ds.sources.join(format!("{id}.txt")), text).unwrap();
    }
    for (id, text) in targets {
        fs::write(ds.targets.join(format!("{id}.txt")), text).unwrap();
    }
    let mut tsv = String::new();
    for (s, t) in links {
        tsv.push_str(&format!("{s}\t{t}\n"));
    }
    fs::write(&ds.answers, tsv).unwrap();
    ds
}

/// Two use cases, three test cases.
pub fn small_fixture(root: &Path) -> Dataset {
    write_dataset(
        root,
        &[("UC1", "patient login password"), ("UC2", "print invoice report")],
        &[
            ("TC1", "login with password"),
            ("TC2", "invoice report printed"),
            ("TC3", "patient record"),
        ],
        &[("UC1", "TC1"), ("UC1", "TC3"), ("UC2", "TC2")],
    )
}

/// One source and four targets with precomputed vectors. The source's top
/// target A has gold target B as its nearest neighbour, which otherwise
/// ranks last.
pub fn promotion_fixture(root: &Path) -> (Dataset, PathBuf, PathBuf) {
    let ds = write_dataset(
        root,
        &[("UC1", "source")],
        &[("A", "a"), ("B", "b"), ("C", "c"), ("D", "d")],
        &[("UC1", "B")],
    );
    let sa = root.join("sa.vec");
    let ta = root.join("ta.vec");
    fs::write(&sa, "VEC 1 1 3\nUC1\t1 0 0\n").unwrap();
    fs::write(&ta, "VEC 1 4 3\nA\t1 1 0\nB\t0 1 0\nC\t1 0 1.5\nD\t1 0 -2\n").unwrap();
    (ds, sa, ta)
}

pub fn run(args: &[String]) -> i32 {
    let mut full = vec!["tracelink".to_string()];
    full.extend(args.iter().cloned());
    tracelink::cli::run(full)
}

pub fn strs(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

/// Every file under `dir` with its bytes, sorted by name.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}
