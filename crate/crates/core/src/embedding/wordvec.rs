use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{EmbeddingMatrix, Tokenizer};
use crate::corpus::Artifact;
use crate::error::{Error, Result};

/// Pretrained word vectors of one fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorTable {
    dim: usize,
    index: BTreeMap<String, usize>,
    data: Vec<f64>,
}

impl WordVectorTable {
    pub fn new<I: IntoIterator<Item = (String, Vec<f64>)>>(entries: I) -> Result<Self> {
        let mut dim = None;
        let mut index = BTreeMap::new();
        let mut data = Vec::new();
        for (word, v) in entries {
            let d = *dim.get_or_insert(v.len());
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(word));
            }
            if index.contains_key(&word) {
                return Err(Error::Format {
                    line: 0,
                    msg: format!("duplicate word {word:?}"),
                });
            }
            index.insert(word, index.len());
            data.extend(v);
        }
        let dim = dim.unwrap_or(0);
        if dim == 0 {
            return Err(Error::Config("word vector table is empty".into()));
        }
        Ok(Self { dim, index, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }
}

/// Parses the text word-vector format: an optional `<count> <dim>` header,
/// then `word v1 ... vdim` per line.
pub fn parse_wordvec_table(text: &str) -> Result<WordVectorTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let mut header: Option<(usize, usize, usize)> = None;
    if let Some(&(line_no, first)) = lines.peek() {
        let f: Vec<&str> = first.split_whitespace().collect();
        if let [c, d] = f[..] {
            if let (Ok(c), Ok(d)) = (c.parse::<usize>(), d.parse::<usize>()) {
                header = Some((line_no, c, d));
                lines.next();
            }
        }
    }

    let mut dim = header.map(|(_, _, d)| d);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (line_no, line) in lines {
        let mut fields = line.split_whitespace();
        let word = fields.next().expect("non-blank line").to_string();
        let mut v = Vec::new();
        for tok in fields {
            let x: f64 = tok.parse().map_err(|_| Error::Format {
                line: line_no,
                msg: format!("bad number {tok:?}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Format {
                    line: line_no,
                    msg: format!("non-finite value {tok:?}"),
                });
            }
            v.push(x);
        }
        let d = *dim.get_or_insert(v.len());
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if let Some(prev) = seen.insert(word.clone(), line_no) {
            return Err(Error::Format {
                line: line_no,
                msg: format!("duplicate word {word:?} (first on line {prev})"),
            });
        }
        entries.push((word, v));
    }
    if let Some((line, count, _)) = header {
        if count != entries.len() {
            return Err(Error::Format {
                line,
                msg: format!("header declares {count} words, file has {}", entries.len()),
            });
        }
    }
    if dim == Some(0) {
        return Err(Error::Format {
            line: 1,
            msg: "vectors have no components".into(),
        });
    }
    WordVectorTable::new(entries)
}

/// Mean of the table vectors of every token found in the table, counting
/// repeats. Unknown tokens are skipped; a document with no known token gets
/// a zero row.
pub fn embed_wordvec(
    artifacts: &[Artifact],
    table: &WordVectorTable,
    tokenizer: &Tokenizer,
) -> EmbeddingMatrix {
    let dim = table.dim();
    let mut data = vec![0.0; artifacts.len() * dim];
    for (d, a) in artifacts.iter().enumerate() {
        let row = &mut data[d * dim..(d + 1) * dim];
        let mut hits = 0usize;
        for tok in tokenizer.tokenize(&a.text) {
            if let Some(v) = table.get(&tok) {
                hits += 1;
                for (acc, x) in row.iter_mut().zip(v) {
                    *acc += x;
                }
            }
        }
        if hits > 0 {
            let n = hits as f64;
            row.iter_mut().for_each(|x| *x /= n);
        }
    }
    let ids = artifacts.iter().map(|a| a.id.clone()).collect();
    EmbeddingMatrix::new(ids, dim, data).expect("means of finite vectors are finite")
}
