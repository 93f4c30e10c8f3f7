//! Document embeddings.
//!
//! Four interchangeable backends produce an [`EmbeddingMatrix`] for a list of
//! artifacts: TF-IDF ([`embed_tfidf`]), LSI ([`embed_lsi`]), mean-pooled word
//! vectors ([`embed_wordvec`]) and precomputed vectors read from the text
//! vector format ([`parse_vectors`]).

mod lsi;
mod stem;
mod svd;
mod tfidf;
mod tokenize;
mod wordvec;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};

pub use lsi::{default_lsi_rank, embed_lsi, lsi_project, LsiInfo};
pub use stem::porter_stem;
pub use tfidf::{embed_tfidf, Vocabulary};
pub use tokenize::{is_stopword, tokenize, Tokenizer};
pub use wordvec::{embed_wordvec, parse_wordvec_table, WordVectorTable};

/// Dense row-major matrix with one row per artifact id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    ids: Vec<String>,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: ids.len() * dim,
                found: data.len(),
            });
        }
        for (i, row) in data.chunks(dim).enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(ids[i].clone()));
            }
        }
        Ok(Self { ids, dim, data })
    }

    pub fn from_rows(ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(ids, dim, data)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.dim)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Rows for `ids`, in that order. Ids not listed are dropped.
    pub fn select<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let index: BTreeMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for id in ids {
            let id = id.as_ref();
            let i = *index
                .get(id)
                .ok_or_else(|| Error::MissingVectorForId(id.to_string()))?;
            data.extend_from_slice(self.row(i));
        }
        Ok(Self {
            ids: ids.iter().map(|s| s.as_ref().to_string()).collect(),
            dim: self.dim,
            data,
        })
    }

    /// Splits into the first `n` rows and the rest.
    pub fn split_at(&self, n: usize) -> (Self, Self) {
        let (a, b) = self.data.split_at(n * self.dim);
        (
            Self {
                ids: self.ids[..n].to_vec(),
                dim: self.dim,
                data: a.to_vec(),
            },
            Self {
                ids: self.ids[n..].to_vec(),
                dim: self.dim,
                data: b.to_vec(),
            },
        )
    }
}

/// Parses the vector file format: a `VEC 1 <count> <dim>` header line, then
/// one `<id><TAB>v1 v2 ... vdim` line per artifact. Rows keep file order.
pub fn parse_vectors(text: &str) -> Result<EmbeddingMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty());
    let fmt_err = |line: usize, msg: String| Error::Format { line, msg };

    let (hline, header) = lines
        .next()
        .ok_or_else(|| fmt_err(1, "missing `VEC 1 <count> <dim>` header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "VEC" {
        return Err(fmt_err(hline, format!("bad header {header:?}")));
    }
    if fields[1] != "1" {
        return Err(fmt_err(hline, format!("unsupported version {}", fields[1])));
    }
    let count: usize = fields[2]
        .parse()
        .map_err(|_| fmt_err(hline, format!("bad count {:?}", fields[2])))?;
    let dim: usize = fields[3]
        .parse()
        .map_err(|_| fmt_err(hline, format!("bad dim {:?}", fields[3])))?;
    if dim == 0 {
        return Err(fmt_err(hline, "dim must be positive".into()));
    }

    let mut ids = Vec::with_capacity(count);
    let mut seen = BTreeMap::new();
    let mut data = Vec::with_capacity(count * dim);
    for (line_no, line) in lines {
        let (id, values) = line
            .split_once('\t')
            .ok_or_else(|| fmt_err(line_no, "expected `<id><TAB>values`".into()))?;
        if id.is_empty() {
            return Err(fmt_err(line_no, "empty id".into()));
        }
        if seen.insert(id.to_string(), line_no).is_some() {
            return Err(fmt_err(line_no, format!("duplicate id {id:?}")));
        }
        let before = data.len();
        for tok in values.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| fmt_err(line_no, format!("bad number {tok:?}")))?;
            if !v.is_finite() {
                return Err(fmt_err(line_no, format!("non-finite value {tok:?}")));
            }
            data.push(v);
        }
        let found = data.len() - before;
        if found != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found,
            });
        }
        ids.push(id.to_string());
    }
    if ids.len() != count {
        return Err(fmt_err(
            hline,
            format!("header declares {count} vectors, file has {}", ids.len()),
        ));
    }
    EmbeddingMatrix::new(ids, dim, data)
}

/// Parses a vector file and returns the rows for `expected_ids`, in that order.
pub fn load_vectors<S: AsRef<str>>(text: &str, expected_ids: &[S]) -> Result<EmbeddingMatrix> {
    parse_vectors(text)?.select(expected_ids)
}

/// Writes the vector file format. Values use the shortest representation
/// that parses back to the same bits.
pub fn write_vectors(m: &EmbeddingMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "VEC 1 {} {}", m.len(), m.dim());
    for (id, row) in m.ids.iter().zip(m.rows()) {
        out.push_str(id);
        out.push('\t');
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn ids(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reorders_to_expected() {
        let text = "VEC 1 3 2\nTC1\t1 2\nTC2\t3 4\nTC3\t5 6\n";
        let m = load_vectors(text, &["TC2", "TC1"]).unwrap();
        assert_eq!(m.ids(), &ids(&["TC2", "TC1"])[..]);
        assert_eq!(m.row(0), &[3.0, 4.0]);
        assert_eq!(m.row(1), &[1.0, 2.0]);
    }

    #[test]
    fn missing_id() {
        let text = "VEC 1 1 2\nTC1\t1 2\n";
        assert_eq!(
            load_vectors(text, &["TC1", "TC5"]).unwrap_err(),
            Error::MissingVectorForId("TC5".into())
        );
    }

    #[test]
    fn format_errors_carry_line() {
        assert!(matches!(
            parse_vectors("VEC 1 1 2\nTC1 1 2\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_vectors("VEX 1 1 2\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_vectors("VEC 1 1 2\nTC1\t1 x\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(
            parse_vectors("VEC 1 2 2\nTC1\t1 2\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_vectors("VEC 1 2 1\nA\t1\nA\t2\n"),
            Err(Error::Format { line: 3, .. })
        ));
        assert!(matches!(
            parse_vectors("VEC 1 1 1\nA\tNaN\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert_eq!(
            parse_vectors("VEC 1 1 3\nTC1\t1 2\n").unwrap_err(),
            Error::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn split_and_select() {
        let m = EmbeddingMatrix::from_rows(ids(&["a", "b", "c"]), vec![vec![1.0], vec![2.0], vec![3.0]])
            .unwrap();
        let (l, r) = m.split_at(1);
        assert_eq!(l.ids(), &ids(&["a"])[..]);
        assert_eq!(r.row(1), &[3.0]);
        assert!(EmbeddingMatrix::from_rows(ids(&["a", "b"]), vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(matches!(
            EmbeddingMatrix::new(ids(&["a"]), 1, vec![f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
    }

    proptest! {
        #[test]
        fn write_then_load_is_bit_exact(
            rows in proptest::collection::vec(proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3), 1..6)
        ) {
            let names: Vec<String> = (0..rows.len()).map(|i| format!("A{i}")).collect();
            let m = EmbeddingMatrix::from_rows(names.clone(), rows).unwrap();
            let back = load_vectors(&write_vectors(&m), &names).unwrap();
            prop_assert_eq!(back.ids(), m.ids());
            for (a, b) in back.rows().zip(m.rows()) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }
}
