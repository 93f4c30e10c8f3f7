//! Cosine similarity and descending ranked lists.
//!
//! Scores are cosine *similarity*; higher means closer. Every sort is stable
//! and breaks score ties by ascending id, so lists are reproducible.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::fmt::g17;

/// `u.v / (|u| |v|)`, clamped to `[-1, 1]`. Zero vectors have similarity 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(cosine_unchecked(u, v))
}

fn cosine_unchecked(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut uu = 0.0;
    let mut vv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return 0.0;
    }
    (dot / libm::sqrt(uu * vv)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.col_ids.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let m = self.col_ids.len();
        &self.values[row * m..(row + 1) * m]
    }

    /// CSV with a header of column ids and a leading row-id column; values
    /// carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for c in &self.col_ids {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, r) in self.row_ids.iter().enumerate() {
            out.push_str(r);
            for v in self.row(i) {
                out.push(',');
                out.push_str(&g17(*v));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub id: String,
    pub score: f64,
}

/// Candidates of one owner, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub owner_id: String,
    pub entries: Vec<RankedEntry>,
}

/// Descending score, then ascending id.
pub fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.as_bytes().cmp(b.0.as_bytes()))
}

impl RankedList {
    /// Sorts `(id, score)` pairs into rank order.
    pub fn from_scores<I, S>(owner_id: impl Into<String>, scores: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut entries: Vec<RankedEntry> = scores
            .into_iter()
            .map(|(id, score)| RankedEntry {
                id: id.into(),
                score,
            })
            .collect();
        entries.sort_by(|a, b| rank_order((&a.id, a.score), (&b.id, b.score)));
        Self {
            owner_id: owner_id.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn top(&self, n: usize) -> &[RankedEntry] {
        &self.entries[..n.min(self.entries.len())]
    }

    pub fn first_score(&self) -> Option<f64> {
        self.entries.first().map(|e| e.score)
    }

    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.score)
    }

    /// Zero-based rank of `id`.
    pub fn position(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.id == id)
    }
}

/// Cosine of every source row against every target row.
pub fn sa_ta_matrix(sa: &EmbeddingMatrix, ta: &EmbeddingMatrix) -> Result<SimilarityMatrix> {
    if sa.dim() != ta.dim() {
        return Err(Error::DimensionMismatch {
            expected: sa.dim(),
            found: ta.dim(),
        });
    }
    let mut values = Vec::with_capacity(sa.len() * ta.len());
    for u in sa.rows() {
        for v in ta.rows() {
            values.push(cosine_unchecked(u, v));
        }
    }
    Ok(SimilarityMatrix {
        row_ids: sa.ids().to_vec(),
        col_ids: ta.ids().to_vec(),
        values,
    })
}

/// Pairwise cosine among targets, self pairs included (diagonal is 1 for
/// non-zero rows, 0 for zero rows).
pub fn ta_ta_matrix(ta: &EmbeddingMatrix) -> SimilarityMatrix {
    let m = ta.len();
    let mut values = alloc::vec![0.0; m * m];
    for i in 0..m {
        for j in i..m {
            let s = cosine_unchecked(ta.row(i), ta.row(j));
            values[i * m + j] = s;
            values[j * m + i] = s;
        }
    }
    SimilarityMatrix {
        row_ids: ta.ids().to_vec(),
        col_ids: ta.ids().to_vec(),
        values,
    }
}

/// For every target, the other `m - 1` targets in rank order.
pub fn ta_ta_lists(ta: &EmbeddingMatrix) -> BTreeMap<String, RankedList> {
    let sims = ta_ta_matrix(ta);
    let ids = ta.ids();
    ids.iter()
        .enumerate()
        .map(|(i, owner)| {
            let others = ids
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(j, id)| (id.clone(), sims.get(i, j)));
            (owner.clone(), RankedList::from_scores(owner.clone(), others))
        })
        .collect()
}

/// One list over all targets per source row.
pub fn sa_ta_lists(matrix: &SimilarityMatrix) -> BTreeMap<String, RankedList> {
    matrix
        .row_ids
        .iter()
        .enumerate()
        .map(|(i, owner)| {
            let scores = matrix
                .col_ids
                .iter()
                .cloned()
                .zip(matrix.row(i).iter().copied());
            (owner.clone(), RankedList::from_scores(owner.clone(), scores))
        })
        .collect()
}
