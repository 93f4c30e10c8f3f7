use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{EmbeddingMatrix, Tokenizer};
use crate::corpus::Artifact;

/// Terms of a document collection with their document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub df: Vec<usize>,
    pub n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    /// `ln(n_docs / df)`.
    pub fn idf(&self, i: usize) -> f64 {
        libm::log(self.n_docs as f64 / self.df[i] as f64)
    }
}

/// Raw term count times `ln(N / df)`, unnormalized. Rows follow the input
/// order; documents without retained tokens get a zero row.
///
/// If no artifact yields a single token the vocabulary is empty and the
/// matrix has one all-zero column.
pub fn embed_tfidf(artifacts: &[Artifact], tokenizer: &Tokenizer) -> (EmbeddingMatrix, Vocabulary) {
    let docs: Vec<BTreeMap<String, usize>> = artifacts
        .iter()
        .map(|a| {
            let mut tf = BTreeMap::new();
            for t in tokenizer.tokenize(&a.text) {
                *tf.entry(t).or_insert(0usize) += 1;
            }
            tf
        })
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &docs {
        for term in doc.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let vocab = Vocabulary {
        terms: df.keys().map(|t| String::from(*t)).collect(),
        df: df.values().copied().collect(),
        n_docs: artifacts.len(),
    };

    let dim = vocab.len().max(1);
    let idf: Vec<f64> = (0..vocab.len()).map(|i| vocab.idf(i)).collect();
    let mut data = vec![0.0; artifacts.len() * dim];
    for (d, doc) in docs.iter().enumerate() {
        let row = &mut data[d * dim..(d + 1) * dim];
        for (term, &count) in doc {
            let t = vocab.index_of(term).expect("term indexed");
            row[t] = count as f64 * idf[t];
        }
    }
    let ids = artifacts.iter().map(|a| a.id.clone()).collect();
    let m = EmbeddingMatrix::new(ids, dim, data).expect("tf-idf entries are finite");
    (m, vocab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Role;

    fn docs(texts: &[&str]) -> Vec<Artifact> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Artifact::new(alloc::format!("D{i}"), Role::Target, *t).unwrap())
            .collect()
    }

    #[test]
    fn two_doc_hand_values() {
        let (m, v) = embed_tfidf(&docs(&["apple banana", "apple"]), &Tokenizer::default());
        assert_eq!(v.terms, vec!["apple", "banana"]);
        assert_eq!(v.df, vec![2, 1]);
        assert_eq!(m.dim(), 2);
        assert_eq!(m.row(0), &[0.0, core::f64::consts::LN_2]);
        assert_eq!(m.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn single_document_is_all_zero() {
        let (m, _) = embed_tfidf(&docs(&["patient record update"]), &Tokenizer::default());
        assert!(m.row(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn duplicates_share_rows_and_counts_multiply() {
        let (m, v) = embed_tfidf(
            &docs(&["login login audit", "login login audit", "report"]),
            &Tokenizer::default(),
        );
        assert_eq!(m.row(0), m.row(1));
        let login = v.index_of("login").unwrap();
        assert_eq!(m.row(0)[login], 2.0 * libm::log(3.0 / 2.0));
    }

    #[test]
    fn stopword_only_documents() {
        let (m, v) = embed_tfidf(&docs(&["the and of", "it is"]), &Tokenizer::default());
        assert!(v.is_empty());
        assert_eq!(m.dim(), 1);
        assert!(m.rows().all(|r| r == [0.0]));
    }
}
