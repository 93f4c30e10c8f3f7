use proptest::prelude::*;
use tracelink_core::embedding::{embed_lsi, embed_tfidf, lsi_project};
use tracelink_core::similarity::cosine;
use tracelink_core::{Artifact, EmbeddingMatrix, Tokenizer};
use tracelink_core::corpus::Role;

const WORDS: &[&str] = &[
    "patient", "record", "login", "password", "invoice", "report", "print", "doctor", "visit",
    "schedule", "laboratory", "result", "update", "delete", "search", "admin",
];

fn docs_strategy() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0..WORDS.len(), 1..8), 2..=20)
}

fn artifacts(docs: &[Vec<usize>]) -> Vec<Artifact> {
    docs.iter()
        .enumerate()
        .map(|(i, d)| {
            let text: Vec<&str> = d.iter().map(|&w| WORDS[w]).collect();
            Artifact::new(format!("D{i:02}"), Role::Target, text.join(" ")).unwrap()
        })
        .collect()
}

fn cosines(m: &EmbeddingMatrix) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..m.len() {
        for j in 0..m.len() {
            out.push(cosine(m.row(i), m.row(j)).unwrap());
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn full_rank_lsi_preserves_cosines(docs in docs_strategy()) {
        let arts = artifacts(&docs);
        let tok = Tokenizer::default();
        let (tfidf, _) = embed_tfidf(&arts, &tok);
        let (lsi, info) = embed_lsi(&arts, arts.len(), &tok).unwrap();
        prop_assert!(info.effective_rank <= info.numerical_rank.max(1));
        for (a, b) in cosines(&tfidf).iter().zip(cosines(&lsi)) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn singular_values_descend(docs in docs_strategy(), rank in 1usize..6) {
        let (tfidf, _) = embed_tfidf(&artifacts(&docs), &Tokenizer::default());
        let (m, info) = lsi_project(&tfidf, rank).unwrap();
        prop_assert!(info.singular_values.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(m.dim(), info.effective_rank);
        prop_assert!(m.dim() <= rank);
    }
}

#[test]
fn zero_matrix_keeps_one_column() {
    let m = EmbeddingMatrix::new(vec!["a".into(), "b".into()], 3, vec![0.0; 6]).unwrap();
    let (p, info) = lsi_project(&m, 5).unwrap();
    assert_eq!(info.numerical_rank, 0);
    assert_eq!(p.dim(), 1);
    assert!(p.rows().all(|r| r == [0.0]));
    assert!(lsi_project(&m, 0).is_err());
}
