use alloc::vec;
use alloc::vec::Vec;

use super::svd::left_svd;
use super::{embed_tfidf, EmbeddingMatrix, Tokenizer};
use crate::corpus::Artifact;
use crate::error::{Error, Result};

/// What the truncation actually did.
#[derive(Debug, Clone, PartialEq)]
pub struct LsiInfo {
    pub requested_rank: usize,
    /// Singular values above the numerical-rank tolerance.
    pub numerical_rank: usize,
    pub effective_rank: usize,
    pub singular_values: Vec<f64>,
}

impl LsiInfo {
    /// The requested rank exceeded the numerical rank and was clamped.
    pub fn clamped(&self) -> bool {
        self.effective_rank < self.requested_rank
    }
}

/// `min(100, n_docs - 1)`, at least 1.
pub fn default_lsi_rank(n_docs: usize) -> usize {
    n_docs.saturating_sub(1).clamp(1, 100)
}

/// TF-IDF followed by [`lsi_project`].
pub fn embed_lsi(
    artifacts: &[Artifact],
    rank: usize,
    tokenizer: &Tokenizer,
) -> Result<(EmbeddingMatrix, LsiInfo)> {
    let (tfidf, _) = embed_tfidf(artifacts, tokenizer);
    lsi_project(&tfidf, rank)
}

/// Projects documents onto the leading `r` latent dimensions of a truncated
/// SVD, `r = min(rank, numerical rank)`. Row `d` is `U_r[d] * Sigma_r`.
///
/// A zero matrix has numerical rank 0; it still yields one (zero) column.
pub fn lsi_project(matrix: &EmbeddingMatrix, rank: usize) -> Result<(EmbeddingMatrix, LsiInfo)> {
    if rank == 0 {
        return Err(Error::Config("LSI rank must be at least 1".into()));
    }
    let n = matrix.len();
    let t = matrix.dim();
    let flat: Vec<f64> = matrix.rows().flat_map(|r| r.iter().copied()).collect();
    let (sigma, u) = left_svd(&flat, n, t);

    let smax = sigma.first().copied().unwrap_or(0.0);
    let tol = n.max(t) as f64 * f64::EPSILON * smax;
    let numerical_rank = sigma.iter().take_while(|&&s| s > tol).count();
    let r = rank.min(numerical_rank).max(1);

    let mut data = vec![0.0; n * r];
    for d in 0..n {
        for k in 0..r.min(numerical_rank) {
            data[d * r + k] = u[d * n + k] * sigma[k];
        }
    }
    let info = LsiInfo {
        requested_rank: rank,
        numerical_rank,
        effective_rank: r,
        singular_values: sigma,
    };
    let m = EmbeddingMatrix::new(matrix.ids().to_vec(), r, data)?;
    Ok((m, info))
}
