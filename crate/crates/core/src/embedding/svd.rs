//! One-sided (Hestenes) Jacobi SVD, specialised to what LSI needs: the
//! singular values and left singular vectors of a short, wide matrix.

use alloc::vec;
use alloc::vec::Vec;

const MAX_SWEEPS: usize = 80;

/// Left singular decomposition of the `n x t` row-major matrix `a`.
///
/// Returns `(sigma, u)` where `sigma` holds the `n` singular values in
/// descending order and `u` is the `n x n` row-major matrix whose column `k`
/// is the left singular vector for `sigma[k]`.
pub(crate) fn left_svd(a: &[f64], n: usize, t: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * t);
    // Columns of A^T are the rows of A. Rotating them until mutually
    // orthogonal gives A^T V = W, so A = V W^T and V holds the left vectors.
    let mut w: Vec<Vec<f64>> = a.chunks(t.max(1)).map(<[f64]>::to_vec).collect();
    w.resize(n, vec![0.0; t]);
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut col = vec![0.0; n];
            col[i] = 1.0;
            col
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                let gamma = dot(&w[p], &w[q]);
                if gamma == 0.0 || libm::fabs(gamma) <= f64::EPSILON * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tan = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::sqrt(1.0 + zeta * zeta));
                let cos = 1.0 / libm::sqrt(1.0 + tan * tan);
                let sin = cos * tan;
                rotate(&mut w, p, q, cos, sin);
                rotate(&mut v, p, q, cos, sin);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|c| libm::sqrt(dot(c, c))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma = order.iter().map(|&i| norms[i]).collect();
    let mut u = vec![0.0; n * n];
    for (k, &src) in order.iter().enumerate() {
        for row in 0..n {
            u[row * n + k] = v[src][row];
        }
    }
    (sigma, u)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, cos: f64, sin: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = cos * a - sin * b;
        *y = sin * a + cos * b;
    }
}
