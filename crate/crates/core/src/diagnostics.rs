//! Runtime checks that tie a labeled clustering run back to its expected
//! matrix: the sin-theta perturbation bound and the k-means error bound.

use serde::{Deserialize, Serialize};

use crate::bounds::{expected_similarity, ExactTop2, ExpectedSimilarity};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::SimilarityMatrix;
use crate::model::Label;
use crate::spectral::SpectralEmbedding;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DavisKahanReport {
    /// `|sin Theta(U, U*)|_F`.
    pub sin_theta_f: f64,
    /// `2 |W - W*|_F / gap`; infinite when the gap is not positive.
    pub bound: f64,
    /// `lambda*_2 - lambda*_3` of the reconstructed expectation.
    pub gap: f64,
    pub e_frob: f64,
    pub p_hat: f64,
    pub q_hat: f64,
    pub holds: bool,
}

/// `|W - W*|_F` without materializing either matrix as floats.
pub fn frobenius_error(w: &SimilarityMatrix, expected: &ExpectedSimilarity) -> Result<f64> {
    let n = w.n();
    if expected.n != n {
        return Err(Error::LengthMismatch(expected.n, n));
    }
    let mut acc = 0.0;
    for i in 0..n {
        let row = w.row(i);
        for j in i + 1..n {
            let d = row[j] as f64 - expected.entry(i, j);
            acc += d * d;
        }
    }
    Ok((2.0 * acc).sqrt())
}

/// `2 - |U^T V|_F^2` for two `N x 2` matrices with orthonormal columns.
pub fn sin_theta_frobenius(u: &[[f64; 2]], v: &[[f64; 2]]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let m = cross_gram(u, v);
    let f2: f64 = m.iter().flatten().map(|x| x * x).sum();
    Ok((2.0 - f2).max(0.0).sqrt())
}

fn cross_gram(u: &[[f64; 2]], v: &[[f64; 2]]) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for (a, b) in u.iter().zip(v) {
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] += a[r] * b[c];
            }
        }
    }
    m
}

/// Sin-theta check for one run. `p_hat`, `q_hat` are the empirical
/// within/between acceptance rates from the same labeled build.
pub fn davis_kahan(
    w: &SimilarityMatrix,
    embedding: &SpectralEmbedding,
    z: &[Label],
    p_hat: f64,
    q_hat: f64,
) -> Result<DavisKahanReport> {
    if !(p_hat.is_finite() && q_hat.is_finite()) {
        return Err(invalid("p_hat, q_hat", "acceptance rates are undefined"));
    }
    if embedding.n() != w.n() {
        return Err(Error::LengthMismatch(embedding.n(), w.n()));
    }
    // with q_hat >= p_hat the expected gap is not positive and the bound is vacuous
    let (p, q) = if q_hat > p_hat { (q_hat, q_hat) } else { (p_hat, q_hat) };
    let expected = expected_similarity(w.n(), p, q, z)?;
    let exact: ExactTop2 = expected.exact_top2()?;
    let gap = if q_hat > p_hat { 0.0 } else { exact.gap() };
    let e_frob = frobenius_error(w, &expected)?;
    let sin_theta_f = sin_theta_frobenius(&embedding.rows, &exact.rows)?;
    let bound = if gap > 0.0 { 2.0 * e_frob / gap } else { f64::INFINITY };
    Ok(DavisKahanReport {
        sin_theta_f,
        bound,
        gap,
        e_frob,
        p_hat,
        q_hat,
        holds: sin_theta_f <= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansBoundReport {
    /// `min_O |U - U* O|_F^2` over 2x2 orthogonal `O`.
    pub aligned_sq_error: f64,
    /// Distance between the two distinct rows of `U*`.
    pub delta: f64,
    pub size_condition: f64,
    pub min_cluster: usize,
    /// Whether the size condition holds and `bound` applies.
    pub applicable: bool,
    /// Upper bound on the number of misclassified nodes.
    pub bound: f64,
}

/// `min_O |U - V O|_F^2` for orthonormal `U`, `V` of width 2; the maximal
/// trace over O(2) is the nuclear norm of the 2x2 cross Gram matrix.
pub fn procrustes_sq_error(u: &[[f64; 2]], v: &[[f64; 2]]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let m = cross_gram(v, u);
    let rot = (m[0][0] + m[1][1]).hypot(m[1][0] - m[0][1]);
    let refl = (m[0][0] - m[1][1]).hypot(m[0][1] + m[1][0]);
    let fu: f64 = u.iter().flatten().map(|x| x * x).sum();
    let fv: f64 = v.iter().flatten().map(|x| x * x).sum();
    Ok((fu + fv - 2.0 * rot.max(refl)).max(0.0))
}

/// k-means misclassification bound for a `(1 + eps)`-approximate solution.
pub fn kmeans_bound(embedding: &SpectralEmbedding, z: &[Label], p_hat: f64, q_hat: f64, eps: f64) -> Result<KMeansBoundReport> {
    if !(eps >= 0.0) {
        return Err(invalid("eps", "must be nonnegative"));
    }
    let n = embedding.n();
    if !(0.0 <= q_hat && q_hat <= p_hat) {
        return Err(invalid("p_hat, q_hat", "need 0 <= q_hat <= p_hat"));
    }
    let expected = expected_similarity(n, p_hat, q_hat, z)?;
    let exact = expected.exact_top2()?;
    let d2 = procrustes_sq_error(&embedding.rows, &exact.rows)?;
    let i1 = z.iter().position(|&l| l == 1).expect("both labels present");
    let i2 = z.iter().position(|&l| l == 2).expect("both labels present");
    let (a, b) = (exact.rows[i1], exact.rows[i2]);
    let delta = (a[0] - b[0]).hypot(a[1] - b[1]);
    let n1 = z.iter().filter(|&&l| l == 1).count();
    let min_cluster = n1.min(n - n1);
    let c = 2.0 + eps;
    let size_condition = 4.0 * c * d2 / (delta * delta);
    let applicable = size_condition <= min_cluster as f64;
    Ok(KMeansBoundReport {
        aligned_sq_error: d2,
        delta,
        size_condition,
        min_cluster,
        applicable,
        bound: if applicable { 4.0 * c * c * d2 / (delta * delta) } else { f64::INFINITY },
    })
}
