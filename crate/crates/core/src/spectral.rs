//! Spectral step: the two leading eigenvectors of `W`, then 2-means on
//! their rows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{build_similarity, SimilarityMatrix};
use crate::linalg::{dot, jacobi_eigen, norm, subspace_top, EigenDecomposition, SubspaceOptions, SymMatrix};
use crate::model::Label;
use crate::point::Point;
use crate::rng::{self, domain};

/// Rows of the `N x 2` matrix of leading eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEmbedding {
    pub rows: Vec<[f64; 2]>,
    /// `(lambda_1, lambda_2)` with `lambda_1 >= lambda_2`.
    pub eigenvalues: [f64; 2],
    /// Relative residuals `|W u - lambda u| / max(1, |lambda|)` per column.
    pub residuals: [f64; 2],
}

impl SpectralEmbedding {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpectralOptions {
    /// Largest `N` handled by full Jacobi; above it, subspace iteration.
    pub jacobi_max_n: usize,
    pub subspace: SubspaceOptions,
    pub residual_tol: f64,
    pub orthonormality_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            jacobi_max_n: 512,
            subspace: SubspaceOptions::default(),
            residual_tol: 1e-6,
            orthonormality_tol: 1e-8,
        }
    }
}

pub fn top2_eigen(w: &SimilarityMatrix) -> Result<SpectralEmbedding> {
    top2_eigen_with(w, &SpectralOptions::default())
}

pub fn top2_eigen_with(w: &SimilarityMatrix, opts: &SpectralOptions) -> Result<SpectralEmbedding> {
    let a = SymMatrix::from_row_major(w.n(), w.to_f64());
    top2_dense(&a, opts)
}

/// Two algebraically largest eigenpairs of a dense symmetric matrix. Each
/// eigenvector is signed so its first entry of largest magnitude is positive.
pub fn top2_dense(a: &SymMatrix, opts: &SpectralOptions) -> Result<SpectralEmbedding> {
    let n = a.n();
    if n < 2 {
        return Err(Error::SizeTooSmall(n));
    }
    let EigenDecomposition { values, mut vectors } = if n <= opts.jacobi_max_n {
        jacobi_eigen(a)?
    } else {
        subspace_top(a, &opts.subspace)?
    };
    vectors.truncate(2);
    for v in vectors.iter_mut() {
        let (mut best, mut at) = (0.0, 0);
        for (i, x) in v.iter().enumerate() {
            if x.abs() > best {
                best = x.abs();
                at = i;
            }
        }
        if v[at] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let mut residuals = [0.0; 2];
    let mut av = vec![0.0; n];
    for k in 0..2 {
        a.matvec(&vectors[k], &mut av);
        let r = av
            .iter()
            .zip(&vectors[k])
            .map(|(x, v)| (x - values[k] * v).powi(2))
            .sum::<f64>()
            .sqrt();
        residuals[k] = r / values[k].abs().max(1.0);
    }
    let ortho = [
        (norm(&vectors[0]) - 1.0).abs(),
        (norm(&vectors[1]) - 1.0).abs(),
        dot(&vectors[0], &vectors[1]).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let worst = residuals[0].max(residuals[1]);
    if worst > opts.residual_tol || ortho > opts.orthonormality_tol {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: worst.max(ortho),
        });
    }
    Ok(SpectralEmbedding {
        rows: (0..n).map(|i| [vectors[0][i], vectors[1][i]]).collect(),
        eigenvalues: [values[0], values[1]],
        residuals,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct KMeansOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 100,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMeansFit {
    /// Cluster labels in {1, 2}; the cluster of row 0 is always 1.
    pub labels: Vec<Label>,
    pub centers: [[f64; 2]; 2],
    pub inertia: f64,
    /// All rows identical: a single cluster was returned.
    pub degenerate: bool,
    /// Inertia after every assignment step of the winning restart.
    pub inertia_trace: Vec<f64>,
}

#[inline]
fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// 2-means on the embedding rows: k-means++ seeding, Lloyd iterations,
/// best of several restarts.
pub fn kmeans2_rows(rows: &[[f64; 2]], seed: u64, opts: &KMeansOptions) -> Result<KMeansFit> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::SizeTooSmall(n));
    }
    if rows.iter().all(|r| *r == rows[0]) {
        return Ok(KMeansFit {
            labels: vec![1; n],
            centers: [rows[0], rows[0]],
            inertia: 0.0,
            degenerate: true,
            inertia_trace: vec![0.0],
        });
    }
    let mut best: Option<KMeansFit> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = rng::stream(seed, domain::KMEANS, restart as u64);
        let fit = lloyd(rows, plus_plus(rows, &mut rng), opts);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    let mut fit = best.expect("at least one restart");
    if fit.labels[0] == 2 {
        fit.labels.iter_mut().for_each(|z| *z = 3 - *z);
        fit.centers.swap(0, 1);
    }
    Ok(fit)
}

fn plus_plus(rows: &[[f64; 2]], rng: &mut impl Rng) -> [[f64; 2]; 2] {
    let first = rows[rng.random_range(0..rows.len())];
    let d: Vec<f64> = rows.iter().map(|&r| dist2(r, first)).collect();
    let total: f64 = d.iter().sum();
    let mut target = rng.random::<f64>() * total;
    let mut second = first;
    for (r, di) in rows.iter().zip(&d) {
        if *di > 0.0 {
            second = *r;
            if target < *di {
                break;
            }
            target -= di;
        }
    }
    [first, second]
}

fn lloyd(rows: &[[f64; 2]], mut centers: [[f64; 2]; 2], opts: &KMeansOptions) -> KMeansFit {
    let n = rows.len();
    let mut assign = vec![0usize; n];
    let mut trace = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let mut inertia = 0.0;
        for (a, r) in assign.iter_mut().zip(rows) {
            let d0 = dist2(*r, centers[0]);
            let d1 = dist2(*r, centers[1]);
            *a = (d1 < d0) as usize;
            inertia += d0.min(d1);
        }
        repair_empty(rows, &mut assign, &centers);
        let sizes = [
            assign.iter().filter(|&&a| a == 0).count(),
            assign.iter().filter(|&&a| a == 1).count(),
        ];
        let mut sums = [[0.0; 2]; 2];
        for (a, r) in assign.iter().zip(rows) {
            sums[*a][0] += r[0];
            sums[*a][1] += r[1];
        }
        for k in 0..2 {
            centers[k] = [sums[k][0] / sizes[k] as f64, sums[k][1] / sizes[k] as f64];
        }
        trace.push(inertia);
        if prev - inertia <= opts.rel_tol * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        prev = inertia;
    }
    let inertia = assign
        .iter()
        .zip(rows)
        .map(|(a, r)| dist2(*r, centers[*a]))
        .sum();
    KMeansFit {
        labels: assign.iter().map(|&a| a as Label + 1).collect(),
        centers,
        inertia,
        degenerate: false,
        inertia_trace: trace,
    }
}

/// Moves the point farthest from its center into an empty cluster.
fn repair_empty(rows: &[[f64; 2]], assign: &mut [usize], centers: &[[f64; 2]; 2]) {
    for k in 0..2 {
        if assign.iter().any(|&a| a == k) {
            continue;
        }
        let far = (0..rows.len())
            .max_by(|&i, &j| {
                dist2(rows[i], centers[assign[i]]).total_cmp(&dist2(rows[j], centers[assign[j]]))
            })
            .expect("nonempty rows");
        assign[far] = k;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub labels: Vec<Label>,
    pub embedding: SpectralEmbedding,
    pub kmeans_inertia: f64,
    pub centers: [[f64; 2]; 2],
    /// One cluster came back empty because the embedding rows coincide.
    pub degenerate: bool,
}

/// Spectral clustering of a prebuilt similarity matrix.
pub fn cluster_similarity(w: &SimilarityMatrix, seed: u64) -> Result<ClusterResult> {
    let embedding = top2_eigen(w)?;
    let fit = kmeans2_rows(&embedding.rows, seed, &KMeansOptions::default())?;
    Ok(ClusterResult {
        labels: fit.labels,
        kmeans_inertia: fit.inertia,
        centers: fit.centers,
        degenerate: fit.degenerate,
        embedding,
    })
}

/// TLS hypergraph at threshold `t`, then the spectral step.
pub fn cluster(points: &[Point], t: f64, seed: u64) -> Result<ClusterResult> {
    let w = build_similarity(points, t)?;
    cluster_similarity(&w, seed)
}
