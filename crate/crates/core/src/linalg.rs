//! Dense symmetric eigen-solvers used by the spectral step.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{self, domain};

/// Dense row-major symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Takes a row-major buffer. Symmetry is the caller's responsibility.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "buffer is not n x n");
        Self { n, data }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    pub fn frobenius_distance(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Upper bound on the spectral radius (max absolute row sum).
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenpairs sorted by descending eigenvalue. `vectors[k]` pairs with `values[k]`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations on a full copy of `a`.
pub fn jacobi_eigen(a: &SymMatrix) -> Result<EigenDecomposition> {
    const MAX_SWEEPS: usize = 100;
    let n = a.n;
    let mut m = a.data.clone();
    // rows of `v` are the eigenvectors
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = m.iter().map(|x| x * x).sum();
    let mut converged = n < 2 || total == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off <= f64::EPSILON * f64::EPSILON * total {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                if apq.abs() <= 1e-18 * (app.abs() + aqq.abs()) {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, n, p, q, c, s);
                // enforce the exact zero the rotation was built for
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                rotate_rows(&mut v, n, p, q, c, s);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off > 1e-20 * total {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off.sqrt(),
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]).then(i.cmp(&j)));
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| m[i * n + i]).collect(),
        vectors: order.iter().map(|&i| v[i * n..(i + 1) * n].to_vec()).collect(),
    })
}

/// `m <- J^T m J` for the rotation in the (p, q) plane.
fn rotate(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    rotate_rows(m, n, p, q, c, s);
    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = c * mkp - s * mkq;
        m[k * n + q] = s * mkp + c * mkq;
    }
}

fn rotate_rows(m: &mut [f64], n: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = m.split_at_mut(q * n);
    let rp = &mut lo[p * n..(p + 1) * n];
    let rq = &mut hi[..n];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Modified Gram-Schmidt on the given vectors, in place.
fn orthonormalize(block: &mut [Vec<f64>]) {
    for k in 0..block.len() {
        let (done, rest) = block.split_at_mut(k);
        let v = &mut rest[0];
        for _ in 0..2 {
            for u in done.iter() {
                let d = dot(u, v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nv = norm(v);
        if nv > 0.0 {
            v.iter_mut().for_each(|x| *x /= nv);
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SubspaceOptions {
    pub wanted: usize,
    pub block: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SubspaceOptions {
    fn default() -> Self {
        Self {
            wanted: 2,
            block: 6,
            tol: 1e-10,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

/// Top `wanted` eigenpairs (algebraic order) by shifted block subspace
/// iteration with Rayleigh-Ritz. The Gershgorin shift makes `a + cI`
/// positive semi-definite so dominance in magnitude is dominance in value.
pub fn subspace_top(a: &SymMatrix, opts: &SubspaceOptions) -> Result<EigenDecomposition> {
    let n = a.n;
    let b = opts.block.max(opts.wanted).min(n);
    let shift = a.gershgorin_radius();
    let mut rng = rng::stream(opts.seed, domain::EIGEN_INIT, n as u64);
    let mut q: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    orthonormalize(&mut q);
    let mut y = vec![vec![0.0; n]; b];
    let mut last_residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        for (qi, yi) in q.iter().zip(y.iter_mut()) {
            a.matvec(qi, yi);
            yi.iter_mut().zip(qi).for_each(|(v, x)| *v += shift * x);
        }
        std::mem::swap(&mut q, &mut y);
        orthonormalize(&mut q);

        // Rayleigh-Ritz on span(q)
        for (qi, yi) in q.iter().zip(y.iter_mut()) {
            a.matvec(qi, yi);
        }
        let h = SymMatrix::from_fn(b, |i, j| 0.5 * (dot(&q[i], &y[j]) + dot(&q[j], &y[i])));
        let small = jacobi_eigen(&h)?;
        let rotated: Vec<Vec<f64>> = small
            .vectors
            .iter()
            .map(|c| {
                let mut out = vec![0.0; n];
                for (ck, qk) in c.iter().zip(&q) {
                    out.iter_mut().zip(qk).for_each(|(o, x)| *o += ck * x);
                }
                out
            })
            .collect();
        q = rotated;

        let mut worst: f64 = 0.0;
        let mut av = vec![0.0; n];
        for k in 0..opts.wanted {
            a.matvec(&q[k], &mut av);
            let lam = small.values[k];
            let r = av
                .iter()
                .zip(&q[k])
                .map(|(x, v)| (x - lam * v).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r / lam.abs().max(1.0));
        }
        last_residual = worst;
        if worst <= opts.tol {
            return Ok(EigenDecomposition {
                values: small.values[..opts.wanted].to_vec(),
                vectors: q.into_iter().take(opts.wanted).collect(),
            });
        }
        if iter == opts.max_iter {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_residual,
    })
}

/// Eigen-decomposition of `[[a, b], [b, c]]`: `(l_max, l_min, unit major axis)`.
pub fn sym2_eigen(a: f64, b: f64, c: f64) -> (f64, f64, [f64; 2]) {
    let mean = 0.5 * (a + c);
    let half = 0.5 * (a - c).hypot(2.0 * b);
    let phi = 0.5 * (2.0 * b).atan2(a - c);
    (mean + half, mean - half, [phi.cos(), phi.sin()])
}
