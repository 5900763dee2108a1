//! The 3-uniform TLS hypergraph and its pairwise co-incidence matrix.
//!
//! A triple `{i, j, k}` is a hyperedge when `sigma_tls_sq < t^2` (strict).
//! `W[i][j]` counts the hyperedges containing both `i` and `j`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::Label;
use crate::point::Point;
use crate::tls::sigma_tls_sq;

pub const DEFAULT_MAX_NODES: usize = 5000;

/// Dense symmetric hyperedge co-incidence counts with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityMatrix {
    n: usize,
    counts: Vec<u32>,
}

impl SimilarityMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            counts: vec![0; n * n],
        }
    }

    /// Symmetric matrix with `W[i][j] = f(i, j)` for `i < j`.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> u32) -> Self {
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                out.counts[i * n + j] = v;
                out.counts[j * n + i] = v;
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.counts[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.counts[i * self.n..(i + 1) * self.n]
    }

    /// Row-major counts.
    pub fn as_slice(&self) -> &[u32] {
        &self.counts
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    /// Restriction to the given node indices, in the given order.
    pub fn submatrix(&self, nodes: &[usize]) -> SimilarityMatrix {
        let m = nodes.len();
        let mut out = SimilarityMatrix::zeros(m);
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate() {
                out.counts[a * m + b] = self.get(i, j);
            }
        }
        out
    }

    /// Writes the strict upper triangle as `i,j,count`, skipping zeros.
    pub fn write_upper_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "count"])?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let c = self.get(i, j);
                if c > 0 {
                    w.write_record([i.to_string(), j.to_string(), c.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Label-aware triple counts. Within/between splits are filled only when
/// ground-truth labels are supplied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperedgeStats {
    pub total_triples: u64,
    pub accepted_triples: u64,
    pub within_triples: u64,
    pub between_triples: u64,
    pub accepted_within: u64,
    pub accepted_between: u64,
}

impl HyperedgeStats {
    /// Empirical within-community acceptance rate.
    pub fn p_hat(&self) -> f64 {
        ratio(self.accepted_within, self.within_triples)
    }

    /// Empirical between-community acceptance rate.
    pub fn q_hat(&self) -> f64 {
        ratio(self.accepted_between, self.between_triples)
    }

    fn merge(mut self, o: HyperedgeStats) -> HyperedgeStats {
        self.total_triples += o.total_triples;
        self.accepted_triples += o.accepted_triples;
        self.within_triples += o.within_triples;
        self.between_triples += o.between_triples;
        self.accepted_within += o.accepted_within;
        self.accepted_between += o.accepted_between;
        self
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_nodes: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

fn check_inputs(n: usize, t: f64, opts: &BuildOptions) -> Result<()> {
    if n < 3 {
        return Err(Error::SizeTooSmall(n));
    }
    if n > opts.max_nodes {
        return Err(Error::SizeTooLarge {
            n,
            max: opts.max_nodes,
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("{t} is not a positive threshold")));
    }
    Ok(())
}

pub fn build_similarity(points: &[Point], t: f64) -> Result<SimilarityMatrix> {
    build_similarity_with(points, t, None, &BuildOptions::default()).map(|(w, _)| w)
}

/// Builds `W` and, in the same pass, the triple acceptance counters.
///
/// Work is split by the smallest index of each triple. Each worker owns a
/// private upper-triangular buffer; integer addition commutes, so the merged
/// matrix does not depend on scheduling.
pub fn build_similarity_with(
    points: &[Point],
    t: f64,
    labels: Option<&[Label]>,
    opts: &BuildOptions,
) -> Result<(SimilarityMatrix, HyperedgeStats)> {
    let n = points.len();
    check_inputs(n, t, opts)?;
    if let Some(z) = labels {
        if z.len() != n {
            return Err(Error::LengthMismatch(z.len(), n));
        }
    }
    let t2 = t * t;

    let (upper, stats) = (0..n - 2)
        .into_par_iter()
        .fold(
            || (vec![0u32; n * n], HyperedgeStats::default()),
            |(mut buf, mut st), i| {
                scan_from(points, labels, t2, i, &mut buf, &mut st);
                (buf, st)
            },
        )
        .reduce_with(|(mut a, sa), (b, sb)| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            (a, sa.merge(sb))
        })
        .expect("n >= 3 yields at least one outer index");

    let mut counts = upper;
    for i in 0..n {
        for j in i + 1..n {
            counts[j * n + i] = counts[i * n + j];
        }
    }
    Ok((SimilarityMatrix { n, counts }, stats))
}

/// All triples with smallest index `i`.
fn scan_from(
    points: &[Point],
    labels: Option<&[Label]>,
    t2: f64,
    i: usize,
    buf: &mut [u32],
    st: &mut HyperedgeStats,
) {
    let n = points.len();
    let pi = points[i];
    for j in i + 1..n - 1 {
        let pj = points[j];
        let mut pair = 0u32;
        for k in j + 1..n {
            let accepted = sigma_tls_sq(&[pi, pj, points[k]]) < t2;
            if let Some(z) = labels {
                let within = z[i] == z[j] && z[j] == z[k];
                if within {
                    st.within_triples += 1;
                    st.accepted_within += accepted as u64;
                } else {
                    st.between_triples += 1;
                    st.accepted_between += accepted as u64;
                }
            }
            if accepted {
                pair += 1;
                buf[i * n + k] += 1;
                buf[j * n + k] += 1;
            }
        }
        buf[i * n + j] += pair;
        st.accepted_triples += pair as u64;
        st.total_triples += (n - 1 - j) as u64;
    }
}

/// Empirical within- and between-community acceptance rates over all triples.
pub fn hyperedge_probabilities(points: &[Point], labels: &[Label], t: f64) -> Result<HyperedgeStats> {
    build_similarity_with(points, t, Some(labels), &BuildOptions::default()).map(|(_, s)| s)
}
