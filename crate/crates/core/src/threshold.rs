//! Data-driven threshold: score a few random triples, take the quantile of
//! their TLS scores as `t*`, and cluster the nodes the sample did not touch.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::Label;
use crate::point::Point;
use crate::rng::{self, domain};
use crate::spectral::{cluster, ClusterResult};
use crate::tls::sigma_tls;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSample {
    /// Sampled triples, each sorted ascending, in draw order.
    pub triples: Vec<[usize; 3]>,
    /// `sigma_tls` of each triple, aligned with `triples`.
    pub scores: Vec<f64>,
    /// Scores sorted ascending (stable).
    pub sorted: Vec<f64>,
    /// Union of the sampled triples, ascending.
    pub touched: Vec<usize>,
}

impl TripleSample {
    pub fn m(&self) -> usize {
        self.triples.len()
    }

    /// Nodes not touched by any sampled triple, ascending.
    pub fn untouched(&self, n: usize) -> Vec<usize> {
        let mut mark = vec![false; n];
        self.touched.iter().for_each(|&i| mark[i] = true);
        (0..n).filter(|&i| !mark[i]).collect()
    }

    pub fn all_disjoint(&self) -> bool {
        self.touched.len() == 3 * self.triples.len()
    }
}

/// Which branch of the selection rule produced `t_star`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    OrderStatistic,
    /// `k < 1`: fell back to the smallest score.
    BelowRange,
    /// `k > M`: clamped to the largest score.
    AboveRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub t_star: f64,
    pub k: i64,
    pub theta: f64,
    pub rule: ThresholdRule,
}

/// Fraction of scores `<= t`.
pub fn empirical_cdf(scores: &[f64], t: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(scores.iter().filter(|&&s| s <= t).count() as f64 / scores.len() as f64)
}

/// Draws `m` triples independently and uniformly from the 3-subsets of `0..n`,
/// with replacement.
pub fn sample_triples(points: &[Point], m: usize, seed: u64) -> Result<TripleSample> {
    let n = points.len();
    if n < 3 {
        return Err(Error::SizeTooSmall(n));
    }
    if m == 0 {
        return Err(invalid("m", "need at least one triple"));
    }
    let mut rng = rng::stream(seed, domain::TRIPLES, 0);
    let mut triples = Vec::with_capacity(m);
    while triples.len() < m {
        let mut t = [
            rng.random_range(0..n),
            rng.random_range(0..n),
            rng.random_range(0..n),
        ];
        if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
            continue;
        }
        t.sort_unstable();
        triples.push(t);
    }
    let scores: Vec<f64> = triples
        .iter()
        .map(|t| sigma_tls(&[points[t[0]], points[t[1]], points[t[2]]]))
        .collect();
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let mut touched: Vec<usize> = triples.iter().flatten().copied().collect();
    touched.sort_unstable();
    touched.dedup();
    Ok(TripleSample {
        triples,
        scores,
        sorted,
        touched,
    })
}

/// `t* = s_(k)` with `k = round(theta * M)` (half away from zero).
pub fn choose_threshold(sorted: &[f64], theta: f64) -> Result<ThresholdChoice> {
    let m = sorted.len();
    if m == 0 {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(invalid("theta", format!("{theta} is outside [0, 1]")));
    }
    let k = (theta * m as f64).round() as i64;
    let (t_star, rule) = if k < 1 {
        (sorted[0], ThresholdRule::BelowRange)
    } else if k as usize > m {
        (sorted[m - 1], ThresholdRule::AboveRange)
    } else {
        (sorted[k as usize - 1], ThresholdRule::OrderStatistic)
    };
    Ok(ThresholdChoice {
        t_star,
        k,
        theta,
        rule,
    })
}

pub fn select_threshold(
    points: &[Point],
    m: usize,
    theta: f64,
    seed: u64,
) -> Result<(TripleSample, ThresholdChoice)> {
    let sample = sample_triples(points, m, seed)?;
    let choice = choose_threshold(&sample.sorted, theta)?;
    Ok((sample, choice))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutoClusterResult {
    pub sample: TripleSample,
    pub choice: ThresholdChoice,
    /// Nodes clustered spectrally, ascending.
    pub untouched: Vec<usize>,
    /// Spectral result on the untouched nodes (indexed like `untouched`).
    pub restricted: ClusterResult,
    /// Labels for all `N` nodes; touched nodes are assigned at random.
    pub labels: Vec<Label>,
}

impl AutoClusterResult {
    pub fn restricted_labels<'a>(&self, full: &'a [Label]) -> Vec<Label> {
        self.untouched.iter().map(|&i| full[i]).collect()
    }
}

/// Selects `t*`, clusters the untouched nodes at `t*`, and labels touched
/// nodes uniformly at random from the seeded stream.
pub fn autocluster(points: &[Point], m: usize, theta: f64, seed: u64) -> Result<AutoClusterResult> {
    let (sample, choice) = select_threshold(points, m, theta, seed)?;
    let untouched = sample.untouched(points.len());
    if untouched.len() < 3 {
        return Err(Error::SampleExhaustsNodes {
            remaining: untouched.len(),
        });
    }
    if !(choice.t_star > 0.0) {
        return Err(invalid(
            "t_star",
            "selected threshold is zero; the sampled triples are exactly collinear",
        ));
    }
    let sub: Vec<Point> = untouched.iter().map(|&i| points[i]).collect();
    let restricted = cluster(&sub, choice.t_star, seed)?;
    let mut labels = vec![0; points.len()];
    for (&i, &z) in untouched.iter().zip(&restricted.labels) {
        labels[i] = z;
    }
    for &i in &sample.touched {
        let mut r = rng::stream(seed, domain::TOUCHED_LABELS, i as u64);
        labels[i] = if r.random::<bool>() { 1 } else { 2 };
    }
    Ok(AutoClusterResult {
        sample,
        choice,
        untouched,
        restricted,
        labels,
    })
}
