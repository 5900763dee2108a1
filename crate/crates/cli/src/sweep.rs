//! Seeded grids of clustering trials.

use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use linecluster::hypergraph::{build_similarity_with, BuildOptions};
use linecluster::io::fmt_f64;
use linecluster::lines::{angle_error, center_error, recover_lines};
use linecluster::model::{sample_glmm, CrossParams, Label, ModelParams};
use linecluster::rng::derive_seed;
use linecluster::{autocluster, cluster_similarity, mle_recover, report};

pub const SWEEP_HEADER: [&str; 16] = [
    "n",
    "sigma",
    "t",
    "trial",
    "seed",
    "ham_star",
    "rate",
    "exact",
    "runtime_ms",
    "p_hat",
    "q_hat",
    "sin_angle_1",
    "sin_angle_2",
    "center_err_1",
    "center_err_2",
    "error",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Spectral,
    Autocluster,
    Oracle,
}

/// Either an explicit list of thresholds or the keyword `"auto"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    List(Vec<f64>),
    Keyword(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_points: Vec<usize>,
    pub sigma: Vec<f64>,
    pub t: ThresholdSpec,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_ell")]
    pub ell: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    /// Sampled triples for `autocluster`.
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_alpha() -> f64 {
    std::f64::consts::FRAC_PI_2
}
fn default_ell() -> f64 {
    2.0
}
fn default_algorithm() -> Algorithm {
    Algorithm::Spectral
}
fn default_m() -> usize {
    30
}
fn default_theta() -> f64 {
    0.25
}

impl SweepConfig {
    /// Threshold values of the grid; `None` stands for `"auto"`.
    pub fn thresholds(&self) -> Result<Vec<Option<f64>>> {
        match &self.t {
            ThresholdSpec::List(v) => {
                if v.is_empty() {
                    bail!("`t` must not be empty");
                }
                if let Some(bad) = v.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                    bail!("threshold {bad} is not positive");
                }
                Ok(v.iter().map(|&t| Some(t)).collect())
            }
            ThresholdSpec::Keyword(k) if k == "auto" => Ok(vec![None]),
            ThresholdSpec::Keyword(k) => bail!("`t` must be a list of numbers or \"auto\", got {k:?}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points.is_empty() || self.sigma.is_empty() {
            bail!("`n_points` and `sigma` must not be empty");
        }
        if self.trials == 0 {
            bail!("`trials` must be at least 1");
        }
        let thresholds = self.thresholds()?;
        match self.algorithm {
            Algorithm::Spectral if thresholds.contains(&None) => bail!("algorithm `spectral` needs explicit thresholds"),
            Algorithm::Autocluster if thresholds.iter().any(Option::is_some) => {
                bail!("algorithm `autocluster` chooses its own threshold; set `t` to \"auto\"")
            }
            _ => {}
        }
        for &n in &self.n_points {
            self.params(n, self.sigma[0], 0).to_model()?;
        }
        for &s in &self.sigma {
            self.params(self.n_points[0], s, 0).to_model()?;
        }
        Ok(())
    }

    fn params(&self, n: usize, sigma: f64, seed: u64) -> CrossParams {
        CrossParams {
            alpha: self.alpha,
            half_length: self.ell / 2.0,
            sigma,
            n_points: n,
            seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub sigma: f64,
    /// The fixed threshold, or the selected `t*` for `autocluster`.
    pub t: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub ham_star: Option<usize>,
    pub rate: Option<f64>,
    pub exact: Option<bool>,
    pub runtime_ms: f64,
    pub p_hat: Option<f64>,
    pub q_hat: Option<f64>,
    pub sin_angle_1: Option<f64>,
    pub sin_angle_2: Option<f64>,
    pub center_err_1: Option<f64>,
    pub center_err_2: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    cell_t: f64,
}

/// Line errors under the label matching that minimizes total angle error.
fn line_errors(points: &[linecluster::Point], labels: &[Label], model: &ModelParams) -> Option<[f64; 4]> {
    let est = recover_lines(points, labels).ok()?;
    let errs = |a: usize, b: usize| {
        let (s1, s2) = (model.segment(1), model.segment(2));
        [
            angle_error(&est[a], s1),
            angle_error(&est[b], s2),
            center_error(&est[a], s1.center()),
            center_error(&est[b], s2.center()),
        ]
    };
    let (id, sw) = (errs(0, 1), errs(1, 0));
    Some(if id[0] + id[1] <= sw[0] + sw[1] { id } else { sw })
}

fn run_trial(config: &SweepConfig, n: usize, sigma: f64, t: Option<f64>, seed: u64, row: &mut SweepRow) -> linecluster::Result<()> {
    let data = sample_glmm(&config.params(n, sigma, seed).to_model()?)?;
    let labels = match config.algorithm {
        Algorithm::Spectral => {
            let t = t.expect("validated");
            let (w, stats) = build_similarity_with(&data.points, t, Some(&data.labels), &BuildOptions::default())?;
            row.p_hat = Some(stats.p_hat());
            row.q_hat = Some(stats.q_hat());
            cluster_similarity(&w, seed)?.labels
        }
        Algorithm::Autocluster => {
            let r = autocluster(&data.points, config.m, config.theta, seed)?;
            row.t = Some(r.choice.t_star);
            r.labels
        }
        Algorithm::Oracle => mle_recover(&data)?,
    };
    let rep = report(&labels, &data.labels)?;
    row.ham_star = Some(rep.ham_star);
    row.rate = Some(rep.rate);
    row.exact = Some(rep.exact);
    if let Some([a1, a2, c1, c2]) = line_errors(&data.points, &labels, &data.params) {
        row.sin_angle_1 = Some(a1);
        row.sin_angle_2 = Some(a2);
        row.center_err_1 = Some(c1);
        row.center_err_2 = Some(c2);
    }
    Ok(())
}

/// One row per (cell, trial). Cells run in parallel, trials within a cell in
/// order; trial `k` of cell `c` uses `derive_seed(config.seed, [c, k])`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let thresholds = config.thresholds()?;
    let mut cells = Vec::new();
    for &n in &config.n_points {
        for &sigma in &config.sigma {
            for &t in &thresholds {
                cells.push((n, sigma, t));
            }
        }
    }
    let mut rows: Vec<SweepRow> = cells
        .par_iter()
        .enumerate()
        .flat_map_iter(|(c, &(n, sigma, t))| {
            (0..config.trials).map(move |trial| {
                let seed = derive_seed(config.seed, &[c as u64, trial as u64]);
                let mut row = SweepRow {
                    n,
                    sigma,
                    t,
                    trial,
                    seed,
                    cell_t: t.unwrap_or(0.0),
                    ..Default::default()
                };
                let start = Instant::now();
                if let Err(e) = run_trial(config, n, sigma, t, seed, &mut row) {
                    row.error = Some(e.to_string());
                }
                row.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                row
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.sigma.total_cmp(&b.sigma))
            .then(a.cell_t.total_cmp(&b.cell_t))
            .then(a.trial.cmp(&b.trial))
    });
    Ok(rows)
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn row_record(r: &SweepRow) -> Vec<String> {
    vec![
        r.n.to_string(),
        fmt_f64(r.sigma),
        opt(r.t, fmt_f64),
        r.trial.to_string(),
        r.seed.to_string(),
        opt(r.ham_star, |v| v.to_string()),
        opt(r.rate, fmt_f64),
        opt(r.exact, |v| v.to_string()),
        fmt_f64(r.runtime_ms),
        opt(r.p_hat, fmt_f64),
        opt(r.q_hat, fmt_f64),
        opt(r.sin_angle_1, fmt_f64),
        opt(r.sin_angle_2, fmt_f64),
        opt(r.center_err_1, fmt_f64),
        opt(r.center_err_2, fmt_f64),
        r.error.clone().unwrap_or_default(),
    ]
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record(row_record(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell aggregates for the JSON summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub sigma: f64,
    pub t: Option<f64>,
    pub trials: usize,
    pub errors: usize,
    pub exact_fraction: f64,
    pub median_rate: Option<f64>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 { values[m] } else { 0.5 * (values[m - 1] + values[m]) })
}

pub fn summarize(rows: &[SweepRow]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    for chunk in rows.chunk_by(|a, b| a.n == b.n && a.sigma == b.sigma && a.cell_t == b.cell_t) {
        let mut rates: Vec<f64> = chunk.iter().filter_map(|r| r.rate).collect();
        let exact = chunk.iter().filter(|r| r.exact == Some(true)).count();
        out.push(CellSummary {
            n: chunk[0].n,
            sigma: chunk[0].sigma,
            t: if chunk[0].cell_t > 0.0 { Some(chunk[0].cell_t) } else { None },
            trials: chunk.len(),
            errors: chunk.iter().filter(|r| r.error.is_some()).count(),
            exact_fraction: exact as f64 / chunk.len() as f64,
            median_rate: median(&mut rates),
        });
    }
    out
}
