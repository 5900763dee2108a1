//! Monte-Carlo estimates of the events the closed-form bounds control.
//!
//! Samples are drawn in fixed-size chunks, chunk `c` from its own stream, so
//! estimates are identical for any thread count.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::Result;
use crate::model::{standard_cross, LineSegment};
use crate::point::Point;
use crate::rng::{self, domain, StreamRng};
use crate::tls::sigma_tls_sq;

const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub se: f64,
    pub samples: u64,
}

/// Fraction of `samples` draws for which `event` holds.
pub fn bernoulli<F>(samples: u64, seed: u64, event: F) -> McEstimate
where
    F: Fn(&mut StreamRng) -> bool + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, domain::MONTE_CARLO, c);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).filter(|_| event(&mut r)).count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    McEstimate {
        estimate: p,
        se: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    }
}

fn normal2(r: &mut StreamRng) -> Point {
    Point::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn noisy_point(r: &mut StreamRng, seg: &LineSegment, sigma: f64) -> Point {
    let h = seg.half_length();
    seg.point_at(r.random_range(-h..=h)) + normal2(r) * sigma
}

/// `1 - p`: a triple from one segment of length `ell` is rejected at `t`.
pub fn within_miss(t: f64, sigma: f64, ell: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    let seg = LineSegment::new(Point::ORIGIN, Point::new(1.0, 0.0), ell / 2.0)?;
    let t2 = t * t;
    Ok(bernoulli(samples, seed, |r| {
        let tri = [
            noisy_point(r, &seg, sigma),
            noisy_point(r, &seg, sigma),
            noisy_point(r, &seg, sigma),
        ];
        sigma_tls_sq(&tri) >= t2
    }))
}

/// `q`: a triple conditioned to span both segments of the perpendicular
/// cross is accepted at `t`.
pub fn between_accept(t: f64, sigma: f64, ell: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    let (l1, l2) = standard_cross(std::f64::consts::FRAC_PI_2, ell / 2.0)?;
    let t2 = t * t;
    Ok(bernoulli(samples, seed, |r| {
        let (pair, single) = if r.random::<bool>() { (&l1, &l2) } else { (&l2, &l1) };
        let tri = [
            noisy_point(r, pair, sigma),
            noisy_point(r, pair, sigma),
            noisy_point(r, single, sigma),
        ];
        sigma_tls_sq(&tri) < t2
    }))
}

/// Two same-segment discs of radius `sigma |Y_perp| + t` around uniform
/// centers intersect.
pub fn disc_intersect(t: f64, sigma: f64, ell: f64, samples: u64, seed: u64) -> McEstimate {
    let h = ell / 2.0;
    bernoulli(samples, seed, |r| {
        let u1 = r.random_range(-h..=h);
        let u2 = r.random_range(-h..=h);
        let r1 = sigma * r.sample::<f64, _>(StandardNormal).abs() + t;
        let r2 = sigma * r.sample::<f64, _>(StandardNormal).abs() + t;
        (u1 - u2).abs() < r1 + r2
    })
}

pub fn chi2_tail(k: u32, theta: f64, samples: u64, seed: u64) -> McEstimate {
    let level = theta * k as f64;
    bernoulli(samples, seed, |r| {
        (0..k).map(|_| r.sample::<f64, _>(StandardNormal).powi(2)).sum::<f64>() >= level
    })
}

pub fn rayleigh_cdf(t: f64, scale: f64, samples: u64, seed: u64) -> McEstimate {
    bernoulli(samples, seed, |r| (normal2(r) * scale).norm() <= t)
}

/// `P(|X - mu| >= delta mu)` for `X ~ Binomial(n, p)`.
pub fn binomial_tail(n: u64, p: f64, delta: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    let dist = Binomial::new(n, p).map_err(|e| crate::error::invalid("p", e.to_string()))?;
    let mu = n as f64 * p;
    Ok(bernoulli(samples, seed, |r| {
        (dist.sample(r) as f64 - mu).abs() >= delta * mu
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Passes when `mc <= theory + 3 se`.
    Upper,
    /// Passes when `mc >= theory - 3 se`.
    Lower,
    /// Asymptotic envelope; passes when `mc <= 2 theory`.
    Envelope,
    /// Exact value; passes when `|mc - theory| <= 3 se`.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound_name: String,
    pub params: String,
    pub kind: BoundKind,
    pub theory: f64,
    pub mc_estimate: f64,
    pub mc_se: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: &str, params: String, kind: BoundKind, theory: f64, mc: McEstimate) -> Self {
        let (m, se) = (mc.estimate, mc.se);
        let pass = match kind {
            BoundKind::Upper => m <= theory + 3.0 * se,
            BoundKind::Lower => m >= theory - 3.0 * se,
            BoundKind::Envelope => m <= 2.0 * theory,
            BoundKind::Exact => (m - theory).abs() <= 3.0 * se,
        };
        Self {
            bound_name: name.to_string(),
            params,
            kind,
            theory,
            mc_estimate: m,
            mc_se: se,
            pass,
        }
    }
}

/// Hyperedge-probability checks at one `(t, sigma, ell)`.
pub fn hyperedge_checks(t: f64, sigma: f64, ell: f64, samples: u64, seed: u64) -> Result<Vec<BoundCheck>> {
    let params = format!("t={t};sigma={sigma};ell={ell}");
    let cell = rng::derive_seed(seed, &[t.to_bits(), sigma.to_bits(), ell.to_bits()]);
    let miss = within_miss(t, sigma, ell, samples, rng::derive_seed(cell, &[1]))?;
    let q = between_accept(t, sigma, ell, samples, rng::derive_seed(cell, &[2]))?;
    Ok(vec![
        BoundCheck::new("within_miss_upper", params.clone(), BoundKind::Upper, bounds::within_miss_upper(t, sigma)?, miss),
        BoundCheck::new("between_accept_lower", params.clone(), BoundKind::Lower, bounds::between_accept_lower(t, sigma, ell)?, q),
        BoundCheck::new("between_accept_upper", params, BoundKind::Envelope, bounds::between_accept_upper(t, sigma, ell)?, q),
    ])
}

pub const HYPEREDGE_SIGMAS: [f64; 2] = [0.002, 0.01];
pub const HYPEREDGE_THRESHOLDS: [f64; 3] = [0.02, 0.05, 0.1];

/// Every bound on its default validation grid.
pub fn standard_checks(samples: u64, seed: u64) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    for sigma in HYPEREDGE_SIGMAS {
        for t in HYPEREDGE_THRESHOLDS {
            out.extend(hyperedge_checks(t, sigma, 2.0, samples, seed)?);
        }
    }
    let s = |k: u64| rng::derive_seed(seed, &[100 + k]);
    out.push(BoundCheck::new(
        "disc_intersect_upper",
        "t=0.02;sigma=0.002;ell=2".into(),
        BoundKind::Upper,
        bounds::disc_intersect_upper(0.02, 0.002, 2.0)?,
        disc_intersect(0.02, 0.002, 2.0, samples, s(0)),
    ));
    out.push(BoundCheck::new(
        "tail_chi2",
        "k=3;theta=2".into(),
        BoundKind::Upper,
        bounds::tail_chi2(3, 2.0)?,
        chi2_tail(3, 2.0, samples, s(1)),
    ));
    let median = (2.0 * 2f64.ln()).sqrt();
    for (t, tag) in [(0.5, 2), (median, 3), (2.0, 4)] {
        out.push(BoundCheck::new(
            "cdf_rayleigh",
            format!("t={t};scale=1"),
            BoundKind::Exact,
            bounds::cdf_rayleigh(t, 1.0)?,
            rayleigh_cdf(t, 1.0, samples, s(tag)),
        ));
    }
    out.push(BoundCheck::new(
        "tail_binomial",
        "n=600;p=0.5;delta=0.1".into(),
        BoundKind::Upper,
        bounds::tail_binomial(300.0, 0.1)?,
        binomial_tail(600, 0.5, 0.1, samples, s(5))?,
    ));
    Ok(out)
}
