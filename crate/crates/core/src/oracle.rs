//! Known-parameter baseline: per-point maximum likelihood classification and
//! the exact single-point error probability for a symmetric cross.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid, Error, Result};
use crate::model::{segment_distance, Label, LabeledDataset, LineSegment};
use crate::point::Point;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_DENSITY_NODES: usize = 128;
pub const DEFAULT_PERR_NODES: usize = 2048;
const PERR_PANEL_NODES: usize = 16;
/// Half-width of the integration window, in noise standard deviations.
const WINDOW_SIGMAS: f64 = 12.0;

/// Density of a uniform point on `segment` plus `N(0, sigma^2 I)` noise.
#[derive(Clone, Debug)]
pub struct MixtureDensity {
    segment: LineSegment,
    sigma: f64,
    rule: GaussLegendre,
}

impl MixtureDensity {
    pub fn new(segment: LineSegment, sigma: f64, quadrature_nodes: usize) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::ZeroSigma);
        }
        if quadrature_nodes < 16 {
            return Err(invalid("quadrature_nodes", "need at least 16 nodes"));
        }
        Ok(Self {
            segment,
            sigma,
            rule: GaussLegendre::new(quadrature_nodes),
        })
    }

    pub fn segment(&self) -> &LineSegment {
        &self.segment
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.rule.len()
    }

    /// `ln f(x)`.
    ///
    /// The 2-D Gaussian splits into the normal offset `d` (closed form) and
    /// the along-segment integral, evaluated by Gauss-Legendre on the part
    /// of the segment where the integrand exceeds `exp(-72)` of its peak.
    /// The peak factor is pulled out so nothing underflows.
    pub fn log_density(&self, x: Point) -> f64 {
        let s = self.sigma;
        let h = self.segment.half_length();
        let u0 = self.segment.project(x);
        let d = segment_distance(x, &self.segment);
        let e = (u0.abs() - h).max(0.0);
        let r = (e * e + (WINDOW_SIGMAS * s).powi(2)).sqrt();
        let lo = (u0 - r).max(-h);
        let hi = (u0 + r).min(h);
        let two_s2 = 2.0 * s * s;
        let along = self
            .rule
            .integrate(lo, hi, |u| (-((u - u0).powi(2) - e * e) / two_s2).exp());
        -(d * d + e * e) / two_s2 + along.ln()
            - (2.0 * std::f64::consts::PI * s * s * self.segment.length()).ln()
    }

    pub fn density(&self, x: Point) -> f64 {
        self.log_density(x).exp()
    }
}

/// `1` iff `f1(x) > f2(x)`; ties go to `2`.
pub fn mle_classify(x: Point, d1: &MixtureDensity, d2: &MixtureDensity) -> Label {
    if d1.log_density(x) > d2.log_density(x) {
        1
    } else {
        2
    }
}

/// Noiseless limit of the likelihood rule: the nearer segment wins, ties to 2.
fn nearest_segment(x: Point, l1: &LineSegment, l2: &LineSegment) -> Label {
    let dist = |seg: &LineSegment| {
        let u = seg.project(x).clamp(-seg.half_length(), seg.half_length());
        x.distance(seg.point_at(u))
    };
    if dist(l1) < dist(l2) {
        1
    } else {
        2
    }
}

/// Classifies every point with the true segments and noise level.
pub fn mle_recover(dataset: &LabeledDataset) -> Result<Vec<Label>> {
    let p = &dataset.params;
    if p.sigma == 0.0 {
        return Ok(dataset
            .points
            .iter()
            .map(|&x| nearest_segment(x, &p.seg1, &p.seg2))
            .collect());
    }
    let d1 = MixtureDensity::new(p.seg1, p.sigma, DEFAULT_DENSITY_NODES)?;
    let d2 = MixtureDensity::new(p.seg2, p.sigma, DEFAULT_DENSITY_NODES)?;
    Ok(dataset
        .points
        .par_iter()
        .map(|&x| mle_classify(x, &d1, &d2))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// The single-quadrant integral.
    pub perr: f64,
    /// Probability that the likelihood rule mislabels a point, `2 perr`:
    /// the wrong-decision region is two opposite quadrants, each carrying
    /// the integral once.
    pub misclassification: f64,
    /// `lim_{sigma -> 0} perr / sigma`.
    pub asymptote: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub ell: f64,
}

/// Upper tail of the standard normal.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Limit of `perr / sigma` as the noise vanishes.
pub fn perr_asymptote(alpha: f64, ell: f64) -> f64 {
    let th = alpha / 2.0;
    (th.tan() + 1.0 / th.tan()) / (ell * (2.0 * std::f64::consts::PI).sqrt())
}

/// Error integral for two segments of length `ell` crossing at their
/// midpoints with angle `alpha in (0, pi/2]`:
/// `perr = (1/ell) * int_{-ell/2}^{ell/2} Q(-u cos(a/2)/s) Q(u sin(a/2)/s) du`.
/// This is the chance that a point of segment 1 lands in one of the two
/// quadrants where segment 2 is more likely; see `misclassification`.
/// A cross with `alpha in (pi/2, pi)` is the cross at `pi - alpha` rotated
/// by a right angle, so its error is `perr_exact(pi - alpha, ..)`.
///
/// The integrand changes on the scale `sigma` around `u = 0`, so panels are
/// graded geometrically toward the origin on both halves.
pub fn perr_exact(alpha: f64, ell: f64, sigma: f64, quadrature_nodes: usize) -> Result<ErrorReport> {
    if !(alpha > 0.0 && alpha <= std::f64::consts::FRAC_PI_2) {
        return Err(invalid("alpha", format!("{alpha} is outside (0, pi/2]")));
    }
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(invalid("ell", "must be positive"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::ZeroSigma);
    }
    let panels = (quadrature_nodes / PERR_PANEL_NODES).max(2);
    let per_side = panels / 2;
    let rule = GaussLegendre::new(PERR_PANEL_NODES);
    let (sin_t, cos_t) = (alpha / 2.0).sin_cos();
    let integrand = |u: f64| normal_sf(-u * cos_t / sigma) * normal_sf(u * sin_t / sigma);

    let half = ell / 2.0;
    // finest panel about sigma / 4 wide, unless uniform panels are finer
    let finest = (0.25 * sigma).min(half / per_side as f64);
    let ratio = (half / finest).powf(1.0 / (per_side as f64 - 1.0).max(1.0));
    let mut edges = vec![0.0];
    if per_side == 1 || ratio <= 1.0 {
        edges.extend((1..=per_side).map(|j| half * j as f64 / per_side as f64));
    } else {
        edges.extend((0..per_side).map(|j| finest * ratio.powi(j as i32)));
        *edges.last_mut().expect("nonempty") = half;
    }
    let neg: Vec<f64> = edges.iter().rev().map(|x| -x).collect();
    let total = rule.integrate_panels(&neg, integrand) + rule.integrate_panels(&edges, integrand);
    Ok(ErrorReport {
        perr: total / ell,
        misclassification: 2.0 * total / ell,
        asymptote: perr_asymptote(alpha, ell),
        sigma,
        alpha,
        ell,
    })
}
