//! Gaussian line mixture model: two segments, uniform positions along them,
//! isotropic Gaussian noise.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::point::Point;
use crate::rng::{self, domain};

/// Community label. Valid values are 1 and 2.
pub type Label = u8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSegment {
    center: Point,
    direction: Point,
    half_length: f64,
}

impl LineSegment {
    /// `direction` is normalized; it must be finite and nonzero.
    pub fn new(center: Point, direction: Point, half_length: f64) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("direction", "must be a finite nonzero vector"));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(invalid("half_length", format!("{half_length} is not positive")));
        }
        Ok(Self {
            center,
            direction: direction * (1.0 / norm),
            half_length,
        })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn direction(&self) -> Point {
        self.direction
    }

    /// Unit normal, the direction rotated by +90 degrees.
    pub fn normal(&self) -> Point {
        self.direction.perp()
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    /// `center + u * direction` for a signed arc-length coordinate `u`.
    pub fn point_at(&self, u: f64) -> Point {
        self.center + self.direction * u
    }

    pub fn endpoints(&self) -> (Point, Point) {
        (self.point_at(-self.half_length), self.point_at(self.half_length))
    }

    /// Signed arc-length coordinate of the orthogonal projection of `p`.
    pub fn project(&self, p: Point) -> f64 {
        (p - self.center).dot(self.direction)
    }
}

/// Orthogonal distance from `p` to the infinite line carrying `seg`.
pub fn segment_distance(p: Point, seg: &LineSegment) -> f64 {
    (p - seg.center).dot(seg.normal()).abs()
}

/// Two segments of half-length `half_length` crossing at the origin with
/// opening angle `alpha`, symmetric about the x-axis:
/// segment 1 runs along `(cos a/2, -sin a/2)`, segment 2 along `(cos a/2, sin a/2)`.
pub fn standard_cross(alpha: f64, half_length: f64) -> Result<(LineSegment, LineSegment)> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
        return Err(Error::InvalidAngle(alpha));
    }
    let (s, c) = (alpha / 2.0).sin_cos();
    let l1 = LineSegment::new(Point::ORIGIN, Point::new(c, -s), half_length)?;
    let l2 = LineSegment::new(Point::ORIGIN, Point::new(c, s), half_length)?;
    Ok((l1, l2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub seg1: LineSegment,
    pub seg2: LineSegment,
    pub sigma: f64,
    pub n_points: usize,
    pub seed: u64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(invalid("sigma", format!("{} is negative or not finite", self.sigma)));
        }
        if self.n_points < 3 {
            return Err(Error::SizeTooSmall(self.n_points));
        }
        Ok(())
    }

    pub fn segment(&self, label: Label) -> &LineSegment {
        match label {
            1 => &self.seg1,
            _ => &self.seg2,
        }
    }
}

/// The on-disk parameter file: a standard cross plus noise, size and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossParams {
    pub alpha: f64,
    pub half_length: f64,
    pub sigma: f64,
    pub n_points: usize,
    pub seed: u64,
}

impl Default for CrossParams {
    fn default() -> Self {
        Self {
            alpha: std::f64::consts::FRAC_PI_2,
            half_length: 1.0,
            sigma: 0.01,
            n_points: 200,
            seed: 0,
        }
    }
}

impl CrossParams {
    pub fn to_model(&self) -> Result<ModelParams> {
        let (seg1, seg2) = standard_cross(self.alpha, self.half_length)?;
        let params = ModelParams {
            seg1,
            seg2,
            sigma: self.sigma,
            n_points: self.n_points,
            seed: self.seed,
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub points: Vec<Point>,
    pub labels: Vec<Label>,
    pub params: ModelParams,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Latent draws behind one sampled point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Latent {
    /// Signed arc-length position of `U_i` on its segment.
    pub position: f64,
    /// The standard bivariate normal `Y_i`.
    pub noise: Point,
}

fn draw_point(params: &ModelParams, index: usize) -> (Point, Label, Latent) {
    let mut rng = rng::stream(params.seed, domain::POINTS, index as u64);
    let label: Label = if rng.random::<bool>() { 1 } else { 2 };
    let seg = params.segment(label);
    let h = seg.half_length();
    let position = rng.random_range(-h..=h);
    let noise = Point::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let point = seg.point_at(position) + noise * params.sigma;
    (point, label, Latent { position, noise })
}

/// Samples `X_i = U_i + sigma * Y_i` with `z_i` uniform on {1, 2} and `U_i`
/// uniform on segment `z_i`. Point `i` uses its own stream, so the result
/// does not depend on thread count.
pub fn sample_glmm(params: &ModelParams) -> Result<LabeledDataset> {
    sample_glmm_with_latents(params).map(|(d, _)| d)
}

/// [`sample_glmm`] plus the latent positions and noise for each point.
pub fn sample_glmm_with_latents(params: &ModelParams) -> Result<(LabeledDataset, Vec<Latent>)> {
    params.validate()?;
    let draws: Vec<_> = (0..params.n_points)
        .into_par_iter()
        .map(|i| draw_point(params, i))
        .collect();
    let mut points = Vec::with_capacity(draws.len());
    let mut labels = Vec::with_capacity(draws.len());
    let mut latents = Vec::with_capacity(draws.len());
    for (p, z, l) in draws {
        points.push(p);
        labels.push(z);
        latents.push(l);
    }
    Ok((
        LabeledDataset {
            points,
            labels,
            params: params.clone(),
        },
        latents,
    ))
}
