//! Total-least-squares fit of a point triple.
//!
//! The minimum over all lines of the summed squared orthogonal distances of
//! three points equals the smallest eigenvalue of their 2x2 scatter matrix,
//! so every score here is closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

pub type Triple = [Point; 3];

/// Second moments of a centered triple (sums, not means).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatterSummary {
    pub s_xx: f64,
    pub s_xy: f64,
    pub s_yy: f64,
}

impl ScatterSummary {
    pub fn trace(&self) -> f64 {
        self.s_xx + self.s_yy
    }

    #[inline]
    fn half_spread(&self) -> f64 {
        0.5 * (self.s_xx - self.s_yy).hypot(2.0 * self.s_xy)
    }

    #[inline]
    pub fn lambda_min(&self) -> f64 {
        (0.5 * self.trace() - self.half_spread()).max(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        0.5 * self.trace() + self.half_spread()
    }

    /// Unit eigenvector of the larger eigenvalue, first nonzero coordinate
    /// positive. Isotropic scatter yields `(1, 0)`.
    pub fn major_axis(&self) -> Point {
        let phi = 0.5 * (2.0 * self.s_xy).atan2(self.s_xx - self.s_yy);
        let (s, c) = phi.sin_cos();
        Point::new(c, s).sign_normalized()
    }
}

#[inline]
pub fn centroid(triple: &Triple) -> Point {
    Point::new(
        (triple[0].x + triple[1].x + triple[2].x) / 3.0,
        (triple[0].y + triple[1].y + triple[2].y) / 3.0,
    )
}

#[inline]
pub fn scatter(triple: &Triple) -> ScatterSummary {
    let m = centroid(triple);
    let mut s = ScatterSummary {
        s_xx: 0.0,
        s_xy: 0.0,
        s_yy: 0.0,
    };
    for p in triple {
        let dx = p.x - m.x;
        let dy = p.y - m.y;
        s.s_xx += dx * dx;
        s.s_xy += dx * dy;
        s.s_yy += dy * dy;
    }
    s
}

/// Squared TLS score: `min_L sum_i d(X_i, L)^2`, computed as `lambda_min(S)`.
#[inline]
pub fn sigma_tls_sq(triple: &Triple) -> f64 {
    scatter(triple).lambda_min()
}

#[inline]
pub fn sigma_tls(triple: &Triple) -> f64 {
    sigma_tls_sq(triple).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedLine {
    pub point: Point,
    pub direction: Point,
}

impl FittedLine {
    pub fn distance(&self, p: Point) -> f64 {
        (p - self.point).dot(self.direction.perp()).abs()
    }

    pub fn residual(&self, triple: &Triple) -> f64 {
        triple.iter().map(|&p| self.distance(p).powi(2)).sum()
    }
}

/// The TLS line of a triple: through the centroid along the major axis.
pub fn best_fit_line(triple: &Triple) -> Result<FittedLine> {
    let s = scatter(triple);
    if s.trace() == 0.0 {
        return Err(Error::DegenerateTriple);
    }
    Ok(FittedLine {
        point: centroid(triple),
        direction: s.major_axis(),
    })
}

/// A tangent line to two circles centered on the x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TangentLine {
    /// `y = slope * (x - x_intercept)`.
    Sloped { slope: f64, x_intercept: f64 },
    /// `y = level`.
    Horizontal { level: f64 },
}

impl TangentLine {
    pub fn distance(&self, p: Point) -> f64 {
        match *self {
            TangentLine::Sloped { slope, x_intercept } => {
                (slope * (p.x - x_intercept) - p.y).abs() / slope.hypot(1.0)
            }
            TangentLine::Horizontal { level } => (p.y - level).abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommonTangents {
    /// The pair crossing between the circles.
    pub transverse: [TangentLine; 2],
    /// The pair keeping both circles on the same side.
    pub direct: [TangentLine; 2],
}

impl CommonTangents {
    pub fn iter(&self) -> impl Iterator<Item = &TangentLine> {
        self.transverse.iter().chain(self.direct.iter())
    }
}

/// Four common tangents of the circles `(c1, 0; r1)` and `(c2, 0; r2)`,
/// which must be exterior to each other.
pub fn common_tangents(c1: f64, r1: f64, c2: f64, r2: f64) -> Result<CommonTangents> {
    if !(r1 > 0.0 && r2 > 0.0) {
        return Err(crate::error::invalid("radius", "radii must be positive"));
    }
    let gap = (c1 - c2).abs();
    if !(gap > r1 + r2) {
        return Err(Error::CirclesNotExterior {
            distance: gap,
            radii: r1 + r2,
        });
    }
    let d2 = (c1 - c2).powi(2);
    let k = (r1 + r2) / (d2 - (r1 + r2).powi(2)).sqrt();
    let a = (r1 * c2 + r2 * c1) / (r1 + r2);
    let transverse = [
        TangentLine::Sloped { slope: k, x_intercept: a },
        TangentLine::Sloped { slope: -k, x_intercept: a },
    ];
    let direct = if r1 == r2 {
        [
            TangentLine::Horizontal { level: r1 },
            TangentLine::Horizontal { level: -r1 },
        ]
    } else {
        let kp = (r1 - r2) / (d2 - (r1 - r2).powi(2)).sqrt();
        let ap = (r1 * c2 - r2 * c1) / (r1 - r2);
        [
            TangentLine::Sloped { slope: kp, x_intercept: ap },
            TangentLine::Sloped { slope: -kp, x_intercept: ap },
        ]
    };
    Ok(CommonTangents { transverse, direct })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Triple {
        [a.into(), b.into(), c.into()]
    }

    fn equilateral() -> Triple {
        let h = 3f64.sqrt() / 2.0;
        tri((0.0, 0.0), (1.0, 0.0), (0.5, h))
    }

    #[test]
    fn scatter_examples() {
        let s = scatter(&tri((0.0, 0.0), (1.0, 0.0), (2.0, 0.0)));
        assert_eq!((s.s_xx, s.s_xy, s.s_yy), (2.0, 0.0, 0.0));
        let s = scatter(&tri((3.0, 4.0), (3.0, 4.0), (3.0, 4.0)));
        assert_eq!((s.s_xx, s.s_xy, s.s_yy), (0.0, 0.0, 0.0));
        let s = scatter(&tri((0.0, 0.0), (1.0, 0.0), (0.5, 0.3)));
        assert!((s.s_xx - 0.5).abs() < 1e-15);
        assert!(s.s_xy.abs() < 1e-15);
        assert!((s.s_yy - 0.06).abs() < 1e-15);
    }

    #[test]
    fn score_examples() {
        assert_eq!(sigma_tls_sq(&tri((0.0, 0.0), (1.0, 1.0), (2.0, 2.0))), 0.0);
        assert!((sigma_tls_sq(&tri((0.0, 0.0), (1.0, 0.0), (0.5, 0.3))) - 0.06).abs() < 1e-15);
        assert!((sigma_tls_sq(&equilateral()) - 0.5).abs() < 1e-15);
        let coincident = tri((1.0, 2.0), (1.0, 2.0), (1.0, 2.0));
        assert_eq!(sigma_tls_sq(&coincident), 0.0);
    }

    #[test]
    fn best_fit_examples() {
        let l = best_fit_line(&tri((0.0, 0.0), (1.0, 0.0), (2.0, 0.0))).unwrap();
        assert_eq!(l.direction, Point::new(1.0, 0.0));
        assert_eq!(l.point, Point::new(1.0, 0.0));
        let l = best_fit_line(&tri((0.0, 0.0), (0.0, 1.0), (0.0, 2.0))).unwrap();
        assert!(l.direction.x.abs() < 1e-15 && (l.direction.y - 1.0).abs() < 1e-15);
        let t = equilateral();
        let l = best_fit_line(&t).unwrap();
        assert!((l.residual(&t) - 0.5).abs() < 1e-12);
        let other = FittedLine { point: l.point, direction: l.direction.perp() };
        assert!((other.residual(&t) - 0.5).abs() < 1e-12);
        assert!(matches!(
            best_fit_line(&tri((1.0, 1.0), (1.0, 1.0), (1.0, 1.0))),
            Err(Error::DegenerateTriple)
        ));
    }

    #[test]
    fn isotropic_tie_break_is_deterministic() {
        assert_eq!(best_fit_line(&equilateral()).unwrap().direction, Point::new(1.0, 0.0));
    }

    #[test]
    fn best_fit_residual_matches_score() {
        let t = tri((0.1, -0.4), (1.3, 0.2), (-0.7, 0.9));
        let l = best_fit_line(&t).unwrap();
        assert!((l.residual(&t) - sigma_tls_sq(&t)).abs() < 1e-10);
        assert!((l.direction.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tangents_equal_radii() {
        let ct = common_tangents(-1.0, 0.5, 1.0, 0.5).unwrap();
        for t in ct.transverse {
            match t {
                TangentLine::Sloped { slope, x_intercept } => {
                    assert!((slope.abs() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
                    assert_eq!(x_intercept, 0.0);
                }
                _ => panic!("transverse tangents are never horizontal"),
            }
        }
        assert_eq!(ct.direct[0], TangentLine::Horizontal { level: 0.5 });
        assert_eq!(ct.direct[1], TangentLine::Horizontal { level: -0.5 });
    }

    #[test]
    fn tangents_unequal_radii() {
        let ct = common_tangents(-2.0, 0.5, 2.0, 0.25).unwrap();
        let expect = 0.25 / (16.0f64 - 0.0625).sqrt();
        for t in ct.direct {
            let TangentLine::Sloped { slope, .. } = t else { panic!() };
            assert!((slope.abs() - expect).abs() < 1e-15);
        }
        for t in ct.iter() {
            assert!((t.distance(Point::new(-2.0, 0.0)) - 0.5).abs() < 1e-9);
            assert!((t.distance(Point::new(2.0, 0.0)) - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn tangents_reject_overlapping_circles() {
        assert!(matches!(
            common_tangents(0.0, 1.0, 1.5, 1.0),
            Err(Error::CirclesNotExterior { .. })
        ));
    }
}
