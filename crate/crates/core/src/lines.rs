//! Per-cluster center and direction estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym2_eigen;
use crate::model::{Label, LineSegment};
use crate::point::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineEstimate {
    pub center: Point,
    pub direction: Point,
    pub cluster_size: usize,
    pub top_eigenvalue: f64,
    pub bottom_eigenvalue: f64,
    /// Eigen-gap below 1e-12: the direction is arbitrary.
    pub rank_deficient: bool,
}

/// Mean, `1/n` covariance, and leading eigenvector of each estimated cluster.
pub fn recover_lines(points: &[Point], labels: &[Label]) -> Result<[LineEstimate; 2]> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch(points.len(), labels.len()));
    }
    let estimate = |k: Label| -> Result<LineEstimate> {
        let members: Vec<Point> = points
            .iter()
            .zip(labels)
            .filter(|(_, &z)| z == k)
            .map(|(p, _)| *p)
            .collect();
        if members.len() < 2 {
            return Err(Error::EmptyCluster(k));
        }
        let n = members.len() as f64;
        let center = Point::mean(&members);
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for p in &members {
            let d = *p - center;
            sxx += d.x * d.x;
            sxy += d.x * d.y;
            syy += d.y * d.y;
        }
        let (top, bottom, axis) = sym2_eigen(sxx / n, sxy / n, syy / n);
        Ok(LineEstimate {
            center,
            direction: Point::new(axis[0], axis[1]).sign_normalized(),
            cluster_size: members.len(),
            top_eigenvalue: top,
            bottom_eigenvalue: bottom,
            rank_deficient: top - bottom < 1e-12,
        })
    };
    Ok([estimate(1)?, estimate(2)?])
}

/// Sine of the acute angle between the estimated and true directions.
pub fn angle_error(est: &LineEstimate, truth: &LineSegment) -> f64 {
    let c = est.direction.dot(truth.direction()) / (est.direction.norm() * truth.direction().norm());
    (1.0 - c * c).max(0.0).sqrt()
}

pub fn center_error(est: &LineEstimate, truth_mu: Point) -> f64 {
    est.center.distance(truth_mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est_with(direction: Point) -> LineEstimate {
        LineEstimate {
            center: Point::ORIGIN,
            direction,
            cluster_size: 2,
            top_eigenvalue: 1.0,
            bottom_eigenvalue: 0.0,
            rank_deficient: false,
        }
    }

    #[test]
    fn three_points_on_x_axis() {
        let p = [Point::new(-1.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(5.0, 5.0), Point::new(6.0, 7.0)];
        let [a, b] = recover_lines(&p, &[1, 1, 1, 2, 2]).unwrap();
        assert_eq!(a.center, Point::ORIGIN);
        assert_eq!(a.direction, Point::new(1.0, 0.0));
        assert_eq!(a.cluster_size, 3);
        assert!((a.top_eigenvalue - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(b.cluster_size, 2);
    }

    #[test]
    fn noiseless_cluster_angle() {
        let phi: f64 = 0.7;
        let dir = Point::new(phi.cos(), phi.sin());
        let p: Vec<Point> = (0..20).map(|i| Point::new(1.0, -2.0) + dir * (i as f64 * 0.1 - 1.0)).collect();
        let mut z = vec![1; 20];
        z[0] = 2;
        z[1] = 2;
        let [a, _] = recover_lines(&p, &z).unwrap();
        let seg = LineSegment::new(Point::new(1.0, -2.0), dir, 1.0).unwrap();
        assert!(angle_error(&a, &seg) < 1e-9);
    }

    #[test]
    fn angle_examples() {
        let seg = LineSegment::new(Point::ORIGIN, Point::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(angle_error(&est_with(Point::new(1.0, 0.0)), &seg), 0.0);
        assert_eq!(angle_error(&est_with(Point::new(-1.0, 0.0)), &seg), 0.0);
        assert!((angle_error(&est_with(Point::new(0.0, 1.0)), &seg) - 1.0).abs() < 1e-15);
        let d30 = Point::new(30f64.to_radians().cos(), 30f64.to_radians().sin());
        assert!((angle_error(&est_with(d30), &seg) - 0.5).abs() < 1e-12);
        assert!((angle_error(&est_with(-d30), &seg) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn center_examples() {
        let e = est_with(Point::new(1.0, 0.0));
        assert_eq!(center_error(&e, Point::ORIGIN), 0.0);
        assert_eq!(center_error(&e, Point::new(0.0, 1.0)), 1.0);
        assert_eq!(center_error(&e, Point::new(0.1, 0.0)), 0.1);
    }

    #[test]
    fn empty_and_rank_deficient() {
        let p = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 2.0)];
        assert!(matches!(recover_lines(&p, &[1, 1, 2]), Err(Error::EmptyCluster(2))));
        let p = [Point::new(1.0, 1.0), Point::new(1.0, 1.0), Point::new(0.0, 0.0), Point::new(3.0, 0.0)];
        let [a, b] = recover_lines(&p, &[1, 1, 2, 2]).unwrap();
        assert!(a.rank_deficient);
        assert!(!b.rank_deficient);
    }
}
