//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use linecluster::Point;

/// Sum of squared distances from `pts` to the best line with normal angle
/// `phi`; the best offset passes through the centroid.
pub fn line_cost(pts: &[Point; 3], phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let proj: Vec<f64> = pts.iter().map(|p| p.x * c + p.y * s).collect();
    let offset = proj.iter().sum::<f64>() / 3.0;
    proj.iter().map(|v| (v - offset).powi(2)).sum()
}

/// Minimum of `line_cost` by a 360-step angle grid followed by
/// golden-section refinement around the best grid step.
pub fn tls_brute_force(pts: &[Point; 3]) -> f64 {
    let step = std::f64::consts::PI / 360.0;
    let best = (0..360)
        .map(|i| i as f64 * step)
        .min_by(|a, b| line_cost(pts, *a).total_cmp(&line_cost(pts, *b)))
        .unwrap();
    let (mut a, mut b) = (best - step, best + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (line_cost(pts, x1), line_cost(pts, x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = line_cost(pts, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = line_cost(pts, x2);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    f1.min(f2).min(line_cost(pts, best))
}

/// Number of accepted triples containing every pair, by direct enumeration
/// of all ordered index triples.
pub fn similarity_brute_force(points: &[Point], t: f64) -> Vec<Vec<u32>> {
    let n = points.len();
    let mut w = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k || !(i < j && j < k) {
                    continue;
                }
                if tls_brute_force(&[points[i], points[j], points[k]]) < t * t {
                    for (a, b) in [(i, j), (j, i), (i, k), (k, i), (j, k), (k, j)] {
                        w[a][b] += 1;
                    }
                }
            }
        }
    }
    w
}
