mod common;

use std::time::{Duration, Instant};

use common::{similarity_brute_force, tls_brute_force};
use linecluster::hypergraph::{build_similarity, build_similarity_with, BuildOptions};
use linecluster::{sample_glmm, CrossParams, Point};

fn dataset(n: usize, sigma: f64, seed: u64) -> Vec<Point> {
    let p = CrossParams { sigma, n_points: n, seed, ..Default::default() };
    sample_glmm(&p.to_model().unwrap()).unwrap().points
}

/// A threshold in the widest gap between consecutive sorted scores, so an
/// independent score computation cannot land on the other side of it.
fn separated_threshold(points: &[Point]) -> f64 {
    let n = points.len();
    let mut scores = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                scores.push(tls_brute_force(&[points[i], points[j], points[k]]));
            }
        }
    }
    scores.sort_by(f64::total_cmp);
    let mid = scores.len() / 4;
    let (lo, hi) = (mid / 2, mid + mid / 2);
    let i = (lo..hi)
        .max_by(|&a, &b| (scores[a + 1] / scores[a]).total_cmp(&(scores[b + 1] / scores[b])))
        .unwrap();
    (scores[i] * scores[i + 1]).sqrt().sqrt()
}

#[test]
fn matches_brute_force_enumeration() {
    let pts = dataset(24, 0.05, 11);
    let t = separated_threshold(&pts);
    let w = build_similarity(&pts, t).unwrap();
    let oracle = similarity_brute_force(&pts, t);
    for i in 0..pts.len() {
        assert_eq!(w.row(i), &oracle[i][..], "row {i}");
    }
}

#[test]
fn row_sums_count_incident_hyperedges() {
    let pts = dataset(40, 0.02, 5);
    let t = 0.05;
    let w = build_similarity(&pts, t).unwrap();
    let n = pts.len();
    let mut degree = vec![0u64; n];
    let mut edges = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if linecluster::sigma_tls_sq(&[pts[i], pts[j], pts[k]]) < t * t {
                    edges += 1;
                    for v in [i, j, k] {
                        degree[v] += 1;
                    }
                }
            }
        }
    }
    assert!(edges > 0);
    for (i, d) in degree.iter().enumerate() {
        let row: u64 = w.row(i).iter().map(|&c| c as u64).sum();
        assert_eq!(row, 2 * d);
        assert_eq!(w.get(i, i), 0);
    }
    let total: u64 = w.as_slice().iter().map(|&c| c as u64).sum();
    assert_eq!(total, 6 * edges);
}

#[test]
fn symmetric_and_monotone_in_threshold() {
    let pts = dataset(60, 0.02, 9);
    let mut prev = build_similarity(&pts, 0.01).unwrap();
    for t in [0.02, 0.05, 0.1, 0.5] {
        let w = build_similarity(&pts, t).unwrap();
        for i in 0..60 {
            for j in 0..60 {
                assert_eq!(w.get(i, j), w.get(j, i));
                assert!(w.get(i, j) >= prev.get(i, j));
            }
        }
        prev = w;
    }
}

#[test]
fn identical_across_thread_counts() {
    let pts = dataset(80, 0.02, 3);
    let z: Vec<u8> = (0..80).map(|i| 1 + (i % 2) as u8).collect();
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| build_similarity_with(&pts, 0.05, Some(&z), &BuildOptions::default()).unwrap())
    };
    let (w1, s1) = run(1);
    let (w4, s4) = run(4);
    assert_eq!(w1, w4);
    assert_eq!(s1, s4);
}

fn best_of(runs: usize, f: impl Fn()) -> Duration {
    (0..runs)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .min()
        .unwrap()
}

#[test]
fn cost_grows_cubically() {
    let small = dataset(200, 0.01, 1);
    let large = dataset(400, 0.01, 1);
    let t_small = best_of(3, || {
        build_similarity(&small, 0.05).unwrap();
    });
    let t_large = best_of(3, || {
        build_similarity(&large, 0.05).unwrap();
    });
    let ratio = t_large.as_secs_f64() / t_small.as_secs_f64();
    assert!((4.0..=16.0).contains(&ratio), "N=200 {t_small:?}, N=400 {t_large:?}, ratio {ratio}");
}
