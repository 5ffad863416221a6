use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_LLOYD_ITERATIONS: usize = 300;
pub const CONVERGENCE_SHIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// `k × dim`, row-major.
    pub centroids: Vec<f64>,
    pub assignments: Vec<u32>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding followed by Lloyd iterations until no centroid moves by
/// `CONVERGENCE_SHIFT` or more, capped at `MAX_LLOYD_ITERATIONS`.
///
/// Assignment ties go to the lowest centroid index; an emptied cluster keeps its
/// previous centroid.
pub fn kmeans(points: &[f64], dim: usize, k: usize, seed: u64) -> Result<KMeans> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::invalid("point buffer is not a whole number of rows"));
    }
    let n = points.len() / dim;
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if k > n {
        return Err(Error::TooManyClusters { k, available: n });
    }
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(row(i), row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if nearest[pick] == 0.0 {
                pick = (0..n).rev().find(|&i| nearest[i] > 0.0).expect("positive mass");
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k ≤ n")
        };
        chosen.push(next);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), row(next)));
        }
    }

    let mut centroids: Vec<f64> = chosen.iter().flat_map(|&i| row(i).iter().copied()).collect();
    let mut assignments = vec![0u32; n];
    let mut iterations = 0;
    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        for (i, a) in assignments.iter_mut().enumerate() {
            let p = row(i);
            let mut best = (f64::INFINITY, 0);
            for c in 0..k {
                let d = sq_dist(p, &centroids[c * dim..(c + 1) * dim]);
                if d < best.0 {
                    best = (d, c);
                }
            }
            *a = best.1 as u32;
        }
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &a) in assignments.iter().enumerate() {
            counts[a as usize] += 1;
            for (s, v) in sums[a as usize * dim..(a as usize + 1) * dim].iter_mut().zip(row(i)) {
                *s += v;
            }
        }
        let mut max_shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = 1.0 / counts[c] as f64;
            let mut shift = 0.0;
            for j in 0..dim {
                let v = sums[c * dim + j] * inv;
                shift += (v - centroids[c * dim + j]).powi(2);
                centroids[c * dim + j] = v;
            }
            max_shift = max_shift.max(shift.sqrt());
        }
        if max_shift < CONVERGENCE_SHIFT {
            break;
        }
    }
    Ok(KMeans {
        centroids,
        assignments,
        iterations,
    })
}
