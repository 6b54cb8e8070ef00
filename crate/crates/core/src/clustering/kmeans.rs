use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Metric;
use crate::error::{HsapError, Result};
use crate::linalg::{dot, norm, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    pub clusters: usize,
    pub metric: Metric,
    pub seed: u64,
    pub max_iters: usize,
}

#[derive(Debug, Clone)]
pub struct KMeans {
    /// Cluster label per input row, in `1..=clusters`.
    pub labels: Vec<usize>,
    /// One centroid per row; unit vectors under the cosine metric.
    pub centroids: Matrix,
    /// Objective after every Lloyd update: the sum of squared distances
    /// (euclidean) or of cosine distances (cosine) to assigned centroids.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Under the cosine metric the points are compared by direction only and
/// each centroid is the normalized mean of its members' unit directions
/// (spherical k-means). A cluster that empties out is reseeded with the
/// point lying farthest from its own centroid.
pub fn kmeans(points: &Matrix, params: &KMeansParams) -> Result<KMeans> {
    let (t, n) = points.shape();
    let k = params.clusters;
    if k == 0 || k > t {
        return Err(HsapError::InvalidParameter(format!(
            "cannot form {k} clusters from {t} points"
        )));
    }
    let work = match params.metric {
        Metric::Euclidean => points.clone(),
        Metric::Cosine => {
            let mut w = points.clone();
            for i in 0..t {
                let len = norm(points.row(i));
                if len == 0.0 {
                    return Err(HsapError::ZeroVector);
                }
                for j in 0..n {
                    w.set(i, j, points.get(i, j) / len);
                }
            }
            w
        }
    };
    let metric = params.metric;
    let dist = move |x: &[f64], c: &[f64]| -> f64 {
        match metric {
            Metric::Euclidean => x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum(),
            Metric::Cosine => (1.0 - dot(x, c)).max(0.0),
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut centroids = seed_plus_plus(&work, k, &mut rng, &dist);

    let assign = |centroids: &Matrix| -> Vec<(usize, f64)> {
        (0..t)
            .into_par_iter()
            .map(|i| {
                let x = work.row(i);
                let mut best = (0, dist(x, centroids.row(0)));
                for c in 1..k {
                    let d = dist(x, centroids.row(c));
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                best
            })
            .collect()
    };

    let mut labels: Vec<usize> = Vec::new();
    let mut objective_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    if params.max_iters == 0 {
        labels = assign(&centroids).into_iter().map(|(c, _)| c).collect();
    }
    for _ in 0..params.max_iters {
        let assigned = assign(&centroids);
        let mut next: Vec<usize> = assigned.iter().map(|&(c, _)| c).collect();
        reseed_empty(&mut next, &assigned, k);
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
        update_centroids(&work, &labels, metric, &mut centroids);
        let objective: f64 = (0..t)
            .map(|i| dist(work.row(i), centroids.row(labels[i])))
            .sum();
        objective_trace.push(objective);
        iterations += 1;
    }
    Ok(KMeans {
        labels: labels.into_iter().map(|c| c + 1).collect(),
        centroids,
        objective_trace,
        iterations,
        converged,
    })
}

fn seed_plus_plus<F>(work: &Matrix, k: usize, rng: &mut ChaCha8Rng, dist: &F) -> Matrix
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    let (t, n) = work.shape();
    let mut chosen = vec![false; t];
    let mut centroids = Matrix::zeros(k, n);
    let first = rng.random_range(0..t);
    chosen[first] = true;
    let mut nearest: Vec<f64> = (0..t).map(|i| dist(work.row(i), work.row(first))).collect();
    let mut picks = vec![first];
    while picks.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if acc > r && d > 0.0 {
                    pick = Some(i);
                    break;
                }
            }
            // rounding can leave `acc` just short of `r`
            pick.unwrap_or_else(|| {
                nearest
                    .iter()
                    .rposition(|&d| d > 0.0)
                    .expect("positive mass")
            })
        } else {
            (0..t).find(|&i| !chosen[i]).expect("k <= t")
        };
        chosen[pick] = true;
        picks.push(pick);
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(dist(work.row(i), work.row(pick)));
        }
    }
    for (c, &p) in picks.iter().enumerate() {
        for j in 0..n {
            centroids.set(c, j, work.get(p, j));
        }
    }
    centroids
}

/// Moves the point farthest from its centroid (among clusters with more than
/// one member) into each empty cluster.
fn reseed_empty(labels: &mut [usize], assigned: &[(usize, f64)], k: usize) {
    let mut counts = vec![0usize; k];
    for &c in labels.iter() {
        counts[c] += 1;
    }
    let mut moved = vec![false; labels.len()];
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let donor = (0..labels.len())
            .filter(|&i| !moved[i] && counts[labels[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if assigned[b].1 >= assigned[i].1 => Some(b),
                _ => Some(i),
            })
            .expect("k <= t guarantees a donor");
        counts[labels[donor]] -= 1;
        labels[donor] = empty;
        counts[empty] += 1;
        moved[donor] = true;
        log::debug!(
            "k-means: reseeded empty cluster {} with point {donor}",
            empty + 1
        );
    }
}

fn update_centroids(work: &Matrix, labels: &[usize], metric: Metric, centroids: &mut Matrix) {
    let (k, n) = centroids.shape();
    let mut sums = vec![vec![0.0; n]; k];
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(work.row(i)) {
            *s += x;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let mut centroid = sums[c].clone();
        match metric {
            Metric::Euclidean => centroid.iter_mut().for_each(|x| *x /= counts[c] as f64),
            Metric::Cosine => {
                let len = norm(&centroid);
                if len == 0.0 {
                    continue;
                }
                centroid.iter_mut().for_each(|x| *x /= len);
            }
        }
        for (j, &x) in centroid.iter().enumerate() {
            centroids.set(c, j, x);
        }
    }
}
