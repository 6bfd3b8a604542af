//! Load-shape clustering: seeded k-means with Euclidean distance, plus the
//! coverage and closeness comparisons built on it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{hellinger, histogram, LoadShape, MetricsError, CLOSENESS_BINS};
use crate::types::HOURS;

const MAX_ITERS: usize = 300;
const SHIFT_TOL: f64 = 1e-8;

/// A fitted clustering of load shapes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub k: usize,
    pub centers: Vec<[f64; HOURS]>,
    /// Nearest-center label per input shape (ties to the lowest index).
    pub labels: Vec<usize>,
    /// Euclidean distance of each input shape to its center.
    pub distances: Vec<f64>,
}

fn dist2(a: &[f64; HOURS], b: &[f64; HOURS]) -> f64 {
    let mut sum = 0.0;
    for t in 0..HOURS {
        let d = a[t] - b[t];
        sum += d * d;
    }
    sum
}

fn nearest(point: &[f64; HOURS], centers: &[[f64; HOURS]]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (i, center) in centers.iter().enumerate() {
        let d2 = dist2(point, center);
        if d2 < best_d2 {
            best_d2 = d2;
            best = i;
        }
    }
    (best, best_d2)
}

fn kmeans_plus_plus_seed(
    points: &[[f64; HOURS]],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<[f64; HOURS]> {
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..points.len())]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                u -= w;
                if u < 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass sits on existing centers; fall back to a
            // uniform pick.
            rng.random_range(0..points.len())
        };
        centers.push(points[next]);
        for (i, point) in points.iter().enumerate() {
            d2[i] = d2[i].min(dist2(point, centers.last().unwrap()));
        }
    }
    centers
}

/// Lloyd's algorithm with k-means++ seeding from `seed`. Iterates until the
/// largest center shift drops below 1e-8 or 300 iterations pass; an emptied
/// cluster is re-seeded from the point farthest from its assigned center.
/// Deterministic given `(shapes, k, seed)`.
pub fn kmeans(shapes: &[LoadShape], k: usize, seed: u64) -> Result<Clustering, MetricsError> {
    let n = shapes.len();
    if k == 0 || k > n {
        return Err(MetricsError::KTooLarge { k, n });
    }
    let points: Vec<[f64; HOURS]> = shapes.iter().map(|s| s.values).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = kmeans_plus_plus_seed(&points, k, &mut rng);
    let mut labels = vec![0usize; n];

    for _ in 0..MAX_ITERS {
        for (i, point) in points.iter().enumerate() {
            labels[i] = nearest(point, &centers).0;
        }

        let mut sums = vec![[0.0; HOURS]; k];
        let mut counts = vec![0usize; k];
        for (point, &label) in points.iter().zip(&labels) {
            counts[label] += 1;
            for t in 0..HOURS {
                sums[label][t] += point[t];
            }
        }

        // Re-seed empty clusters from the farthest currently assigned point.
        let mut taken: Vec<usize> = Vec::new();
        for cluster in 0..k {
            if counts[cluster] > 0 {
                continue;
            }
            let farthest = (0..n)
                .filter(|i| !taken.contains(i))
                .max_by(|&i, &j| {
                    let di = dist2(&points[i], &centers[labels[i]]);
                    let dj = dist2(&points[j], &centers[labels[j]]);
                    di.total_cmp(&dj)
                })
                .expect("more points than clusters");
            taken.push(farthest);
            sums[cluster] = points[farthest];
            counts[cluster] = 1;
        }

        let mut shift: f64 = 0.0;
        for cluster in 0..k {
            let mut new_center = sums[cluster];
            for slot in new_center.iter_mut() {
                *slot /= counts[cluster] as f64;
            }
            shift = shift.max(dist2(&new_center, &centers[cluster]).sqrt());
            centers[cluster] = new_center;
        }
        if shift < SHIFT_TOL {
            break;
        }
    }

    let mut distances = vec![0.0; n];
    for (i, point) in points.iter().enumerate() {
        let (label, d2) = nearest(point, &centers);
        labels[i] = label;
        distances[i] = d2.sqrt();
    }
    Ok(Clustering { k, centers, labels, distances })
}

/// Assigns each shape to its nearest center (ties to the lowest index) and
/// returns the labels with their Euclidean distances.
pub fn assign(shapes: &[LoadShape], centers: &[[f64; HOURS]]) -> (Vec<usize>, Vec<f64>) {
    let mut labels = Vec::with_capacity(shapes.len());
    let mut distances = Vec::with_capacity(shapes.len());
    for shape in shapes {
        let (label, d2) = nearest(&shape.values, centers);
        labels.push(label);
        distances.push(d2.sqrt());
    }
    (labels, distances)
}

/// Fraction of the reference clustering's clusters hit by at least one
/// assigned point.
pub fn coverage(reference: &Clustering, assigned_labels: &[usize]) -> f64 {
    let mut hit = vec![false; reference.k];
    for &label in assigned_labels {
        if label < reference.k {
            hit[label] = true;
        }
    }
    hit.iter().filter(|&&h| h).count() as f64 / reference.k as f64
}

/// Hellinger distance between the two center-distance distributions,
/// histogrammed over shared bins spanning `[0, max of both]`. Asymmetry
/// comes from which set defined the clustering that produced the distances.
pub fn closeness(
    ref_distances: &[f64],
    other_distances: &[f64],
    bins: usize,
) -> Result<f64, MetricsError> {
    if ref_distances.is_empty() || other_distances.is_empty() {
        return Err(MetricsError::EmptySamples);
    }
    let max = ref_distances
        .iter()
        .chain(other_distances)
        .fold(0.0f64, |acc, &d| acc.max(d));
    let bins = if bins == 0 { CLOSENESS_BINS } else { bins };
    let p = histogram(ref_distances, bins, (0.0, max))?;
    let q = histogram(other_distances, bins, (0.0, max))?;
    hellinger(&p, &q)
}
