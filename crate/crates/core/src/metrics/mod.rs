//! Validation toolkit: histogram distances between end-use distributions and
//! load-shape clustering with coverage/closeness comparisons.

mod cluster;

pub use cluster::{assign, closeness, coverage, kmeans, Clustering};

use serde::{Deserialize, Serialize};

use crate::types::HOURS;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("no samples to histogram")]
    EmptySamples,
    #[error("histograms have different bin edges")]
    EdgeMismatch,
    #[error("profile sums to zero; cannot normalize")]
    ZeroTotal,
    #[error("k = {k} exceeds the {n} available shapes")]
    KTooLarge { k: usize, n: usize },
    #[error("need at least two datasets for a distance matrix")]
    TooFewDatasets,
}

/// Which histogram distance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Js,
    Hellinger,
}

impl std::str::FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "js" => Ok(DistanceMetric::Js),
            "hellinger" => Ok(DistanceMetric::Hellinger),
            other => Err(format!("unknown metric `{other}` (expected js|hellinger)")),
        }
    }
}

/// Default bin count for distance matrices.
pub const MATRIX_BINS: usize = 50;
/// Default bin count for closeness comparisons.
pub const CLOSENESS_BINS: usize = 30;

/// A normalized histogram: `k + 1` ascending edges and `k` probabilities
/// summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Bins samples into `k_bins` equal-width bins over `range`, clipping
/// out-of-range samples into the end bins and normalizing counts to
/// probabilities. A degenerate range is widened by half a unit either side
/// so identical samples land in a single full bin.
pub fn histogram(
    samples: &[f64],
    k_bins: usize,
    range: (f64, f64),
) -> Result<Histogram, MetricsError> {
    if samples.is_empty() || k_bins == 0 {
        return Err(MetricsError::EmptySamples);
    }
    let (mut lo, mut hi) = range;
    if hi <= lo {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / k_bins as f64;
    let mut counts = vec![0usize; k_bins];
    for &x in samples {
        let bin = (((x - lo) / width).floor() as i64).clamp(0, k_bins as i64 - 1) as usize;
        counts[bin] += 1;
    }
    let n = samples.len() as f64;
    Ok(Histogram {
        edges: (0..=k_bins).map(|i| lo + i as f64 * width).collect(),
        probs: counts.into_iter().map(|c| c as f64 / n).collect(),
    })
}

fn check_edges(p: &Histogram, q: &Histogram) -> Result<(), MetricsError> {
    if p.edges.len() != q.edges.len()
        || p.edges.iter().zip(&q.edges).any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(MetricsError::EdgeMismatch);
    }
    Ok(())
}

/// Jensen-Shannon distance: the square root of the Jensen-Shannon
/// divergence against the pointwise mean, with base-2 logarithms so the
/// value lies in [0, 1]. Zero-probability terms contribute nothing.
pub fn js_distance(p: &Histogram, q: &Histogram) -> Result<f64, MetricsError> {
    check_edges(p, q)?;
    let kl_to_mean = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&pi, &qi)| {
                if pi <= 0.0 {
                    0.0
                } else {
                    let m = 0.5 * (pi + qi);
                    pi * (pi / m).log2()
                }
            })
            .sum()
    };
    let divergence = 0.5 * (kl_to_mean(&p.probs, &q.probs) + kl_to_mean(&q.probs, &p.probs));
    Ok(divergence.max(0.0).sqrt().min(1.0))
}

/// Hellinger distance of two probability vectors over identical edges.
pub fn hellinger(p: &Histogram, q: &Histogram) -> Result<f64, MetricsError> {
    check_edges(p, q)?;
    let sum: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&pi, &qi)| {
            let d = pi.sqrt() - qi.sqrt();
            d * d
        })
        .sum();
    Ok((sum.max(0.0).sqrt() / std::f64::consts::SQRT_2).min(1.0))
}

fn metric_fn(metric: DistanceMetric, p: &Histogram, q: &Histogram) -> Result<f64, MetricsError> {
    match metric {
        DistanceMetric::Js => js_distance(p, q),
        DistanceMetric::Hellinger => hellinger(p, q),
    }
}

/// A symmetric pairwise distance matrix over named datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Writes the matrix as CSV with a `name` header column.
    pub fn to_csv<W: std::io::Write>(&self, mut writer: W) -> std::io::Result<()> {
        write!(writer, "name")?;
        for name in &self.names {
            write!(writer, ",{name}")?;
        }
        writeln!(writer)?;
        for (name, row) in self.names.iter().zip(&self.values) {
            write!(writer, "{name}")?;
            for v in row {
                write!(writer, ",{v:.6}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }
}

/// Pairwise distances between sample sets, all histogrammed over the shared
/// union range with `bins` equal-width bins.
pub fn distance_matrix(
    datasets: &[(String, Vec<f64>)],
    metric: DistanceMetric,
    bins: usize,
) -> Result<DistanceMatrix, MetricsError> {
    if datasets.len() < 2 {
        return Err(MetricsError::TooFewDatasets);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, samples) in datasets {
        if samples.is_empty() {
            return Err(MetricsError::EmptySamples);
        }
        for &x in samples {
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    let histograms: Vec<Histogram> = datasets
        .iter()
        .map(|(_, samples)| histogram(samples, bins, (lo, hi)))
        .collect::<Result<_, _>>()?;

    let n = datasets.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric_fn(metric, &histograms[i], &histograms[j])?;
            values[i][j] = d;
            values[j][i] = d;
        }
    }
    Ok(DistanceMatrix {
        names: datasets.iter().map(|(name, _)| name.clone()).collect(),
        values,
    })
}

/// A 24-hour profile normalized by its daily total: pattern, not magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadShape {
    pub values: [f64; HOURS],
}

/// Normalizes an hourly kWh profile by its total. Zero-total profiles are
/// rejected; exclude them upstream.
pub fn normalize_shape(profile: &[f64; HOURS]) -> Result<LoadShape, MetricsError> {
    let total: f64 = profile.iter().sum();
    if total <= 0.0 {
        return Err(MetricsError::ZeroTotal);
    }
    Ok(LoadShape { values: std::array::from_fn(|t| profile[t] / total) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_samples_fill_one_bin() {
        let h = histogram(&[3.0; 50], 7, (3.0, 3.0)).unwrap();
        assert_eq!(h.probs.iter().filter(|&&p| p > 0.0).count(), 1);
        assert!((h.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_grid_gives_flat_histogram() {
        // 100 samples on a uniform grid over [0, 10), 10 bins of 10 each.
        let samples: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
        let h = histogram(&samples, 10, (0.0, 10.0)).unwrap();
        for &p in &h.probs {
            assert!((p - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_samples_clip_to_end_bins() {
        // -5 clips into the first bin, 99 into the last; 0.5 sits exactly on
        // the inner edge and belongs to the upper bin.
        let h = histogram(&[-5.0, 0.5, 99.0], 2, (0.0, 1.0)).unwrap();
        assert!((h.probs[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((h.probs[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_samples_are_rejected() {
        assert!(matches!(histogram(&[], 5, (0.0, 1.0)), Err(MetricsError::EmptySamples)));
    }

    fn hist(probs: &[f64]) -> Histogram {
        Histogram {
            edges: (0..=probs.len()).map(|i| i as f64).collect(),
            probs: probs.to_vec(),
        }
    }

    #[test]
    fn js_identity_is_zero() {
        let p = hist(&[0.2, 0.3, 0.5]);
        assert_eq!(js_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn js_disjoint_is_one() {
        let p = hist(&[1.0, 0.0]);
        let q = hist(&[0.0, 1.0]);
        assert!((js_distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn js_edge_mismatch_is_error() {
        let p = hist(&[1.0, 0.0]);
        let q = Histogram { edges: vec![0.0, 0.5, 1.0], probs: vec![0.0, 1.0] };
        assert!(matches!(js_distance(&p, &q), Err(MetricsError::EdgeMismatch)));
    }

    #[test]
    fn hellinger_identity_and_disjoint() {
        let p = hist(&[0.4, 0.6]);
        assert_eq!(hellinger(&p, &p).unwrap(), 0.0);
        let a = hist(&[1.0, 0.0]);
        let b = hist(&[0.0, 1.0]);
        assert!((hellinger(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hellinger_hand_value() {
        let p = hist(&[0.5, 0.5]);
        let q = hist(&[0.25, 0.75]);
        assert!((hellinger(&p, &q).unwrap() - 0.18459).abs() < 1e-5);
    }

    #[test]
    fn matrix_of_identical_datasets_is_zero() {
        let a = ("a".to_string(), vec![1.0, 2.0, 3.0, 4.0]);
        let b = ("b".to_string(), vec![1.0, 2.0, 3.0, 4.0]);
        let m = distance_matrix(&[a, b], DistanceMetric::Js, 10).unwrap();
        assert_eq!(m.values, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn matrix_diagonal_is_zero_and_cells_match_pairwise_metric() {
        let sets = vec![
            ("x".to_string(), vec![0.0, 0.1, 0.4, 0.9, 1.3]),
            ("y".to_string(), vec![0.5, 0.6, 0.7, 2.0, 2.2]),
            ("z".to_string(), vec![1.0, 1.1, 1.2, 1.4, 1.9]),
        ];
        let m = distance_matrix(&sets, DistanceMetric::Hellinger, 8).unwrap();
        for i in 0..3 {
            assert_eq!(m.values[i][i], 0.0);
        }
        // Oracle: recompute one cell independently over the union range.
        let lo = 0.0;
        let hi = 2.2;
        let hx = histogram(&sets[0].1, 8, (lo, hi)).unwrap();
        let hz = histogram(&sets[2].1, 8, (lo, hi)).unwrap();
        let expect = hellinger(&hx, &hz).unwrap();
        assert!((m.values[0][2] - expect).abs() < 1e-12);
        assert_eq!(m.values[0][2], m.values[2][0]);
    }

    #[test]
    fn constant_profile_normalizes_flat() {
        let shape = normalize_shape(&[2.0; HOURS]).unwrap();
        for v in shape.values {
            assert!((v - 1.0 / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spike_profile_normalizes_to_unit_spike() {
        let mut profile = [0.0; HOURS];
        profile[18] = 7.3;
        let shape = normalize_shape(&profile).unwrap();
        assert_eq!(shape.values[18], 1.0);
        assert_eq!(shape.values.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn zero_total_is_rejected() {
        assert!(matches!(normalize_shape(&[0.0; HOURS]), Err(MetricsError::ZeroTotal)));
    }

    proptest! {
        #[test]
        fn distances_are_symmetric_bounded_and_zero_on_identity(
            raw_p in proptest::collection::vec(0.0f64..1.0, 12),
            raw_q in proptest::collection::vec(0.0f64..1.0, 12),
        ) {
            let norm = |raw: &[f64]| {
                let s: f64 = raw.iter().sum::<f64>().max(1e-12);
                hist(&raw.iter().map(|x| x / s).collect::<Vec<_>>())
            };
            let p = norm(&raw_p);
            let q = norm(&raw_q);
            for metric in [DistanceMetric::Js, DistanceMetric::Hellinger] {
                let pq = metric_fn(metric, &p, &q).unwrap();
                let qp = metric_fn(metric, &q, &p).unwrap();
                prop_assert!((pq - qp).abs() < 1e-12);
                prop_assert!((0.0..=1.0).contains(&pq));
                prop_assert!(metric_fn(metric, &p, &p).unwrap() == 0.0);
            }
        }

        #[test]
        fn normalized_shapes_sum_to_one(profile in proptest::collection::vec(0.001f64..10.0, HOURS)) {
            let arr: [f64; HOURS] = profile.try_into().unwrap();
            let shape = normalize_shape(&arr).unwrap();
            let sum: f64 = shape.values.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
        }
    }
}
