//! Partitioning a data set into clusters and building each cluster's
//! representation: a PCA basis (linear mode) or a sample of its own secants
//! (secant mode), plus a small anchor set used to link clusters.

mod anchors;
mod kmeans;
mod model;

use std::fmt;
use std::str::FromStr;

pub use anchors::{select_anchors, AnchorStrategy};
pub use kmeans::{kmeans, KMeans, KMeansParams};
pub use model::{build_cluster_model, ClusterModel, ClusterModelParams, Mode};

use crate::error::{HsapError, Result};
use crate::linalg::{dot, norm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

impl FromStr for Metric {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown metric {other:?} (expected euclidean or cosine)"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

/// `1 - cos θ` between two nonzero vectors, in `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64> {
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(HsapError::ZeroVector);
    }
    let cos = (dot(u, v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

/// Groups row indices by label. Distinct label values are sorted and mapped
/// to clusters `1..=N` in that order.
pub fn partition_by_labels(labels: &[i64]) -> Vec<Vec<usize>> {
    let mut values: Vec<i64> = labels.to_vec();
    values.sort_unstable();
    values.dedup();
    let mut groups = vec![Vec::new(); values.len()];
    for (row, l) in labels.iter().enumerate() {
        let idx = values.binary_search(l).expect("label present");
        groups[idx].push(row);
    }
    groups
}
