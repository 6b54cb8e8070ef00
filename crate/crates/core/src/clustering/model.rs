use std::fmt;
use std::str::FromStr;

use super::{select_anchors, AnchorStrategy};
use crate::derive_seed;
use crate::error::{HsapError, Result};
use crate::linalg::{pca_basis, Centering, Matrix, PcaTarget};
use crate::secant::{sample_within_secants, SecantSet};

/// How a cluster's internal secant structure is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Orthonormal PCA basis of the mean-centered cluster.
    #[default]
    Linear,
    /// A uniform sample of the cluster's own secants.
    Secants,
}

impl FromStr for Mode {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Mode::Linear),
            "secants" | "secant" => Ok(Mode::Secants),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown mode {other:?} (expected linear or secants)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Linear => "linear",
            Mode::Secants => "secants",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModelParams {
    pub mode: Mode,
    /// Basis size rule in linear mode.
    pub target: PcaTarget,
    /// Upper bound on the basis size; the projection dimension minus one
    /// when driven by the projection engine.
    pub max_basis_dim: Option<usize>,
    /// Number of within-cluster secants sampled in secant mode.
    pub within_samples: usize,
    pub anchor_count: usize,
    pub anchor_strategy: AnchorStrategy,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ClusterModel {
    /// 1-based cluster index.
    pub index: usize,
    /// Row indices of the members, ascending.
    pub members: Vec<usize>,
    /// `n x k_j` orthonormal basis (linear mode).
    pub basis: Option<Matrix>,
    /// Cluster mean (linear mode).
    pub mean: Option<Vec<f64>>,
    /// Sampled within-cluster secants (secant mode).
    pub within: Option<SecantSet>,
    /// Anchor rows, a subset of `members`.
    pub anchors: Vec<usize>,
}

impl ClusterModel {
    /// `k_j`, the number of basis columns (0 in secant mode).
    pub fn basis_dim(&self) -> usize {
        self.basis.as_ref().map_or(0, Matrix::cols)
    }
}

/// Builds the representation of cluster `index` whose rows in `points` are
/// `members`.
pub fn build_cluster_model(
    points: &Matrix,
    members: &[usize],
    index: usize,
    params: &ClusterModelParams,
) -> Result<ClusterModel> {
    if members.is_empty() {
        return Err(HsapError::InvalidParameter(format!(
            "cluster {index} is empty"
        )));
    }
    if params.anchor_count == 0 {
        return Err(HsapError::InvalidParameter(
            "anchor count must be at least 1".into(),
        ));
    }
    let mut members = members.to_vec();
    members.sort_unstable();

    let mut model = ClusterModel {
        index,
        members,
        basis: None,
        mean: None,
        within: None,
        anchors: Vec::new(),
    };

    match params.mode {
        Mode::Linear => {
            let rows = points.select_rows(&model.members);
            let target = match params.target {
                // a fixed size cannot exceed what the cluster supports
                PcaTarget::Dimension(k) => {
                    PcaTarget::Dimension(k.min(rows.rows().min(rows.cols())))
                }
                energy => energy,
            };
            let pca = pca_basis(&rows, target, Centering::MeanCentered)?;
            let mut basis = pca.basis;
            if let Some(cap) = params.max_basis_dim {
                if basis.cols() > cap {
                    log::warn!(
                        "cluster {index}: basis dimension {} capped at {cap}",
                        basis.cols()
                    );
                    basis = basis.leading_columns(cap);
                }
            }
            model.basis = Some(basis);
            model.mean = Some(pca.mean);
        }
        Mode::Secants => {
            let within = if model.members.len() < 2 {
                log::warn!("cluster {index} has a single point and no within-cluster secants");
                SecantSet::empty(points.cols())
            } else {
                sample_within_secants(
                    points,
                    &model.members,
                    index,
                    params.within_samples,
                    derive_seed(params.seed, 2, index as u64),
                )?
            };
            model.within = Some(within);
        }
    }

    let count = if params.anchor_count > model.members.len() {
        log::warn!(
            "cluster {index}: {} anchors requested, only {} members",
            params.anchor_count,
            model.members.len()
        );
        model.members.len()
    } else {
        params.anchor_count
    };
    model.anchors = select_anchors(
        points,
        &model.members,
        count,
        params.anchor_strategy,
        derive_seed(params.seed, 1, index as u64),
    )?;
    Ok(model)
}
