use std::fmt;
use std::str::FromStr;

use crate::clustering::{AnchorStrategy, Metric, Mode};
use crate::error::{HsapError, Result};
use crate::linalg::{Centering, PcaTarget};
use crate::secant::DEFAULT_SECANT_CAP;

use super::SvdPath;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Leading `k` principal directions of the data.
    #[default]
    Pca,
    /// Gram-Schmidt of a seeded Gaussian matrix.
    Random,
}

impl FromStr for InitStrategy {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca" => Ok(InitStrategy::Pca),
            "random" => Ok(InitStrategy::Random),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown init {other:?} (expected pca or random)"
            ))),
        }
    }
}

impl fmt::Display for InitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitStrategy::Pca => "pca",
            InitStrategy::Random => "random",
        })
    }
}

/// Early exit once the mean objective over the last `window` iterations
/// differs from the mean over the `window` before it by less than `tol`
/// (relative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub window: usize,
    pub tol: f64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            window: 20,
            tol: 1e-6,
        }
    }
}

impl StopRule {
    pub(crate) fn should_stop(&self, objectives: &[f64]) -> bool {
        let w = self.window;
        let len = objectives.len();
        if len < 2 * w {
            return false;
        }
        let mean = |s: &[f64]| s.iter().sum::<f64>() / w as f64;
        let older = mean(&objectives[len - 2 * w..len - w]);
        let recent = mean(&objectives[len - w..]);
        (recent - older).abs() <= self.tol * older.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsapConfig {
    /// Target dimension.
    pub k: usize,
    /// Number of k-means clusters (ignored when `use_labels` is set).
    pub clusters: usize,
    /// Take the partition from the data labels instead of k-means.
    pub use_labels: bool,
    pub mode: Mode,
    pub alpha: f64,
    pub max_iters: usize,
    /// Anchors per cluster.
    pub anchors: usize,
    pub anchor_strategy: AnchorStrategy,
    /// Cluster basis size rule in linear mode.
    pub basis: PcaTarget,
    /// Within-cluster secants sampled per cluster in secant mode.
    pub within_samples: usize,
    pub metric: Metric,
    pub kmeans_iters: usize,
    pub seed: u64,
    pub init: InitStrategy,
    pub init_centering: Centering,
    pub stop: Option<StopRule>,
    pub svd_path: SvdPath,
    /// Largest number of secants the run may materialize.
    pub cap: usize,
}

impl Default for HsapConfig {
    fn default() -> Self {
        Self {
            k: 2,
            clusters: 1,
            use_labels: false,
            mode: Mode::Linear,
            alpha: 0.01,
            max_iters: 80,
            anchors: 20,
            anchor_strategy: AnchorStrategy::Random,
            basis: PcaTarget::Energy(0.95),
            within_samples: 500,
            metric: Metric::Euclidean,
            kmeans_iters: 300,
            seed: 0,
            init: InitStrategy::Pca,
            init_centering: Centering::Raw,
            stop: Some(StopRule::default()),
            svd_path: SvdPath::Smallest,
            cap: DEFAULT_SECANT_CAP,
        }
    }
}

impl HsapConfig {
    /// Checks the parameters against an ambient dimension `n`.
    ///
    /// `k = n` is accepted (the projection is then an isometry) so that
    /// dimension sweeps can include the full dimension.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(HsapError::InvalidParameter(msg));
        if self.k == 0 || self.k > n {
            return bad(format!("target dimension {} outside 1..={n}", self.k));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !self.use_labels && self.clusters == 0 {
            return bad("cluster count must be at least 1".into());
        }
        if self.anchors == 0 {
            return bad("anchor count must be at least 1".into());
        }
        if self.within_samples == 0 {
            return bad("within-cluster sample size must be at least 1".into());
        }
        match self.basis {
            PcaTarget::Energy(e) if !(e > 0.0 && e <= 1.0) => {
                return bad(format!("energy fraction must lie in (0, 1], got {e}"));
            }
            PcaTarget::Dimension(0) => {
                return bad("cluster basis dimension must be at least 1".into())
            }
            _ => {}
        }
        if let Some(stop) = self.stop {
            if stop.window == 0 || !(stop.tol >= 0.0 && stop.tol.is_finite()) {
                return bad(format!(
                    "stop rule needs a positive window and a finite tolerance, got {} and {}",
                    stop.window, stop.tol
                ));
            }
        }
        Ok(())
    }
}
