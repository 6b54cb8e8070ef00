use super::{svd, Matrix};
use crate::error::{HsapError, Result};

/// Relative tolerance on the cumulative energy fraction, so exactly
/// low-rank data does not pick up roundoff directions.
const ENERGY_SLACK: f64 = 1e-12;
const ZERO_VARIANCE_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PcaTarget {
    /// Exactly `k` directions.
    Dimension(usize),
    /// The fewest directions whose cumulative squared singular values reach
    /// this fraction of the total.
    Energy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    MeanCentered,
    #[default]
    Raw,
}

impl std::str::FromStr for Centering {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" | "centered" => Ok(Centering::MeanCentered),
            "raw" => Ok(Centering::Raw),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown centering {other:?} (expected raw or mean)"
            ))),
        }
    }
}

impl std::fmt::Display for Centering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Centering::MeanCentered => "mean",
            Centering::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PcaBasis {
    /// Offset subtracted before the decomposition (zeros for raw data).
    pub mean: Vec<f64>,
    /// `n x k` orthonormal basis; may have zero columns.
    pub basis: Matrix,
    /// All singular values of the (centered) data, nonincreasing.
    pub spectrum: Vec<f64>,
}

/// PCA basis of the rows of `points` (T x n): the leading left singular
/// vectors of the data arranged as an n x T matrix.
pub fn pca_basis(points: &Matrix, target: PcaTarget, centering: Centering) -> Result<PcaBasis> {
    let (t, n) = points.shape();
    if t == 0 {
        return Err(HsapError::EmptyInput("PCA of zero points".into()));
    }
    let mean = match centering {
        Centering::MeanCentered => {
            let mut mean = vec![0.0; n];
            for i in 0..t {
                super::axpy(1.0, points.row(i), &mut mean);
            }
            mean.iter_mut().for_each(|x| *x /= t as f64);
            mean
        }
        Centering::Raw => vec![0.0; n],
    };
    let mut centered = points.clone();
    if centering == Centering::MeanCentered {
        for i in 0..t {
            for (j, m) in mean.iter().enumerate() {
                centered.set(i, j, points.get(i, j) - m);
            }
        }
    }

    let d = svd(&centered);
    let spectrum = d.singular_values;
    let k = match target {
        PcaTarget::Dimension(k) => {
            if k == 0 || k > n.min(t) {
                return Err(HsapError::InvalidParameter(format!(
                    "PCA dimension {k} outside 1..={} for {t} points in R^{n}",
                    n.min(t)
                )));
            }
            k
        }
        PcaTarget::Energy(e) => {
            if !(e > 0.0 && e <= 1.0) {
                return Err(HsapError::InvalidParameter(format!(
                    "energy fraction must lie in (0, 1], got {e}"
                )));
            }
            // variance below this floor is roundoff from the centering step
            let floor = ZERO_VARIANCE_RATIO * points.frobenius_norm();
            energy_dimension(&spectrum, e, floor)
        }
    };
    // the right factor of the T x n point matrix holds the principal directions
    let basis = d.right.leading_columns(k);
    Ok(PcaBasis {
        mean,
        basis,
        spectrum,
    })
}

/// Smallest `k` whose leading squared singular values reach fraction `e`;
/// zero when no singular value exceeds `floor`.
pub(crate) fn energy_dimension(spectrum: &[f64], e: f64, floor: f64) -> usize {
    let total: f64 = spectrum.iter().map(|s| s * s).sum();
    if total == 0.0 || spectrum[0] <= floor {
        return 0;
    }
    let mut acc = 0.0;
    for (i, s) in spectrum.iter().enumerate() {
        acc += s * s;
        if acc / total >= e - ENERGY_SLACK {
            return i + 1;
        }
    }
    spectrum.len()
}
