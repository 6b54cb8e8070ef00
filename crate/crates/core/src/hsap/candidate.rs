use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::clustering::ClusterModel;
use crate::error::{HsapError, Result};
use crate::linalg::{dot, smallest_singular_triplet, svd, Matrix};
use crate::secant::SecantSet;

/// Frames are rejected when `|PᵀP - I|` exceeds this.
pub(crate) const FRAME_TOL: f64 = 1e-8;
/// Candidates within this of the minimum count as tied. Values reached by
/// different routes (an SVD, a norm) differ by roundoff even when equal.
pub const TIE_TOL: f64 = 1e-12;

/// How the smallest singular triplet of `PᵀV_j` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SvdPath {
    /// Only the smallest triplet.
    #[default]
    Smallest,
    /// A full SVD, taking its last triplet. For cross-checking.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateKind {
    /// A singular value of `PᵀV_j`; the source is the 1-based cluster index.
    Cluster,
    /// A projected secant length; the source is the 0-based secant index.
    Secant,
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateKind::Cluster => "cluster",
            CandidateKind::Secant => "secant",
        })
    }
}

impl FromStr for CandidateKind {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cluster" => Ok(CandidateKind::Cluster),
            "secant" => Ok(CandidateKind::Secant),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown candidate kind {other:?}"
            ))),
        }
    }
}

/// The minimum of the candidate set and its representative vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    /// In `[0, 1]`.
    pub value: f64,
    /// Unit representative vector in `R^n`.
    pub w: Vec<f64>,
    /// Its image in the span of the frame.
    pub w_p: Vec<f64>,
    pub kind: CandidateKind,
    pub source: usize,
}

/// Smallest value of the candidate set: every singular value of `PᵀV_j`
/// over the cluster bases and every `|Pᵀs|` over `secants`.
///
/// Clusters are scanned before secants, each in index order, and the first
/// value within [`TIE_TOL`] of the minimum wins. Models without a basis
/// (secant mode) contribute nothing; their within-cluster secants are
/// expected inside `secants`.
pub fn evaluate_candidates(
    p: &Matrix,
    models: &[ClusterModel],
    secants: &SecantSet,
    path: SvdPath,
) -> Result<Candidate> {
    p.check_orthonormal(FRAME_TOL)?;
    if secants.dim() != p.rows() && !secants.is_empty() {
        return Err(HsapError::DimensionMismatch(format!(
            "secants live in R^{} but the frame in R^{}",
            secants.dim(),
            p.rows()
        )));
    }

    let per_cluster: Vec<Candidate> = models
        .par_iter()
        .map(|m| cluster_candidate(p, m, path))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let frame = p.transpose();
    let secant_values: Vec<f64> = (0..secants.len())
        .into_par_iter()
        .map(|i| projected_length(&frame, secants.get(i)))
        .collect();

    let min = per_cluster
        .iter()
        .map(|c| c.value)
        .chain(secant_values.iter().copied())
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(HsapError::EmptyCandidateSet);
    }
    let cutoff = min + TIE_TOL;
    if let Some(c) = per_cluster.into_iter().find(|c| c.value <= cutoff) {
        return Ok(c);
    }
    let idx = secant_values
        .iter()
        .position(|&v| v <= cutoff)
        .expect("the minimum is attained");
    let w = secants.get(idx).to_vec();
    let w_p = p.matvec(&p.t_matvec(&w));
    Ok(Candidate {
        value: secant_values[idx],
        w,
        w_p,
        kind: CandidateKind::Secant,
        source: idx,
    })
}

/// `|Pᵀs|` clipped to 1, with `frame = Pᵀ`.
fn projected_length(frame: &Matrix, s: &[f64]) -> f64 {
    let sq: f64 = (0..frame.rows())
        .map(|c| dot(frame.row(c), s).powi(2))
        .sum();
    sq.sqrt().min(1.0)
}

fn cluster_candidate(p: &Matrix, model: &ClusterModel, path: SvdPath) -> Result<Option<Candidate>> {
    let Some(v) = model.basis.as_ref().filter(|v| v.cols() > 0) else {
        return Ok(None);
    };
    if v.rows() != p.rows() {
        return Err(HsapError::DimensionMismatch(format!(
            "cluster {} basis lives in R^{} but the frame in R^{}",
            model.index,
            v.rows(),
            p.rows()
        )));
    }
    let m = p.t_matmul(v)?;
    let (sigma, y, z) = match path {
        SvdPath::Smallest => {
            let t = smallest_singular_triplet(&m);
            (t.value, t.left, t.right)
        }
        SvdPath::Full => {
            let d = svd(&m);
            let last = d.singular_values.len() - 1;
            (
                d.singular_values[last],
                d.left.column(last),
                d.right.column(last),
            )
        }
    };
    Ok(Some(Candidate {
        value: sigma.min(1.0),
        w: v.matvec(&z),
        w_p: p.matvec(&y),
        kind: CandidateKind::Cluster,
        source: model.index,
    }))
}

/// `(min |Pᵀs|, index)` over the set, lowest index on ties; `None` when the
/// set is empty. Values are clipped to 1 to absorb roundoff.
pub fn min_projected_secant(p: &Matrix, secants: &SecantSet) -> Option<(f64, usize)> {
    if secants.is_empty() {
        return None;
    }
    let frame = p.transpose();
    (0..secants.len())
        .into_par_iter()
        .map(|i| (projected_length(&frame, secants.get(i)), i))
        .reduce_with(|a, b| match a.0.total_cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        })
}

/// Empirical lower Lipschitz constant of `x -> Pᵀx` on the given unit
/// secants: `min |Pᵀs|`.
pub fn bilipschitz_lower_bound(p: &Matrix, secants: &SecantSet) -> Result<f64> {
    p.check_orthonormal(FRAME_TOL)?;
    min_projected_secant(p, secants)
        .map(|(v, _)| v)
        .ok_or(HsapError::EmptySecantSet)
}
