use super::candidate::FRAME_TOL;
use super::Candidate;
use crate::error::{HsapError, Result};
use crate::linalg::{axpy, norm, orthonormalize_columns, scale, Matrix, DEFAULT_MGS_TOL};

/// Below this `|Pᵀw|` the representative is treated as orthogonal to the
/// frame and the first column is shifted toward it directly.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Relative distance from the span of the frame beyond which a candidate
/// is considered to belong to a different frame.
pub const STALE_TOL: f64 = 1e-8;

/// One frame update toward the candidate's representative vector `w`.
///
/// General case: the column most aligned with `w` is dropped, the
/// normalized image `w_p` is put first and the set is re-orthonormalized
/// (same span), then the first column is replaced by
/// `normalize((1 - α) P̂₁ + α (w - P̂₁))` and the rest are re-orthonormalized
/// against it. When `w` is numerically orthogonal to the frame the first
/// column becomes `(1 - α) P₁ + α w` and the whole frame is
/// re-orthonormalized.
pub fn update_projection(p: &Matrix, cand: &Candidate, alpha: f64) -> Result<Matrix> {
    let (n, k) = p.shape();
    if !(0.0..1.0).contains(&alpha) {
        return Err(HsapError::InvalidParameter(format!(
            "alpha must lie in [0, 1), got {alpha}"
        )));
    }
    if cand.w.len() != n || cand.w_p.len() != n {
        return Err(HsapError::DimensionMismatch(format!(
            "candidate vectors of length {} and {} for a frame in R^{n}",
            cand.w.len(),
            cand.w_p.len()
        )));
    }
    p.check_orthonormal(FRAME_TOL)?;
    let wp_norm = norm(&cand.w_p);
    let mut off_span = cand.w_p.clone();
    axpy(-1.0, &p.matvec(&p.t_matvec(&cand.w_p)), &mut off_span);
    let distance = norm(&off_span);
    if distance > STALE_TOL * wp_norm.max(1.0) {
        return Err(HsapError::StaleCandidate { distance });
    }

    let coeffs = p.t_matvec(&cand.w);
    let mut columns = p.columns();
    if norm(&coeffs) <= DEGENERACY_TOL {
        let first = &mut columns[0];
        scale(first, 1.0 - alpha);
        axpy(alpha, &cand.w, first);
        let q = orthonormalize_columns(n, columns, DEFAULT_MGS_TOL)?;
        return Ok(Matrix::from_columns_unchecked(n, &q));
    }

    // column most aligned with w, lowest index on ties
    let mut swap = 0;
    for (q, c) in coeffs.iter().enumerate() {
        if c.abs() > coeffs[swap].abs() {
            swap = q;
        }
    }
    let mut lead = cand.w_p.clone();
    scale(&mut lead, 1.0 / wp_norm);
    let mut sequence = Vec::with_capacity(k);
    sequence.push(lead);
    sequence.extend(
        columns
            .drain(..)
            .enumerate()
            .filter(|&(q, _)| q != swap)
            .map(|(_, c)| c),
    );
    let mut hat = orthonormalize_columns(n, sequence, DEFAULT_MGS_TOL)?;

    // (1 - α) P̂₁ + α (w - P̂₁)
    let mut shifted = hat[0].clone();
    scale(&mut shifted, 1.0 - 2.0 * alpha);
    axpy(alpha, &cand.w, &mut shifted);
    let len = norm(&shifted);
    if len.is_nan() || len <= 0.0 {
        return Err(HsapError::Numerical("shifted first column vanished".into()));
    }
    scale(&mut shifted, 1.0 / len);
    hat[0] = shifted;
    let q = orthonormalize_columns(n, hat, DEFAULT_MGS_TOL)?;
    Ok(Matrix::from_columns_unchecked(n, &q))
}
