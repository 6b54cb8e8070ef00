use super::{svd, Matrix};
use crate::error::{HsapError, Result};

/// Inputs to [`principal_angles`] must satisfy `|QᵀQ - I| <= 1e-8`.
pub const ORTHONORMAL_INPUT_TOL: f64 = 1e-8;

/// Principal angles between `span(A)` and `span(B)` with their principal
/// vectors. `angles` is nondecreasing; column `i` of `u_vectors` and
/// `v_vectors` is the i-th pair of principal vectors.
#[derive(Debug, Clone)]
pub struct PrincipalAngles {
    pub angles: Vec<f64>,
    pub cosines: Vec<f64>,
    pub u_vectors: Matrix,
    pub v_vectors: Matrix,
}

impl PrincipalAngles {
    pub fn largest(&self) -> f64 {
        self.angles.last().copied().unwrap_or(0.0)
    }
}

/// Computes principal angles from the SVD `AᵀB = Y Σ Zᵀ`: the cosines are
/// the singular values (clamped to `[0, 1]`), `u_i = A y_i`, `v_i = B z_i`.
///
/// `acos` cannot resolve angles much below `1.5e-8` (the gap between 1 and
/// the next double), so angles under π/4 are taken from the sines instead:
/// the singular values of the part of the smaller basis orthogonal to the
/// larger one.
pub fn principal_angles(a: &Matrix, b: &Matrix) -> Result<PrincipalAngles> {
    if a.rows() != b.rows() {
        return Err(HsapError::DimensionMismatch(format!(
            "subspaces live in R^{} and R^{}",
            a.rows(),
            b.rows()
        )));
    }
    a.check_orthonormal(ORTHONORMAL_INPUT_TOL)?;
    b.check_orthonormal(ORTHONORMAL_INPUT_TOL)?;
    let q = a.cols().min(b.cols());
    if q == 0 {
        return Ok(PrincipalAngles {
            angles: Vec::new(),
            cosines: Vec::new(),
            u_vectors: Matrix::zeros(a.rows(), 0),
            v_vectors: Matrix::zeros(a.rows(), 0),
        });
    }
    let cross = a.t_matmul(b)?;
    let d = svd(&cross);
    let cosines: Vec<f64> = d
        .singular_values
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    let (big, small) = if a.cols() >= b.cols() { (a, b) } else { (b, a) };
    let mut residual = small.clone();
    let along = big.matmul(&big.t_matmul(small)?)?;
    for i in 0..residual.rows() {
        for j in 0..residual.cols() {
            residual.set(i, j, small.get(i, j) - along.get(i, j));
        }
    }
    let mut sines = svd(&residual).singular_values;
    sines.reverse();
    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            if c >= std::f64::consts::FRAC_1_SQRT_2 {
                s.clamp(0.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .collect();
    // the two formulas meet at π/4; keep the order exact across the seam
    for i in 1..angles.len() {
        angles[i] = angles[i].max(angles[i - 1]);
    }
    Ok(PrincipalAngles {
        angles,
        cosines,
        u_vectors: a.matmul(&d.left)?,
        v_vectors: b.matmul(&d.right)?,
    })
}
