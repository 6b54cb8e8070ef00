use super::{axpy, dot, norm, scale, Matrix};
use crate::error::{HsapError, Result};

pub const DEFAULT_MGS_TOL: f64 = 1e-10;

/// Orthonormalizes the columns of `columns` (n x m, m <= n) with modified
/// Gram-Schmidt.
///
/// Every column is swept twice against the accepted ones, which keeps the
/// result orthonormal to working precision. A column whose residual norm
/// falls below `tol` is rejected and replaced by the first canonical basis
/// vector `e_1, e_2, ...` whose residual exceeds `tol`, so the output always
/// has exactly `m` orthonormal columns.
pub fn mgs_orthonormalize(columns: &Matrix, tol: f64) -> Result<Matrix> {
    let n = columns.rows();
    let q = orthonormalize_columns(n, columns.columns(), tol)?;
    Ok(Matrix::from_columns_unchecked(n, &q))
}

/// Column-list form of [`mgs_orthonormalize`].
pub fn orthonormalize_columns(n: usize, columns: Vec<Vec<f64>>, tol: f64) -> Result<Vec<Vec<f64>>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(HsapError::InvalidParameter(format!(
            "Gram-Schmidt tolerance must be positive, got {tol}"
        )));
    }
    if columns.len() > n {
        return Err(HsapError::RankOverflow {
            rows: n,
            cols: columns.len(),
        });
    }
    let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    for (idx, v) in columns.into_iter().enumerate() {
        if v.len() != n {
            return Err(HsapError::DimensionMismatch(format!(
                "column {idx} has length {}, expected {n}",
                v.len()
            )));
        }
        extend_orthonormal(&mut accepted, v, tol)?;
    }
    Ok(accepted)
}

/// Appends `candidate` to an orthonormal `basis` after orthogonalizing it,
/// falling back to the first canonical vector with residual above `tol`.
pub(crate) fn extend_orthonormal(
    basis: &mut Vec<Vec<f64>>,
    mut v: Vec<f64>,
    tol: f64,
) -> Result<()> {
    let n = v.len();
    let mut r = residual_norm(basis, &mut v);
    if r < tol {
        log::trace!("Gram-Schmidt rejected a column (residual {r:.3e})");
        let mut replaced = false;
        for e in 0..n {
            let mut cand = vec![0.0; n];
            cand[e] = 1.0;
            let rc = residual_norm(basis, &mut cand);
            if rc > tol {
                v = cand;
                r = rc;
                replaced = true;
                break;
            }
        }
        if !replaced {
            return Err(HsapError::RankOverflow {
                rows: n,
                cols: basis.len() + 1,
            });
        }
    }
    scale(&mut v, 1.0 / r);
    basis.push(v);
    Ok(())
}

/// Removes the components of `v` along `basis` (two MGS passes) and returns
/// the norm of what is left.
fn residual_norm(basis: &[Vec<f64>], v: &mut [f64]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
    norm(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_block_is_fixed_point() {
        let eye = Matrix::eye(5, 3);
        let q = mgs_orthonormalize(&eye, DEFAULT_MGS_TOL).unwrap();
        assert_eq!(q, eye);
    }

    #[test]
    fn two_by_two_hand_case() {
        let a = Matrix::from_columns(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let q = mgs_orthonormalize(&a, DEFAULT_MGS_TOL).unwrap();
        assert_eq!(q, Matrix::identity(2));
    }

    #[test]
    fn dependent_column_replaced_by_first_free_canonical_vector() {
        // second column duplicates the first; e_1 is in the span, so e_2 is used
        let a = Matrix::from_columns(&[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]).unwrap();
        let q = mgs_orthonormalize(&a, DEFAULT_MGS_TOL).unwrap();
        assert_eq!(q.column(1), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_column_replaced() {
        let a = Matrix::from_columns_unchecked(2, &[vec![0.0, 3.0], vec![0.0, 0.0]]);
        let q = mgs_orthonormalize(&a, DEFAULT_MGS_TOL).unwrap();
        assert_eq!(q.column(0), vec![0.0, 1.0]);
        assert_eq!(q.column(1), vec![1.0, 0.0]);
    }

    #[test]
    fn too_many_columns_is_an_error() {
        let a = Matrix::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            mgs_orthonormalize(&a, DEFAULT_MGS_TOL),
            Err(HsapError::RankOverflow { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        assert!(mgs_orthonormalize(&Matrix::eye(2, 1), 0.0).is_err());
    }
}
