//! Dense linear-algebra kernels: modified Gram-Schmidt, a one-sided Jacobi
//! SVD, principal angles between subspaces and PCA bases.

mod gram_schmidt;
mod matrix;
mod pca;
mod principal_angles;
mod svd;

pub use gram_schmidt::{mgs_orthonormalize, orthonormalize_columns, DEFAULT_MGS_TOL};
pub use matrix::Matrix;
pub use pca::{pca_basis, Centering, PcaBasis, PcaTarget};
pub use principal_angles::{principal_angles, PrincipalAngles, ORTHONORMAL_INPUT_TOL};
pub use svd::{smallest_singular_triplet, svd, SingularTriplet, Svd};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(v: &mut [f64], factor: f64) {
    v.iter_mut().for_each(|x| *x *= factor);
}
