use super::gram_schmidt::extend_orthonormal;
use super::{dot, norm, Matrix};

/// Rotation threshold: a column pair is treated as orthogonal once
/// `|a_p·a_q| <= JACOBI_TOL * |a_p| |a_q|`.
const JACOBI_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 80;
/// Singular values below `RELIABLE_RATIO * sigma_max` get their left vectors
/// rebuilt by orthogonal completion instead of by division.
const RELIABLE_RATIO: f64 = 1e-12;

/// Thin singular value decomposition `A = Y Σ Zᵀ`.
///
/// For an `m x n` input with `q = min(m, n)`, `left` is `m x q`, `right` is
/// `n x q`, and `singular_values` has length `q`, sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: Matrix,
    pub singular_values: Vec<f64>,
    pub right: Matrix,
}

impl Svd {
    pub fn reconstruct(&self) -> Matrix {
        let mut scaled = self.left.clone();
        for j in 0..scaled.cols() {
            let sigma = self.singular_values[j];
            for i in 0..scaled.rows() {
                scaled.set(i, j, scaled.get(i, j) * sigma);
            }
        }
        scaled
            .matmul(&self.right.transpose())
            .expect("svd factors have matching shapes")
    }
}

#[derive(Debug, Clone)]
pub struct SingularTriplet {
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// One-sided (Hestenes) Jacobi SVD. Tall inputs are first reduced to a
/// square triangular factor with Householder QR.
pub fn svd(a: &Matrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.transpose());
        return Svd {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        };
    }
    if n == 0 {
        return Svd {
            left: Matrix::zeros(m, 0),
            singular_values: Vec::new(),
            right: Matrix::zeros(0, 0),
        };
    }

    let (q_factor, work) = if m > n {
        let (q, r) = householder_qr(a);
        (Some(q), r.columns())
    } else {
        (None, a.columns())
    };

    let (cols, v) = jacobi(work);
    let sigma: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let inner = cols[0].len();
    let sigma_max = sigma[order[0]];
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &idx in &order {
        let s = sigma[idx];
        let reliable = s > 0.0 && s > RELIABLE_RATIO * sigma_max;
        let cand = if reliable {
            cols[idx].iter().map(|x| x / s).collect()
        } else {
            vec![0.0; inner]
        };
        if reliable {
            left.push(cand);
        } else {
            extend_orthonormal(&mut left, cand, 1e-8).expect("completion within q <= m");
        }
    }

    let left = match q_factor {
        Some(q) => left
            .iter()
            .map(|u| {
                let mut out = vec![0.0; m];
                for (qc, &w) in q.iter().zip(u) {
                    super::axpy(w, qc, &mut out);
                }
                out
            })
            .collect(),
        None => left,
    };
    let right: Vec<Vec<f64>> = order.iter().map(|&i| v[i].clone()).collect();
    Svd {
        left: Matrix::from_columns_unchecked(m, &left),
        singular_values: order.iter().map(|&i| sigma[i]).collect(),
        right: Matrix::from_columns_unchecked(n, &right),
    }
}

/// Smallest singular value of `a` (the `q`-th of the thin SVD) with its left
/// and right singular vectors. Skips sorting and the construction of the
/// other left vectors.
pub fn smallest_singular_triplet(a: &Matrix) -> SingularTriplet {
    let (m, n) = a.shape();
    if m < n {
        let t = smallest_singular_triplet(&a.transpose());
        return SingularTriplet {
            value: t.value,
            left: t.right,
            right: t.left,
        };
    }
    assert!(n > 0, "smallest singular triplet of an empty matrix");
    let (cols, v) = jacobi(a.columns());
    let sigma: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    // last index among equal minima matches the stable descending order of `svd`
    let mut min_idx = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if s <= sigma[min_idx] {
            min_idx = i;
        }
    }
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let s = sigma[min_idx];
    let left = if s > 0.0 && s > RELIABLE_RATIO * sigma_max {
        cols[min_idx].iter().map(|x| x / s).collect()
    } else {
        let mut basis: Vec<Vec<f64>> = sigma
            .iter()
            .enumerate()
            .filter(|&(i, &si)| i != min_idx && si > 0.0 && si > RELIABLE_RATIO * sigma_max)
            .map(|(i, &si)| cols[i].iter().map(|x| x / si).collect())
            .collect();
        extend_orthonormal(&mut basis, vec![0.0; m], 1e-8).expect("completion within n <= m");
        basis.pop().expect("just pushed")
    };
    SingularTriplet {
        value: s,
        left,
        right: v[min_idx].clone(),
    }
}

/// Rotates the given columns until mutually orthogonal. Returns the rotated
/// columns and the accumulated right rotation (as columns).
fn jacobi(mut cols: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = cols.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (cols, v)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Thin Householder QR of a tall `m x n` matrix: returns the `n` columns of
/// `Q` and the `n x n` upper-triangular `R`.
fn householder_qr(a: &Matrix) -> (Vec<Vec<f64>>, Matrix) {
    let (m, n) = a.shape();
    let mut cols = a.columns();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    for k in 0..n {
        let x = &cols[k][k..];
        let xnorm = norm(x);
        if xnorm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot(&v, &v);
        if vv == 0.0 {
            reflectors.push(None);
            continue;
        }
        for col in cols.iter_mut().skip(k) {
            apply_reflector(&v, vv, &mut col[k..]);
        }
        reflectors.push(Some(v));
    }

    let mut r = Matrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate().take(j + 1) {
            r.set(i, j, x);
        }
    }

    let mut q: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            e
        })
        .collect();
    for (k, refl) in reflectors.iter().enumerate().rev() {
        if let Some(v) = refl {
            let vv = dot(v, v);
            for col in q.iter_mut() {
                apply_reflector(v, vv, &mut col[k..]);
            }
        }
    }
    (q, r)
}

fn apply_reflector(v: &[f64], vv: f64, x: &mut [f64]) {
    let f = 2.0 * dot(v, x) / vv;
    super::axpy(-f, v, x);
}
