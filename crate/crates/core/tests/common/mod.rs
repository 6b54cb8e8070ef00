//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerical kernels.
#![allow(dead_code)]

use hsap::clustering::ClusterModel;
use hsap::hsap::CandidateKind;
use hsap::linalg::Matrix;
use hsap::secant::SecantSet;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

/// Orthonormal `n x k` basis from nalgebra's QR of a Gaussian matrix.
pub fn random_frame(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Matrix {
    let g = to_na(&gaussian(rng, n, k));
    from_na(&g.qr().q())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let l = norm(&v);
    v.iter_mut().for_each(|x| *x /= l);
    v
}

/// Classical Gram-Schmidt straight from the definition: subtract the
/// projection on every earlier output vector, then normalize.
pub fn classical_gram_schmidt(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for a in columns {
        let mut v = a.clone();
        for q in &out {
            let c = dot(a, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        out.push(unit(v));
    }
    out
}

/// Singular values (descending) of a matrix via nalgebra.
pub fn na_singular_values(m: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m)
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Square roots of the eigenvalues of `AᵀA` (descending) from a symmetric
/// eigensolver.
pub fn eig_singular_values(m: &Matrix) -> Vec<f64> {
    let a = to_na(m);
    let gram = a.transpose() * &a;
    let mut s: Vec<f64> = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Every element of the candidate set in scan order (clusters by index,
/// each cluster's singular values, then secants by index), computed with
/// nalgebra and direct norms.
pub fn brute_force_candidates(
    p: &Matrix,
    models: &[ClusterModel],
    secants: &SecantSet,
) -> Vec<(f64, CandidateKind, usize)> {
    let pn = to_na(p);
    let mut out = Vec::new();
    for m in models {
        if let Some(v) = m.basis.as_ref().filter(|v| v.cols() > 0) {
            let cross = pn.transpose() * to_na(v);
            for s in cross.svd(false, false).singular_values.iter() {
                out.push((*s, CandidateKind::Cluster, m.index));
            }
        }
    }
    for (i, s) in secants.iter().enumerate() {
        let proj: Vec<f64> = (0..p.cols())
            .map(|c| (0..p.rows()).map(|r| p.get(r, c) * s[r]).sum())
            .collect();
        out.push((norm(&proj), CandidateKind::Secant, i));
    }
    out
}

/// Winner of a brute-force scan: the first element within `tie` of the
/// minimum, together with the minimum itself.
pub fn brute_force_winner(
    scan: &[(f64, CandidateKind, usize)],
    tie: f64,
) -> Option<(f64, CandidateKind, usize)> {
    let min = scan.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    scan.iter()
        .find(|c| c.0 <= min + tie)
        .map(|c| (min, c.1, c.2))
}

/// Principal angles by direct maximization of `uᵀv` following the recursive
/// definition: the k-th pair maximizes `uᵀv` over unit `u` in `span(A)`
/// orthogonal to the earlier `u`s and unit `v` in `span(B)` orthogonal to the
/// earlier `v`s. For fixed `u` the best `v` is its normalized projection, so
/// the search runs over the unit sphere of the remaining part of `span(A)`
/// (at most 2-dimensional here) on a grid followed by pattern-search
/// refinement.
pub fn grid_principal_angles(a: &Matrix, b: &Matrix) -> Vec<f64> {
    let (a, b) = if a.cols() <= b.cols() { (a, b) } else { (b, a) };
    let n = a.rows();
    let mut ua: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let mut vb: Vec<Vec<f64>> = (0..b.cols()).map(|j| b.column(j)).collect();
    let mut angles = Vec::new();
    while !ua.is_empty() {
        let r = ua.len();
        let combine = |basis: &[Vec<f64>], c: &[f64]| -> Vec<f64> {
            let mut x = vec![0.0; n];
            for (q, &w) in basis.iter().zip(c) {
                x.iter_mut().zip(q).for_each(|(o, y)| *o += w * y);
            }
            x
        };
        let f = |c: &[f64]| -> f64 {
            let u = combine(&ua, c);
            let coords: Vec<f64> = vb.iter().map(|q| dot(q, &u)).collect();
            norm(&coords)
        };
        let c = maximize_on_sphere(r, &f);
        let best = f(&c).min(1.0);
        angles.push(best.acos());

        let u = combine(&ua, &c);
        let d: Vec<f64> = vb.iter().map(|q| dot(q, &u)).collect();
        let d = if norm(&d) > 1e-14 {
            unit(d)
        } else {
            let mut e = vec![0.0; vb.len()];
            e[0] = 1.0;
            e
        };
        ua = deflate(&ua, &c);
        vb = deflate(&vb, &d);
    }
    angles
}

/// Basis of the part of `span(basis)` orthogonal to `Σ c_i basis_i`.
fn deflate(basis: &[Vec<f64>], c: &[f64]) -> Vec<Vec<f64>> {
    let r = basis.len();
    let mut coeff_basis = vec![c.to_vec()];
    for e in 0..r {
        let mut v = vec![0.0; r];
        v[e] = 1.0;
        for q in &coeff_basis {
            let proj = dot(&v, q);
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
        }
        if norm(&v) > 1e-8 && coeff_basis.len() < r {
            coeff_basis.push(unit(v));
        }
    }
    coeff_basis[1..]
        .iter()
        .map(|w| {
            let n = basis[0].len();
            let mut x = vec![0.0; n];
            for (q, &s) in basis.iter().zip(w) {
                x.iter_mut().zip(q).for_each(|(o, y)| *o += s * y);
            }
            x
        })
        .collect()
}

fn sphere_point(r: usize, t: &[f64]) -> Vec<f64> {
    match r {
        1 => vec![1.0],
        2 => vec![t[0].cos(), t[0].sin()],
        3 => vec![t[0].sin() * t[1].cos(), t[0].sin() * t[1].sin(), t[0].cos()],
        _ => panic!("sphere search supports dimension <= 3"),
    }
}

fn maximize_on_sphere(r: usize, f: &dyn Fn(&[f64]) -> f64) -> Vec<f64> {
    let params = r - 1;
    if params == 0 {
        return vec![1.0];
    }
    let steps = 90;
    let pi = std::f64::consts::PI;
    let mut best = (f64::NEG_INFINITY, vec![0.0; params]);
    let grid: Vec<Vec<f64>> = if params == 1 {
        (0..steps)
            .map(|i| vec![pi * i as f64 / steps as f64])
            .collect()
    } else {
        (0..=steps)
            .flat_map(|i| {
                (0..2 * steps)
                    .map(move |j| vec![pi * i as f64 / steps as f64, pi * j as f64 / steps as f64])
            })
            .collect()
    };
    for t in grid {
        let v = f(&sphere_point(r, &t));
        if v > best.0 {
            best = (v, t);
        }
    }
    let mut step = pi / steps as f64;
    while step > 1e-12 {
        let mut improved = false;
        for d in 0..params {
            for sgn in [-1.0, 1.0] {
                let mut t = best.1.clone();
                t[d] += sgn * step;
                let v = f(&sphere_point(r, &t));
                if v > best.0 {
                    best = (v, t);
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    sphere_point(r, &best.1)
}

/// Random distinct points (Gaussian, so distinct with probability one).
pub fn random_points(rng: &mut ChaCha8Rng, t: usize, n: usize) -> Matrix {
    gaussian(rng, t, n)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Random input for the candidate search: a frame, up to five cluster bases
/// of dimension at most three and up to fifty secants in `R^n`, `n <= 10`.
/// Some bases and secants are exact copies of earlier ones so that ties
/// occur.
pub fn candidate_instance(seed: u64) -> (Matrix, Vec<ClusterModel>, SecantSet) {
    let mut r = rng(seed);
    let n = r.random_range(2..=10);
    let k = r.random_range(1..=n);
    let p = random_frame(&mut r, n, k);
    let clusters = r.random_range(1..=5);
    let mut models: Vec<ClusterModel> = Vec::new();
    for index in 1..=clusters {
        let basis = if index > 1 && r.random_bool(0.25) {
            models[r.random_range(0..models.len())]
                .basis
                .clone()
                .unwrap()
        } else {
            let kj = r.random_range(1..=n.min(3));
            random_frame(&mut r, n, kj)
        };
        models.push(ClusterModel {
            index,
            members: vec![0],
            basis: Some(basis),
            mean: None,
            within: None,
            anchors: vec![0],
        });
    }
    let count = r.random_range(0..=50);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for _ in 0..count {
        if !dirs.is_empty() && r.random_bool(0.2) {
            let i = r.random_range(0..dirs.len());
            dirs.push(dirs[i].clone());
        } else {
            dirs.push(gaussian(&mut r, 1, n).into_vec());
        }
    }
    let secants = SecantSet::from_directions(n, &dirs).unwrap();
    (p, models, secants)
}
