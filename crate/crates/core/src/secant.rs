//! Unit-normalized secant sets.
//!
//! Every secant is `(x_b - x_a) / |x_b - x_a|` with the sign chosen so that
//! its first nonzero coordinate is positive. Pairs of identical points are
//! dropped. Secants are emitted in a canonical order that depends only on the
//! inputs, never on the thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{HsapError, Result};
use crate::linalg::{norm, Matrix};

/// Refuse to materialize more secants than this unless told otherwise.
pub const DEFAULT_SECANT_CAP: usize = 5_000_000;

/// Where a secant came from. Cluster indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecantOrigin {
    /// Member of the full secant set of a point set.
    Full,
    /// Sampled inside one cluster.
    Within { cluster: usize },
    /// Between anchors of two different clusters, `first < second`.
    Cross { first: usize, second: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub origin: SecantOrigin,
    /// Row index of the first endpoint in the source data.
    pub src_a: usize,
    /// Row index of the second endpoint in the source data.
    pub src_b: usize,
}

/// Immutable list of unit secants in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecantSet {
    dim: usize,
    data: Vec<f64>,
    provenance: Vec<Provenance>,
    dropped: usize,
}

impl SecantSet {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
            provenance: Vec::new(),
            dropped: 0,
        }
    }

    /// Builds a set from arbitrary nonzero direction vectors, normalizing and
    /// sign-canonicalizing each one.
    pub fn from_directions<V: AsRef<[f64]>>(dim: usize, directions: &[V]) -> Result<Self> {
        let mut set = Self::empty(dim);
        for (i, d) in directions.iter().enumerate() {
            let d = d.as_ref();
            if d.len() != dim {
                return Err(HsapError::DimensionMismatch(format!(
                    "direction of length {} in R^{dim}",
                    d.len()
                )));
            }
            let unit = canonical_unit(d.to_vec()).ok_or(HsapError::ZeroVector)?;
            set.data.extend_from_slice(&unit);
            set.provenance.push(Provenance {
                origin: SecantOrigin::Full,
                src_a: i,
                src_b: i,
            });
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    /// Number of zero-length secants skipped during construction.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim.max(1)).take(self.len())
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    /// Secants as the rows of a matrix, or `None` for an empty set.
    pub fn to_matrix(&self) -> Option<Matrix> {
        if self.is_empty() {
            return None;
        }
        Matrix::new(self.len(), self.dim, self.data.clone()).ok()
    }

    /// Appends `other` after the secants already present.
    pub fn extend(&mut self, other: &SecantSet) {
        assert_eq!(self.dim, other.dim, "secant dimension mismatch");
        self.data.extend_from_slice(&other.data);
        self.provenance.extend_from_slice(&other.provenance);
        self.dropped += other.dropped;
    }

    /// Provenance sidecar: header `i,j,src_a,src_b`; `i = j = 0` for full-set
    /// secants and `i = j = cluster` for within-cluster samples.
    pub fn provenance_csv(&self) -> String {
        let mut out = String::from("i,j,src_a,src_b\n");
        for p in &self.provenance {
            let (i, j) = match p.origin {
                SecantOrigin::Full => (0, 0),
                SecantOrigin::Within { cluster } => (cluster, cluster),
                SecantOrigin::Cross { first, second } => (first, second),
            };
            out.push_str(&format!("{i},{j},{},{}\n", p.src_a, p.src_b));
        }
        out
    }

    fn push_pairs(&mut self, points: &Matrix, pairs: Vec<(usize, usize)>, origin: SecantOrigin) {
        let built: Vec<Option<Vec<f64>>> = pairs
            .par_iter()
            .map(|&(a, b)| secant_between(points.row(a), points.row(b)))
            .collect();
        for ((a, b), unit) in pairs.into_iter().zip(built) {
            match unit {
                Some(u) => {
                    self.data.extend_from_slice(&u);
                    self.provenance.push(Provenance {
                        origin,
                        src_a: a,
                        src_b: b,
                    });
                }
                None => self.dropped += 1,
            }
        }
    }
}

/// `T (T - 1) / 2`, computed without materializing anything.
pub fn full_secant_count(t: usize) -> u64 {
    let t = t as u64;
    t * t.saturating_sub(1) / 2
}

/// All secants of the rows of `points`, pairs `(a, b)` with `a < b` in
/// lexicographic order.
pub fn full_secants(points: &Matrix, cap: usize) -> Result<SecantSet> {
    let t = points.rows();
    if t < 2 {
        return Err(HsapError::InvalidParameter(format!(
            "secants need at least 2 points, got {t}"
        )));
    }
    let count = full_secant_count(t);
    if count > cap as u64 {
        return Err(HsapError::SecantCap { count, cap });
    }
    let pairs = (0..t)
        .flat_map(|a| (a + 1..t).map(move |b| (a, b)))
        .collect();
    let mut set = SecantSet::empty(points.cols());
    set.push_pairs(points, pairs, SecantOrigin::Full);
    log_dropped(&set, "full secant set");
    Ok(set)
}

/// Secants between the anchors of every pair of clusters `i < j`.
/// `anchors[j]` holds row indices into `points` for cluster `j + 1`.
pub fn cross_secants(points: &Matrix, anchors: &[Vec<usize>]) -> SecantSet {
    let mut set = SecantSet::empty(points.cols());
    for i in 0..anchors.len() {
        for j in i + 1..anchors.len() {
            let pairs = anchors[i]
                .iter()
                .flat_map(|&a| anchors[j].iter().map(move |&b| (a, b)))
                .collect();
            set.push_pairs(
                points,
                pairs,
                SecantOrigin::Cross {
                    first: i + 1,
                    second: j + 1,
                },
            );
        }
    }
    log_dropped(&set, "cross-cluster secants");
    set
}

/// Samples `m` unordered member pairs uniformly without replacement (all of
/// them when `m` reaches the pair count) and returns their secants in pair
/// order. `members` are row indices into `points`; `cluster` is 1-based.
pub fn sample_within_secants(
    points: &Matrix,
    members: &[usize],
    cluster: usize,
    m: usize,
    seed: u64,
) -> Result<SecantSet> {
    if m == 0 {
        return Err(HsapError::InvalidParameter(
            "secant sample size must be positive".into(),
        ));
    }
    let t = members.len();
    let total = full_secant_count(t);
    let pair_ids: Vec<u64> = if m as u64 >= total {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ids: Vec<u64> = rand::seq::index::sample(&mut rng, total as usize, m)
            .into_iter()
            .map(|i| i as u64)
            .collect();
        ids.sort_unstable();
        ids
    };
    let pairs = pair_ids
        .into_iter()
        .map(|id| {
            let (a, b) = unrank_pair(id, t as u64);
            (members[a as usize], members[b as usize])
        })
        .collect();
    let mut set = SecantSet::empty(points.cols());
    set.push_pairs(points, pairs, SecantOrigin::Within { cluster });
    log_dropped(&set, "within-cluster sample");
    Ok(set)
}

/// Inverse of the lexicographic ranking of pairs `(a, b)`, `a < b < t`.
fn unrank_pair(id: u64, t: u64) -> (u64, u64) {
    // rows before `a` contribute (t-1) + (t-2) + ... + (t-a) pairs
    let offset = |a: u64| a * (2 * t - a - 1) / 2;
    let (mut lo, mut hi) = (0u64, t - 2);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if offset(mid) <= id {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    (lo, lo + 1 + (id - offset(lo)))
}

fn secant_between(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    canonical_unit(b.iter().zip(a).map(|(y, x)| y - x).collect())
}

fn canonical_unit(mut d: Vec<f64>) -> Option<Vec<f64>> {
    let len = norm(&d);
    if len == 0.0 {
        return None;
    }
    let first = d.iter().copied().find(|&x| x != 0.0).unwrap_or(0.0);
    let factor = if first < 0.0 { -1.0 / len } else { 1.0 / len };
    d.iter_mut().for_each(|x| *x *= factor);
    Some(d)
}

fn log_dropped(set: &SecantSet, what: &str) {
    if set.dropped > 0 {
        log::warn!(
            "{what}: dropped {} zero-length secants from duplicate points",
            set.dropped
        );
    }
}
