use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HsapError, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorStrategy {
    /// Uniform sample without replacement.
    #[default]
    Random,
    /// Farthest-point greedy: start from the point farthest from the
    /// cluster mean, then repeatedly add the point farthest from the anchors
    /// chosen so far.
    Extremal,
}

impl FromStr for AnchorStrategy {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(AnchorStrategy::Random),
            "extremal" => Ok(AnchorStrategy::Extremal),
            other => Err(HsapError::InvalidParameter(format!(
                "unknown anchor strategy {other:?} (expected random or extremal)"
            ))),
        }
    }
}

impl fmt::Display for AnchorStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorStrategy::Random => "random",
            AnchorStrategy::Extremal => "extremal",
        })
    }
}

/// Picks `count` anchors among `members` (row indices into `points`).
/// Random anchors come back in ascending row order, extremal anchors in
/// selection order. Ties go to the lowest row index.
pub fn select_anchors(
    points: &Matrix,
    members: &[usize],
    count: usize,
    strategy: AnchorStrategy,
    seed: u64,
) -> Result<Vec<usize>> {
    if count == 0 || count > members.len() {
        return Err(HsapError::InvalidParameter(format!(
            "anchor count {count} outside 1..={}",
            members.len()
        )));
    }
    match strategy {
        AnchorStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, members.len(), count)
                .into_iter()
                .map(|i| members[i])
                .collect();
            picked.sort_unstable();
            Ok(picked)
        }
        AnchorStrategy::Extremal => Ok(farthest_point(points, members, count)),
    }
}

fn farthest_point(points: &Matrix, members: &[usize], count: usize) -> Vec<usize> {
    let n = points.cols();
    let mut mean = vec![0.0; n];
    for &m in members {
        crate::linalg::axpy(1.0, points.row(m), &mut mean);
    }
    mean.iter_mut().for_each(|x| *x /= members.len() as f64);
    let sq =
        |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };

    // best = larger distance, then lower row index
    let better = |d: f64, row: usize, best: Option<(f64, usize)>| match best {
        None => true,
        Some((bd, br)) => d > bd || (d == bd && row < br),
    };

    let mut first: Option<(f64, usize)> = None;
    for &m in members {
        let d = sq(points.row(m), &mean);
        if better(d, m, first) {
            first = Some((d, m));
        }
    }
    let first = first.expect("nonempty members").1;
    let mut chosen = vec![first];
    let mut min_dist: Vec<f64> = members
        .iter()
        .map(|&m| sq(points.row(m), points.row(first)))
        .collect();
    while chosen.len() < count {
        let mut best: Option<(f64, usize)> = None;
        for (pos, &m) in members.iter().enumerate() {
            if chosen.contains(&m) {
                continue;
            }
            if better(min_dist[pos], m, best) {
                best = Some((min_dist[pos], m));
            }
        }
        let next = best.expect("count <= members").1;
        chosen.push(next);
        for (pos, &m) in members.iter().enumerate() {
            min_dist[pos] = min_dist[pos].min(sq(points.row(m), points.row(next)));
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremal_on_a_line() {
        let p = Matrix::from_rows(&[[0.0], [1.0], [10.0]]).unwrap();
        let a = select_anchors(&p, &[0, 1, 2], 2, AnchorStrategy::Extremal, 0).unwrap();
        assert_eq!(a, vec![2, 0]);
    }

    #[test]
    fn full_count_returns_everything() {
        let p = Matrix::from_rows(&[[0.0], [1.0], [10.0], [4.0]]).unwrap();
        let members = [0, 1, 2, 3];
        for s in [AnchorStrategy::Random, AnchorStrategy::Extremal] {
            let mut a = select_anchors(&p, &members, 4, s, 9).unwrap();
            a.sort_unstable();
            assert_eq!(a, members);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let p = Matrix::zeros(50, 2);
        let members: Vec<usize> = (0..50).collect();
        let a = select_anchors(&p, &members, 10, AnchorStrategy::Random, 11).unwrap();
        let b = select_anchors(&p, &members, 10, AnchorStrategy::Random, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn count_out_of_range() {
        let p = Matrix::zeros(2, 1);
        assert!(select_anchors(&p, &[0, 1], 3, AnchorStrategy::Random, 0).is_err());
        assert!(select_anchors(&p, &[0, 1], 0, AnchorStrategy::Random, 0).is_err());
    }
}
