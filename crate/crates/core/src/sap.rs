//! Plain secant-avoidance projection on an explicit secant set.
//!
//! Each step finds the secant the frame shortens most and applies the same
//! frame update as the hierarchical engine, so a one-cluster secant-mode run
//! over the full secant set reproduces these iterates exactly.

use crate::error::{HsapError, Result};
use crate::hsap::{
    evaluate_candidates, init_projection, min_projected_secant, update_projection, InitStrategy,
    ProjectionState, SvdPath, TraceRecord,
};
use crate::linalg::{Centering, Matrix};
use crate::secant::{full_secants, SecantSet, DEFAULT_SECANT_CAP};

/// One update toward the secant with the smallest `|Pᵀs|` (lowest index on
/// ties).
pub fn sap_step(p: &Matrix, secants: &SecantSet, alpha: f64) -> Result<Matrix> {
    if secants.is_empty() {
        return Err(HsapError::EmptySecantSet);
    }
    let cand = evaluate_candidates(p, &[], secants, SvdPath::Smallest)?;
    update_projection(p, &cand, alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SapParams {
    pub k: usize,
    pub alpha: f64,
    pub iters: usize,
    pub init: InitStrategy,
    pub init_centering: Centering,
    pub seed: u64,
    pub cap: usize,
}

impl Default for SapParams {
    fn default() -> Self {
        Self {
            k: 2,
            alpha: 0.01,
            iters: 80,
            init: InitStrategy::Pca,
            init_centering: Centering::Raw,
            seed: 0,
            cap: DEFAULT_SECANT_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SapRun {
    pub projection: Matrix,
    pub trace: Vec<TraceRecord>,
    /// `min |Pᵀs|` at the returned frame.
    pub final_objective: f64,
    pub secants: SecantSet,
}

/// Materializes the full secant set of `points` and iterates [`sap_step`].
pub fn sap_run(points: &Matrix, params: &SapParams) -> Result<SapRun> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(HsapError::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {}",
            params.alpha
        )));
    }
    let secants = full_secants(points, params.cap).map_err(|e| match e {
        HsapError::SecantCap { count, cap } => {
            log::error!(
                "{count} secants exceed the cap of {cap}; use the hierarchical engine instead"
            );
            e
        }
        other => other,
    })?;
    if secants.is_empty() {
        return Err(HsapError::EmptySecantSet);
    }
    let p0 = init_projection(
        points,
        params.k,
        params.init,
        params.init_centering,
        params.seed,
    )?;
    let mut state = ProjectionState::new(p0)?;
    for _ in 0..params.iters {
        state.step(&[], &secants, params.alpha, SvdPath::Smallest)?;
    }
    let (projection, trace) = state.into_parts();
    let (final_objective, _) = min_projected_secant(&projection, &secants).expect("nonempty");
    Ok(SapRun {
        projection,
        trace,
        final_objective,
        secants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsap::bilipschitz_lower_bound;
    use crate::linalg::{norm, principal_angles};

    #[test]
    fn contained_secant_keeps_the_span() {
        let p = Matrix::eye(3, 2);
        let s = SecantSet::from_directions(3, &[[0.6, 0.8, 0.0]]).unwrap();
        let out = sap_step(&p, &s, 0.01).unwrap();
        assert!(principal_angles(&p, &out).unwrap().largest() < 1e-6);
    }

    #[test]
    fn orthogonal_secant_gets_pulled_in() {
        let p = Matrix::eye(3, 2);
        let s = SecantSet::from_directions(3, &[[0.0, 0.0, 1.0]]).unwrap();
        let out = sap_step(&p, &s, 0.01).unwrap();
        assert!(norm(&out.t_matvec(s.get(0))) > 0.0);
        assert!(sap_step(&p, &SecantSet::empty(3), 0.01).is_err());
    }

    #[test]
    fn two_points_converge_toward_one() {
        let pts = Matrix::from_rows(&[[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]]).unwrap();
        let params = SapParams {
            k: 1,
            iters: 400,
            init: InitStrategy::Random,
            alpha: 0.05,
            seed: 3,
            ..SapParams::default()
        };
        let run = sap_run(&pts, &params).unwrap();
        assert_eq!(run.trace.len(), 400);
        assert!(run.final_objective > 0.99, "{}", run.final_objective);
        let a = bilipschitz_lower_bound(&run.projection, &run.secants).unwrap();
        assert_eq!(a, run.final_objective);
    }

    #[test]
    fn zero_iterations_return_init() {
        let pts = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]]).unwrap();
        let params = SapParams {
            k: 1,
            iters: 0,
            ..SapParams::default()
        };
        let run = sap_run(&pts, &params).unwrap();
        let p0 = init_projection(&pts, 1, InitStrategy::Pca, Centering::Raw, 0).unwrap();
        assert_eq!(run.projection, p0);
    }

    #[test]
    fn cap_is_enforced() {
        let pts = Matrix::identity(4);
        let params = SapParams {
            cap: 5,
            ..SapParams::default()
        };
        assert!(matches!(
            sap_run(&pts, &params),
            Err(HsapError::SecantCap { count: 6, cap: 5 })
        ));
    }
}
