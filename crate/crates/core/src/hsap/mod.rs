//! The hierarchical projection engine: candidate evaluation over clusters
//! and cross-cluster secants, the frame update, the iteration loop, and
//! dimension sweeps.

mod candidate;
mod config;
mod engine;
mod sweep;
mod update;

pub use candidate::{
    bilipschitz_lower_bound, evaluate_candidates, min_projected_secant, Candidate, CandidateKind,
    SvdPath, TIE_TOL,
};
pub use config::{HsapConfig, InitStrategy, StopRule};
pub use engine::{
    init_projection, parse_trace_csv, run_hsap, trace_csv, HsapProblem, HsapRun, ProjectionState,
    Report, TraceRecord,
};
pub use sweep::{dimension_sweep, profile_csv, SweepPoint};
pub use update::{update_projection, DEGENERACY_TOL, STALE_TOL};
