use std::fmt::Write as _;
use std::ops::RangeInclusive;

use super::{run_hsap, HsapConfig};
use crate::dataset::DataMatrix;
use crate::error::{HsapError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub k: usize,
    pub final_objective: f64,
}

/// Runs the engine once per target dimension in `ks`, everything else held
/// fixed, and returns the final objective for each.
pub fn dimension_sweep(
    data: &DataMatrix,
    config: &HsapConfig,
    ks: RangeInclusive<usize>,
) -> Result<Vec<SweepPoint>> {
    if ks.is_empty() || *ks.start() == 0 {
        return Err(HsapError::InvalidParameter(format!(
            "dimension range {}..={} must be nonempty and start at 1 or more",
            ks.start(),
            ks.end()
        )));
    }
    ks.map(|k| {
        let cfg = HsapConfig {
            k,
            ..config.clone()
        };
        let run = run_hsap(data, &cfg)?;
        log::info!("k={k}: final objective {}", run.report.final_objective);
        Ok(SweepPoint {
            k,
            final_objective: run.report.final_objective,
        })
    })
    .collect()
}

pub fn profile_csv(profile: &[SweepPoint]) -> String {
    let mut out = String::from("k,final_objective\n");
    for p in profile {
        let _ = writeln!(out, "{},{}", p.k, p.final_objective);
    }
    out
}
