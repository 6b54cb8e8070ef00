use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::candidate::FRAME_TOL;
use super::{
    bilipschitz_lower_bound, evaluate_candidates, update_projection, CandidateKind, HsapConfig,
    InitStrategy, SvdPath,
};
use crate::clustering::{
    build_cluster_model, kmeans, partition_by_labels, ClusterModel, ClusterModelParams,
    KMeansParams, Mode,
};
use crate::dataset::DataMatrix;
use crate::error::{HsapError, Result};
use crate::linalg::{
    orthonormalize_columns, pca_basis, Centering, Matrix, PcaTarget, DEFAULT_MGS_TOL,
};
use crate::secant::{cross_secants, full_secant_count, SecantSet};

/// Initial `n x k` frame.
pub fn init_projection(
    points: &Matrix,
    k: usize,
    strategy: InitStrategy,
    centering: Centering,
    seed: u64,
) -> Result<Matrix> {
    let (t, n) = points.shape();
    if k == 0 || k > n {
        return Err(HsapError::InvalidParameter(format!(
            "target dimension {k} outside 1..={n}"
        )));
    }
    match strategy {
        InitStrategy::Pca => {
            if k > t {
                return Err(HsapError::InvalidParameter(format!(
                    "PCA initialization needs at least {k} points, got {t}; use random init"
                )));
            }
            Ok(pca_basis(points, PcaTarget::Dimension(k), centering)?.basis)
        }
        InitStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let columns: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect();
            let q = orthonormalize_columns(n, columns, DEFAULT_MGS_TOL)?;
            Ok(Matrix::from_columns_unchecked(n, &q))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Minimum of the candidate set at this iteration's frame.
    pub objective: f64,
    pub kind: CandidateKind,
    pub source_id: usize,
}

pub fn trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from("iteration,objective,kind,source_id\n");
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration, r.objective, r.kind, r.source_id
        );
    }
    out
}

pub fn parse_trace_csv(text: &str, origin: &Path) -> Result<Vec<TraceRecord>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "iteration,objective,kind,source_id" => {}
        _ => {
            return Err(HsapError::EmptyInput(format!(
                "{} is not a trace file",
                origin.display()
            )))
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(HsapError::RaggedRow {
                path: origin.to_path_buf(),
                line: idx + 1,
                expected: 4,
                found: fields.len(),
            });
        }
        let bad = |field: usize| HsapError::NonNumeric {
            path: origin.to_path_buf(),
            line: idx + 1,
            field: field + 1,
            token: fields[field].to_string(),
        };
        out.push(TraceRecord {
            iteration: fields[0].parse().map_err(|_| bad(0))?,
            objective: fields[1]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(1))?,
            kind: fields[2].parse().map_err(|_| bad(2))?,
            source_id: fields[3].parse().map_err(|_| bad(3))?,
        });
    }
    Ok(out)
}

/// The frame being optimized together with its history.
#[derive(Debug, Clone)]
pub struct ProjectionState {
    projection: Matrix,
    iteration: usize,
    trace: Vec<TraceRecord>,
}

impl ProjectionState {
    pub fn new(projection: Matrix) -> Result<Self> {
        projection.check_orthonormal(FRAME_TOL)?;
        Ok(Self {
            projection,
            iteration: 0,
            trace: Vec::new(),
        })
    }

    pub fn projection(&self) -> &Matrix {
        &self.projection
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// Evaluates the candidate set at the current frame, records it, and
    /// moves the frame toward the winning representative.
    pub fn step(
        &mut self,
        models: &[ClusterModel],
        secants: &SecantSet,
        alpha: f64,
        path: SvdPath,
    ) -> Result<&TraceRecord> {
        let cand = evaluate_candidates(&self.projection, models, secants, path)?;
        let next = update_projection(&self.projection, &cand, alpha)?;
        self.trace.push(TraceRecord {
            iteration: self.iteration,
            objective: cand.value,
            kind: cand.kind,
            source_id: cand.source,
        });
        self.projection = next;
        self.iteration += 1;
        Ok(self.trace.last().expect("just pushed"))
    }

    pub fn into_parts(self) -> (Matrix, Vec<TraceRecord>) {
        (self.projection, self.trace)
    }
}

/// Everything the iteration needs besides the frame: the cluster models
/// and the secant set (cross-cluster secants, followed in secant mode by
/// each cluster's sampled secants in cluster order).
#[derive(Debug, Clone)]
pub struct HsapProblem {
    pub models: Vec<ClusterModel>,
    pub secants: SecantSet,
    /// 1-based cluster per data row.
    pub labels: Vec<usize>,
}

impl HsapProblem {
    pub fn build(data: &DataMatrix, config: &HsapConfig) -> Result<Self> {
        let points = &data.points;
        let (t, n) = points.shape();
        config.validate(n)?;

        let groups = if config.use_labels {
            let labels = data.labels.as_ref().ok_or_else(|| {
                HsapError::InvalidParameter("labels requested but the data set has none".into())
            })?;
            let groups = partition_by_labels(labels);
            if groups.len() != config.clusters {
                log::info!(
                    "using {} clusters from labels (configured count {} ignored)",
                    groups.len(),
                    config.clusters
                );
            }
            groups
        } else {
            let km = kmeans(
                points,
                &KMeansParams {
                    clusters: config.clusters,
                    metric: config.metric,
                    seed: config.seed,
                    max_iters: config.kmeans_iters,
                },
            )?;
            if !km.converged && config.kmeans_iters > 0 {
                log::warn!(
                    "k-means stopped after {} iterations without converging",
                    km.iterations
                );
            }
            let mut groups = vec![Vec::new(); config.clusters];
            for (row, &l) in km.labels.iter().enumerate() {
                groups[l - 1].push(row);
            }
            groups
        };
        let mut labels = vec![0; t];
        for (j, g) in groups.iter().enumerate() {
            for &row in g {
                labels[row] = j + 1;
            }
        }

        let params = ClusterModelParams {
            mode: config.mode,
            target: config.basis,
            max_basis_dim: Some(config.k - 1),
            within_samples: config.within_samples,
            anchor_count: config.anchors,
            anchor_strategy: config.anchor_strategy,
            seed: config.seed,
        };
        let anchor_sizes: Vec<u64> = groups
            .iter()
            .map(|g| g.len().min(config.anchors) as u64)
            .collect();
        let mut expected: u64 = 0;
        for i in 0..anchor_sizes.len() {
            for j in i + 1..anchor_sizes.len() {
                expected += anchor_sizes[i] * anchor_sizes[j];
            }
        }
        if config.mode == Mode::Secants {
            expected += groups
                .iter()
                .map(|g| full_secant_count(g.len()).min(config.within_samples as u64))
                .sum::<u64>();
        }
        if expected > config.cap as u64 {
            return Err(HsapError::SecantCap {
                count: expected,
                cap: config.cap,
            });
        }

        let models: Vec<ClusterModel> = groups
            .par_iter()
            .enumerate()
            .map(|(j, g)| build_cluster_model(points, g, j + 1, &params))
            .collect::<Result<_>>()?;
        let anchors: Vec<Vec<usize>> = models.iter().map(|m| m.anchors.clone()).collect();
        let mut secants = cross_secants(points, &anchors);
        for m in &models {
            if let Some(within) = &m.within {
                secants.extend(within);
            }
        }
        log::info!(
            "{} clusters, basis dims {:?}, {} secants",
            models.len(),
            models
                .iter()
                .map(ClusterModel::basis_dim)
                .collect::<Vec<_>>(),
            secants.len()
        );
        Ok(Self {
            models,
            secants,
            labels,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Candidate-set minimum at the returned frame.
    pub final_objective: f64,
    /// `min |Pᵀs|` over the run's secants, when there are any.
    pub bilipschitz_a: Option<f64>,
    pub iterations_run: usize,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn to_key_value(&self) -> String {
        let a = self
            .bilipschitz_a
            .map_or_else(|| "none".to_string(), |a| a.to_string());
        format!(
            "final_objective={}\nbilipschitz_a={a}\niterations_run={}\nwall_time_ms={}\n",
            self.final_objective, self.iterations_run, self.wall_time_ms
        )
    }
}

#[derive(Debug, Clone)]
pub struct HsapRun {
    pub initial_projection: Matrix,
    pub projection: Matrix,
    pub trace: Vec<TraceRecord>,
    pub report: Report,
    pub problem: HsapProblem,
}

/// Clusters, builds the candidate sets, initializes the frame and iterates
/// until `max_iters` or the stop rule fires.
pub fn run_hsap(data: &DataMatrix, config: &HsapConfig) -> Result<HsapRun> {
    let started = Instant::now();
    config.validate(data.dim())?;
    if config.k == data.dim() {
        log::warn!("target dimension equals the ambient dimension; the projection is an isometry");
    }
    let problem = HsapProblem::build(data, config)?;
    let initial = init_projection(
        &data.points,
        config.k,
        config.init,
        config.init_centering,
        config.seed,
    )?;
    let mut state = ProjectionState::new(initial.clone())?;
    let mut objectives = Vec::with_capacity(config.max_iters);
    for _ in 0..config.max_iters {
        let rec = state.step(
            &problem.models,
            &problem.secants,
            config.alpha,
            config.svd_path,
        )?;
        objectives.push(rec.objective);
        if let Some(rule) = config.stop {
            if rule.should_stop(&objectives) {
                log::info!("objective settled after {} iterations", objectives.len());
                break;
            }
        }
    }
    let iterations_run = state.iteration();
    let (projection, trace) = state.into_parts();
    let final_objective = evaluate_candidates(
        &projection,
        &problem.models,
        &problem.secants,
        config.svd_path,
    )?
    .value;
    let bilipschitz_a = if problem.secants.is_empty() {
        None
    } else {
        Some(bilipschitz_lower_bound(&projection, &problem.secants)?)
    };
    Ok(HsapRun {
        initial_projection: initial,
        projection,
        trace,
        report: Report {
            final_objective,
            bilipschitz_a,
            iterations_run,
            wall_time_ms: started.elapsed().as_millis(),
        },
        problem,
    })
}
