//! C ABI over the `hsap` crate.
//!
//! Matrices and runs are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`HsapStatus`]; on failure the
//! message is available from [`hsap_last_error_message`] on the same thread
//! until the next failing call. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hsap::clustering::{AnchorStrategy, Metric, Mode};
use hsap::dataset::{gen_synthetic, load_matrix_auto, DataMatrix, SynthParams};
use hsap::hsap::{run_hsap, HsapConfig, InitStrategy, StopRule};
use hsap::linalg::{principal_angles, Matrix, PcaTarget};
use hsap::sap::{sap_run, SapParams};
use hsap::{ErrorClass, HsapError};

pub const HSAP_MODE_LINEAR: u32 = 0;
pub const HSAP_MODE_SECANTS: u32 = 1;
pub const HSAP_ANCHORS_RANDOM: u32 = 0;
pub const HSAP_ANCHORS_EXTREMAL: u32 = 1;
pub const HSAP_METRIC_EUCLIDEAN: u32 = 0;
pub const HSAP_METRIC_COSINE: u32 = 1;
pub const HSAP_INIT_PCA: u32 = 0;
pub const HSAP_INIT_RANDOM: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsapStatus {
    Ok = 0,
    /// Bad argument or parameter value.
    InvalidArgument = 1,
    /// Unreadable or malformed data.
    DataError = 2,
    /// Numerical failure inside the algorithm.
    NumericalError = 3,
    /// A required pointer was null.
    NullPointer = 4,
    /// Internal panic; the library state is unaffected.
    Panic = 5,
}

/// Run parameters. Fill with `hsap_options_default` and override fields.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HsapOptions {
    /// Target dimension.
    pub k: usize,
    /// k-means clusters; ignored when labels are passed.
    pub clusters: usize,
    /// `HSAP_MODE_*`.
    pub mode: u32,
    pub alpha: f64,
    pub max_iters: usize,
    pub anchors: usize,
    /// `HSAP_ANCHORS_*`.
    pub anchor_strategy: u32,
    /// Cluster basis energy fraction, used when `basis_dim` is 0.
    pub energy: f64,
    pub basis_dim: usize,
    pub within_samples: usize,
    /// `HSAP_METRIC_*`.
    pub metric: u32,
    pub kmeans_iters: usize,
    pub seed: u64,
    /// `HSAP_INIT_*`.
    pub init: u32,
    /// 0 disables early stopping.
    pub stop_window: usize,
    pub stop_tol: f64,
}

/// Opaque dense matrix.
pub struct HsapMatrix {
    inner: Matrix,
}

/// Opaque result of a projection run.
pub struct HsapRun {
    projection: Matrix,
    objectives: Vec<f64>,
    final_objective: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Lib(HsapError),
    Null(&'static str),
}

impl From<HsapError> for Failure {
    fn from(e: HsapError) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> HsapStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HsapStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} must not be null"));
            HsapStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            match e.class() {
                ErrorClass::Usage => HsapStatus::InvalidArgument,
                ErrorClass::Data => HsapStatus::DataError,
                ErrorClass::Numerical => HsapStatus::NumericalError,
            }
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            HsapStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass pointers obtained from this library or valid
    // caller-owned objects; null is checked here.
    unsafe { p.as_ref() }.ok_or(Failure::Null(what))
}

fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Lib(HsapError::InvalidParameter(msg.into()))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hsap_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hsap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Writes the default options to `out`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_options_default(out: *mut HsapOptions) -> HsapStatus {
    guard(|| {
        let d = HsapConfig::default();
        let stop = StopRule::default();
        let energy = match d.basis {
            PcaTarget::Energy(e) => e,
            PcaTarget::Dimension(_) => 0.95,
        };
        write_out(
            out,
            HsapOptions {
                k: d.k,
                clusters: d.clusters,
                mode: HSAP_MODE_LINEAR,
                alpha: d.alpha,
                max_iters: d.max_iters,
                anchors: d.anchors,
                anchor_strategy: HSAP_ANCHORS_RANDOM,
                energy,
                basis_dim: 0,
                within_samples: d.within_samples,
                metric: HSAP_METRIC_EUCLIDEAN,
                kmeans_iters: d.kmeans_iters,
                seed: d.seed,
                init: HSAP_INIT_PCA,
                stop_window: stop.window,
                stop_tol: stop.tol,
            },
            "out",
        )
    })
}

/// Copies a row-major `rows x cols` buffer into a new matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut HsapMatrix,
) -> HsapStatus {
    guard(|| {
        if data.is_null() {
            return Err(Failure::Null("data"));
        }
        let len = rows
            .checked_mul(cols)
            .ok_or_else(|| invalid(format!("{rows} x {cols} overflows")))?;
        // SAFETY: caller guarantees `len` readable doubles at `data`.
        let values = unsafe { std::slice::from_raw_parts(data, len) }.to_vec();
        let inner = Matrix::new(rows, cols, values)?;
        write_out(out, Box::into_raw(Box::new(HsapMatrix { inner })), "out")
    })
}

/// Loads a CSV or binary matrix file (format detected from its first bytes).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_load(
    path: *const c_char,
    out: *mut *mut HsapMatrix,
) -> HsapStatus {
    guard(|| {
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| invalid("path is not valid UTF-8"))?;
        let inner = load_matrix_auto(path)?.points;
        write_out(out, Box::into_raw(Box::new(HsapMatrix { inner })), "out")
    })
}

/// Row count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_rows(m: *const HsapMatrix) -> usize {
    // SAFETY: null or live handle per contract.
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.rows())
}

/// Column count, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_cols(m: *const HsapMatrix) -> usize {
    // SAFETY: null or live handle per contract.
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.cols())
}

/// Copies the entries, row-major, into `out`, which must hold exactly
/// `rows * cols` doubles (`len`).
///
/// # Safety
/// `m` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_copy(
    m: *const HsapMatrix,
    out: *mut f64,
    len: usize,
) -> HsapStatus {
    guard(|| {
        let m = non_null(m, "matrix")?;
        copy_values(m.inner.as_slice(), out, len)
    })
}

fn copy_values(values: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    if len != values.len() {
        return Err(invalid(format!(
            "buffer holds {len} values, need {}",
            values.len()
        )));
    }
    // SAFETY: `out` is valid for `len` writes per contract and does not
    // alias the library-owned source.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, len) };
    Ok(())
}

/// Releases a matrix. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsap_matrix_free(m: *mut HsapMatrix) {
    if !m.is_null() {
        // SAFETY: handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Generates the synthetic two-lines-and-a-plane set in R^3: `per_line`
/// points on each line followed by `plane` points on the plane.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_synthetic(
    per_line: usize,
    plane: usize,
    seed: u64,
    out: *mut *mut HsapMatrix,
) -> HsapStatus {
    guard(|| {
        let data = gen_synthetic(&SynthParams {
            per_line,
            plane,
            seed,
            ..SynthParams::default()
        })?;
        write_out(
            out,
            Box::into_raw(Box::new(HsapMatrix { inner: data.points })),
            "out",
        )
    })
}

fn config_from(opts: &HsapOptions, use_labels: bool) -> Result<HsapConfig, Failure> {
    let pick = |v: u32, what: &str, choices: usize| {
        if (v as usize) < choices {
            Ok(v)
        } else {
            Err(invalid(format!("unknown {what} code {v}")))
        }
    };
    Ok(HsapConfig {
        k: opts.k,
        clusters: opts.clusters,
        use_labels,
        mode: if pick(opts.mode, "mode", 2)? == HSAP_MODE_LINEAR {
            Mode::Linear
        } else {
            Mode::Secants
        },
        alpha: opts.alpha,
        max_iters: opts.max_iters,
        anchors: opts.anchors,
        anchor_strategy: if pick(opts.anchor_strategy, "anchor strategy", 2)? == HSAP_ANCHORS_RANDOM
        {
            AnchorStrategy::Random
        } else {
            AnchorStrategy::Extremal
        },
        basis: if opts.basis_dim == 0 {
            PcaTarget::Energy(opts.energy)
        } else {
            PcaTarget::Dimension(opts.basis_dim)
        },
        within_samples: opts.within_samples,
        metric: if pick(opts.metric, "metric", 2)? == HSAP_METRIC_EUCLIDEAN {
            Metric::Euclidean
        } else {
            Metric::Cosine
        },
        kmeans_iters: opts.kmeans_iters,
        seed: opts.seed,
        init: if pick(opts.init, "init", 2)? == HSAP_INIT_PCA {
            InitStrategy::Pca
        } else {
            InitStrategy::Random
        },
        stop: (opts.stop_window > 0).then_some(StopRule {
            window: opts.stop_window,
            tol: opts.stop_tol,
        }),
        ..HsapConfig::default()
    })
}

/// Runs the hierarchical engine on the rows of `data`. With `labels`
/// non-null (`labels_len` = row count) the clusters come from the labels,
/// otherwise from k-means with `opts->clusters` clusters.
///
/// # Safety
/// `data` and `opts` must be live; `labels` null or valid for `labels_len`
/// reads; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_run(
    data: *const HsapMatrix,
    labels: *const i64,
    labels_len: usize,
    opts: *const HsapOptions,
    out: *mut *mut HsapRun,
) -> HsapStatus {
    guard(|| {
        let data = non_null(data, "data")?;
        let opts = non_null(opts, "opts")?;
        let set = if labels.is_null() {
            DataMatrix::new(data.inner.clone())
        } else {
            // SAFETY: caller guarantees `labels_len` readable values.
            let l = unsafe { std::slice::from_raw_parts(labels, labels_len) }.to_vec();
            DataMatrix::with_labels(data.inner.clone(), l)?
        };
        let run = run_hsap(&set, &config_from(opts, !labels.is_null())?)?;
        let handle = HsapRun {
            objectives: run.trace.iter().map(|r| r.objective).collect(),
            final_objective: run.report.final_objective,
            projection: run.projection,
        };
        write_out(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Plain SAP on the full secant set of `data` from a PCA start.
///
/// # Safety
/// `data` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_sap_run(
    data: *const HsapMatrix,
    k: usize,
    alpha: f64,
    iters: usize,
    seed: u64,
    out: *mut *mut HsapRun,
) -> HsapStatus {
    guard(|| {
        let data = non_null(data, "data")?;
        let run = sap_run(
            &data.inner,
            &SapParams {
                k,
                alpha,
                iters,
                seed,
                ..SapParams::default()
            },
        )?;
        let handle = HsapRun {
            objectives: run.trace.iter().map(|r| r.objective).collect(),
            final_objective: run.final_objective,
            projection: run.projection,
        };
        write_out(out, Box::into_raw(Box::new(handle)), "out")
    })
}

/// Copies the final `n x k` projection into a new matrix handle.
///
/// # Safety
/// `run` must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_run_projection(
    run: *const HsapRun,
    out: *mut *mut HsapMatrix,
) -> HsapStatus {
    guard(|| {
        let run = non_null(run, "run")?;
        let inner = run.projection.clone();
        write_out(out, Box::into_raw(Box::new(HsapMatrix { inner })), "out")
    })
}

/// Objective at the final frame, or NaN for a null handle.
///
/// # Safety
/// `run` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn hsap_run_final_objective(run: *const HsapRun) -> f64 {
    // SAFETY: null or live handle per contract.
    unsafe { run.as_ref() }.map_or(f64::NAN, |r| r.final_objective)
}

/// Number of iterations run (trace length), or 0 for a null handle.
///
/// # Safety
/// `run` must be null or live.
#[no_mangle]
pub unsafe extern "C" fn hsap_run_iterations(run: *const HsapRun) -> usize {
    // SAFETY: null or live handle per contract.
    unsafe { run.as_ref() }.map_or(0, |r| r.objectives.len())
}

/// Copies the per-iteration objectives into `out` (`len` must equal the
/// iteration count).
///
/// # Safety
/// `run` must be live and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_run_trace(
    run: *const HsapRun,
    out: *mut f64,
    len: usize,
) -> HsapStatus {
    guard(|| {
        let run = non_null(run, "run")?;
        copy_values(&run.objectives, out, len)
    })
}

/// Releases a run. Null is ignored.
///
/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsap_run_free(run: *mut HsapRun) {
    if !run.is_null() {
        // SAFETY: handle came from Box::into_raw and is freed once.
        drop(unsafe { Box::from_raw(run) });
    }
}

/// Principal angles, nondecreasing, between the column spans of two
/// orthonormal-column matrices. `len` must equal the smaller column count.
///
/// # Safety
/// `a`, `b` must be live and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hsap_principal_angles(
    a: *const HsapMatrix,
    b: *const HsapMatrix,
    out: *mut f64,
    len: usize,
) -> HsapStatus {
    guard(|| {
        let a = non_null(a, "a")?;
        let b = non_null(b, "b")?;
        let angles = principal_angles(&a.inner, &b.inner)?.angles;
        copy_values(&angles, out, len)
    })
}
