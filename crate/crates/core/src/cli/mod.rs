//! Command-line front end: `hsap <synth|project|sweep|plot> [flags]`.
//!
//! Every flag may also be set in a `--config` file of `key = value` lines,
//! keys spelled like the flags with dashes turned into underscores. Flags
//! win over the file, the file over built-in defaults. Each command writes a
//! manifest in the same syntax recording every resolved value and its
//! source.

mod settings;

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand};

pub use settings::{sha256_file, ConfigFile, Settings, Source};

use crate::clustering::{AnchorStrategy, Metric, Mode};
use crate::dataset::{
    flatten_cube, format_csv, format_labels, gen_synthetic, load_labels, load_matrix,
    load_matrix_auto, write_atomic, CubeDescriptor, DataMatrix, Interleave, MatrixFormat,
    SynthParams,
};
use crate::error::{ErrorClass, HsapError, Result};
use crate::hsap::{
    dimension_sweep, parse_trace_csv, profile_csv, run_hsap, trace_csv, HsapConfig, InitStrategy,
    StopRule, SvdPath,
};
use crate::linalg::{Centering, Matrix, PcaTarget};
use crate::plot::{convergence_svg, profile_svg, scatter_svg};

#[derive(Debug, Parser)]
#[command(
    name = "hsap",
    version,
    about = "Secant-preserving linear dimensionality reduction"
)]
pub struct Cli {
    /// File of `key = value` defaults (keys are flag names with underscores).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the two-lines-and-a-plane synthetic data set.
    Synth(SynthArgs),
    /// Cluster, build candidate sets and optimize a projection.
    Project(ProjectArgs),
    /// Run `project` over a range of target dimensions.
    Sweep(SweepArgs),
    /// Render a trace or a point set as SVG.
    Plot(PlotArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Project(_) => "project",
            Command::Sweep(_) => "sweep",
            Command::Plot(_) => "plot",
        }
    }
}

/// Closed interval written `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval(pub f64, pub f64);

impl FromStr for Interval {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || HsapError::InvalidParameter(format!("interval {s:?} must be lo,hi"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let lo: f64 = a.trim().parse().map_err(|_| bad())?;
        let hi: f64 = b.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(bad());
        }
        Ok(Interval(lo, hi))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Auto,
    Fixed(MatrixFormat),
}

impl FromStr for InputFormat {
    type Err = HsapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InputFormat::Auto),
            other => other.parse().map(InputFormat::Fixed),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputFormat::Auto => f.write_str("auto"),
            InputFormat::Fixed(m) => m.fmt(f),
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Points sampled from each line.
    #[arg(long)]
    pub per_line: Option<usize>,
    /// Points sampled from the plane.
    #[arg(long)]
    pub plane: Option<usize>,
    /// Sampling interval `lo,hi` for both parameters.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<Interval>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (data.csv, labels.csv, manifest.txt).
    #[arg(long)]
    pub out: Option<String>,
}

/// Flags shared by `project` and `sweep`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Data matrix (CSV or binary; rows are points).
    #[arg(long)]
    pub input: Option<String>,
    /// auto, csv or binary.
    #[arg(long)]
    pub format: Option<InputFormat>,
    /// Treat the input entries as a cube `HxWxB` and flatten it to pixels.
    #[arg(long)]
    pub cube: Option<CubeDescriptor>,
    /// Cube memory order: bip, bil or bsq.
    #[arg(long)]
    pub interleave: Option<Interleave>,
    /// Number of k-means clusters.
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Per-row cluster labels; skips k-means.
    #[arg(long)]
    pub labels: Option<String>,
    /// linear or secants.
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
    /// Anchors per cluster.
    #[arg(long)]
    pub anchors: Option<usize>,
    /// random or extremal.
    #[arg(long)]
    pub anchor_strategy: Option<AnchorStrategy>,
    /// Energy fraction for cluster bases (linear mode).
    #[arg(long)]
    pub energy: Option<f64>,
    /// Fixed cluster basis dimension (linear mode).
    #[arg(long)]
    pub basis_dim: Option<usize>,
    /// Within-cluster secants sampled per cluster (secant mode).
    #[arg(long)]
    pub within_samples: Option<usize>,
    /// euclidean or cosine (k-means).
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub kmeans_iters: Option<usize>,
    /// pca or random.
    #[arg(long)]
    pub init: Option<InitStrategy>,
    /// raw or mean (PCA initialization).
    #[arg(long)]
    pub init_centering: Option<Centering>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Most secants a run may materialize.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Window of the early-stop rule; 0 disables it.
    #[arg(long)]
    pub stop_window: Option<usize>,
    #[arg(long)]
    pub stop_tol: Option<f64>,
    /// Use full SVDs instead of smallest-triplet solves.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub full_svd: Option<bool>,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Target dimension k.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub kmin: Option<usize>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Also write profile.svg.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub plot: Option<bool>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Trace CSV to draw as a convergence curve.
    #[arg(long)]
    pub trace: Option<String>,
    /// 2- or 3-column point matrix to draw as a scatter.
    #[arg(long)]
    pub points: Option<String>,
    /// Labels coloring the scatter.
    #[arg(long)]
    pub labels: Option<String>,
    /// SVG file to write.
    #[arg(long)]
    pub out: Option<String>,
}

/// Process exit code for an error.
pub fn exit_code(err: &HsapError) -> i32 {
    match err.class() {
        ErrorClass::Usage => 1,
        ErrorClass::Data => 2,
        ErrorClass::Numerical => 3,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors are reported on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let name = cli.command.name();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.class() == ErrorClass::Usage {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(name) {
                    eprintln!("\n{}", sub.render_usage());
                    eprintln!("For more information, try 'hsap {name} --help'.");
                }
            }
            exit_code(&e)
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let file = cli.config.as_deref().map(ConfigFile::load).transpose()?;
    let mut settings = Settings::new(file);
    let threads = settings.value("threads", cli.threads, 0usize)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HsapError::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Synth(a) => cmd_synth(a, &mut settings),
        Command::Project(a) => cmd_project(a, &mut settings),
        Command::Sweep(a) => cmd_sweep(a, &mut settings),
        Command::Plot(a) => cmd_plot(a, &mut settings),
    })
}

fn out_dir(settings: &mut Settings, flag: Option<String>) -> Result<PathBuf> {
    let dir = PathBuf::from(settings.required::<String>("out", flag)?);
    fs::create_dir_all(&dir).map_err(|e| HsapError::io(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes())
}

fn cmd_synth(a: SynthArgs, s: &mut Settings) -> Result<()> {
    let defaults = SynthParams::default();
    let per_line = s.value("per_line", a.per_line, defaults.per_line)?;
    let plane = s.value("plane", a.plane, defaults.plane)?;
    let range = s.value(
        "range",
        a.range,
        Interval(defaults.t_range.0, defaults.t_range.1),
    )?;
    let seed = s.value("seed", a.seed, defaults.seed)?;
    let dir = out_dir(s, a.out)?;
    s.finish();
    let data = gen_synthetic(&SynthParams {
        per_line,
        plane,
        t_range: (range.0, range.1),
        s_range: (range.0, range.1),
        seed,
    })?;
    write_text(&dir.join("data.csv"), &format_csv(&data.points))?;
    write_text(
        &dir.join("labels.csv"),
        &format_labels(data.labels.as_deref().unwrap_or_default()),
    )?;
    write_text(&dir.join("manifest.txt"), &s.manifest("synth"))
}

struct InputSpec {
    path: PathBuf,
    format: InputFormat,
    cube: Option<(CubeDescriptor, Interleave)>,
    labels: Option<PathBuf>,
}

fn resolve_input(r: &RunArgs, s: &mut Settings) -> Result<InputSpec> {
    let path = PathBuf::from(s.required::<String>("input", r.input.clone())?);
    let format = s.value("format", r.format, InputFormat::Auto)?;
    let cube = s.optional("cube", r.cube)?;
    let cube = match (cube, s.optional("interleave", r.interleave)?) {
        (None, Some(_)) => {
            return Err(HsapError::InvalidParameter(
                "--interleave only applies with --cube".into(),
            ))
        }
        (None, None) => None,
        (Some(desc), Some(layout)) => Some((desc, layout)),
        (Some(desc), None) => {
            s.derived("interleave", Interleave::default());
            Some((desc, Interleave::default()))
        }
    };
    Ok(InputSpec {
        path,
        format,
        cube,
        labels: None,
    })
}

impl InputSpec {
    fn load(&self, s: &mut Settings) -> Result<DataMatrix> {
        s.note(format!(
            "sha256 {} {}",
            sha256_file(&self.path)?,
            self.path.display()
        ));
        let mut data = match self.format {
            InputFormat::Auto => load_matrix_auto(&self.path)?,
            InputFormat::Fixed(f) => load_matrix(&self.path, f)?,
        };
        if let Some((desc, layout)) = self.cube {
            data = flatten_cube(data.points.as_slice(), desc, layout)?;
        }
        if let Some(path) = &self.labels {
            s.note(format!("sha256 {} {}", sha256_file(path)?, path.display()));
            data = DataMatrix::with_labels(data.points, load_labels(path)?)?;
        }
        Ok(data)
    }
}

/// Resolves the engine configuration for target dimension `k`; checked
/// against the data dimension once the data is loaded.
fn resolve_run(
    r: &RunArgs,
    s: &mut Settings,
    input: &mut InputSpec,
    k: usize,
) -> Result<HsapConfig> {
    let d = HsapConfig::default();
    let labels = s.optional::<String>("labels", r.labels.clone())?;
    let clusters = s.optional("clusters", r.clusters)?;
    let use_labels = match (&labels, clusters) {
        (Some(_), Some(_)) => {
            return Err(HsapError::InvalidParameter(
                "--clusters and --labels are mutually exclusive".into(),
            ))
        }
        (None, None) => {
            return Err(HsapError::InvalidParameter(
                "one of --clusters or --labels is required".into(),
            ))
        }
        (Some(path), None) => {
            s.note("cluster_source = labels-file");
            input.labels = Some(PathBuf::from(path));
            true
        }
        (None, Some(_)) => {
            s.note("cluster_source = kmeans");
            false
        }
    };
    let mode = s.value("mode", r.mode, d.mode)?;
    let alpha = s.value("alpha", r.alpha, d.alpha)?;
    let max_iters = s.value("iters", r.iters, d.max_iters)?;
    let anchors = s.value("anchors", r.anchors, d.anchors)?;
    let anchor_strategy = s.value("anchor_strategy", r.anchor_strategy, d.anchor_strategy)?;
    let energy = s.optional("energy", r.energy)?;
    let basis_dim = s.optional("basis_dim", r.basis_dim)?;
    let within = s.optional("within_samples", r.within_samples)?;
    let (basis, within_samples) = match mode {
        Mode::Linear => {
            if within.is_some() {
                return Err(HsapError::InvalidParameter(
                    "--within-samples only applies with --mode secants".into(),
                ));
            }
            let basis = match (energy, basis_dim) {
                (Some(_), Some(_)) => {
                    return Err(HsapError::InvalidParameter(
                        "--energy and --basis-dim are mutually exclusive".into(),
                    ))
                }
                (Some(e), None) => PcaTarget::Energy(e),
                (None, Some(k)) => PcaTarget::Dimension(k),
                (None, None) => {
                    let PcaTarget::Energy(e) = d.basis else {
                        unreachable!()
                    };
                    s.derived("energy", e);
                    d.basis
                }
            };
            (basis, d.within_samples)
        }
        Mode::Secants => {
            if energy.is_some() || basis_dim.is_some() {
                return Err(HsapError::InvalidParameter(
                    "--energy and --basis-dim only apply with --mode linear".into(),
                ));
            }
            let m = match within {
                Some(m) => m,
                None => {
                    s.derived("within_samples", d.within_samples);
                    d.within_samples
                }
            };
            (d.basis, m)
        }
    };
    let (metric, kmeans_iters) = if use_labels {
        (d.metric, d.kmeans_iters)
    } else {
        (
            s.value("metric", r.metric, d.metric)?,
            s.value("kmeans_iters", r.kmeans_iters, d.kmeans_iters)?,
        )
    };
    let init = s.value("init", r.init, d.init)?;
    let init_centering = s.value("init_centering", r.init_centering, d.init_centering)?;
    let seed = s.value("seed", r.seed, d.seed)?;
    let cap = s.value("cap", r.cap, d.cap)?;
    let default_stop = StopRule::default();
    let window = s.value("stop_window", r.stop_window, default_stop.window)?;
    let stop = if window == 0 {
        None
    } else {
        Some(StopRule {
            window,
            tol: s.value("stop_tol", r.stop_tol, default_stop.tol)?,
        })
    };
    let full_svd = s.value("full_svd", r.full_svd, false)?;
    let config = HsapConfig {
        k,
        clusters: clusters.unwrap_or(0),
        use_labels,
        mode,
        alpha,
        max_iters,
        anchors,
        anchor_strategy,
        basis,
        within_samples,
        metric,
        kmeans_iters,
        seed,
        init,
        init_centering,
        stop,
        svd_path: if full_svd {
            SvdPath::Full
        } else {
            SvdPath::Smallest
        },
        cap,
    };
    Ok(config)
}

fn cmd_project(a: ProjectArgs, s: &mut Settings) -> Result<()> {
    let mut input = resolve_input(&a.run, s)?;
    let k = s.value("dim", a.dim, HsapConfig::default().k)?;
    let config = resolve_run(&a.run, s, &mut input, k)?;
    let dir = out_dir(s, a.out)?;
    s.finish();
    let data = input.load(s)?;
    config.validate(data.dim())?;

    let run = run_hsap(&data, &config)?;
    let projected = data.points.matmul(&run.projection)?;
    let labels: Vec<i64> = run.problem.labels.iter().map(|&l| l as i64).collect();
    write_text(&dir.join("projection.csv"), &format_csv(&run.projection))?;
    write_text(&dir.join("projected.csv"), &format_csv(&projected))?;
    write_text(&dir.join("trace.csv"), &trace_csv(&run.trace))?;
    write_text(&dir.join("report.txt"), &run.report.to_key_value())?;
    write_text(&dir.join("labels.csv"), &format_labels(&labels))?;
    if !run.trace.is_empty() {
        write_text(&dir.join("convergence.svg"), &convergence_svg(&run.trace)?)?;
    }
    if matches!(k, 2 | 3) {
        write_text(
            &dir.join("scatter.svg"),
            &scatter_svg(&projected, Some(&labels))?,
        )?;
    }
    write_text(&dir.join("manifest.txt"), &s.manifest("project"))
}

fn cmd_sweep(a: SweepArgs, s: &mut Settings) -> Result<()> {
    let mut input = resolve_input(&a.run, s)?;
    let kmin = s.value("kmin", a.kmin, 1usize)?;
    let kmax = s.optional("kmax", a.kmax)?;
    if let Some(kmax) = kmax.filter(|&kmax| kmin > kmax) {
        return Err(HsapError::InvalidParameter(format!(
            "--kmin {kmin} exceeds --kmax {kmax}"
        )));
    }
    let config = resolve_run(&a.run, s, &mut input, kmin)?;
    let plot = s.value("plot", a.plot, false)?;
    let dir = out_dir(s, a.out)?;
    s.finish();
    let data = input.load(s)?;
    let kmax = match kmax {
        Some(k) => k,
        None => {
            s.derived("kmax", data.dim());
            data.dim()
        }
    };
    if kmin > kmax {
        return Err(HsapError::InvalidParameter(format!(
            "--kmin {kmin} exceeds --kmax {kmax}"
        )));
    }
    HsapConfig {
        k: kmax,
        ..config.clone()
    }
    .validate(data.dim())?;

    let profile = dimension_sweep(&data, &config, kmin..=kmax)?;
    write_text(&dir.join("profile.csv"), &profile_csv(&profile))?;
    if plot {
        write_text(&dir.join("profile.svg"), &profile_svg(&profile)?)?;
    }
    write_text(&dir.join("manifest.txt"), &s.manifest("sweep"))
}

fn cmd_plot(a: PlotArgs, s: &mut Settings) -> Result<()> {
    let trace = s.optional::<String>("trace", a.trace)?;
    let points = s.optional::<String>("points", a.points)?;
    let labels = s.optional::<String>("labels", a.labels)?;
    let out = PathBuf::from(s.required::<String>("out", a.out)?);
    s.finish();
    let svg = match (trace, points) {
        (Some(t), None) => {
            if labels.is_some() {
                return Err(HsapError::InvalidParameter(
                    "--labels only applies with --points".into(),
                ));
            }
            let path = PathBuf::from(t);
            let text = fs::read_to_string(&path).map_err(|e| HsapError::io(&path, e))?;
            convergence_svg(&parse_trace_csv(&text, &path)?)?
        }
        (None, Some(p)) => {
            let pts: Matrix = load_matrix_auto(&p)?.points;
            let labels = labels.map(load_labels).transpose()?;
            scatter_svg(&pts, labels.as_deref())?
        }
        _ => {
            return Err(HsapError::InvalidParameter(
                "exactly one of --trace or --points is required".into(),
            ))
        }
    };
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| HsapError::io(parent, e))?;
    }
    write_text(&out, &svg)
}
