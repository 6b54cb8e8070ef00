//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use hsap::clustering::{ClusterModel, Mode};
use hsap::dataset::{gen_synthetic, DataMatrix, SynthParams};
use hsap::hsap::*;
use hsap::linalg::{principal_angles, Matrix};
use hsap::sap::sap_step;
use hsap::secant::{full_secant_count, full_secants, SecantSet, DEFAULT_SECANT_CAP};
use hsap::HsapError;
use rand::Rng;

type Check = Box<dyn Fn() -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

fn hsap_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hsap"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn synthetic_reproduction() -> Outcome {
    let data = gen_synthetic(&SynthParams::default()).unwrap();
    let config = HsapConfig {
        k: 2,
        clusters: 3,
        use_labels: true,
        mode: Mode::Linear,
        alpha: 0.01,
        anchors: 20,
        max_iters: 80,
        stop: None,
        ..HsapConfig::default()
    };
    let started = Instant::now();
    let run = single_threaded(|| run_hsap(&data, &config)).unwrap();
    let elapsed = started.elapsed();

    let projected = data.points.matmul(&run.projection).unwrap();
    let labels = data.labels.as_ref().unwrap();
    let groups: Vec<Vec<&[f64]>> = (1..=3)
        .map(|l| {
            (0..projected.rows())
                .filter(|&i| labels[i] == l)
                .map(|i| projected.row(i))
                .collect()
        })
        .collect();
    let mut min_gap = f64::INFINITY;
    for a in 0..3 {
        for b in a + 1..3 {
            for x in &groups[a] {
                for y in &groups[b] {
                    min_gap = min_gap.min(distance(x, y));
                }
            }
        }
    }
    let centroids: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            (0..2)
                .map(|c| g.iter().map(|x| x[c]).sum::<f64>() / g.len() as f64)
                .collect()
        })
        .collect();
    let radii: Vec<f64> = groups
        .iter()
        .zip(&centroids)
        .map(|(g, c)| g.iter().map(|x| distance(x, c)).sum::<f64>() / g.len() as f64)
        .collect();
    let mean_radius = radii.iter().sum::<f64>() / 3.0;
    let mut separation = f64::INFINITY;
    for a in 0..3 {
        for b in a + 1..3 {
            separation = separation.min(distance(&centroids[a], &centroids[b]));
        }
    }

    let initial = run.trace[0].objective;
    let final_objective = run.report.final_objective;
    let checks = [
        (
            elapsed < Duration::from_secs(10),
            format!("time {:.3}s", elapsed.as_secs_f64()),
        ),
        (
            run.trace.len() == 80,
            format!("trace entries {}", run.trace.len()),
        ),
        (
            final_objective > initial,
            format!("objective {initial:.4} -> {final_objective:.4}"),
        ),
        (
            min_gap > 0.0,
            format!("min inter-cluster distance {min_gap:.4}"),
        ),
        (
            separation > 5.0 * mean_radius,
            format!(
                "centroid separation {separation:.3} vs 5 x mean radius {:.3}",
                5.0 * mean_radius
            ),
        ),
    ];
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.0)
        .map(|c| c.1.as_str())
        .collect();
    let detail = checks
        .iter()
        .map(|c| c.1.clone())
        .collect::<Vec<_>>()
        .join("; ");
    if failed.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; failing: {}", failed.join(", ")))
    }
}

fn sap_reduction() -> Outcome {
    let mut r = rng(20);
    let mut worst = 0.0f64;
    for dataset in 0..20 {
        let t = r.random_range(3..=40);
        let n = r.random_range(3..=8);
        let k = 1 + dataset % 3;
        let data = DataMatrix::new(random_points(&mut r, t, n));
        let seed = r.random::<u64>();
        let init = if dataset % 2 == 0 {
            InitStrategy::Pca
        } else {
            InitStrategy::Random
        };
        let config = HsapConfig {
            k,
            clusters: 1,
            mode: Mode::Secants,
            within_samples: t * t,
            init,
            seed,
            stop: None,
            max_iters: 50,
            ..HsapConfig::default()
        };
        let problem = HsapProblem::build(&data, &config).unwrap();
        let p0 = init_projection(&data.points, k, init, config.init_centering, seed).unwrap();
        let mut state = ProjectionState::new(p0.clone()).unwrap();
        let secants = full_secants(&data.points, DEFAULT_SECANT_CAP).unwrap();
        let mut p = p0;
        for _ in 0..50 {
            state
                .step(
                    &problem.models,
                    &problem.secants,
                    config.alpha,
                    config.svd_path,
                )
                .unwrap();
            p = sap_step(&p, &secants, config.alpha).unwrap();
            worst = worst.max(state.projection().max_abs_diff(&p));
        }
        let run = run_hsap(&data, &config).unwrap();
        worst = worst.max(run.projection.max_abs_diff(&p));
    }
    outcome(
        worst <= 1e-12,
        format!("20 data sets x 50 iterations, max entry difference {worst:e}"),
    )
}

fn candidate_brute_force() -> Outcome {
    let mut mismatches = Vec::new();
    let mut worst = 0.0f64;
    let mut ties = 0;
    for seed in 0..100 {
        let (p, models, secants) = candidate_instance(seed);
        let scan = brute_force_candidates(&p, &models, &secants);
        let (min, kind, source) = brute_force_winner(&scan, TIE_TOL).unwrap();
        if scan.iter().filter(|c| c.0 <= min + TIE_TOL).count() > 1 {
            ties += 1;
        }
        for path in [SvdPath::Smallest, SvdPath::Full] {
            let c = evaluate_candidates(&p, &models, &secants, path).unwrap();
            worst = worst.max((c.value - min.min(1.0)).abs());
            if (c.kind, c.source) != (kind, source) {
                mismatches.push(format!(
                    "seed {seed}: {} {} vs {kind} {source}",
                    c.kind, c.source
                ));
            }
        }
    }
    outcome(
        mismatches.is_empty() && worst <= 1e-12,
        format!(
            "100 instances ({ties} with ties), max value difference {worst:e}, winner mismatches {}{}",
            mismatches.len(),
            mismatches.first().map(|m| format!(" ({m})")).unwrap_or_default()
        ),
    )
}

fn principal_angle_correctness() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(2..=8);
        let (da, db) = (r.random_range(1..=n.min(3)), r.random_range(1..=n.min(3)));
        let a = random_frame(&mut r, n, da);
        let b = random_frame(&mut r, n, db);
        let pa = principal_angles(&a, &b).unwrap();
        let oracle = grid_principal_angles(&a, &b);
        for ((angle, cos), o) in pa.angles.iter().zip(&pa.cosines).zip(&oracle) {
            worst = worst.max((cos.acos() - o).abs()).max((angle - o).abs());
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e1 = Matrix::from_columns(&[[1.0, 0.0, 0.0]]).unwrap();
    let cases = [
        (Matrix::from_columns(&[[1.0, 0.0, 0.0]]).unwrap(), 0.0),
        (
            Matrix::from_columns(&[[h, h, 0.0]]).unwrap(),
            std::f64::consts::FRAC_PI_4,
        ),
        (
            Matrix::from_columns(&[[0.0, 1.0, 0.0]]).unwrap(),
            std::f64::consts::FRAC_PI_2,
        ),
    ];
    let mut hand = 0.0f64;
    for (b, expected) in &cases {
        hand = hand.max((principal_angles(&e1, b).unwrap().angles[0] - expected).abs());
    }
    outcome(
        worst <= 1e-3 && hand <= 1e-9,
        format!(
            "50 random pairs, max deviation from grid search {worst:e} rad; hand cases {hand:e}"
        ),
    )
}

fn orthonormality_stress() -> Outcome {
    let mut r = rng(5);
    let (n, k) = (8, 3);
    let mut p = random_frame(&mut r, n, k);
    let mut worst = p.orthonormality_error();
    for step in 0..10_000 {
        let alpha = uniform(&mut r, 1e-4, 0.999);
        let cand = match step % 3 {
            0 => {
                let dim = r.random_range(1..=3);
                let v = random_frame(&mut r, n, dim);
                let model = ClusterModel {
                    index: 1,
                    members: vec![0],
                    basis: Some(v),
                    mean: None,
                    within: None,
                    anchors: vec![0],
                };
                evaluate_candidates(&p, &[model], &SecantSet::empty(n), SvdPath::Smallest).unwrap()
            }
            1 => {
                let s =
                    SecantSet::from_directions(n, &[gaussian(&mut r, 1, n).into_vec()]).unwrap();
                evaluate_candidates(&p, &[], &s, SvdPath::Smallest).unwrap()
            }
            _ => {
                // a direction orthogonal to the frame
                let g = gaussian(&mut r, 1, n).into_vec();
                let back = p.matvec(&p.t_matvec(&g));
                let w = unit(g.iter().zip(&back).map(|(a, b)| a - b).collect());
                let s = SecantSet::from_directions(n, &[w]).unwrap();
                evaluate_candidates(&p, &[], &s, SvdPath::Smallest).unwrap()
            }
        };
        p = update_projection(&p, &cand, alpha).unwrap();
        worst = worst.max(p.orthonormality_error());
    }
    outcome(
        worst <= 1e-8,
        format!("10000 updates, max |PᵀP - I| {worst:e}"),
    )
}

fn secant_counting() -> Outcome {
    let mut r = rng(6);
    let mut bad = Vec::new();
    for t in 2..=200 {
        let pts = random_points(&mut r, t, 2);
        let mut pairs = 0;
        for a in 0..t {
            for b in a + 1..t {
                if pts.row(a) != pts.row(b) {
                    pairs += 1;
                }
            }
        }
        let set = full_secants(&pts, DEFAULT_SECANT_CAP).unwrap();
        if set.len() != pairs || pairs != t * (t - 1) / 2 {
            bad.push(t);
        }
    }
    let big = full_secant_count(21025);
    let started = Instant::now();
    let refused = matches!(
        full_secants(&Matrix::zeros(21025, 1), DEFAULT_SECANT_CAP),
        Err(HsapError::SecantCap {
            count: 221_014_800,
            ..
        })
    );
    let quick = started.elapsed() < Duration::from_secs(1);
    outcome(
        bad.is_empty() && big == 221_014_800 && refused && quick,
        format!(
            "T = 2..200 mismatches {}; count(21025) = {big}; materialization refused {refused}",
            bad.len()
        ),
    )
}

fn scaling_sanity() -> Outcome {
    let mut r = rng(7);
    let (n, k) = (10, 3);
    let models: Vec<ClusterModel> = (1..=3)
        .map(|index| ClusterModel {
            index,
            members: vec![0],
            basis: Some(random_frame(&mut r, n, 2)),
            mean: None,
            within: None,
            anchors: vec![0],
        })
        .collect();
    let p0 = random_frame(&mut r, n, k);
    let sizes = [1_000usize, 10_000, 100_000];
    let times: Vec<f64> = sizes
        .iter()
        .map(|&m| {
            let dirs: Vec<Vec<f64>> = (0..m).map(|_| gaussian(&mut r, 1, n).into_vec()).collect();
            let secants = SecantSet::from_directions(n, &dirs).unwrap();
            single_threaded(|| {
                let mut state = ProjectionState::new(p0.clone()).unwrap();
                for _ in 0..3 {
                    state
                        .step(&models, &secants, 0.01, SvdPath::Smallest)
                        .unwrap();
                }
                let mut samples: Vec<f64> = (0..25)
                    .map(|_| {
                        let t = Instant::now();
                        state
                            .step(&models, &secants, 0.01, SvdPath::Smallest)
                            .unwrap();
                        t.elapsed().as_secs_f64()
                    })
                    .collect();
                samples.sort_by(f64::total_cmp);
                samples[samples.len() / 2]
            })
        })
        .collect();
    let ratios: Vec<f64> = times.windows(2).map(|w| w[1] / w[0]).collect();
    let pass = ratios.iter().all(|&q| q <= 10.0 * 1.3);
    outcome(
        pass,
        format!(
            "median step {:.1}/{:.1}/{:.1} us at |S| = 1e3/1e4/1e5, growth x{:.2} and x{:.2} per 10x (limit 13)",
            times[0] * 1e6,
            times[1] * 1e6,
            times[2] * 1e6,
            ratios[0],
            ratios[1]
        ),
    )
}

fn determinism(work: &Path) -> Outcome {
    let syn = work.join("syn");
    let o = hsap_bin(&["synth", "--out", syn.to_str().unwrap()]);
    assert!(o.status.success());
    let data = syn.join("data.csv");
    let outs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = work.join(name);
            let o = hsap_bin(&[
                "project",
                "--input",
                data.to_str().unwrap(),
                "--clusters",
                "3",
                "--anchor-strategy",
                "random",
                "--seed",
                "11",
                "--dim",
                "2",
                "--out",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let files = [
        "projection.csv",
        "trace.csv",
        "convergence.svg",
        "scatter.svg",
    ];
    let differing: Vec<&str> = files
        .iter()
        .copied()
        .filter(|f| fs::read(outs[0].join(f)).unwrap() != fs::read(outs[1].join(f)).unwrap())
        .collect();
    outcome(
        differing.is_empty(),
        format!("compared {}; differing: {differing:?}", files.join(", ")),
    )
}

fn dimension_profile(work: &Path) -> Outcome {
    let syn = work.join("syn");
    let o = hsap_bin(&["synth", "--out", syn.to_str().unwrap()]);
    assert!(o.status.success());
    let out = work.join("sweep");
    let o = hsap_bin(&[
        "sweep",
        "--input",
        syn.join("data.csv").to_str().unwrap(),
        "--labels",
        syn.join("labels.csv").to_str().unwrap(),
        "--kmin",
        "1",
        "--kmax",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("profile.csv")).unwrap();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    outcome(
        values.len() == 3 && (values[2] - 1.0).abs() <= 1e-9 && values[1] > values[0],
        format!("objective(1..3) = {values:?}"),
    )
}

/// Spectral cube 10 x 10 x 20 built from four materials, one per quadrant,
/// with small multiplicative noise.
fn cube_run(work: &Path) -> Outcome {
    let mut r = rng(8);
    let materials: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..20).map(|_| uniform(&mut r, 0.2, 1.0)).collect())
        .collect();
    let mut text = String::new();
    for row in 0..10 {
        for col in 0..10 {
            let m = &materials[(row / 5) * 2 + col / 5];
            let pixel: Vec<String> = m
                .iter()
                .map(|x| (x * uniform(&mut r, 0.97, 1.03)).to_string())
                .collect();
            text.push_str(&pixel.join(","));
            text.push('\n');
        }
    }
    let input = work.join("cube.csv");
    fs::write(&input, text).unwrap();
    let out = work.join("cube");
    let o = hsap_bin(&[
        "project",
        "--input",
        input.to_str().unwrap(),
        "--cube",
        "10x10x20",
        "--clusters",
        "4",
        "--metric",
        "cosine",
        "--dim",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let ok = o.status.success() && out.join("projection.csv").exists();
    outcome(
        ok,
        format!(
            "exit {:?}{}",
            o.status.code(),
            if ok {
                String::new()
            } else {
                format!(": {}", String::from_utf8_lossy(&o.stderr).trim())
            }
        ),
    )
}

fn main() {
    let work = tempfile::tempdir().unwrap();
    let w = work.path().to_path_buf();
    let criteria: Vec<(&str, Check)> = vec![
        ("1 synthetic reproduction", Box::new(synthetic_reproduction)),
        ("2 SAP reduction", Box::new(sap_reduction)),
        ("3 candidate brute force", Box::new(candidate_brute_force)),
        ("4 principal angles", Box::new(principal_angle_correctness)),
        (
            "5 orthonormality under stress",
            Box::new(orthonormality_stress),
        ),
        ("6 secant counting", Box::new(secant_counting)),
        ("7 scaling", Box::new(scaling_sanity)),
        (
            "8 determinism",
            Box::new({
                let w = w.join("det");
                move || determinism(&w)
            }),
        ),
        (
            "9 dimension profile",
            Box::new({
                let w = w.join("sweep");
                move || dimension_profile(&w)
            }),
        ),
        (
            "cube run",
            Box::new({
                let w = w.clone();
                move || cube_run(&w)
            }),
        ),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failures += 1;
        }
        println!(
            "{} [{name}] {}",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
