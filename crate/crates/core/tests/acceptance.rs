//! Acceptance gate: one line per criterion, nonzero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::panic;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cauchy_gabor::cauchy_analysis::{analyze, band_identity_residual, coefficient, WindowParam};
use cauchy_gabor::cli::random_signal;
use cauchy_gabor::framebounds::{frame_bounds, frame_bounds_with_doubling, FrameProblem};
use cauchy_gabor::lattice::{make_frequency_set, PointSet, Window};
use cauchy_gabor::paley_wiener::{sampling_constants, SamplingProblem};
use cauchy_gabor::pipeline::{cluster_counterexample, gap_counterexample, reconstruct, GapScenario, ReconstructOptions};
use cauchy_gabor::spectrum::{gaussian_spectrum, SpectralSignal};
use cauchy_gabor::triangular_system::{build_system, max_entry, neumann_norm};
use common::{c, coefficient_by_quadrature, lattice};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> (bool, String);

fn main() {
    let checks: [(usize, &str, f64, Check); 10] = [
        (1, "band identity vs quadrature", 30.0, residue_identity),
        (2, "triangularity", 10.0, triangularity),
        (3, "bidiagonal matrix identities", 5.0, matrix_identities),
        (4, "Shannon tight case", 60.0, shannon_tight),
        (5, "undersampling collapse", 60.0, undersampling_collapse),
        (6, "round-trip reconstruction", 300.0, round_trip),
        (7, "frame-bound dichotomy", 600.0, frame_dichotomy),
        (8, "gap and cluster counterexamples", 300.0, counterexamples),
        (9, "single-atom upper bound", 30.0, single_atom),
        (10, "CLI determinism", 600.0, determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, budget, check) in checks {
        let start = Instant::now();
        let (ok, detail) = match panic::catch_unwind(check) {
            Ok(r) => r,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let secs = start.elapsed().as_secs_f64();
        let pass = ok && secs <= budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {name}: {detail} [{secs:.2}s of {budget:.0}s]",
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn random_m(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let mut pts = vec![rng.random_range(-2.0..2.0)];
    for _ in 1..count {
        let last = pts[pts.len() - 1];
        pts.push(last + rng.random_range(0.2..=2.0));
    }
    pts
}

fn random_lambda(rng: &mut ChaCha8Rng, count: usize) -> PointSet {
    let mut pts: Vec<f64> = (0..count).map(|_| rng.random_range(-5.0..=5.0)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    PointSet::explicit(pts).unwrap()
}

fn residue_identity() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_identity = 0.0f64;
    let mut worst_quadrature = 0.0f64;
    for case in 0..20 {
        let w = if case % 2 == 0 { c(1.0, 0.0) } else { c(1.0, 0.5) };
        let w = WindowParam::new(w).unwrap();
        let m = make_frequency_set(&random_m(&mut rng, 8)).unwrap();
        let lambda = random_lambda(&mut rng, 10);
        let f = random_signal(&m, 2, 3, 100 + case).unwrap();
        worst_identity = worst_identity.max(band_identity_residual(&f, &lambda, &m, w).unwrap());
        let table = analyze(&f, &lambda, &m, w).unwrap();
        let scale = table.max_abs();
        for (i, &l) in lambda.points().iter().enumerate() {
            for (n, &mu) in m.points().iter().enumerate() {
                let q = coefficient_by_quadrature(&f, l, mu, w.value());
                worst_quadrature = worst_quadrature.max((table.get(i, n) - q).norm() / scale);
            }
        }
    }
    // 2πi normalisation: f̂ = 1 on [0, 1], time-domain quadrature of ∫ f(t)/(t - i) dt
    let f = SpectralSignal::indicator(0.0, 1.0).unwrap();
    let closed = c(0.0, 1.0 - (-2.0 * PI).exp());
    let analytic = coefficient(&f, 0.0, 0.0, WindowParam::real(1.0).unwrap()).unwrap();
    let t_max = 2000.0;
    let rule = common::gauss_legendre(16);
    let integrand = |t: f64| {
        let ft = if t.abs() < 1e-8 {
            c(1.0, 0.0)
        } else {
            (c(0.0, 2.0 * PI * t).exp() - 1.0) / c(0.0, 2.0 * PI * t)
        };
        ft / c(t, -1.0)
    };
    let time = common::integrate(integrand, -t_max, t_max, 8000, &rule) + c(0.0, 1.0 / (PI * t_max));
    let ok = worst_identity <= 1e-10 && worst_quadrature <= 1e-10 && (analytic - closed).norm() <= 1e-14 && (time - closed).norm() <= 1e-5;
    (
        ok,
        format!(
            "identity residual {worst_identity:.2e}, quadrature deviation {worst_quadrature:.2e} (limit 1e-10); 2πi constant: closed form {:.1e}, time quadrature {:.1e}",
            (analytic - closed).norm(),
            (time - closed).norm()
        ),
    )
}

fn triangularity() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let m = make_frequency_set(&random_m(&mut rng, 8)).unwrap();
        let k = rng.random_range(0..m.band_count());
        let lambda = random_lambda(&mut rng, 10);
        let w = WindowParam::new(c(rng.random_range(0.3..2.0), rng.random_range(-1.0..1.0))).unwrap();
        let f = random_signal(&m, 2, 3, 500 + case).unwrap().restrict(m.points()[k], m.points()[k + 1]);
        let table = analyze(&f, &lambda, &m, w).unwrap();
        let scale = table.max_abs();
        for i in 0..table.rows() {
            for n in k + 1..table.cols() {
                worst = worst.max(table.get(i, n).norm() / scale);
            }
        }
    }
    (worst <= 1e-14, format!("largest |c_(λ,n)|/scale for n > k: {worst:.2e} (limit 1e-14)"))
}

fn matrix_identities() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut inv_err = 0.0f64;
    let mut power_err = 0.0f64;
    let mut norm_err = 0.0f64;
    let mut bound_ok = true;
    let mut bound_checked = 0;
    for size in [2usize, 5, 16, 33, 64] {
        for _ in 0..4 {
            let pts = random_m(&mut rng, size);
            let m = make_frequency_set(&pts).unwrap();
            let w = WindowParam::new(c(rng.random_range(0.1..1.5), rng.random_range(-1.0..1.0))).unwrap();
            let s = build_system(&m, w).unwrap();
            let id = DMatrix::<Complex64>::identity(size, size);
            inv_err = inv_err.max(max_entry(&((&id - &s.b) * &s.a - &id)));
            let mut powers = vec![1, 2, size / 2, size - 1];
            powers.sort_unstable();
            powers.dedup();
            for power in powers.into_iter().filter(|&p| p >= 1 && p < size) {
                let bn = s.b_power(power);
                for r in 0..size {
                    for col in 0..size {
                        let want = if col == r + power {
                            (-2.0 * PI * w.value() * (pts[col] - pts[r])).exp()
                        } else {
                            c(0.0, 0.0)
                        };
                        power_err = power_err.max((bn[(r, col)] - want).norm());
                    }
                }
                let nn = neumann_norm(&m, w, power).unwrap();
                let op = bn.singular_values().max();
                norm_err = norm_err.max((op - nn.norm).abs());
                if let Some(ok) = nn.unit_window_bound_ok {
                    bound_checked += 1;
                    bound_ok &= ok && op <= (-w.value().re).exp();
                }
            }
        }
    }
    let ok = inv_err <= 1e-13 && power_err <= 1e-13 && norm_err <= 1e-13 && bound_ok && bound_checked > 0;
    (
        ok,
        format!(
            "(I-B)A-I {inv_err:.1e}, B^N entries {power_err:.1e}, ‖B^N‖ {norm_err:.1e}, bound e^(-Re w) held in {bound_checked} windows ≥ 1"
        ),
    )
}

fn shannon_tight() -> (bool, String) {
    let base = sampling_constants(&SamplingProblem::new(lattice(1.0, -40.0, 40.0), 1.0, 64).unwrap()).unwrap();
    let dbl = sampling_constants(&SamplingProblem::new(lattice(1.0, -80.0, 80.0), 1.0, 128).unwrap()).unwrap();
    let near = |x: f64, y: f64, tol: f64| (x / y - 1.0).abs() <= tol;
    let ok = near(base.a_est, 1.0, 0.02)
        && near(base.b_est, 1.0, 0.02)
        && near(dbl.a_est, base.a_est, 0.01)
        && near(dbl.b_est, base.b_est, 0.01);
    (
        ok,
        format!(
            "W=40: (A, B) = ({:.4}, {:.4}); W=80: ({:.4}, {:.4})",
            base.a_est, base.b_est, dbl.a_est, dbl.b_est
        ),
    )
}

fn undersampling_collapse() -> (bool, String) {
    let base = sampling_constants(&SamplingProblem::new(lattice(2.0, -40.0, 40.0), 1.0, 64).unwrap()).unwrap();
    let dbl = sampling_constants(&SamplingProblem::new(lattice(2.0, -80.0, 80.0), 1.0, 128).unwrap()).unwrap();
    let drop = base.a_est / dbl.a_est;
    let ok = base.a_est <= 0.05 * base.b_est && drop >= 5.0 && (dbl.b_est / base.b_est - 1.0).abs() <= 0.2;
    (
        ok,
        format!(
            "A {:.2e} -> {:.2e} (drop {:.1e}x), B {:.4} -> {:.4}",
            base.a_est, dbl.a_est, drop, base.b_est, dbl.b_est
        ),
    )
}

fn round_trip_error(half: f64) -> f64 {
    let w = WindowParam::real(1.0).unwrap();
    let m = make_frequency_set(&(0..=8).map(f64::from).collect::<Vec<_>>()).unwrap();
    let f = gaussian_spectrum(4.0, 1.0, 1e-6).unwrap();
    let lambda = lattice(0.5, -half, half);
    let table = analyze(&f, &lambda, &m, w).unwrap();
    reconstruct(&table, &lambda, &m, &ReconstructOptions::default(), Some(&f))
        .unwrap()
        .relative_l2_error
        .unwrap()
}

fn round_trip() -> (bool, String) {
    let f = gaussian_spectrum(4.0, 1.0, 1e-6).unwrap();
    let (lo, hi) = f.support().unwrap();
    let e60 = round_trip_error(60.0);
    let e120 = round_trip_error(120.0);
    let ok = lo >= 1.0 && hi <= 7.0 && e60 <= 1e-4 && e120 < e60;
    (ok, format!("relative L2 error {e60:.2e} on [-60,60], {e120:.2e} on [-120,120] (limit 1e-4)"))
}

fn frame_dichotomy() -> (bool, String) {
    let w = WindowParam::real(1.0).unwrap();
    let m = lattice(1.0, 0.0, 8.0);
    let dense = frame_bounds(&FrameProblem::new(lattice(0.8, -40.0, 40.0), m.clone(), w, 160).unwrap()).unwrap();
    let sparse = frame_bounds_with_doubling(&FrameProblem::new(lattice(1.25, -40.0, 40.0), m, w, 160).unwrap()).unwrap();
    let d = sparse.doubling.as_ref().unwrap();
    let contrast = dense.a_est / sparse.a_est;
    let drop = sparse.a_est / d.a_doubled;
    (
        contrast >= 10.0 && drop >= 5.0,
        format!(
            "A(0.8Z) {:.2e}, A(1.25Z) {:.2e} (contrast {contrast:.0}x), 1.25Z drop under doubling {drop:.1}x",
            dense.a_est, sparse.a_est
        ),
    )
}

fn counterexamples() -> (bool, String) {
    let w = WindowParam::real(1.0).unwrap();
    let gap = gap_counterexample(&[2.0, 4.0, 8.0], &GapScenario::default(), w).unwrap();
    let r = &gap.responses;
    let gap_ok = r[0] > r[1] && r[1] > r[2] && r[2] <= r[0] / 100.0;
    let base = FrameProblem::new(lattice(10.0, -40.0, 40.0), lattice(1.0, 0.0, 8.0), w, 80).unwrap();
    let cluster = cluster_counterexample(&[1, 2, 4, 8], 1e-3, &base).unwrap();
    let b1 = cluster.responses[0];
    let worst = cluster
        .values
        .iter()
        .zip(&cluster.responses)
        .map(|(m, b)| b / (m * b1))
        .fold(f64::INFINITY, f64::min);
    (
        gap_ok && worst >= 0.8,
        format!(
            "gap responses {:.2e}, {:.2e}, {:.2e}; cluster min B(m)/(m B(1)) = {worst:.3}",
            r[0], r[1], r[2]
        ),
    )
}

fn single_atom() -> (bool, String) {
    let p = FrameProblem::new(
        PointSet::explicit(vec![0.0]).unwrap(),
        PointSet::explicit(vec![0.0]).unwrap(),
        WindowParam::real(1.0).unwrap(),
        128,
    )
    .unwrap()
    .with_trial_window(Window::new(-4.0, 4.0).unwrap());
    let b = frame_bounds(&p).unwrap().b_est;
    ((b / PI - 1.0).abs() <= 0.02, format!("B_est = {b:.6}, π = {PI:.6}"))
}

const DETERMINISM_CONFIG: &str = r#"
name = "determinism"
seed = 9

[lambda]
window = { lo = -12.0, hi = 12.0 }
generator = { kind = "jittered", step = 0.8, amplitude = 0.1, seed = 4 }

[m]
window = { lo = 0.0, hi = 3.0 }
generator = { kind = "arithmetic", step = 1.0 }

[signal]
kind = "random"
pieces_per_band = 2
degree = 3

[sampling]
beta = 1.0

[frame]
sweep = { axis = "w_re", values = [0.5, 1.0, 2.0] }

[counterexample]
kind = "cluster"
multiplicities = [1, 2, 4]
spread = 1e-3
"#;

fn run_cli(args: &[&str], out: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_cauchy-gabor"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn determinism() -> (bool, String) {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("scenario.toml");
    std::fs::write(&cfg, DETERMINISM_CONFIG).unwrap();
    let cfg = cfg.to_str().unwrap();
    let gap = ["--set", "counterexample={kind=\"gap\",gap_widths=[1.0,2.0,4.0]}"];
    let cluster = ["--set", "lambda.generator={kind=\"arithmetic\",step=3.0}"];
    let commands: [(&str, &[&str]); 8] = [
        ("lattice", &[]),
        ("analyze", &[]),
        ("reconstruct", &[]),
        ("bounds", &[]),
        ("sampling", &[]),
        ("counterexample", &cluster),
        ("counterexample", &gap),
        ("theorem-check", &[]),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (i, (cmd, extra)) in commands.iter().enumerate() {
        let runs: Vec<_> = (0..2)
            .map(|r| {
                let dir = tmp.path().join(format!("{i}-{r}"));
                let mut args = vec![*cmd, "--config", cfg, "--seed", "9", "--threads", if r == 0 { "1" } else { "3" }];
                args.extend_from_slice(extra);
                (run_cli(&args, &dir), dir)
            })
            .collect();
        if runs[0].0 != 0 || runs[1].0 != 0 {
            mismatches.push(format!("{cmd} exited {} / {}", runs[0].0, runs[1].0));
            continue;
        }
        let mut names: Vec<_> = std::fs::read_dir(&runs[0].1)
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n != "run_meta.json")
            .collect();
        names.sort();
        for name in names {
            compared += 1;
            let a = std::fs::read(runs[0].1.join(&name)).unwrap();
            let b = std::fs::read(runs[1].1.join(&name)).unwrap_or_default();
            if a != b {
                mismatches.push(format!("{cmd}/{}", name.to_string_lossy()));
            }
        }
    }
    (
        mismatches.is_empty() && compared > 0,
        if mismatches.is_empty() {
            format!("{compared} output files byte-identical across reruns (1 vs 3 threads)")
        } else {
            format!("differences: {}", mismatches.join(", "))
        },
    )
}
