//! Command-line frontend: TOML scenario configs, one subcommand per
//! experiment, and reproducible output directories.
//!
//! Every run writes its data files, a `manifest.json` (config hash, version,
//! seed, outputs, failures) and a `run_meta.json` holding the timestamp and
//! wall time. Only `run_meta.json` differs between identical reruns.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cauchy_analysis::{analyze, band_identity_residual, WindowParam};
use crate::error::{Error, Result};
use crate::expquad::Polynomial;
use crate::framebounds::{frame_bounds, frame_bounds_with_doubling, sweep, sweep_to_csv, FrameProblem, SweepAxis};
use crate::lattice::{
    finiteness_report, generate_point_set, make_frequency_set, points_to_csv, FrequencySet, Generator, GeneratorSpec, PointSet, Window,
};
use crate::paley_wiener::{sampling_constants, sampling_stability, SamplingProblem};
use crate::pipeline::{
    cluster_counterexample, default_frame_grid, gap_counterexample, reconstruct, theorem_check, GapScenario,
    ReconstructOptions, Scenario,
};
use crate::spectrum::{gaussian_spectrum, Piece, SpectralSignal};
use crate::triangular_system::neumann_norm;

#[derive(Debug, Parser)]
#[command(name = "cauchy-gabor", version, about = "Cauchy-kernel Gabor systems: analysis, inversion, frame bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Override a config value, e.g. `--set lambda.generator.step=0.8`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for randomized signals (overrides `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Generate Λ and M and report local finiteness of M.
    Lattice,
    /// Frame coefficients of the configured signal.
    Analyze,
    /// Analyze, then recover the signal from its coefficients.
    Reconstruct,
    /// Frame-bound estimates, optionally swept over one parameter.
    Bounds,
    /// Sampling constants of Λ for PW on [0, β].
    Sampling,
    /// Gap or cluster counterexample curve.
    Counterexample,
    /// Finiteness, sampling and frame bounds side by side with a verdict.
    TheoremCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lattice => "lattice",
            Command::Analyze => "analyze",
            Command::Reconstruct => "reconstruct",
            Command::Bounds => "bounds",
            Command::Sampling => "sampling",
            Command::Counterexample => "counterexample",
            Command::TheoremCheck => "theorem-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub lambda: Option<GeneratorSpec>,
    pub m: Option<GeneratorSpec>,
    #[serde(default)]
    pub w: WConfig,
    pub signal: Option<SignalConfig>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub frame: FrameConfig,
    #[serde(default)]
    pub reconstruct: ReconstructOptions,
    pub counterexample: Option<CounterexampleConfig>,
    #[serde(default)]
    pub theorem: TheoremConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WConfig {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Default for WConfig {
    fn default() -> Self {
        WConfig { re: 1.0, im: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    Gaussian { center: f64, halfwidth: f64, tail_tol: f64 },
    Indicator { lo: f64, hi: f64 },
    /// Spectrum CSV as written by `reconstruct`.
    Csv { path: PathBuf },
    /// Random piecewise polynomial on `[min M, max M]`, drawn from `seed`.
    Random { pieces_per_band: usize, degree: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Band length; defaults to β(M) when M is configured.
    pub beta: Option<f64>,
    pub grid: Option<usize>,
    pub epsilon: Option<f64>,
    pub leakage_tol: Option<f64>,
    #[serde(default)]
    pub no_doubling: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub grid: Option<usize>,
    #[serde(default)]
    pub taper: bool,
    pub trial_window: Option<Window>,
    #[serde(default)]
    pub no_doubling: bool,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CounterexampleConfig {
    Gap {
        gap_widths: Vec<f64>,
        #[serde(default = "one")]
        base_step: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "eight")]
        side_points: usize,
        #[serde(default = "one")]
        halfwidth: f64,
        #[serde(default = "tail")]
        tail_tol: f64,
    },
    Cluster { multiplicities: Vec<usize>, spread: f64 },
}

fn one() -> f64 {
    1.0
}

fn eight() -> usize {
    8
}

fn tail() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremConfig {
    pub sampling_grid_per_unit: Option<f64>,
    pub frame_grid: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// Parses TOML text, applies dotted-path overrides, and validates the schema.
pub fn load_config(text: &str, overrides: &[String]) -> Result<Config> {
    let mut value: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    toml::Value::Table(value)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

fn apply_override(root: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` is not KEY=VALUE")))?;
    let parsed: toml::Table = format!("v = {raw}").parse().unwrap_or_else(|_| {
        let mut t = toml::Table::new();
        t.insert("v".into(), toml::Value::String(raw.to_string()));
        t
    });
    let value = parsed["v"].clone();
    let parts: Vec<&str> = key.trim().split('.').collect();
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        table = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override `{key}`: `{part}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// SHA-256 of the effective config's canonical JSON form.
pub fn config_hash(cfg: &Config) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Files produced by a command, written in order once it finishes.
struct Outputs {
    hash: String,
    files: Vec<(String, String)>,
    failures: Vec<String>,
}

impl Outputs {
    fn csv(&mut self, name: &str, body: String) {
        self.files.push((name.into(), format!("# config_hash={}\n{body}", self.hash)));
    }

    fn json(&mut self, name: &str, mut body: serde_json::Value) {
        if let Some(obj) = body.as_object_mut() {
            obj.insert("config_hash".into(), json!(self.hash));
        }
        let text = serde_json::to_string_pretty(&body).expect("json serializes");
        self.files.push((name.into(), text + "\n"));
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        // A second call in one process keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut cfg = load_config(&text, &cli.overrides)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let hash = config_hash(&cfg);
    let mut out = Outputs {
        hash: hash.clone(),
        files: Vec::new(),
        failures: Vec::new(),
    };
    let result = match cli.command {
        Command::Lattice => cmd_lattice(&cfg, &mut out),
        Command::Analyze => cmd_analyze(&cfg, &mut out),
        Command::Reconstruct => cmd_reconstruct(&cfg, &mut out),
        Command::Bounds => cmd_bounds(&cfg, &mut out),
        Command::Sampling => cmd_sampling(&cfg, &mut out),
        Command::Counterexample => cmd_counterexample(&cfg, &mut out),
        Command::TheoremCheck => cmd_theorem(&cfg, &mut out),
    };
    if let Err(e) = &result {
        if out.files.is_empty() {
            return Err(result.unwrap_err());
        }
        out.failures.push(e.to_string());
    }
    fs::create_dir_all(&dir)?;
    let names: Vec<String> = out.files.iter().map(|f| f.0.clone()).collect();
    for (name, body) in &out.files {
        fs::write(dir.join(name), body)?;
    }
    let manifest = json!({
        "command": cli.command.name(),
        "config_hash": hash,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "config": cfg,
        "outputs": names,
        "failures": out.failures,
    });
    write_json(&dir.join("manifest.json"), &manifest)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    write_json(
        &dir.join("run_meta.json"),
        &json!({ "unix_time": stamp, "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 }),
    )?;
    match result {
        Ok(()) if out.failures.is_empty() => Ok(0),
        Ok(()) => {
            eprintln!("{} point(s) failed; see manifest.json", out.failures.len());
            Ok(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v).expect("json serializes") + "\n")?;
    Ok(())
}

fn need<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Config(format!("missing `{what}` section")))
}

fn lambda_set(cfg: &Config) -> Result<PointSet> {
    let spec = need(&cfg.lambda, "lambda")?;
    generate_point_set(&spec.generator, spec.window)
}

fn m_set(cfg: &Config) -> Result<PointSet> {
    let spec = need(&cfg.m, "m")?;
    if let Generator::Explicit { points } = &spec.generator {
        make_frequency_set(points)?;
    }
    generate_point_set(&spec.generator, spec.window)
}

fn window_param(cfg: &Config) -> Result<WindowParam> {
    WindowParam::new(Complex64::new(cfg.w.re, cfg.w.im))
}

fn build_signal(cfg: &Config, m: &FrequencySet) -> Result<SpectralSignal> {
    match need(&cfg.signal, "signal")? {
        SignalConfig::Gaussian {
            center,
            halfwidth,
            tail_tol,
        } => gaussian_spectrum(*center, *halfwidth, *tail_tol),
        SignalConfig::Indicator { lo, hi } => SpectralSignal::indicator(*lo, *hi),
        SignalConfig::Csv { path } => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
            SpectralSignal::from_csv(&body)
        }
        SignalConfig::Random {
            pieces_per_band,
            degree,
        } => random_signal(m, *pieces_per_band, *degree, cfg.seed),
    }
}

/// Uniform random coefficients in `[-1, 1]²` on equal pieces of every band.
pub fn random_signal(m: &FrequencySet, pieces_per_band: usize, degree: usize, seed: u64) -> Result<SpectralSignal> {
    if pieces_per_band == 0 {
        return Err(Error::invalid("random_signal", "pieces_per_band must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pieces = Vec::new();
    for (k, &width) in m.gaps().iter().enumerate() {
        let h = width / pieces_per_band as f64;
        for j in 0..pieces_per_band {
            let lo = m.points()[k] + j as f64 * h;
            let hi = if j + 1 == pieces_per_band { m.points()[k + 1] } else { m.points()[k] + (j + 1) as f64 * h };
            let coeffs = (0..=degree)
                .map(|_| Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
                .collect();
            pieces.push(Piece {
                lo,
                hi,
                poly: Polynomial::new(coeffs)?,
            });
        }
    }
    SpectralSignal::new(pieces)
}

fn cmd_lattice(cfg: &Config, out: &mut Outputs) -> Result<()> {
    if cfg.lambda.is_none() && cfg.m.is_none() {
        return Err(Error::Config("need a `lambda` or `m` section".into()));
    }
    if cfg.lambda.is_some() {
        let l = lambda_set(cfg)?;
        println!("lattice: Λ has {} points on [{}, {}]", l.len(), l.window().lo, l.window().hi);
        out.csv("lambda.csv", points_to_csv(l.points()));
    }
    if cfg.m.is_some() {
        let m = FrequencySet::from_point_set(&m_set(cfg)?)?;
        let rep = finiteness_report(&m);
        println!(
            "lattice: M has {} points, beta {}, max unit count {}",
            m.len(),
            rep.beta,
            rep.max_unit_count
        );
        out.csv("m.csv", points_to_csv(m.points()));
        out.json("finiteness.json", to_json(&rep));
    }
    Ok(())
}

fn cmd_analyze(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let lambda = lambda_set(cfg)?;
    let m = FrequencySet::from_point_set(&m_set(cfg)?)?;
    let w = window_param(cfg)?;
    let f = build_signal(cfg, &m)?;
    let table = analyze(&f, &lambda, &m, w)?;
    let residual = band_identity_residual(&f, &lambda, &m, w)?;
    let neumann = neumann_norm(&m, w, 1)?;
    println!(
        "analyze: {}x{} coefficients, energy {:.6e}, band identity residual {:.3e}",
        table.rows(),
        table.cols(),
        table.energy(),
        residual
    );
    out.csv("coefficients.csv", table.to_csv());
    out.json(
        "analyze.json",
        json!({
            "lambda": lambda.descriptor(),
            "m": cfg.m,
            "w": [w.value().re, w.value().im],
            "signal_norm_sq": f.norm_sq(),
            "energy": table.energy(),
            "max_abs": table.max_abs(),
            "band_identity_residual": residual,
            "neumann_norm": neumann,
        }),
    );
    Ok(())
}

fn cmd_reconstruct(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let lambda = lambda_set(cfg)?;
    let m = FrequencySet::from_point_set(&m_set(cfg)?)?;
    let w = window_param(cfg)?;
    let f = build_signal(cfg, &m)?;
    let table = analyze(&f, &lambda, &m, w)?;
    println!("analyze: {}x{} coefficients", table.rows(), table.cols());
    let r = reconstruct(&table, &lambda, &m, &cfg.reconstruct, Some(&f))?;
    println!(
        "reconstruct: relative L2 error {:.3e} over {} bands",
        r.relative_l2_error.unwrap_or(f64::NAN),
        r.bands.len()
    );
    out.csv("recovered_spectrum.csv", r.recovered.to_csv());
    out.json(
        "reconstruct.json",
        json!({
            "relative_l2_error": r.relative_l2_error,
            "bands": r.bands,
            "top_band_boundary": r.top_band_boundary,
            "window_leakage": r.window_leakage,
            "lambda": lambda.descriptor(),
            "m": cfg.m,
        }),
    );
    Ok(())
}

fn frame_problem(cfg: &Config) -> Result<FrameProblem> {
    let lambda = lambda_set(cfg)?;
    let m = m_set(cfg)?;
    let trial_len = match cfg.frame.trial_window {
        Some(t) => t.len(),
        None => m.points()[m.len() - 1] - m.points()[0],
    };
    let grid = cfg
        .frame
        .grid
        .unwrap_or_else(|| default_frame_grid(lambda.window(), trial_len));
    let mut p = FrameProblem::new(lambda, m, window_param(cfg)?, grid)?.with_taper(cfg.frame.taper);
    p.trial_window = cfg.frame.trial_window;
    Ok(p)
}

fn cmd_bounds(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let p = frame_problem(cfg)?;
    let doubling = !cfg.frame.no_doubling;
    if let Some(s) = &cfg.frame.sweep {
        let axis = SweepAxis::parse(&s.axis)?;
        let points = sweep(&p, axis, &s.values, doubling);
        for pt in &points {
            match (&pt.report, &pt.error) {
                (Some(r), _) => println!("bounds: {} = {}: A {:.6e} B {:.6e}", s.axis, pt.value, r.a_est, r.b_est),
                (_, Some(e)) => {
                    println!("bounds: {} = {}: failed", s.axis, pt.value);
                    out.failures.push(format!("{} = {}: {e}", s.axis, pt.value));
                }
                _ => {}
            }
        }
        out.csv("sweep.csv", sweep_to_csv(&points));
        out.json("sweep.json", json!({ "axis": s.axis, "points": points }));
        return Ok(());
    }
    let r = if doubling {
        frame_bounds_with_doubling(&p)?
    } else {
        frame_bounds(&p)?
    };
    println!("bounds: A {:.6e} B {:.6e} (grid {}, {} atoms)", r.a_est, r.b_est, r.grid, r.lambda_count * r.m_count);
    if let Some(d) = &r.doubling {
        println!("bounds: doubled window A {:.6e} B {:.6e}, A ratio {:.3}", d.a_doubled, d.b_doubled, d.a_ratio);
    }
    out.csv(
        "bounds.csv",
        sweep_to_csv(&[crate::framebounds::SweepPoint {
            value: r.grid as f64,
            report: Some(r.clone()),
            error: None,
        }]),
    );
    out.json(
        "bounds.json",
        json!({ "report": r, "lambda": p.lambda.descriptor(), "m": p.m.descriptor() }),
    );
    Ok(())
}

fn cmd_sampling(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let lambda = lambda_set(cfg)?;
    let beta = match (cfg.sampling.beta, &cfg.m) {
        (Some(b), _) => b,
        (None, Some(_)) => FrequencySet::from_point_set(&m_set(cfg)?)?.beta(),
        (None, None) => return Err(Error::Config("sampling needs `sampling.beta` or an `m` section".into())),
    };
    let grid = cfg
        .sampling
        .grid
        .unwrap_or_else(|| SamplingProblem::default_grid(beta, lambda.window()));
    let mut p = SamplingProblem::new(lambda, beta, grid)?;
    p.epsilon = cfg.sampling.epsilon;
    if let Some(t) = cfg.sampling.leakage_tol {
        p.leakage_tol = t;
    }
    let mut csv = String::from("window_lo,window_hi,points,grid,retained_dim,a_est,b_est\n");
    let row = |c: &crate::paley_wiener::SamplingConstants| {
        format!(
            "{},{},{},{},{},{},{}\n",
            c.window.lo, c.window.hi, c.points, c.grid, c.retained_dim, c.a_est, c.b_est
        )
    };
    if cfg.sampling.no_doubling {
        let c = sampling_constants(&p)?;
        println!("sampling: A {:.6e} B {:.6e} (beta {beta}, grid {grid})", c.a_est, c.b_est);
        csv.push_str(&row(&c));
        out.json("sampling.json", json!({ "constants": c, "lambda": p.lambda.descriptor() }));
    } else {
        let s = sampling_stability(&p)?;
        println!(
            "sampling: A {:.6e} B {:.6e}; doubled A {:.6e} B {:.6e}",
            s.base.a_est, s.base.b_est, s.doubled.a_est, s.doubled.b_est
        );
        csv.push_str(&row(&s.base));
        csv.push_str(&row(&s.doubled));
        out.json("sampling.json", json!({ "stability": s, "lambda": p.lambda.descriptor() }));
    }
    out.csv("sampling.csv", csv);
    Ok(())
}

fn cmd_counterexample(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let w = window_param(cfg)?;
    let curve = match need(&cfg.counterexample, "counterexample")? {
        CounterexampleConfig::Gap {
            gap_widths,
            base_step,
            center,
            side_points,
            halfwidth,
            tail_tol,
        } => {
            let defaults = GapScenario::default();
            let scenario = GapScenario {
                base_step: *base_step,
                center: *center,
                side_points: *side_points,
                halfwidth: *halfwidth,
                tail_tol: *tail_tol,
                lambda: cfg.lambda.clone().unwrap_or(defaults.lambda),
            };
            gap_counterexample(gap_widths, &scenario, w)?
        }
        CounterexampleConfig::Cluster { multiplicities, spread } => {
            cluster_counterexample(multiplicities, *spread, &frame_problem(cfg)?)?
        }
    };
    for (v, r) in curve.values.iter().zip(&curve.responses) {
        println!("counterexample: {} = {v}: response {r:.6e}", curve.parameter);
    }
    out.csv("curve.csv", curve.to_csv());
    out.json("curve.json", to_json(&curve));
    Ok(())
}

fn cmd_theorem(cfg: &Config, out: &mut Outputs) -> Result<()> {
    let scenario = Scenario {
        name: cfg.name.clone(),
        lambda: need(&cfg.lambda, "lambda")?.clone(),
        m: need(&cfg.m, "m")?.clone(),
        w: [cfg.w.re, cfg.w.im],
        sampling_grid_per_unit: cfg.theorem.sampling_grid_per_unit,
        frame_grid: cfg.theorem.frame_grid,
    };
    let r = theorem_check(&scenario)?;
    println!(
        "theorem-check: finiteness beta {} locally finite {}",
        r.finiteness.beta, r.finiteness.is_locally_finite
    );
    for s in &r.sampling {
        println!(
            "theorem-check: sampling width {}: A {:.6e} -> {:.6e} ({:?})",
            s.width, s.stability.base.a_est, s.stability.doubled.a_est, s.trend
        );
    }
    println!(
        "theorem-check: frame A {:.6e} B {:.6e} ({:?}); verdict {:?}",
        r.frame.a_est, r.frame.b_est, r.frame_trend, r.verdict
    );
    out.json("verdict.json", to_json(&r));
    Ok(())
}
