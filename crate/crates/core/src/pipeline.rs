//! Recovery of `f` from its coefficients, counterexample curves, and the
//! combined scenario check.
//!
//! Reconstruction runs `c → d → ω → band samples → band spectra → f̂`:
//! twist the phases, invert the bidiagonal system, strip the band phase to
//! get samples `h_k(λ + iw)`, fit each `ĥ_k` by least squares, and translate
//! the bands back into place.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy_analysis::{analyze_points, phase_twist, CoefficientTable, WindowParam};
use crate::error::{Error, Result};
use crate::framebounds::{frame_bounds, frame_bounds_with_doubling, FrameProblem, FrameReport, Trend};
use crate::lattice::{
    finiteness_report, generate_point_set, FinitenessReport, FrequencySet, Generator, GeneratorSpec, PointSet, Window,
};
use crate::paley_wiener::{ls_reconstruct, sampling_stability, SamplingProblem, SamplingStability};
use crate::spectrum::{gaussian_spectrum, SpectralSignal};
use crate::triangular_system::{build_system, recover_omega};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructOptions {
    /// Trial dimension per unit band width; `None` picks it from the Λ window.
    pub grid_per_unit: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandDiagnostics {
    pub band: usize,
    pub mu: f64,
    pub width: f64,
    pub grid: usize,
    pub residual_rms: f64,
    pub sample_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub recovered: SpectralSignal,
    pub relative_l2_error: Option<f64>,
    pub bands: Vec<BandDiagnostics>,
    /// `max_λ |d_{λ,top}| / max |d|`: content at or above the last frequency.
    pub top_band_boundary: f64,
    /// Largest band sample at the two outermost `λ`, relative to the largest sample.
    pub window_leakage: f64,
}

/// Band samples `h_k(λ + iw)` recovered from a coefficient table, indexed
/// `[band][λ]`.
pub fn band_samples(c: &CoefficientTable, m: &FrequencySet) -> Result<Vec<Vec<Complex64>>> {
    let system = build_system(m, c.w)?;
    let omega = recover_omega(&phase_twist(c), &system)?;
    let mus = m.points();
    Ok((0..m.band_count())
        .map(|k| {
            c.lambdas
                .iter()
                .enumerate()
                .map(|(i, &l)| omega.get(i, k) / TWO_PI_I * Complex64::from_polar(1.0, -2.0 * PI * mus[k] * l))
                .collect()
        })
        .collect())
}

pub fn reconstruct(
    c: &CoefficientTable,
    lambda: &PointSet,
    m: &FrequencySet,
    opts: &ReconstructOptions,
    truth: Option<&SpectralSignal>,
) -> Result<ReconstructionResult> {
    const OP: &str = "reconstruct";
    if c.lambdas != lambda.points() || c.mus != m.points() {
        return Err(Error::invalid(OP, "coefficient table was computed over different windows"));
    }
    let samples = band_samples(c, m)?;
    let d = phase_twist(c);
    let top = m.len() - 1;
    let d_max = d.max_abs();
    let top_band_boundary = if d_max > 0.0 {
        (0..d.rows()).map(|i| d.get(i, top).norm()).fold(0.0, f64::max) / d_max
    } else {
        0.0
    };
    let n = lambda.len();
    let sample_max = samples.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let window_leakage = if sample_max > 0.0 {
        samples
            .iter()
            .map(|s| s[0].norm().max(s[n - 1].norm()))
            .fold(0.0, f64::max)
            / sample_max
    } else {
        0.0
    };

    let window = lambda.window();
    let mus = m.points();
    let fitted: Vec<(SpectralSignal, BandDiagnostics)> = m
        .gaps()
        .par_iter()
        .enumerate()
        .map(|(k, &width)| {
            let grid = match opts.grid_per_unit {
                Some(g) => ((g * width).round() as usize).max(2),
                None => SamplingProblem::default_grid(width, window),
            };
            let mut problem = SamplingProblem::new(lambda.clone(), width, grid)?.with_shift(c.w);
            problem.epsilon = opts.epsilon;
            let pairs: Vec<(f64, Complex64)> = lambda.points().iter().copied().zip(samples[k].iter().copied()).collect();
            let sample_rms = (pairs.iter().map(|p| p.1.norm_sqr()).sum::<f64>() / n as f64).sqrt();
            let fit = if sample_rms == 0.0 {
                None
            } else {
                Some(ls_reconstruct(&pairs, &problem)?)
            };
            let diag = BandDiagnostics {
                band: k,
                mu: mus[k],
                width,
                grid,
                residual_rms: fit.as_ref().map_or(0.0, |f| f.residual_rms),
                sample_rms,
            };
            let spectrum = fit.map_or_else(SpectralSignal::zero, |f| f.spectrum.translate(mus[k]));
            Ok((spectrum, diag))
        })
        .enumerate()
        .map(|(k, r): (usize, Result<_>)| r.map_err(|e| Error::Band { band: k, source: Box::new(e) }))
        .collect::<Result<_>>()?;
    let (parts, bands): (Vec<_>, Vec<_>) = fitted.into_iter().unzip();
    let recovered = SpectralSignal::concat(parts)?;
    let relative_l2_error = truth.map(|t| relative_l2_error(&recovered, t));
    Ok(ReconstructionResult {
        recovered,
        relative_l2_error,
        bands,
        top_band_boundary,
        window_leakage,
    })
}

/// `‖a - b‖ / ‖b‖`, or `‖a‖` when `b = 0`.
pub fn relative_l2_error(a: &SpectralSignal, b: &SpectralSignal) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let diff = SpectralSignal::combine(one, a, -one, b).norm_sq().sqrt();
    let scale = b.norm_sq().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleCurve {
    pub parameter: String,
    pub values: Vec<f64>,
    pub responses: Vec<f64>,
    pub descriptor: serde_json::Value,
}

impl CounterexampleCurve {
    /// Rows `value,response`.
    pub fn to_csv(&self) -> String {
        let mut s = format!("{},response\n", self.parameter);
        for (v, r) in self.values.iter().zip(&self.responses) {
            s.push_str(&format!("{v},{r}\n"));
        }
        s
    }
}

/// Settings shared by the gap experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapScenario {
    pub base_step: f64,
    pub center: f64,
    /// Lattice points kept on each side of the gap.
    pub side_points: usize,
    pub halfwidth: f64,
    pub tail_tol: f64,
    pub lambda: GeneratorSpec,
}

impl Default for GapScenario {
    fn default() -> Self {
        GapScenario {
            base_step: 1.0,
            center: 0.0,
            side_points: 8,
            halfwidth: 1.0,
            tail_tol: 1e-6,
            lambda: GeneratorSpec {
                generator: Generator::Arithmetic { step: 0.5 },
                window: Window { lo: -40.0, hi: 40.0 },
            },
        }
    }
}

/// `M` as two half-lattices of step `base_step` whose facing points are
/// `gap` apart around `center`; `gap = base_step` gives a plain lattice.
pub fn gapped_frequencies(center: f64, gap: f64, base_step: f64, side_points: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..side_points)
        .rev()
        .map(|k| center - gap / 2.0 - k as f64 * base_step)
        .collect();
    pts.extend((0..side_points).map(|k| center + gap / 2.0 + k as f64 * base_step));
    pts
}

/// Frame-sum ratio `Σ|c|²/‖f‖²` of a Gaussian spectrum centred in a gap of `M`.
pub fn gap_counterexample(gap_widths: &[f64], scenario: &GapScenario, w: WindowParam) -> Result<CounterexampleCurve> {
    const OP: &str = "gap_counterexample";
    check_increasing(OP, gap_widths)?;
    if gap_widths.iter().any(|&g| g < scenario.base_step) {
        return Err(Error::invalid(OP, "gap widths must be at least the base step"));
    }
    let lambda = generate_point_set(&scenario.lambda.generator, scenario.lambda.window)?;
    let f = gaussian_spectrum(scenario.center, scenario.halfwidth, scenario.tail_tol)?;
    let norm = f.norm_sq();
    let responses = gap_widths
        .par_iter()
        .map(|&g| {
            let mus = gapped_frequencies(scenario.center, g, scenario.base_step, scenario.side_points);
            let table = analyze_points(&f, lambda.points(), &mus, w)?;
            Ok(table.energy() / norm)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CounterexampleCurve {
        parameter: "gap_width".into(),
        values: gap_widths.to_vec(),
        responses,
        descriptor: serde_json::json!({
            "scenario": scenario,
            "w": [w.value().re, w.value().im],
        }),
    })
}

/// Upper frame bound as one `Λ` point is replaced by a cluster of `m` points.
pub fn cluster_counterexample(multiplicities: &[usize], spread: f64, base: &FrameProblem) -> Result<CounterexampleCurve> {
    const OP: &str = "cluster_counterexample";
    let values: Vec<f64> = multiplicities.iter().map(|&m| m as f64).collect();
    check_increasing(OP, &values)?;
    if multiplicities.first().is_some_and(|&m| m == 0) {
        return Err(Error::invalid(OP, "multiplicities must be at least 1"));
    }
    let spec = base.lambda.descriptor();
    let step = match &spec.generator {
        Generator::Arithmetic { step } | Generator::Clustered { step, .. } => *step,
        _ => return Err(Error::invalid(OP, "base Λ must come from an arithmetic or clustered generator")),
    };
    let center = 0.5 * (spec.window.lo + spec.window.hi);
    let responses = multiplicities
        .iter()
        .map(|&m| {
            let generator = Generator::Clustered {
                step,
                cluster_center: center,
                multiplicity: m,
                spread,
            };
            let mut p = base.clone();
            p.lambda = generate_point_set(&generator, spec.window)?;
            Ok(frame_bounds(&p)?.b_est)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CounterexampleCurve {
        parameter: "multiplicity".into(),
        values,
        responses,
        descriptor: serde_json::json!({
            "base_lambda": spec,
            "m": base.m.descriptor(),
            "spread": spread,
            "grid": base.grid,
            "w": [base.w.value().re, base.w.value().im],
        }),
    })
}

fn check_increasing(op: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(op, "no parameter values"));
    }
    if values.windows(2).any(|v| !(v[1] > v[0])) {
        return Err(Error::invalid(op, "parameter values must be strictly increasing"));
    }
    Ok(())
}

/// A `(Λ, M, w)` configuration with its numerical resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub lambda: GeneratorSpec,
    pub m: GeneratorSpec,
    pub w: [f64; 2],
    /// Sampling trial dimension per unit band width; `None` picks it from the Λ window.
    #[serde(default)]
    pub sampling_grid_per_unit: Option<f64>,
    /// Frame trial dimension; `None` picks it from the windows.
    #[serde(default)]
    pub frame_grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSampling {
    pub width: f64,
    pub bands: usize,
    pub stability: SamplingStability,
    pub trend: Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Sampling side and frame side both stable.
    ConcordantPositive,
    /// Both sides collapse.
    ConcordantNegative,
    Discordant,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub scenario: Scenario,
    pub finiteness: FinitenessReport,
    pub sampling: Vec<BandSampling>,
    /// Smallest over largest `A_est` across band widths.
    pub sampling_spread: f64,
    pub sampling_trend: Trend,
    pub frame: FrameReport,
    pub frame_trend: Trend,
    pub verdict: Verdict,
}

/// Default frame trial dimension: a quarter of the Λ window length per unit
/// of trial interval.
pub fn default_frame_grid(lambda_window: Window, trial_len: f64) -> usize {
    ((0.25 * lambda_window.len() * trial_len).round() as usize).max(8)
}

/// Finiteness of `M`, per-band sampling constants for `Λ`, and frame bounds
/// of `𝒢(Λ, M)`, each with window-doubling trends, juxtaposed in a verdict.
pub fn theorem_check(scenario: &Scenario) -> Result<TheoremReport> {
    let lambda = generate_point_set(&scenario.lambda.generator, scenario.lambda.window)?;
    let mset = generate_point_set(&scenario.m.generator, scenario.m.window)?;
    let m = FrequencySet::from_point_set(&mset)?;
    let w = WindowParam::new(Complex64::new(scenario.w[0], scenario.w[1]))?;
    let finiteness = finiteness_report(&m);

    let mut widths: Vec<(f64, usize)> = Vec::new();
    for &g in m.gaps() {
        match widths.iter_mut().find(|(x, _)| (x - g).abs() <= 1e-9 * g.max(1.0)) {
            Some(e) => e.1 += 1,
            None => widths.push((g, 1)),
        }
    }
    widths.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sampling = widths
        .par_iter()
        .map(|&(width, bands)| {
            let grid = match scenario.sampling_grid_per_unit {
                Some(g) => ((g * width).round() as usize).max(2),
                None => SamplingProblem::default_grid(width, lambda.window()),
            };
            let stability = sampling_stability(&SamplingProblem::new(lambda.clone(), width, grid)?)?;
            let trend = Trend::assess(stability.base.a_est, stability.doubled.a_est, stability.doubled.b_est);
            Ok(BandSampling {
                width,
                bands,
                stability,
                trend,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let a_values: Vec<f64> = sampling.iter().map(|s| s.stability.base.a_est).collect();
    let a_max = a_values.iter().copied().fold(0.0, f64::max);
    let a_min = a_values.iter().copied().fold(f64::INFINITY, f64::min);
    let sampling_spread = if a_max > 0.0 { a_min / a_max } else { 0.0 };
    let sampling_trend = combine_trends(sampling.iter().map(|s| s.trend));

    let grid = scenario
        .frame_grid
        .unwrap_or_else(|| default_frame_grid(lambda.window(), m.max() - m.min()));
    let frame = frame_bounds_with_doubling(&FrameProblem::new(lambda, mset, w, grid)?)?;
    let frame_trend = frame.doubling.as_ref().map_or(Trend::Indeterminate, |d| d.a_trend);
    let sampling_side = if finiteness.is_locally_finite {
        sampling_trend
    } else {
        Trend::Collapsing
    };
    let verdict = match (sampling_side, frame_trend) {
        (Trend::Stable, Trend::Stable) => Verdict::ConcordantPositive,
        (Trend::Collapsing, Trend::Collapsing) => Verdict::ConcordantNegative,
        (Trend::Indeterminate, _) | (_, Trend::Indeterminate) => Verdict::Indeterminate,
        _ => Verdict::Discordant,
    };
    Ok(TheoremReport {
        scenario: scenario.clone(),
        finiteness,
        sampling,
        sampling_spread,
        sampling_trend,
        frame,
        frame_trend,
        verdict,
    })
}

/// Worst trend wins: any collapse collapses the whole.
fn combine_trends(trends: impl Iterator<Item = Trend>) -> Trend {
    let mut out = Trend::Stable;
    for t in trends {
        match t {
            Trend::Collapsing => return Trend::Collapsing,
            Trend::Indeterminate => out = Trend::Indeterminate,
            Trend::Stable => {}
        }
    }
    out
}
