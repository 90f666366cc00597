//! Empirical frame bounds of `𝒢(Λ, M)` on a finite spectral trial space,
//! and parameter sweeps.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cauchy_analysis::{coefficient, WindowParam};
use crate::error::{Error, Result};
use crate::lattice::{Generator, PointSet, Window};
use crate::trial::{cholesky, orthonormalize, singular_values, EdgeTaper, TrialSpace};

/// Above this trial dimension the extreme eigenvalues of the Gram form are
/// found iteratively instead of by a full decomposition.
pub const DENSE_LIMIT: usize = 2000;

const ITERATIVE_TOL: f64 = 1e-8;

/// A(doubled)/A(base) at or above this counts as stable.
pub const STABLE_RATIO: f64 = 0.5;
/// A(doubled)/A(base) at or below this counts as collapsing.
pub const COLLAPSE_RATIO: f64 = 0.2;
/// A doubled-window lower bound below this fraction of the upper bound is
/// numerically zero and counts as collapsed whatever the ratio.
pub const ZERO_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameProblem {
    pub lambda: PointSet,
    pub m: PointSet,
    pub w: WindowParam,
    /// Trial-space dimension.
    pub grid: usize,
    /// Smooth cutoff over the first and last band of the trial interval.
    pub taper: bool,
    /// Trial interval; defaults to `[min M, max M]`.
    pub trial_window: Option<Window>,
}

impl FrameProblem {
    pub fn new(lambda: PointSet, m: PointSet, w: WindowParam, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::invalid("FrameProblem::new", "trial dimension must be at least 2"));
        }
        if lambda.is_empty() || m.is_empty() {
            return Err(Error::invalid("FrameProblem::new", "empty Λ or M window"));
        }
        Ok(FrameProblem {
            lambda,
            m,
            w,
            grid,
            taper: false,
            trial_window: None,
        })
    }

    pub fn with_taper(mut self, taper: bool) -> Self {
        self.taper = taper;
        self
    }

    pub fn with_trial_window(mut self, window: Window) -> Self {
        self.trial_window = Some(window);
        self
    }

    /// Doubled `Λ` window with the trial dimension doubled to match.
    pub fn doubled(&self) -> Result<Self> {
        Ok(FrameProblem {
            lambda: self.lambda.on_window(self.lambda.window().doubled())?,
            grid: 2 * self.grid,
            ..self.clone()
        })
    }

    pub fn trial_space(&self) -> Result<TrialSpace> {
        let mus = self.m.points();
        let (lo, hi) = match self.trial_window {
            Some(win) => (win.lo, win.hi),
            None => (mus[0], mus[mus.len() - 1]),
        };
        if !(lo < hi) {
            return Err(Error::invalid(
                "FrameProblem::trial_space",
                "trial interval is empty; give a trial window for a single-frequency M",
            ));
        }
        let taper = if self.taper {
            let inside: Vec<f64> = mus.iter().copied().filter(|&x| x > lo && x < hi).collect();
            let lower = inside.first().map_or(hi - lo, |&x| x - lo);
            let upper = inside.last().map_or(hi - lo, |&x| hi - x);
            if inside.is_empty() {
                Some(EdgeTaper {
                    lower: 0.5 * (hi - lo),
                    upper: 0.5 * (hi - lo),
                })
            } else {
                Some(EdgeTaper { lower, upper })
            }
        } else {
            None
        };
        TrialSpace::with_breaks(lo, hi, self.grid, mus, taper)
    }
}

/// Analysis matrix: row `(i, n)` at index `i·|M| + n`, column `j` holding
/// the coefficient of the `j`-th orthonormalized trial function.
pub fn assemble_analysis_matrix(p: &FrameProblem) -> Result<DMatrix<Complex64>> {
    let space = p.trial_space()?;
    let raw = raw_matrix(p, &space)?;
    let l = cholesky(&space.gram(), "assemble_analysis_matrix")?;
    Ok(orthonormalize(&raw, &l))
}

fn raw_matrix(p: &FrameProblem, space: &TrialSpace) -> Result<DMatrix<Complex64>> {
    let mus = p.m.points();
    let nm = mus.len();
    let rows: Vec<Vec<Complex64>> = p
        .lambda
        .points()
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, &l)| {
            mus.iter().enumerate().map(move |(n, &mu)| {
                space
                    .basis()
                    .iter()
                    .map(|e| coefficient(e, l, mu, p.w))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Entry {
                        op: "assemble_analysis_matrix",
                        row: i,
                        col: n,
                        source: Box::new(e),
                    })
            })
        })
        .collect::<Result<_>>()?;
    debug_assert_eq!(rows.len(), p.lambda.len() * nm);
    Ok(DMatrix::from_fn(rows.len(), space.dim(), |r, c| rows[r][c]))
}

/// Classification of a bound's ratio under window doubling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Stable,
    Collapsing,
    Indeterminate,
}

impl Trend {
    /// Trend of a lower bound `a_base → a_doubled` relative to the upper bound `b`.
    pub fn assess(a_base: f64, a_doubled: f64, b: f64) -> Trend {
        if a_doubled <= ZERO_FLOOR * b {
            Trend::Collapsing
        } else {
            Trend::classify(a_doubled / a_base)
        }
    }

    pub fn classify(ratio: f64) -> Trend {
        if !ratio.is_finite() {
            Trend::Indeterminate
        } else if ratio >= STABLE_RATIO {
            Trend::Stable
        } else if ratio <= COLLAPSE_RATIO {
            Trend::Collapsing
        } else {
            Trend::Indeterminate
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Doubling {
    pub a_doubled: f64,
    pub b_doubled: f64,
    pub a_ratio: f64,
    pub b_ratio: f64,
    pub a_trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameReport {
    pub a_est: f64,
    pub b_est: f64,
    pub lambda_window: Window,
    pub lambda_count: usize,
    pub m_count: usize,
    pub grid: usize,
    pub taper: bool,
    pub w: [f64; 2],
    pub doubling: Option<Doubling>,
    /// Wall time; kept out of serialized output so reruns compare equal.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

/// Extreme squared singular values of the analysis matrix.
pub fn frame_bounds(p: &FrameProblem) -> Result<FrameReport> {
    let start = Instant::now();
    let d = assemble_analysis_matrix(p)?;
    let (a, b) = extreme_bounds(&d)?;
    Ok(FrameReport {
        a_est: a,
        b_est: b,
        lambda_window: p.lambda.window(),
        lambda_count: p.lambda.len(),
        m_count: p.m.len(),
        grid: p.grid,
        taper: p.taper,
        w: [p.w.value().re, p.w.value().im],
        doubling: None,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// [`frame_bounds`] together with the bounds on the doubled problem.
pub fn frame_bounds_with_doubling(p: &FrameProblem) -> Result<FrameReport> {
    let mut base = frame_bounds(p)?;
    let dbl = frame_bounds(&p.doubled()?)?;
    let a_ratio = dbl.a_est / base.a_est;
    base.doubling = Some(Doubling {
        a_doubled: dbl.a_est,
        b_doubled: dbl.b_est,
        a_ratio,
        b_ratio: dbl.b_est / base.b_est,
        a_trend: Trend::assess(base.a_est, dbl.a_est, dbl.b_est),
    });
    base.elapsed_ms += dbl.elapsed_ms;
    Ok(base)
}

fn extreme_bounds(d: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    let cols = d.ncols();
    if cols <= DENSE_LIMIT {
        let sv = singular_values(d);
        let b = sv.first().copied().unwrap_or(0.0);
        let a = if sv.len() == cols { sv.last().copied().unwrap_or(0.0) } else { 0.0 };
        return Ok((a * a, b * b));
    }
    let gram = d.adjoint() * d;
    let b = power_iteration(&gram, |v| &gram * v);
    let a = match nalgebra::Cholesky::new(gram.clone()) {
        Some(ch) => 1.0 / power_iteration(&gram, |v| ch.solve(v)),
        None => 0.0,
    };
    Ok((a, b))
}

/// Dominant eigenvalue of a Hermitian positive semidefinite operator, by
/// power iteration stopped on the eigen-residual.
fn power_iteration(g: &DMatrix<Complex64>, apply: impl Fn(&DVector<Complex64>) -> DVector<Complex64>) -> f64 {
    let n = g.nrows();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.1, 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    let mut theta = 0.0;
    for _ in 0..20_000 {
        let u = apply(&v);
        theta = v.dotc(&u).re;
        let residual = (&u - &v * Complex64::new(theta, 0.0)).norm();
        let len = u.norm();
        if len == 0.0 {
            return 0.0;
        }
        if residual <= ITERATIVE_TOL * theta.abs() {
            break;
        }
        v = u / Complex64::new(len, 0.0);
    }
    theta
}

/// A numeric parameter a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    LambdaStep,
    MStep,
    GapWidth,
    ClusterMultiplicity,
    ClusterSpread,
    WRe,
    WIm,
    Grid,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Result<SweepAxis> {
        serde_json::from_value(serde_json::Value::String(name.replace(['.', '-'], "_")))
            .map_err(|_| Error::Config(format!("unknown sweep axis `{name}`")))
    }

    /// The base problem with this parameter set to `value`.
    pub fn apply(self, base: &FrameProblem, value: f64) -> Result<FrameProblem> {
        let mut p = base.clone();
        match self {
            SweepAxis::LambdaStep => p.lambda = with_step(&p.lambda, value)?,
            SweepAxis::MStep => p.m = with_step(&p.m, value)?,
            SweepAxis::GapWidth => {
                p.m = edit_generator(&p.m, |g| match g {
                    Generator::Gapped { gap_width, .. } => {
                        *gap_width = value;
                        true
                    }
                    _ => false,
                })?
            }
            SweepAxis::ClusterMultiplicity => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::invalid("sweep", format!("multiplicity must be a positive integer, got {value}")));
                }
                p.lambda = edit_generator(&p.lambda, |g| match g {
                    Generator::Clustered { multiplicity, .. } => {
                        *multiplicity = value as usize;
                        true
                    }
                    _ => false,
                })?
            }
            SweepAxis::ClusterSpread => {
                p.lambda = edit_generator(&p.lambda, |g| match g {
                    Generator::Clustered { spread, .. } => {
                        *spread = value;
                        true
                    }
                    _ => false,
                })?
            }
            SweepAxis::WRe => p.w = WindowParam::new(Complex64::new(value, p.w.value().im))?,
            SweepAxis::WIm => p.w = WindowParam::new(Complex64::new(p.w.value().re, value))?,
            SweepAxis::Grid => {
                if value < 2.0 || value.fract() != 0.0 {
                    return Err(Error::invalid("sweep", format!("grid must be an integer ≥ 2, got {value}")));
                }
                p.grid = value as usize;
            }
        }
        Ok(p)
    }
}

fn edit_generator(set: &PointSet, edit: impl FnOnce(&mut Generator) -> bool) -> Result<PointSet> {
    let mut spec = set.descriptor().clone();
    if !edit(&mut spec.generator) {
        return Err(Error::invalid("sweep", "axis does not apply to this generator"));
    }
    crate::lattice::generate_point_set(&spec.generator, spec.window)
}

fn with_step(set: &PointSet, value: f64) -> Result<PointSet> {
    edit_generator(set, |g| match g {
        Generator::Arithmetic { step }
        | Generator::Jittered { step, .. }
        | Generator::Gapped { step, .. }
        | Generator::Clustered { step, .. } => {
            *step = value;
            true
        }
        Generator::Periodic { period, .. } => {
            *period = value;
            true
        }
        Generator::Explicit { .. } => false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub report: Option<FrameReport>,
    pub error: Option<String>,
}

/// One report per value, in input order; failures are recorded per point.
pub fn sweep(base: &FrameProblem, axis: SweepAxis, values: &[f64], with_doubling: bool) -> Vec<SweepPoint> {
    values
        .par_iter()
        .map(|&v| {
            let run = axis.apply(base, v).and_then(|p| {
                if with_doubling {
                    frame_bounds_with_doubling(&p)
                } else {
                    frame_bounds(&p)
                }
            });
            match run {
                Ok(r) => SweepPoint {
                    value: v,
                    report: Some(r),
                    error: None,
                },
                Err(e) => SweepPoint {
                    value: v,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Fixed column order:
/// `value,a_est,b_est,lambda_lo,lambda_hi,lambda_count,m_count,grid,a_doubled,b_doubled,a_ratio,a_trend,error`.
pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("value,a_est,b_est,lambda_lo,lambda_hi,lambda_count,m_count,grid,a_doubled,b_doubled,a_ratio,a_trend,error\n");
    for p in points {
        match &p.report {
            Some(r) => {
                let (ad, bd, ar, tr) = match &r.doubling {
                    Some(d) => (
                        d.a_doubled.to_string(),
                        d.b_doubled.to_string(),
                        d.a_ratio.to_string(),
                        format!("{:?}", d.a_trend).to_lowercase(),
                    ),
                    None => Default::default(),
                };
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{ad},{bd},{ar},{tr},\n",
                    p.value, r.a_est, r.b_est, r.lambda_window.lo, r.lambda_window.hi, r.lambda_count, r.m_count, r.grid
                ));
            }
            None => {
                let msg = p.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
                s.push_str(&format!("{},,,,,,,,,,,,{msg}\n", p.value));
            }
        }
    }
    s
}
