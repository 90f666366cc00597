//! Sampling in `PW_[0,β]`: spectral weights for shifted samples,
//! least-squares recovery from samples, and empirical sampling constants.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cauchy_analysis::WindowParam;
use crate::error::{Error, Result};
use crate::expquad::{Polynomial, MAX_DEGREE};
use crate::lattice::{PointSet, Window};
use crate::spectrum::{Piece, SpectralSignal};
use crate::trial::{cholesky, orthonormalize, singular_values, TrialSpace};

/// Trial functions keeping less than this fraction of their energy inside
/// the `Λ` window are excluded from the sampling constants.
pub const DEFAULT_LEAKAGE_TOL: f64 = 0.01;

/// Default regularisation relative to the largest squared singular value.
pub const DEFAULT_RELATIVE_EPSILON: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightDirection {
    /// Multiply by `e^{-2πξw}`.
    Apply,
    /// Multiply by `e^{+2πξw}`.
    Remove,
}

/// Multiplies a spectrum by `e^{∓2πξw}`, re-approximating each piece by
/// degree-capped polynomials on adaptively bisected subintervals.
///
/// With `ĝ = ĥ e^{-2πξw}` one has `g(λ) = h(λ + iw)`, which turns samples on
/// the shifted line into ordinary real samples.
pub fn shift_weight(spec: &SpectralSignal, w: WindowParam, direction: WeightDirection) -> Result<SpectralSignal> {
    const OP: &str = "shift_weight";
    let sign = match direction {
        WeightDirection::Apply => -1.0,
        WeightDirection::Remove => 1.0,
    };
    let s = sign * 2.0 * PI * w.value();
    let mut pieces = Vec::new();
    for p in spec.pieces() {
        let top = (s.re * p.lo).max(s.re * p.hi);
        if top > crate::expquad::EXP_GUARD {
            return Err(Error::Overflow { op: OP, exponent: top });
        }
        let f = |xi: f64| p.value(xi) * (s * xi).exp();
        fit_adaptive(&f, p.lo, p.hi, 0, &mut pieces)?;
    }
    SpectralSignal::new(pieces)
}

const FIT_TOL: f64 = 1e-12;
const FIT_DEPTH: usize = 30;

fn fit_adaptive(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, depth: usize, out: &mut Vec<Piece>) -> Result<()> {
    let poly = interpolate(f, a, b)?;
    let h = b - a;
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..17 {
        let t = (k as f64 + 0.5) / 17.0;
        let v = f(a + t * h);
        scale = scale.max(v.norm());
        err = err.max((poly.eval_real(t * h) - v).norm());
    }
    if err <= FIT_TOL * scale.max(f64::MIN_POSITIVE) || scale == 0.0 || depth >= FIT_DEPTH {
        out.push(Piece { lo: a, hi: b, poly });
        return Ok(());
    }
    let m = 0.5 * (a + b);
    fit_adaptive(f, a, m, depth + 1, out)?;
    fit_adaptive(f, m, b, depth + 1, out)
}

/// Degree-8 interpolant at Chebyshev points, in the local variable `u = ξ - a`.
fn interpolate(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Result<Polynomial> {
    let n = MAX_DEGREE + 1;
    let h = b - a;
    let ts: Vec<f64> = (0..n)
        .map(|k| 0.5 - 0.5 * ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    let v = DMatrix::from_fn(n, n, |r, c| Complex64::new(ts[r].powi(c as i32), 0.0));
    let rhs = DVector::from_iterator(n, ts.iter().map(|&t| f(a + t * h)));
    let c = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::solver("paley_wiener", "interpolate", "singular Vandermonde system"))?;
    Polynomial::new(c.iter().enumerate().map(|(k, x)| x / h.powi(k as i32)).collect())
}

/// A sampling configuration for `PW_[0,β]` on a window of `Λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingProblem {
    pub lambda: PointSet,
    pub beta: f64,
    /// Trial-space dimension (hat functions on a uniform grid of `[0, β]`).
    pub grid: usize,
    /// Regularisation; `None` selects `1e-10 σ_max²`.
    pub epsilon: Option<f64>,
    /// When set, samples are values `h(λ + iw)` and the trial space describes `ĥ`.
    pub shift: Option<WindowParam>,
    pub leakage_tol: f64,
}

impl SamplingProblem {
    pub fn new(lambda: PointSet, beta: f64, grid: usize) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("SamplingProblem::new", format!("beta must be positive, got {beta}")));
        }
        if grid < 2 {
            return Err(Error::invalid("SamplingProblem::new", "grid dimension must be at least 2"));
        }
        Ok(SamplingProblem {
            lambda,
            beta,
            grid,
            epsilon: None,
            shift: None,
            leakage_tol: DEFAULT_LEAKAGE_TOL,
        })
    }

    /// Trial dimension whose time reach `G/(2β)` covers 80% of the half-window.
    pub fn default_grid(beta: f64, window: Window) -> usize {
        ((0.8 * beta * window.len()).round() as usize).max(8)
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn with_shift(mut self, w: WindowParam) -> Self {
        self.shift = Some(w);
        self
    }

    /// Doubled `Λ` window with the trial dimension doubled to match.
    pub fn doubled(&self) -> Result<Self> {
        let lambda = self.lambda.on_window(self.lambda.window().doubled())?;
        Ok(SamplingProblem {
            lambda,
            grid: 2 * self.grid,
            ..self.clone()
        })
    }

    pub fn trial_space(&self) -> Result<TrialSpace> {
        TrialSpace::uniform(0.0, self.beta, self.grid)
    }

    fn eval_point(&self, lambda: f64) -> Complex64 {
        match self.shift {
            Some(w) => Complex64::new(lambda, 0.0) + Complex64::new(0.0, 1.0) * w.value(),
            None => Complex64::new(lambda, 0.0),
        }
    }
}

/// Rows `g_j(λ)` (or `h_j(λ + iw)`) for every sample position.
fn design_matrix(problem: &SamplingProblem, space: &TrialSpace, positions: &[f64]) -> Result<DMatrix<Complex64>> {
    let rows: Vec<Vec<Complex64>> = positions
        .par_iter()
        .map(|&l| {
            let z = problem.eval_point(l);
            space.basis().iter().map(|e| e.evaluate_time(z)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(positions.len(), space.dim(), |r, c| rows[r][c]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    pub spectrum: SpectralSignal,
    pub coefficients: Vec<Complex64>,
    pub residual_rms: f64,
    pub epsilon: f64,
}

/// Regularised least squares over the trial space:
/// minimises `Σ |g(λ) - y_λ|² + ε ‖ĝ‖²`.
pub fn ls_reconstruct(samples: &[(f64, Complex64)], problem: &SamplingProblem) -> Result<Reconstruction> {
    const OP: &str = "ls_reconstruct";
    if samples.len() < problem.grid {
        return Err(Error::invalid(
            OP,
            format!("{} samples for a {}-dimensional trial space", samples.len(), problem.grid),
        ));
    }
    let space = problem.trial_space()?;
    let positions: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let d = design_matrix(problem, &space, &positions)?;
    let l = cholesky(&space.gram(), OP)?;
    let dorth = orthonormalize(&d, &l);
    let svd = SVD::new(dorth.clone(), true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = problem.epsilon.unwrap_or(DEFAULT_RELATIVE_EPSILON * smax * smax);
    if eps < 0.0 {
        return Err(Error::invalid(OP, "epsilon must be nonnegative"));
    }
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if eps == 0.0 && smin <= 1e-13 * smax {
        return Err(Error::solver(
            "paley_wiener",
            OP,
            format!("design matrix is rank deficient (σ_min/σ_max = {:.2e}); use epsilon > 0", smin / smax.max(f64::MIN_POSITIVE)),
        ));
    }
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let uty = u.adjoint() * &y;
    let scaled = DVector::from_iterator(
        uty.len(),
        uty.iter()
            .zip(svd.singular_values.iter())
            .map(|(c, &s)| if s > 0.0 { c * (s / (s * s + eps)) } else { Complex64::new(0.0, 0.0) }),
    );
    let z = vt.adjoint() * scaled;
    // x = L^{-H} z
    let x = l
        .adjoint()
        .solve_upper_triangular(&z)
        .ok_or_else(|| Error::solver("paley_wiener", OP, "singular Cholesky factor"))?;
    let fit = &dorth * &z;
    let residual_rms = ((&fit - &y).norm_squared() / samples.len() as f64).sqrt();
    let coefficients: Vec<Complex64> = x.iter().copied().collect();
    Ok(Reconstruction {
        spectrum: space.combine(&coefficients)?,
        coefficients,
        residual_rms,
        epsilon: eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingConstants {
    pub a_est: f64,
    pub b_est: f64,
    pub beta: f64,
    pub grid: usize,
    pub window: Window,
    pub points: usize,
    /// Trial directions kept after the leakage taper.
    pub retained_dim: usize,
    pub leakage_tol: f64,
}

/// Extreme values of `Σ_λ |g(λ)|² / ‖ĝ‖²` over trial functions concentrated
/// in the `Λ` window.
///
/// The taper is a hard one: the time-concentration operator
/// `∫_window |g|²` is diagonalised on the orthonormal trial basis and only
/// eigendirections keeping at least `1 - leakage_tol` of their energy inside
/// the window enter the quadratic form.
pub fn sampling_constants(problem: &SamplingProblem) -> Result<SamplingConstants> {
    const OP: &str = "sampling_constants";
    let space = problem.trial_space()?;
    let l = cholesky(&space.gram(), OP)?;
    let d = design_matrix(problem, &space, problem.lambda.points())?;
    let dorth = orthonormalize(&d, &l);

    let window = problem.lambda.window();
    let conc = concentration_matrix(problem, &space, &l, window)?;
    let eig = SymmetricEigen::new(conc);
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] >= 1.0 - problem.leakage_tol)
        .collect();
    if keep.is_empty() {
        return Err(Error::solver(
            "paley_wiener",
            OP,
            "no trial function is concentrated in the window; widen the window or lower the grid",
        ));
    }
    let basis = DMatrix::from_fn(space.dim(), keep.len(), |r, c| eig.eigenvectors[(r, keep[c])]);
    let restricted = &dorth * basis;
    let sv = singular_values(&restricted);
    let b = sv.first().copied().unwrap_or(0.0);
    let a = if sv.len() == keep.len() { sv.last().copied().unwrap_or(0.0) } else { 0.0 };
    Ok(SamplingConstants {
        a_est: a * a,
        b_est: b * b,
        beta: problem.beta,
        grid: problem.grid,
        window,
        points: problem.lambda.len(),
        retained_dim: keep.len(),
        leakage_tol: problem.leakage_tol,
    })
}

/// `∫_window g_i conj(g_j) dt` in the orthonormal trial basis, by
/// Gauss-Legendre quadrature on panels short against the band.
fn concentration_matrix(
    problem: &SamplingProblem,
    space: &TrialSpace,
    l: &DMatrix<Complex64>,
    window: Window,
) -> Result<DMatrix<Complex64>> {
    const GL: [(f64, f64); 8] = [
        (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
        (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
        (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
        (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
        (0.183_434_642_495_649_8, 0.362_683_783_378_362),
        (0.525_532_409_916_329, 0.313_706_645_877_887_3),
        (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
        (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    ];
    let panel = 0.5 / problem.beta;
    let panels = (window.len() / panel).ceil().max(1.0) as usize;
    let h = window.len() / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let mid = window.lo + (p as f64 + 0.5) * h;
            GL.iter().map(move |&(x, wt)| (mid + 0.5 * h * x, 0.5 * h * wt))
        })
        .collect();
    let rows: Vec<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(t, wt)| {
            let z = problem.eval_point(t);
            space
                .basis()
                .iter()
                .map(|e| e.evaluate_time(z).map(|v| v * wt.sqrt()))
                .collect()
        })
        .collect::<Result<_>>()?;
    let e = DMatrix::from_fn(nodes.len(), space.dim(), |r, c| rows[r][c]);
    let eorth = orthonormalize(&e, l);
    Ok(eorth.adjoint() * eorth)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingStability {
    pub base: SamplingConstants,
    pub doubled: SamplingConstants,
    /// `A(doubled) / A(base)`.
    pub a_ratio: f64,
    /// `B(doubled) / B(base)`.
    pub b_ratio: f64,
}

/// Sampling constants on the window and on the doubled window.
pub fn sampling_stability(problem: &SamplingProblem) -> Result<SamplingStability> {
    let base = sampling_constants(problem)?;
    let doubled = sampling_constants(&problem.doubled()?)?;
    Ok(SamplingStability {
        a_ratio: doubled.a_est / base.a_est.max(f64::MIN_POSITIVE),
        b_ratio: doubled.b_est / base.b_est.max(f64::MIN_POSITIVE),
        base,
        doubled,
    })
}
