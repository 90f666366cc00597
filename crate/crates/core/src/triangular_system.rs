//! Gap phases, the bidiagonal matrix `B`, and its Neumann inverse `A`.
//!
//! With `γ_n = 2πw(μ_{n+1} - μ_n)`, `B` has `b_{p,p+1} = e^{-γ_p}` and
//! `A = I + B + B² + … = (I - B)^{-1}` has `a_{n,k} = e^{-2πw(μ_k - μ_n)}`
//! for `k ≥ n`. Phase-twisted coefficients satisfy `d_{λ,·} = 2πi A ω_{λ,·}`
//! row by row; inversion always applies `I - B` directly.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cauchy_analysis::{CoefficientTable, WindowParam};
use crate::error::{Error, Result};
use crate::lattice::FrequencySet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSequence {
    pub gammas: Vec<Complex64>,
    pub w: WindowParam,
}

impl GammaSequence {
    pub fn new(m: &FrequencySet, w: WindowParam) -> Self {
        let gammas = m
            .gaps()
            .iter()
            .map(|&g| 2.0 * PI * w.value() * g)
            .collect();
        GammaSequence { gammas, w }
    }

    /// `e^{-γ_p}` for every gap.
    pub fn attenuations(&self) -> Vec<Complex64> {
        self.gammas.iter().map(|g| (-g).exp()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangularSystem {
    pub mus: Vec<f64>,
    pub gamma: GammaSequence,
    pub b: DMatrix<Complex64>,
    pub a: DMatrix<Complex64>,
}

pub fn build_system(m: &FrequencySet, w: WindowParam) -> Result<TriangularSystem> {
    let n = m.len();
    if n < 2 {
        return Err(Error::invalid("build_system", "need at least two frequencies"));
    }
    let span = 2.0 * PI * w.value().norm() * (m.max() - m.min());
    if !span.is_finite() {
        return Err(Error::Overflow {
            op: "build_system",
            exponent: span,
        });
    }
    let gamma = GammaSequence::new(m, w);
    let att = gamma.attenuations();
    let mus = m.points().to_vec();
    let mut b = DMatrix::zeros(n, n);
    for p in 0..n - 1 {
        b[(p, p + 1)] = att[p];
    }
    let a = DMatrix::from_fn(n, n, |r, k| {
        if k >= r {
            (-2.0 * PI * w.value() * (mus[k] - mus[r])).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(TriangularSystem { mus, gamma, b, a })
}

impl TriangularSystem {
    pub fn size(&self) -> usize {
        self.mus.len()
    }

    /// `B^N` by repeated multiplication.
    pub fn b_power(&self, power: usize) -> DMatrix<Complex64> {
        let n = self.size();
        let mut out = DMatrix::identity(n, n);
        for _ in 0..power {
            out = &out * &self.b;
        }
        out
    }

    /// `I + B + … + B^J`.
    pub fn neumann_partial_sum(&self, terms: usize) -> DMatrix<Complex64> {
        let n = self.size();
        let mut sum = DMatrix::identity(n, n);
        let mut pow = DMatrix::identity(n, n);
        for _ in 0..terms {
            pow = &pow * &self.b;
            sum += &pow;
        }
        sum
    }

    /// `d = A ω`, row by row.
    pub fn apply_a(&self, omega: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        let att = self.gamma.attenuations();
        // Backward recursion d_n = ω_n + e^{-γ_n} d_{n+1} follows from (I - B) d = ω.
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        d[n - 1] = omega[n - 1];
        for k in (0..n - 1).rev() {
            d[k] = omega[k] + att[k] * d[k + 1];
        }
        d
    }

    /// `ω = (I - B) d`, the top band keeping `ω = d`.
    pub fn apply_inverse(&self, d: &[Complex64]) -> Vec<Complex64> {
        let n = self.size();
        let att = self.gamma.attenuations();
        (0..n)
            .map(|k| if k + 1 < n { d[k] - att[k] * d[k + 1] } else { d[k] })
            .collect()
    }

    /// Sparse CSV `row,col,re,im` of a matrix, zeros omitted.
    pub fn matrix_csv(m: &DMatrix<Complex64>) -> String {
        let mut s = String::from("row,col,re,im\n");
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != Complex64::new(0.0, 0.0) {
                    s.push_str(&format!("{r},{c},{},{}\n", v.re, v.im));
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeumannNorm {
    /// `‖B^N‖ = max_p e^{-2π Re w (μ_{p+N} - μ_p)}`.
    pub norm: f64,
    /// `min_p (μ_{p+N} - μ_p)`.
    pub min_window: f64,
    /// `norm ≤ e^{-Re w}`, checked only when `min_window ≥ 1`.
    pub unit_window_bound_ok: Option<bool>,
}

pub fn neumann_norm(m: &FrequencySet, w: WindowParam, power: usize) -> Result<NeumannNorm> {
    if power == 0 || power >= m.len() {
        return Err(Error::invalid(
            "neumann_norm",
            format!("N = {power} must lie in [1, {})", m.len()),
        ));
    }
    let pts = m.points();
    let min_window = (0..pts.len() - power)
        .map(|p| pts[p + power] - pts[p])
        .fold(f64::INFINITY, f64::min);
    let norm = (-2.0 * PI * w.value().re * min_window).exp();
    let unit_window_bound_ok = (min_window >= 1.0).then(|| norm <= (-w.value().re).exp());
    Ok(NeumannNorm {
        norm,
        min_window,
        unit_window_bound_ok,
    })
}

/// Maximum entry modulus; for a matrix supported on one superdiagonal this is
/// its operator norm.
pub fn max_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `ω_{λ,n} = d_{λ,n} - e^{-γ_n} d_{λ,n+1}` for every row.
pub fn recover_omega(d: &CoefficientTable, system: &TriangularSystem) -> Result<CoefficientTable> {
    if d.mus != system.mus {
        return Err(Error::invalid(
            "recover_omega",
            "coefficient table and triangular system use different frequency windows",
        ));
    }
    let rows: Vec<Vec<Complex64>> = (0..d.rows())
        .into_par_iter()
        .map(|i| system.apply_inverse(d.row(i)))
        .collect();
    CoefficientTable::from_values(d.lambdas.clone(), d.mus.clone(), d.w, rows.into_iter().flatten().collect())
}
