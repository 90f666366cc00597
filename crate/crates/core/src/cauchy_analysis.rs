//! Frame coefficients of the Cauchy-kernel Gabor system.
//!
//! For `Re w > 0` the kernel `1/(t - a)`, `a = λ + iw`, has the half-line
//! spectral representation `1/(t - a) = 2πi ∫_0^∞ e^{2πiη(a - t)} dη`, so
//!
//! ```text
//! c_{λ,n} = ∫ f(t) e^{-2πiμ_n t} / (t - λ - iw) dt
//!         = 2πi ∫_{μ_n}^∞ f̂(ξ) e^{2πi(ξ - μ_n)(λ + iw)} dξ.
//! ```
//!
//! The factor `2πi` is carried explicitly everywhere. The coefficient is the
//! bilinear pairing `∫ f φ`; the frame inequality uses `⟨f, φ⟩ = ∫ f φ̄`,
//! and since conjugation is an isometry of `L²` both give the same frame sums.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expquad::exp_poly_integral_local;
use crate::lattice::{FrequencySet, GeneratorSpec, PointSet};
use crate::spectrum::{band_decompose, SpectralSignal};

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Pole offset `w` of the window `1/(t - iw)`, with `Re w > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowParam {
    w: Complex64,
}

impl WindowParam {
    pub fn new(w: Complex64) -> Result<Self> {
        if !(w.re > 0.0 && w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::invalid(
                "WindowParam::new",
                format!("Re w must be positive, got w = {w}; see WindowParam::reflect for Re w < 0"),
            ));
        }
        Ok(WindowParam { w })
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(Complex64::new(re, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.w
    }

    /// Reduces a system with `Re w < 0` to one with `Re w > 0`.
    ///
    /// Under `t → -t` the atom `e^{-2πiμt}/(t - λ - iw)` becomes minus the
    /// atom with parameters `(-λ, -μ, -w)`, so both systems share frame
    /// bounds. Returns the reflected window together with the negated,
    /// re-sorted point lists.
    pub fn reflect(w: Complex64, lambdas: &[f64], mus: &[f64]) -> Result<(WindowParam, Vec<f64>, Vec<f64>)> {
        let neg = |v: &[f64]| -> Vec<f64> { v.iter().rev().map(|x| -x).collect() };
        Ok((WindowParam::new(-w)?, neg(lambdas), neg(mus)))
    }
}

/// `c_{λ,μ}` for one atom.
pub fn coefficient(f: &SpectralSignal, lambda: f64, mu: f64, w: WindowParam) -> Result<Complex64> {
    let s = TWO_PI_I * Complex64::new(lambda, 0.0) - 2.0 * PI * w.value();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in f.pieces() {
        if p.hi <= mu {
            continue;
        }
        let a = p.lo.max(mu);
        let q = if a > p.lo { p.poly.shift(a - p.lo) } else { p.poly.clone() };
        acc += exp_poly_integral_local(&q, s, a - mu, p.hi - a)?;
    }
    Ok(TWO_PI_I * acc)
}

/// Coefficients indexed by (λ index, band index `n`), stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub w: WindowParam,
    values: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn from_values(lambdas: Vec<f64>, mus: Vec<f64>, w: WindowParam, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lambdas.len() * mus.len() {
            return Err(Error::invalid(
                "CoefficientTable::from_values",
                format!("{} values for a {}x{} table", values.len(), lambdas.len(), mus.len()),
            ));
        }
        Ok(CoefficientTable {
            lambdas,
            mus,
            w,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.lambdas.len()
    }

    pub fn cols(&self) -> usize {
        self.mus.len()
    }

    pub fn get(&self, i: usize, n: usize) -> Complex64 {
        self.values[i * self.mus.len() + n]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let c = self.mus.len();
        &self.values[i * c..(i + 1) * c]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `Σ |c|²`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Same shape with each entry replaced by `f(i, n, value)`.
    pub fn map(&self, f: impl Fn(usize, usize, Complex64) -> Complex64 + Sync) -> CoefficientTable {
        let cols = self.mus.len();
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(k, &v)| f(k / cols, k % cols, v))
            .collect();
        CoefficientTable {
            lambdas: self.lambdas.clone(),
            mus: self.mus.clone(),
            w: self.w,
            values,
        }
    }

    /// Rows `lambda,mu,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,mu,re,im\n");
        for (i, l) in self.lambdas.iter().enumerate() {
            for (n, m) in self.mus.iter().enumerate() {
                let v = self.get(i, n);
                s.push_str(&format!("{l},{m},{},{}\n", v.re, v.im));
            }
        }
        s
    }

    /// JSON blob embedding the generator of `Λ` and the points of `M`.
    pub fn to_json(&self, lambda_descriptor: Option<&GeneratorSpec>) -> serde_json::Value {
        serde_json::json!({
            "w": [self.w.value().re, self.w.value().im],
            "lambda_descriptor": lambda_descriptor,
            "lambdas": self.lambdas,
            "mus": self.mus,
            "values": self.values.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
        })
    }
}

/// Coefficients for every pair in `Λ × M`, rows assembled in parallel.
pub fn analyze(f: &SpectralSignal, lambda: &PointSet, m: &FrequencySet, w: WindowParam) -> Result<CoefficientTable> {
    analyze_points(f, lambda.points(), m.points(), w)
}

pub fn analyze_points(f: &SpectralSignal, lambdas: &[f64], mus: &[f64], w: WindowParam) -> Result<CoefficientTable> {
    let rows: Vec<Vec<Complex64>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &l)| {
            mus.iter()
                .enumerate()
                .map(|(n, &mu)| {
                    coefficient(f, l, mu, w).map_err(|e| Error::Entry {
                        op: "analyze",
                        row: i,
                        col: n,
                        source: Box::new(e),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    CoefficientTable::from_values(lambdas.to_vec(), mus.to_vec(), w, rows.into_iter().flatten().collect())
}

/// `d_{λ,n} = c_{λ,n} e^{2πiμ_nλ}`.
pub fn phase_twist(c: &CoefficientTable) -> CoefficientTable {
    twist(c, 1.0)
}

/// Inverse of [`phase_twist`].
pub fn phase_untwist(d: &CoefficientTable) -> CoefficientTable {
    twist(d, -1.0)
}

fn twist(c: &CoefficientTable, sign: f64) -> CoefficientTable {
    let lambdas = c.lambdas.clone();
    let mus = c.mus.clone();
    c.map(|i, n, v| v * Complex64::from_polar(1.0, sign * 2.0 * PI * mus[n] * lambdas[i]))
}

/// Largest relative deviation between the half-line coefficients and the
/// band-sum representation
/// `c_{λ,n} = 2πi e^{-2πiμ_nλ} Σ_{k≥n} h_k(λ+iw) e^{2πiμ_kλ} e^{2πw(μ_n-μ_k)}`,
/// where `h_k` is evaluated from the demodulated band spectra.
pub fn band_identity_residual(f: &SpectralSignal, lambda: &PointSet, m: &FrequencySet, w: WindowParam) -> Result<f64> {
    let bands = band_decompose(f, m)?;
    let table = analyze(f, lambda, m, w)?;
    let scale = table.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mus = m.points();
    let wv = w.value();
    let mut worst = 0.0f64;
    for (i, &l) in lambda.points().iter().enumerate() {
        let z = Complex64::new(l, 0.0) + Complex64::new(0.0, 1.0) * wv;
        let hk: Vec<Complex64> = bands
            .bands
            .iter()
            .map(|b| b.evaluate_time(z))
            .collect::<Result<_>>()?;
        for (n, &mu_n) in mus.iter().enumerate() {
            let mut sum = Complex64::new(0.0, 0.0);
            for (k, h) in hk.iter().enumerate().skip(n) {
                let mu_k = mus[k];
                sum += h
                    * Complex64::from_polar(1.0, 2.0 * PI * mu_k * l)
                    * (2.0 * PI * wv * (mu_n - mu_k)).exp();
            }
            let band_side = TWO_PI_I * Complex64::from_polar(1.0, -2.0 * PI * mu_n * l) * sum;
            worst = worst.max((table.get(i, n) - band_side).norm());
        }
    }
    Ok(worst / scale)
}
