//! Signals represented by compactly supported piecewise-polynomial spectra.
//!
//! A signal is `f(z) = ∫ f̂(ξ) e^{2πiξz} dξ`. Each piece stores its
//! polynomial in the local variable `u = ξ - lo`, which keeps high-degree
//! pieces far from the origin well conditioned and makes band translation
//! a pure relabelling of interval endpoints.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expquad::{exp_poly_integral_local, Polynomial, MAX_DEGREE};
use crate::lattice::FrequencySet;

/// One polynomial piece on `[lo, hi]`, with the polynomial in `u = ξ - lo`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Polynomial,
}

impl Piece {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    /// `f̂(ξ)` for `ξ` in the piece.
    pub fn value(&self, xi: f64) -> Complex64 {
        self.poly.eval_real(xi - self.lo)
    }

    /// `∫ |p|²` over the piece.
    pub fn norm_sq(&self) -> f64 {
        let c = self.poly.coeffs();
        let len = self.len();
        let mut acc = 0.0;
        for (i, a) in c.iter().enumerate() {
            for (j, b) in c.iter().enumerate() {
                let k = (i + j + 1) as i32;
                acc += (a * b.conj()).re * len.powi(k) / k as f64;
            }
        }
        acc.max(0.0)
    }

    /// The sub-piece on `[a, b] ⊆ [lo, hi]`.
    pub fn restrict(&self, a: f64, b: f64) -> Piece {
        Piece {
            lo: a,
            hi: b,
            poly: self.poly.shift(a - self.lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct SpectralSignal {
    pieces: Vec<Piece>,
}

impl SpectralSignal {
    /// Validates sorted, pairwise disjoint pieces of positive length.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        const OP: &str = "SpectralSignal::new";
        for (i, p) in pieces.iter().enumerate() {
            if !(p.lo.is_finite() && p.hi.is_finite()) || p.hi <= p.lo {
                return Err(Error::InvalidAt {
                    op: OP,
                    index: i,
                    reason: format!("piece [{}, {}] must have positive finite length", p.lo, p.hi),
                });
            }
            if i > 0 && pieces[i - 1].hi > p.lo {
                return Err(Error::InvalidAt {
                    op: OP,
                    index: i,
                    reason: "pieces overlap or are unsorted".into(),
                });
            }
        }
        Ok(SpectralSignal { pieces })
    }

    pub fn zero() -> Self {
        SpectralSignal { pieces: Vec::new() }
    }

    /// `f̂ = p(ξ)` on `[lo, hi]` with `p` in the absolute variable.
    pub fn single(lo: f64, hi: f64, p_absolute: &Polynomial) -> Result<Self> {
        Self::new(vec![Piece {
            lo,
            hi,
            poly: p_absolute.shift(lo),
        }])
    }

    /// The indicator of `[lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::single(lo, hi, &Polynomial::constant(Complex64::new(1.0, 0.0)))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.poly.is_zero())
    }

    /// Hull of the pieces, `None` for an empty signal.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    pub fn value(&self, xi: f64) -> Complex64 {
        self.pieces
            .iter()
            .find(|p| xi >= p.lo && xi < p.hi)
            .map(|p| p.value(xi))
            .unwrap_or_default()
    }

    /// `‖f‖² = ‖f̂‖²`, integrated exactly.
    pub fn norm_sq(&self) -> f64 {
        self.pieces.iter().map(Piece::norm_sq).sum()
    }

    /// `f(z) = Σ_pieces ∫ p e^{2πiξz} dξ`.
    pub fn evaluate_time(&self, z: Complex64) -> Result<Complex64> {
        let s = Complex64::new(0.0, 2.0 * PI) * z;
        self.pieces.iter().try_fold(Complex64::new(0.0, 0.0), |acc, p| {
            Ok(acc + exp_poly_integral_local(&p.poly, s, p.lo, p.len())?)
        })
    }

    pub fn translate(&self, d: f64) -> SpectralSignal {
        SpectralSignal {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo + d,
                    hi: p.hi + d,
                    poly: p.poly.clone(),
                })
                .collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> SpectralSignal {
        SpectralSignal {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    hi: p.hi,
                    poly: p.poly.scale(a),
                })
                .collect(),
        }
    }

    /// Pieces clipped to `[a, b]`.
    pub fn restrict(&self, a: f64, b: f64) -> SpectralSignal {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let lo = p.lo.max(a);
                let hi = p.hi.min(b);
                (hi > lo).then(|| p.restrict(lo, hi))
            })
            .collect();
        SpectralSignal { pieces }
    }

    /// `α f + β g` on the common refinement of both piece structures.
    pub fn combine(alpha: Complex64, f: &SpectralSignal, beta: Complex64, g: &SpectralSignal) -> SpectralSignal {
        let mut cuts: Vec<f64> = f
            .pieces
            .iter()
            .chain(g.pieces.iter())
            .flat_map(|p| [p.lo, p.hi])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let covering = |s: &SpectralSignal, a: f64, b: f64| -> Option<Polynomial> {
            s.pieces
                .iter()
                .find(|p| p.lo <= a && p.hi >= b)
                .map(|p| p.poly.shift(a - p.lo))
        };
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let pf = covering(f, a, b).map(|p| p.scale(alpha));
            let pg = covering(g, a, b).map(|p| p.scale(beta));
            let poly = match (pf, pg) {
                (Some(x), Some(y)) => x.add(&y),
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => continue,
            };
            pieces.push(Piece { lo: a, hi: b, poly });
        }
        SpectralSignal { pieces }
    }

    /// Concatenates signals with disjoint, increasing supports.
    pub fn concat(parts: impl IntoIterator<Item = SpectralSignal>) -> Result<SpectralSignal> {
        let pieces = parts.into_iter().flat_map(|s| s.pieces).collect();
        SpectralSignal::new(pieces)
    }

    /// CSV with fixed columns `lo,hi,c0_re,c0_im,…,c8_re,c8_im`; coefficients
    /// are in the local variable `ξ - lo`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi");
        for k in 0..=MAX_DEGREE {
            s.push_str(&format!(",c{k}_re,c{k}_im"));
        }
        s.push('\n');
        for p in &self.pieces {
            s.push_str(&format!("{},{}", p.lo, p.hi));
            for k in 0..=MAX_DEGREE {
                let c = p.poly.coeffs().get(k).copied().unwrap_or_default();
                s.push_str(&format!(",{},{}", c.re, c.im));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<SpectralSignal> {
        const OP: &str = "SpectralSignal::from_csv";
        let mut pieces = Vec::new();
        for (row, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let vals = vals.map_err(|e| Error::InvalidAt {
                op: OP,
                index: row,
                reason: e.to_string(),
            })?;
            if vals.len() < 2 || vals.len() % 2 != 0 {
                return Err(Error::InvalidAt {
                    op: OP,
                    index: row,
                    reason: format!("expected lo, hi and re/im pairs, got {} fields", vals.len()),
                });
            }
            let coeffs = vals[2..]
                .chunks(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect();
            pieces.push(Piece {
                lo: vals[0],
                hi: vals[1],
                poly: Polynomial::new(coeffs)?,
            });
        }
        SpectralSignal::new(pieces)
    }
}

/// Demodulated band spectra `ĥ_k`, each supported in `[0, β_k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandSet {
    pub origins: Vec<f64>,
    pub widths: Vec<f64>,
    pub bands: Vec<SpectralSignal>,
}

impl BandSet {
    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    /// `f̂ = Σ_k ĥ_k(· - μ_k)`.
    pub fn reassemble(&self) -> Result<SpectralSignal> {
        SpectralSignal::concat(
            self.bands
                .iter()
                .zip(&self.origins)
                .map(|(b, &mu)| b.translate(mu)),
        )
    }
}

/// Splits `f̂` along `M` into half-open bands `[μ_k, μ_{k+1})` translated to the origin.
pub fn band_decompose(f: &SpectralSignal, m: &FrequencySet) -> Result<BandSet> {
    let (lo, hi) = (m.min(), m.max());
    let total = f.norm_sq();
    let inside = f.restrict(lo, hi).norm_sq();
    let escaped = (total - inside).max(0.0);
    if escaped > 1e-14 * total.max(f64::MIN_POSITIVE) {
        return Err(Error::Coverage {
            lo,
            hi,
            escaped_mass: escaped,
        });
    }
    let pts = m.points();
    let mut bands = Vec::with_capacity(m.band_count());
    for k in 0..m.band_count() {
        let (a, b) = (pts[k], pts[k + 1]);
        let pieces = f
            .pieces
            .iter()
            .filter_map(|p| {
                let l = p.lo.max(a);
                let h = p.hi.min(b);
                (h > l).then(|| {
                    let r = p.restrict(l, h);
                    Piece {
                        lo: r.lo - a,
                        hi: r.hi - a,
                        poly: r.poly,
                    }
                })
            })
            .collect();
        bands.push(SpectralSignal { pieces });
    }
    Ok(BandSet {
        origins: pts[..pts.len() - 1].to_vec(),
        widths: m.gaps().to_vec(),
        bands,
    })
}

/// Piecewise-cubic Hermite approximation of `e^{-π((ξ-center)/halfwidth)²}`,
/// truncated where the relative L² tail falls below `tail_tol`.
pub fn gaussian_spectrum(center: f64, halfwidth: f64, tail_tol: f64) -> Result<SpectralSignal> {
    const OP: &str = "gaussian_spectrum";
    if !(tail_tol > 0.0 && tail_tol <= 1e-3) {
        return Err(Error::invalid(OP, format!("tail_tol {tail_tol} outside (0, 1e-3]")));
    }
    if !(halfwidth > 0.0 && halfwidth.is_finite() && center.is_finite()) {
        return Err(Error::invalid(OP, "halfwidth must be positive and center finite"));
    }
    // |f̂|² = e^{-2π y²}, y = x/halfwidth; the tail beyond r has relative mass erfc(√(2π) r).
    let target = tail_tol * tail_tol / 4.0;
    let (mut a, mut b) = (0.0f64, 10.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if statrs::function::erf::erfc((2.0 * PI).sqrt() * mid) > target {
            a = mid;
        } else {
            b = mid;
        }
    }
    let radius = b * halfwidth;
    // Hermite cubic error ≤ h⁴ max|f''''| / 384, with max|f''''| = 12π²/halfwidth⁴.
    let norm = (halfwidth / 2f64.sqrt()).sqrt();
    let delta = 0.25 * tail_tol * norm / (2.0 * radius).sqrt();
    let h_max = (384.0 * delta * halfwidth.powi(4) / (12.0 * PI * PI)).powf(0.25);
    let per_side = (radius / h_max.min(halfwidth / 4.0)).ceil() as i64;
    let h = radius / per_side as f64;

    let value = |x: f64| (-PI * (x / halfwidth).powi(2)).exp();
    let deriv = |x: f64| -2.0 * PI * x / (halfwidth * halfwidth) * value(x);
    let mut pieces = Vec::with_capacity(2 * per_side as usize);
    for i in -per_side..per_side {
        let x0 = i as f64 * h;
        let x1 = (i + 1) as f64 * h;
        let (f0, f1, d0, d1) = (value(x0), value(x1), deriv(x0), deriv(x1));
        let slope = (f1 - f0) / h;
        let c2 = (3.0 * slope - 2.0 * d0 - d1) / h;
        let c3 = (d0 + d1 - 2.0 * slope) / (h * h);
        pieces.push(Piece {
            lo: center + x0,
            hi: center + x1,
            poly: Polynomial::from_real(&[f0, d0, c2, c3])?,
        });
    }
    SpectralSignal::new(pieces)
}
