//! Closed-form integrals of polynomial times exponential on finite intervals.
//!
//! Every coefficient and time-domain evaluation in this crate reduces to
//! `∫ p(ξ) e^{sξ} dξ` over a finite interval with `p` of small degree. The
//! normalised moments `K_m(z) = ∫_0^1 u^m e^{zu} du` are evaluated by one of
//! three routes, chosen per degree so that no route suffers cancellation:
//!
//! * `|z| ≤ 1/2`: the power series in `z`;
//! * `1/2 < |z| ≤ (m+2)/2`: Kummer's transformation
//!   `K_m(z) = e^z/(m+1) · Σ_j (-z)^j / (m+2)_j`;
//! * otherwise: integration by parts, `K_m = (e^z - m K_{m-1}) / z`.
//!
//! Intervals with `Re z > 0` are reflected first so the exponential factor
//! inside the moments never exceeds one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum polynomial degree carried by [`Polynomial`].
pub const MAX_DEGREE: usize = 8;

/// Largest exponent accepted before the overflow guard trips.
pub const EXP_GUARD: f64 = 700.0;

/// Switchover from the power series to the other routes.
pub const SERIES_THRESHOLD: f64 = 0.5;

const SERIES_TERM_TOL: f64 = 1e-18;

/// Dense polynomial with complex coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for Polynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Complex64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    /// Builds a polynomial, trimming trailing zeros and enforcing the degree cap.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidAt {
                op: "Polynomial::new",
                index: i,
                reason: "non-finite coefficient".into(),
            });
        }
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(Error::invalid(
                "Polynomial::new",
                format!("degree {} exceeds the cap {MAX_DEGREE}", coeffs.len() - 1),
            ));
        }
        Ok(Polynomial { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c]).expect("constant polynomial")
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn eval_real(&self, t: f64) -> Complex64 {
        self.eval(Complex64::new(t, 0.0))
    }

    /// Returns `q(t) = p(t + d)`.
    pub fn shift(&self, d: f64) -> Polynomial {
        let mut c = self.coeffs.clone();
        let n = c.len();
        // Repeated synthetic division by (t - (-d)) in reverse.
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let next = c[j + 1];
                c[j] += next * d;
            }
        }
        Polynomial { coeffs: c }.trimmed()
    }

    /// Returns `q(t) = p(-t)`.
    pub fn reflect(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
            .collect();
        Polynomial { coeffs }
    }

    pub fn conj(&self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|&c| c * a).collect(),
        }
        .trimmed()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_default()
                    + other.coeffs.get(k).copied().unwrap_or_default()
            })
            .collect();
        Polynomial { coeffs }.trimmed()
    }

    /// Product, failing if the degree cap would be exceeded.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero());
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
        self
    }
}

/// `∫_a^b p(ξ) e^{sξ} dξ` with `p` written in the absolute variable `ξ`.
pub fn exp_poly_integral(p: &Polynomial, s: Complex64, a: f64, b: f64) -> Result<Complex64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::invalid(
            "exp_poly_integral",
            format!("interval [{a}, {b}] must be finite with a <= b"),
        ));
    }
    exp_poly_integral_local(&p.shift(a), s, a, b - a)
}

/// `∫_0^len q(u) e^{s(offset + u)} du`, i.e. the integral over
/// `[offset, offset + len]` of a polynomial written in the local variable
/// `u = ξ - offset`.
pub fn exp_poly_integral_local(
    q: &Polynomial,
    s: Complex64,
    offset: f64,
    len: f64,
) -> Result<Complex64> {
    if q.is_zero() || len == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lo = s.re * offset;
    let hi = s.re * (offset + len);
    let top = lo.max(hi);
    if !top.is_finite() || top > EXP_GUARD {
        return Err(Error::Overflow {
            op: "exp_poly_integral",
            exponent: top,
        });
    }
    let z = s * len;
    if z.re > 0.0 {
        // ∫_0^L q(u) e^{su} du = e^{sL} ∫_0^L q(L - v) e^{-sv} dv
        let r = q.shift(len).reflect();
        let base = (s * (offset + len)).exp();
        return Ok(base * local_moment_sum(&r, -z, len));
    }
    let base = (s * offset).exp();
    Ok(base * local_moment_sum(q, z, len))
}

/// `Σ_m q_m L^{m+1} K_m(z)` for `Re z ≤ 0`.
fn local_moment_sum(q: &Polynomial, z: Complex64, len: f64) -> Complex64 {
    let k = moments(z, q.degree());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lpow = len;
    for (m, &c) in q.coeffs().iter().enumerate() {
        acc += c * k[m] * lpow;
        lpow *= len;
    }
    acc
}

/// `K_m(z) = ∫_0^1 u^m e^{zu} du` for `m = 0..=max_m`.
pub fn moments(z: Complex64, max_m: usize) -> Vec<Complex64> {
    let r = z.norm();
    let mut out = Vec::with_capacity(max_m + 1);
    let ez = if r > SERIES_THRESHOLD { z.exp() } else { Complex64::new(0.0, 0.0) };
    for m in 0..=max_m {
        let v = if r <= SERIES_THRESHOLD {
            moment_series(z, m)
        } else if r <= (m as f64 + 2.0) / 2.0 {
            moment_kummer(z, ez, m)
        } else if m == 0 {
            (ez - 1.0) / z
        } else {
            (ez - out[m - 1] * m as f64) / z
        };
        out.push(v);
    }
    out
}

fn moment_series(z: Complex64, m: usize) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0); // z^j / j!
    let mut sum = Complex64::new(0.0, 0.0);
    let mut j = 0usize;
    loop {
        sum += term / (m + j + 1) as f64;
        j += 1;
        term = term * z / j as f64;
        if term.norm() < SERIES_TERM_TOL || j > 200 {
            break;
        }
    }
    sum
}

fn moment_kummer(z: Complex64, ez: Complex64, m: usize) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut j = 0usize;
    loop {
        term = term * (-z) / (m + 2 + j) as f64;
        sum += term;
        j += 1;
        if term.norm() < 1e-17 * sum.norm() || j > 400 {
            break;
        }
    }
    ez * sum / (m + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_with_zero_exponent() {
        let p = Polynomial::constant(c(1.0, 0.0));
        let v = exp_poly_integral(&p, c(0.0, 0.0), 0.0, 1.0).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn linear_times_exp_matches_antiderivative() {
        // ∫_0^1 ξ e^ξ dξ = [ξe^ξ - e^ξ]_0^1 = 1
        let p = Polynomial::from_real(&[0.0, 1.0]).unwrap();
        let v = exp_poly_integral(&p, c(1.0, 0.0), 0.0, 1.0).unwrap();
        assert!((v - 1.0).norm() < 1e-15, "{v}");
    }

    #[test]
    fn tiny_exponent_is_continuous() {
        let p = Polynomial::constant(c(1.0, 0.0));
        let v = exp_poly_integral(&p, c(1e-12, 0.0), 0.0, 1.0).unwrap();
        assert!((v - 1.0).norm() < 1e-10);
    }

    #[test]
    fn moment_routes_agree_near_switchovers() {
        for &r in &[0.49, 0.51, 0.99, 1.01, 1.49, 1.51, 4.49, 4.51, 5.01] {
            for &arg in &[0.0, 0.7, 1.6, 2.5, 3.1] {
                let z = Complex64::from_polar(r, arg);
                let k = moments(z, MAX_DEGREE);
                for (m, km) in k.iter().enumerate() {
                    let reference = moment_reference(z, m);
                    assert!(
                        (km - reference).norm() <= 1e-13 * reference.norm().max(1e-300),
                        "z={z} m={m} got {km} want {reference}"
                    );
                }
            }
        }
    }

    // Composite Gauss-Legendre on [0,1] with many panels; the integrand is
    // smooth and |z| is small here.
    fn moment_reference(z: Complex64, m: usize) -> Complex64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let panels = 400;
        let h = 1.0 / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..panels {
            let mid = (i as f64 + 0.5) * h;
            for &(x, w) in &nodes {
                let u = mid + 0.5 * h * x;
                acc += (z * u).exp() * u.powi(m as i32) * (0.5 * h * w);
            }
        }
        acc
    }

    #[test]
    fn overflow_guard_reports_magnitude() {
        let p = Polynomial::constant(c(1.0, 0.0));
        match exp_poly_integral(&p, c(10.0, 0.0), 0.0, 100.0) {
            Err(Error::Overflow { exponent, .. }) => assert!((exponent - 1000.0).abs() < 1e-9),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn reversed_interval_rejected() {
        let p = Polynomial::constant(c(1.0, 0.0));
        assert!(exp_poly_integral(&p, c(0.0, 0.0), 1.0, 0.0).is_err());
    }

    #[test]
    fn degree_cap_enforced() {
        assert!(Polynomial::from_real(&[1.0; 10]).is_err());
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Polynomial::from_real(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        let q = p.shift(0.75);
        for &t in &[-1.0, 0.0, 0.3, 2.0] {
            assert!((q.eval_real(t) - p.eval_real(t + 0.75)).norm() < 1e-12);
        }
    }
}
