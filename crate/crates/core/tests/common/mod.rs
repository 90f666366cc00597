#![allow(dead_code)]

use std::f64::consts::PI;

use cauchy_gabor::lattice::{generate_point_set, Generator, PointSet, Window};
use cauchy_gabor::spectrum::SpectralSignal;
use num_complex::Complex64;

pub fn lattice(step: f64, lo: f64, hi: f64) -> PointSet {
    generate_point_set(&Generator::Arithmetic { step }, Window::new(lo, hi).unwrap()).unwrap()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` on `panels` panels.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut acc = c(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            acc += f(mid + 0.5 * h * x) * (0.5 * h * w);
        }
    }
    acc
}

/// `2πi ∫_μ^∞ f̂(ξ) e^{2πi(ξ-μ)(λ+iw)} dξ` by quadrature on every piece.
pub fn coefficient_by_quadrature(f: &SpectralSignal, lambda: f64, mu: f64, w: Complex64) -> Complex64 {
    let rule = gauss_legendre(16);
    let z = c(lambda, 0.0) + c(0.0, 1.0) * w;
    let mut acc = c(0.0, 0.0);
    for p in f.pieces() {
        let a = p.lo.max(mu);
        if p.hi <= a {
            continue;
        }
        let panels = (((p.hi - a) * (1.0 + lambda.abs() + w.norm())) * 4.0).ceil().max(1.0) as usize;
        acc += integrate(
            |xi| p.value(xi) * (c(0.0, 2.0 * PI) * (xi - mu) * z).exp(),
            a,
            p.hi,
            panels,
            &rule,
        );
    }
    c(0.0, 2.0 * PI) * acc
}
