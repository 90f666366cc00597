//! Finite-dimensional spectral trial spaces and the dense linear algebra
//! shared by sampling-constant and frame-bound estimation.
//!
//! A trial space is continuous piecewise-linear on uniform grids of one or
//! more segments; segment boundaries are allowed jumps (the band edges
//! `μ_n`, where the half-line spectra of the atoms start).

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expquad::Polynomial;
use crate::spectrum::{Piece, SpectralSignal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Segment {
    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes - 1) as f64
    }
}

/// Smooth ramp applied near the ends of the trial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeTaper {
    /// Width of the rising ramp at the lower end.
    pub lower: f64,
    /// Width of the falling ramp at the upper end.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSpace {
    pub segments: Vec<Segment>,
    pub taper: Option<EdgeTaper>,
    #[serde(skip)]
    basis: Vec<SpectralSignal>,
}

impl TrialSpace {
    /// `nodes` hat functions on a uniform grid of `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, nodes: usize) -> Result<Self> {
        Self::with_breaks(lo, hi, nodes, &[], None)
    }

    /// Dimension `dim` split over the segments cut at `breaks`, roughly in
    /// proportion to segment length, each segment getting at least two nodes.
    pub fn with_breaks(lo: f64, hi: f64, dim: usize, breaks: &[f64], taper: Option<EdgeTaper>) -> Result<Self> {
        const OP: &str = "TrialSpace::with_breaks";
        if !(lo < hi) {
            return Err(Error::invalid(OP, format!("empty trial interval [{lo}, {hi}]")));
        }
        let mut cuts = vec![lo];
        cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let nseg = cuts.len() - 1;
        if dim < 2 * nseg {
            return Err(Error::invalid(
                OP,
                format!("dimension {dim} too small for {nseg} segments (need 2 per segment)"),
            ));
        }
        let total = hi - lo;
        // Largest-remainder apportionment of the dimension.
        let spare = dim - 2 * nseg;
        let shares: Vec<f64> = cuts.windows(2).map(|w| spare as f64 * (w[1] - w[0]) / total).collect();
        let mut nodes: Vec<usize> = shares.iter().map(|s| 2 + s.floor() as usize).collect();
        let mut left = dim - nodes.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..nseg).collect();
        order.sort_by(|&a, &b| {
            let ra = shares[a] - shares[a].floor();
            let rb = shares[b] - shares[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            nodes[i] += 1;
            left -= 1;
        }
        let segments = cuts
            .windows(2)
            .zip(nodes)
            .map(|(w, n)| Segment {
                lo: w[0],
                hi: w[1],
                nodes: n,
            })
            .collect();
        let mut space = TrialSpace {
            segments,
            taper,
            basis: Vec::new(),
        };
        space.basis = space.build_basis()?;
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lo(&self) -> f64 {
        self.segments[0].lo
    }

    pub fn hi(&self) -> f64 {
        self.segments[self.segments.len() - 1].hi
    }

    pub fn basis(&self) -> &[SpectralSignal] {
        &self.basis
    }

    /// Refinement with every cell halved; contains this space when untapered.
    pub fn refined(&self) -> Result<Self> {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.nodes = 2 * s.nodes - 1;
        }
        out.basis = out.build_basis()?;
        Ok(out)
    }

    fn taper_value(&self, xi: f64) -> (f64, f64) {
        // smoothstep s(x) = 3x² - 2x³ and its derivative in ξ
        let Some(t) = self.taper else { return (1.0, 0.0) };
        let (lo, hi) = (self.lo(), self.hi());
        let mut v = 1.0;
        let mut d = 0.0;
        if t.lower > 0.0 && xi < lo + t.lower {
            let x = ((xi - lo) / t.lower).clamp(0.0, 1.0);
            v *= 3.0 * x * x - 2.0 * x * x * x;
            d = (6.0 * x - 6.0 * x * x) / t.lower;
        }
        if t.upper > 0.0 && xi > hi - t.upper {
            let x = ((hi - xi) / t.upper).clamp(0.0, 1.0);
            let s = 3.0 * x * x - 2.0 * x * x * x;
            d = d * s - v * (6.0 * x - 6.0 * x * x) / t.upper;
            v *= s;
        }
        (v, d)
    }

    /// Local cubic for the taper on `[a, b]` (exact: the ramps are cubics and
    /// cells never straddle a ramp boundary).
    fn taper_poly(&self, a: f64, b: f64) -> Result<Polynomial> {
        let h = b - a;
        let (f0, d0) = self.taper_value(a);
        let (f1, d1) = self.taper_value(b);
        let slope = (f1 - f0) / h;
        Polynomial::from_real(&[f0, d0, (3.0 * slope - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * slope) / (h * h)])
    }

    fn build_basis(&self) -> Result<Vec<SpectralSignal>> {
        if let Some(t) = self.taper {
            let len = self.hi() - self.lo();
            if t.lower < 0.0 || t.upper < 0.0 || t.lower + t.upper > len {
                return Err(Error::invalid("TrialSpace", "edge taper wider than the trial interval"));
            }
        }
        let mut basis = Vec::new();
        for seg in &self.segments {
            let h = seg.spacing();
            let node = |k: usize| seg.lo + k as f64 * h;
            let cell_pieces = |k: usize, rising: bool| -> Result<Vec<Piece>> {
                // cell [node(k), node(k+1)], hat rising (0→1) or falling (1→0)
                let (a, b) = (node(k), if k + 2 == seg.nodes { seg.hi } else { node(k + 1) });
                let hat = if rising {
                    Polynomial::from_real(&[0.0, 1.0 / (b - a)])?
                } else {
                    Polynomial::from_real(&[1.0, -1.0 / (b - a)])?
                };
                // split the cell at ramp boundaries so each piece sees one cubic
                let mut cuts = vec![a, b];
                if let Some(t) = self.taper {
                    for c in [self.lo() + t.lower, self.hi() - t.upper] {
                        if c > a && c < b {
                            cuts.insert(1, c);
                        }
                    }
                    cuts.sort_by(f64::total_cmp);
                }
                let mut out = Vec::new();
                for w in cuts.windows(2) {
                    let local = hat.shift(w[0] - a);
                    let poly = if self.taper.is_some() {
                        local.mul(&self.taper_poly(w[0], w[1])?)?
                    } else {
                        local
                    };
                    out.push(Piece {
                        lo: w[0],
                        hi: w[1],
                        poly,
                    });
                }
                Ok(out)
            };
            for j in 0..seg.nodes {
                let mut pieces = Vec::new();
                if j > 0 {
                    pieces.extend(cell_pieces(j - 1, true)?);
                }
                if j + 1 < seg.nodes {
                    pieces.extend(cell_pieces(j, false)?);
                }
                basis.push(SpectralSignal::new(pieces)?);
            }
        }
        Ok(basis)
    }

    /// Gram matrix `⟨e_j, e_i⟩` of the basis.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = inner(&self.basis[i], &self.basis[j]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    /// `Σ_j x_j e_j` as a spectral signal.
    pub fn combine(&self, coeffs: &[Complex64]) -> Result<SpectralSignal> {
        let mut pieces: Vec<Piece> = Vec::new();
        for (e, &x) in self.basis.iter().zip(coeffs) {
            for p in e.pieces() {
                pieces.push(Piece {
                    lo: p.lo,
                    hi: p.hi,
                    poly: p.poly.scale(x),
                });
            }
        }
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len() / 2 + 1);
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.lo == p.lo && last.hi == p.hi => last.poly = last.poly.add(&p.poly),
                _ => merged.push(p),
            }
        }
        SpectralSignal::new(merged)
    }
}

/// `∫ f̂ conj(ĝ)` computed exactly on overlapping pieces.
pub fn inner(f: &SpectralSignal, g: &SpectralSignal) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in f.pieces() {
        for q in g.pieces() {
            let a = p.lo.max(q.lo);
            let b = p.hi.min(q.hi);
            if b <= a {
                continue;
            }
            let pc = p.poly.shift(a - p.lo);
            let qc = q.poly.shift(a - q.lo);
            let len = b - a;
            for (i, x) in pc.coeffs().iter().enumerate() {
                for (j, y) in qc.coeffs().iter().enumerate() {
                    let k = (i + j + 1) as i32;
                    acc += x * y.conj() * (len.powi(k) / k as f64);
                }
            }
        }
    }
    acc
}

/// Lower Cholesky factor `L` of a Hermitian positive-definite matrix.
pub fn cholesky(m: &DMatrix<Complex64>, op: &'static str) -> Result<DMatrix<Complex64>> {
    nalgebra::Cholesky::new(m.clone())
        .map(|c| c.l())
        .ok_or_else(|| Error::solver("trial", op, "Gram matrix is not positive definite"))
}

/// `D L^{-H}`: rewrites a design matrix in an orthonormal basis.
pub fn orthonormalize(d: &DMatrix<Complex64>, l: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    // (D L^{-H})^H = L^{-1} D^H
    let dh = d.adjoint();
    let x = l
        .solve_lower_triangular(&dh)
        .expect("Cholesky factor has a nonzero diagonal");
    x.adjoint()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    // A tall matrix is reduced to its triangular factor first.
    let sv = if m.nrows() > 2 * m.ncols() {
        let r = m.clone().qr().r();
        SVD::new(r, false, false).singular_values
    } else {
        SVD::new(m.clone(), false, false).singular_values
    };
    let mut v: Vec<f64> = sv.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}
