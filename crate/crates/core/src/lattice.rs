//! Frequency sets `M`, time point sets `Λ`, and scenario generators.
//!
//! Both sets are infinite in the underlying theory; here they are finite
//! windows. A [`PointSet`] remembers the generator that produced it so the
//! same set can be regenerated bit-exactly or on a wider window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Window `[lo, hi]` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::invalid("Window::new", format!("[{lo}, {hi}] is not a window")));
        }
        Ok(Window { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Same center, twice the length.
    pub fn doubled(&self) -> Window {
        let c = 0.5 * (self.lo + self.hi);
        let h = self.hi - self.lo;
        Window {
            lo: c - h,
            hi: c + h,
        }
    }
}

/// A window of the frequency set `M` with its gap sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencySet {
    points: Vec<f64>,
    gaps: Vec<f64>,
    beta: f64,
}

impl FrequencySet {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `β_n = μ_{n+1} - μ_n`.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Largest gap over the window.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Number of bands `[μ_k, μ_{k+1})` covered by the window.
    pub fn band_count(&self) -> usize {
        self.gaps.len()
    }

    pub fn from_point_set(set: &PointSet) -> Result<Self> {
        make_frequency_set(set.points())
    }
}

/// Validates a strictly increasing sequence of at least two finite points.
pub fn make_frequency_set(points: &[f64]) -> Result<FrequencySet> {
    const OP: &str = "make_frequency_set";
    if points.len() < 2 {
        return Err(Error::invalid(OP, format!("need at least 2 points, got {}", points.len())));
    }
    validate_increasing(OP, points)?;
    let gaps: Vec<f64> = points.windows(2).map(|w| w[1] - w[0]).collect();
    let beta = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(FrequencySet {
        points: points.to_vec(),
        gaps,
        beta,
    })
}

fn validate_increasing(op: &'static str, points: &[f64]) -> Result<()> {
    for (i, &p) in points.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::InvalidAt {
                op,
                index: i,
                reason: format!("non-finite point {p}"),
            });
        }
        if i > 0 {
            let prev = points[i - 1];
            if p == prev {
                return Err(Error::InvalidAt {
                    op,
                    index: i,
                    reason: format!("duplicate point {p}"),
                });
            }
            if p < prev {
                return Err(Error::InvalidAt {
                    op,
                    index: i,
                    reason: format!("point {p} is below its predecessor {prev}"),
                });
            }
        }
    }
    Ok(())
}

/// Magnitudes behind local finiteness of `M` over the represented window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinitenessReport {
    pub beta: f64,
    /// Largest number of points in any half-open `[x, x+1)`.
    pub max_unit_count: usize,
    pub is_locally_finite: bool,
}

pub fn finiteness_report(m: &FrequencySet) -> FinitenessReport {
    let pts = m.points();
    let mut best = 0usize;
    let mut hi = 0usize;
    // The supremum over x is attained with x at a point of M.
    for (lo, &x) in pts.iter().enumerate() {
        if hi < lo {
            hi = lo;
        }
        while hi < pts.len() && pts[hi] < x + 1.0 {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    FinitenessReport {
        beta: m.beta(),
        max_unit_count: best,
        is_locally_finite: m.beta().is_finite(),
    }
}

/// Scenario generators for point sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `lo + k·step` inside the window.
    Arithmetic { step: f64 },
    /// Arithmetic points each displaced by a uniform draw in `[-amplitude, amplitude]`.
    Jittered { step: f64, amplitude: f64, seed: u64 },
    /// Arithmetic points with the open interval `gap_center ± gap_width/2` removed.
    Gapped {
        step: f64,
        gap_center: f64,
        gap_width: f64,
    },
    /// Arithmetic points with the point nearest `cluster_center` replaced by
    /// `multiplicity` points spread evenly over `± spread/2`.
    Clustered {
        step: f64,
        cluster_center: f64,
        multiplicity: usize,
        spread: f64,
    },
    /// `lo + k·period + offset` for every offset.
    Periodic { period: f64, offsets: Vec<f64> },
    /// A fixed list; the window is ignored except for validation.
    Explicit { points: Vec<f64> },
}

/// Generator plus the window it is applied on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub generator: Generator,
    pub window: Window,
}

/// A window of the time set `Λ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    points: Vec<f64>,
    descriptor: GeneratorSpec,
}

impl PointSet {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn descriptor(&self) -> &GeneratorSpec {
        &self.descriptor
    }

    pub fn window(&self) -> Window {
        self.descriptor.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// A point set given directly; its window is the hull of the points.
    pub fn explicit(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("PointSet::explicit", "empty point list"));
        }
        let window = Window::new(points[0], points[points.len() - 1])?;
        generate_point_set(&Generator::Explicit { points }, window)
    }

    /// Rebuilds the set from its descriptor.
    pub fn regenerate(&self) -> Result<Self> {
        generate_point_set(&self.descriptor.generator, self.descriptor.window)
    }

    /// Same generator on another window. Explicit sets cannot be widened.
    pub fn on_window(&self, window: Window) -> Result<Self> {
        if matches!(self.descriptor.generator, Generator::Explicit { .. }) {
            return Err(Error::invalid(
                "PointSet::on_window",
                "explicit point sets carry no generator to widen",
            ));
        }
        generate_point_set(&self.descriptor.generator, window)
    }

    /// Adds points, keeping the descriptor's window (used for superset checks).
    pub fn with_extra_points(&self, extra: &[f64]) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend_from_slice(extra);
        pts.sort_by(f64::total_cmp);
        validate_increasing("PointSet::with_extra_points", &pts)?;
        Ok(PointSet {
            points: pts.clone(),
            descriptor: GeneratorSpec {
                generator: Generator::Explicit { points: pts },
                window: self.descriptor.window,
            },
        })
    }
}

fn arithmetic(op: &'static str, step: f64, window: Window) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(op, format!("step must be positive, got {step}")));
    }
    let count = ((window.len() / step) * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
    if count > 50_000_000 {
        return Err(Error::invalid(op, format!("window holds {count} points")));
    }
    Ok((0..count)
        .map(|k| window.lo + k as f64 * step)
        .filter(|&x| x <= window.hi + 1e-9 * step)
        .collect())
}

pub fn generate_point_set(generator: &Generator, window: Window) -> Result<PointSet> {
    const OP: &str = "generate_point_set";
    if window.is_empty() && !matches!(generator, Generator::Explicit { .. }) {
        return Err(Error::invalid(OP, "window must have positive length"));
    }
    let points = match generator {
        Generator::Arithmetic { step } => arithmetic(OP, *step, window)?,
        Generator::Jittered {
            step,
            amplitude,
            seed,
        } => {
            if !(*amplitude >= 0.0 && *amplitude < step / 2.0) {
                return Err(Error::invalid(
                    OP,
                    format!("jitter amplitude {amplitude} must lie in [0, step/2)"),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            arithmetic(OP, *step, window)?
                .into_iter()
                .map(|x| {
                    let u: f64 = rng.random_range(-1.0..=1.0);
                    x + amplitude * u
                })
                .filter(|x| window.contains(*x))
                .collect()
        }
        Generator::Gapped {
            step,
            gap_center,
            gap_width,
        } => {
            if !(*gap_width >= 0.0) {
                return Err(Error::invalid(OP, "gap width must be nonnegative"));
            }
            let half = gap_width / 2.0;
            arithmetic(OP, *step, window)?
                .into_iter()
                .filter(|&x| !(x > gap_center - half && x < gap_center + half))
                .collect()
        }
        Generator::Clustered {
            step,
            cluster_center,
            multiplicity,
            spread,
        } => {
            if *multiplicity == 0 {
                return Err(Error::invalid(OP, "cluster multiplicity must be at least 1"));
            }
            if *multiplicity > 1 && !(*spread > 0.0 && *spread < *step) {
                return Err(Error::invalid(
                    OP,
                    format!("cluster spread {spread} must lie in (0, step) to keep points distinct"),
                ));
            }
            let base = arithmetic(OP, *step, window)?;
            let pivot = base
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - cluster_center).abs().total_cmp(&(b.1 - cluster_center).abs()))
                .map(|(i, _)| i)
                .ok_or_else(|| Error::invalid(OP, "empty base lattice"))?;
            let mut out = Vec::with_capacity(base.len() + multiplicity);
            out.extend_from_slice(&base[..pivot]);
            out.extend(cluster_offsets(*multiplicity, *spread).into_iter().map(|d| base[pivot] + d));
            out.extend_from_slice(&base[pivot + 1..]);
            out
        }
        Generator::Periodic { period, offsets } => {
            if offsets.is_empty() || offsets.iter().any(|o| !(*o >= 0.0 && *o < *period)) {
                return Err(Error::invalid(OP, "periodic offsets must lie in [0, period)"));
            }
            let mut sorted = offsets.clone();
            sorted.sort_by(f64::total_cmp);
            arithmetic(OP, *period, window)?
                .into_iter()
                .flat_map(|x| sorted.iter().map(move |o| x + o))
                .filter(|x| window.contains(*x))
                .collect()
        }
        Generator::Explicit { points } => points.clone(),
    };
    if points.is_empty() {
        return Err(Error::invalid(OP, "generator produced no points in the window"));
    }
    validate_increasing(OP, &points)?;
    Ok(PointSet {
        points,
        descriptor: GeneratorSpec {
            generator: generator.clone(),
            window,
        },
    })
}

/// `m` offsets spread evenly over `[-spread/2, spread/2]` (`{0}` for `m = 1`).
pub fn cluster_offsets(m: usize, spread: f64) -> Vec<f64> {
    if m == 1 {
        return vec![0.0];
    }
    (0..m)
        .map(|i| -spread / 2.0 + spread * i as f64 / (m - 1) as f64)
        .collect()
}

pub fn points_to_csv(points: &[f64]) -> String {
    let mut s = String::from("point\n");
    for p in points {
        s.push_str(&format!("{p}\n"));
    }
    s
}
