mod common;

use cauchy_gabor::cauchy_analysis::{analyze, WindowParam};
use cauchy_gabor::cli::random_signal;
use cauchy_gabor::framebounds::{FrameProblem, Trend};
use cauchy_gabor::lattice::{make_frequency_set, Generator, GeneratorSpec, Window};
use cauchy_gabor::paley_wiener::{ls_reconstruct, SamplingProblem};
use cauchy_gabor::pipeline::{
    band_samples, cluster_counterexample, gap_counterexample, gapped_frequencies, reconstruct, relative_l2_error,
    theorem_check, GapScenario, ReconstructOptions, Scenario, Verdict,
};
use cauchy_gabor::spectrum::band_decompose;
use common::{c, lattice};

#[test]
fn band_samples_are_demodulated_band_values() {
    let m = make_frequency_set(&[0.0, 0.6, 1.9, 2.5, 4.0]).unwrap();
    let f = random_signal(&m, 3, 2, 17).unwrap();
    let w = WindowParam::new(c(0.9, -0.4)).unwrap();
    let lambda = lattice(0.7, -5.0, 5.0);
    let h = band_samples(&analyze(&f, &lambda, &m, w).unwrap(), &m).unwrap();
    let bands = band_decompose(&f, &m).unwrap();
    for (k, band) in bands.bands.iter().enumerate() {
        for (i, &l) in lambda.points().iter().enumerate() {
            let want = band.evaluate_time(c(l, 0.0) + c(0.0, 1.0) * w.value()).unwrap();
            assert!((h[k][i] - want).norm() <= 1e-9 * (1.0 + want.norm()), "band {k}, λ = {l}");
        }
    }
}

#[test]
fn single_band_pipeline_matches_direct_fit() {
    let m = make_frequency_set(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    let f = random_signal(&m, 2, 2, 5).unwrap().restrict(1.0, 2.0);
    let w = WindowParam::real(1.0).unwrap();
    let lambda = lattice(0.5, -20.0, 20.0);
    let table = analyze(&f, &lambda, &m, w).unwrap();
    let pipeline = reconstruct(&table, &lambda, &m, &ReconstructOptions::default(), Some(&f)).unwrap();
    let h = band_samples(&table, &m).unwrap();
    let samples: Vec<_> = lambda.points().iter().copied().zip(h[1].iter().copied()).collect();
    let grid = pipeline.bands[1].grid;
    let direct = ls_reconstruct(&samples, &SamplingProblem::new(lambda.clone(), 1.0, grid).unwrap().with_shift(w)).unwrap();
    let e_direct = relative_l2_error(&direct.spectrum.translate(1.0), &f);
    let e_pipeline = pipeline.relative_l2_error.unwrap();
    assert!((e_pipeline - e_direct).abs() <= 0.1 * e_direct.max(1e-12), "{e_pipeline} vs {e_direct}");
}

#[test]
fn gapless_scenario_is_a_plain_lattice() {
    let pts = gapped_frequencies(0.0, 1.0, 1.0, 8);
    let plain = lattice(1.0, -7.5, 7.5);
    assert_eq!(pts.len(), plain.len());
    for (a, b) in pts.iter().zip(plain.points()) {
        assert!((a - b).abs() <= 1e-12);
    }
    let w = WindowParam::real(1.0).unwrap();
    let scenario = GapScenario::default();
    let curve = gap_counterexample(&[1.0], &scenario, w).unwrap();
    let f = cauchy_gabor::spectrum::gaussian_spectrum(scenario.center, scenario.halfwidth, scenario.tail_tol).unwrap();
    let lambda = lattice(0.5, -40.0, 40.0);
    let m = make_frequency_set(plain.points()).unwrap();
    let direct = analyze(&f, &lambda, &m, w).unwrap().energy() / f.norm_sq();
    assert!((curve.responses[0] / direct - 1.0).abs() <= 1e-12);
}

#[test]
fn cluster_response_is_continuous_in_spread() {
    let base = FrameProblem::new(lattice(10.0, -40.0, 40.0), lattice(1.0, 0.0, 8.0), WindowParam::real(1.0).unwrap(), 80)
        .unwrap();
    let a = cluster_counterexample(&[2, 4], 1e-3, &base).unwrap();
    let b = cluster_counterexample(&[2, 4], 1e-4, &base).unwrap();
    for (x, y) in a.responses.iter().zip(&b.responses) {
        assert!((x / y - 1.0).abs() <= 0.05, "{x} vs {y}");
    }
}

fn spec(generator: Generator, lo: f64, hi: f64) -> GeneratorSpec {
    GeneratorSpec {
        generator,
        window: Window::new(lo, hi).unwrap(),
    }
}

fn scenario(name: &str, lambda: Generator, m: Generator) -> Scenario {
    Scenario {
        name: name.into(),
        lambda: spec(lambda, -40.0, 40.0),
        m: spec(m, 0.0, 8.0),
        w: [1.0, 0.0],
        sampling_grid_per_unit: None,
        frame_grid: None,
    }
}

fn periodic() -> Generator {
    Generator::Periodic {
        period: 4.0,
        offsets: (0..10).map(|k| 0.2 * k as f64).collect(),
    }
}

#[test]
fn theorem_verdicts() {
    let cases = [
        (
            scenario("dense", Generator::Arithmetic { step: 0.8 }, Generator::Arithmetic { step: 1.0 }),
            Verdict::ConcordantPositive,
        ),
        (
            scenario("sparse", Generator::Arithmetic { step: 1.25 }, Generator::Arithmetic { step: 1.0 }),
            Verdict::ConcordantNegative,
        ),
        (
            scenario("asymmetric", periodic(), Generator::Arithmetic { step: 1.0 }),
            Verdict::ConcordantPositive,
        ),
        (
            scenario("swapped", Generator::Arithmetic { step: 1.0 }, periodic()),
            Verdict::ConcordantNegative,
        ),
    ];
    for (s, want) in cases {
        let report = theorem_check(&s).unwrap();
        assert_eq!(report.verdict, want, "{}", s.name);
        if want == Verdict::ConcordantPositive {
            assert_eq!(report.frame_trend, Trend::Stable, "{}", s.name);
        }
    }
}
