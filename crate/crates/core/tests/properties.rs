mod common;

use cauchy_gabor::cauchy_analysis::{analyze, coefficient, WindowParam};
use cauchy_gabor::framebounds::{frame_bounds, FrameProblem};
use cauchy_gabor::lattice::{make_frequency_set, FrequencySet};
use cauchy_gabor::paley_wiener::{sampling_constants, sampling_stability, SamplingProblem};
use cauchy_gabor::trial::{cholesky, orthonormalize, singular_values, TrialSpace};
use common::{c, lattice};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_frame(lambda_step: f64, w: f64) -> FrameProblem {
    FrameProblem::new(
        lattice(lambda_step, -6.0, 6.0),
        lattice(1.0, 0.0, 2.0),
        WindowParam::real(w).unwrap(),
        16,
    )
    .unwrap()
}

fn extremes(space: &TrialSpace, lambdas: &[f64], mus: &[f64], w: WindowParam) -> (f64, f64) {
    let rows: Vec<Vec<Complex64>> = lambdas
        .iter()
        .flat_map(|&l| {
            mus.iter()
                .map(move |&mu| space.basis().iter().map(|e| coefficient(e, l, mu, w).unwrap()).collect())
        })
        .collect();
    let raw = DMatrix::from_fn(rows.len(), space.dim(), |r, k| rows[r][k]);
    let l = cholesky(&space.gram(), "test").unwrap();
    let s = singular_values(&orthonormalize(&raw, &l));
    (s[s.len() - 1].powi(2), s[0].powi(2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn extra_lambda_points_raise_frame_bounds(extra in prop::collection::vec(-6.0f64..6.0, 1..4), w in 0.5f64..2.0) {
        let base = small_frame(1.0, w);
        let mut more = base.clone();
        let extra: Vec<f64> = extra.into_iter().map(|x| x + 0.013).collect();
        more.lambda = base.lambda.with_extra_points(&extra).unwrap();
        let (r0, r1) = (frame_bounds(&base).unwrap(), frame_bounds(&more).unwrap());
        prop_assert!(r1.a_est >= r0.a_est * (1.0 - 1e-9));
        prop_assert!(r1.b_est >= r0.b_est * (1.0 - 1e-9));
    }

    #[test]
    fn extra_lambda_points_raise_sampling_bounds(extra in prop::collection::vec(-10.0f64..10.0, 1..4)) {
        let base = SamplingProblem::new(lattice(1.5, -10.0, 10.0), 1.0, 16).unwrap();
        let mut more = base.clone();
        let extra: Vec<f64> = extra.into_iter().map(|x| x + 0.017).collect();
        more.lambda = base.lambda.with_extra_points(&extra).unwrap();
        let (s0, s1) = (sampling_constants(&base).unwrap(), sampling_constants(&more).unwrap());
        prop_assert!(s1.a_est >= s0.a_est * (1.0 - 1e-9) - 1e-14);
        prop_assert!(s1.b_est >= s0.b_est * (1.0 - 1e-9));
    }

    #[test]
    fn refinement_widens_the_bound_interval(nodes in 3usize..7, w in 0.3f64..1.5) {
        let mus = [0.0, 1.0, 2.0];
        let coarse = TrialSpace::with_breaks(0.0, 2.0, 2 * nodes, &mus, None).unwrap();
        let fine = coarse.refined().unwrap();
        let lambdas = lattice(1.0, -5.0, 5.0);
        let w = WindowParam::real(w).unwrap();
        let (a0, b0) = extremes(&coarse, lambdas.points(), &mus, w);
        let (a1, b1) = extremes(&fine, lambdas.points(), &mus, w);
        prop_assert!(a1 <= a0 * (1.0 + 1e-8));
        prop_assert!(b1 >= b0 * (1.0 - 1e-8));
    }

    #[test]
    fn trial_energy_lies_between_frame_bounds(seed in prop::collection::vec(-1.0f64..1.0, 32), w in 0.5f64..1.5) {
        let p = small_frame(0.8, w);
        let r = frame_bounds(&p).unwrap();
        let space = p.trial_space().unwrap();
        let x: Vec<Complex64> = (0..space.dim()).map(|j| c(seed[j], seed[j + 16])).collect();
        let f = space.combine(&x).unwrap();
        let m = FrequencySet::from_point_set(&p.m).unwrap();
        let ratio = analyze(&f, &p.lambda, &m, p.w).unwrap().energy() / f.norm_sq();
        prop_assert!(ratio >= r.a_est * (1.0 - 1e-8), "{} < {}", ratio, r.a_est);
        prop_assert!(ratio <= r.b_est * (1.0 + 1e-8), "{} > {}", ratio, r.b_est);
    }

    #[test]
    fn sampling_constants_scale_inversely_with_step(s in 0.5f64..2.0) {
        let unit = sampling_constants(&SamplingProblem::new(lattice(1.0, -20.0, 20.0), 1.0, 32).unwrap()).unwrap();
        let scaled = sampling_constants(&SamplingProblem::new(lattice(s, -20.0 * s, 20.0 * s), 1.0 / s, 32).unwrap()).unwrap();
        prop_assert!((scaled.a_est * s / unit.a_est - 1.0).abs() <= 0.01);
        prop_assert!((scaled.b_est * s / unit.b_est - 1.0).abs() <= 0.01);
    }
}

#[test]
fn oversampled_lattice_is_stable_under_doubling() {
    let p = SamplingProblem::new(lattice(0.5, -20.0, 20.0), 1.0, 32).unwrap();
    let s = sampling_stability(&p).unwrap();
    assert!((s.a_ratio - 1.0).abs() <= 0.1, "A ratio {}", s.a_ratio);
    assert!((s.b_ratio - 1.0).abs() <= 0.1, "B ratio {}", s.b_ratio);
}

#[test]
fn frequency_sets_reject_unordered_points() {
    assert!(make_frequency_set(&[0.0, 2.0, 1.0]).is_err());
    assert!(make_frequency_set(&[0.0, 0.0]).is_err());
    assert!(make_frequency_set(&[0.0, f64::NAN]).is_err());
}
