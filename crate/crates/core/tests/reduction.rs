mod common;

use std::f64::consts::PI;

use common::*;
use mispace::model::{self, gramian_field, scenarios};
use mispace::numerics::{self, oracle, ComplexMatrix, Tolerance};
use mispace::reduction::*;
use mispace::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn row_select() -> ReductionMatrix {
    real(1, 2, &[1.0, 0.0]).into()
}

#[test]
fn sincos_row_selection_keeps_first_generator() {
    let phi = scenarios::sincos(8).unwrap();
    let psi = apply_reduction(&phi, &row_select()).unwrap();
    assert_eq!(psi.generator_count(), 1);
    for (p, w) in phi.grid().coords.iter().enumerate() {
        let v = psi.fiber(p);
        assert!((v[(0, 0)].re + (2.0 * PI * w[0]).sin()).abs() < 1e-15);
        assert_eq!(v[(1, 0)], Complex64::new(0.0, 0.0));
    }
}

#[test]
fn identity_and_zero_reductions() {
    let mut r = rng(1);
    let phi = random_field(&mut r, 6, 4, 3, 2);
    let same = apply_reduction(&phi, &ComplexMatrix::identity(3).into()).unwrap();
    assert_eq!(same.fibers(), phi.fibers());
    let zero = apply_reduction(&phi, &ComplexMatrix::zeros(2, 3).into()).unwrap();
    assert!(zero.fibers().iter().all(|f| f.max_abs() == 0.0));
}

#[test]
fn scalar_reduction_scales_gramian() {
    let mut r = rng(2);
    let g = gramian_field(&random_field(&mut r, 5, 3, 3, 3));
    let c = Complex64::new(0.6, -1.3);
    let a = ComplexMatrix::identity(3).scale(c);
    let red = reduced_gramian(&g, &a.into()).unwrap();
    for (x, y) in g.matrices().iter().zip(red.matrices()) {
        assert!(max_abs_diff(&x.scale(Complex64::new(c.norm_sqr(), 0.0)), y) < 1e-12);
    }
}

#[test]
fn dual_path_gramian_identity_on_random_cases() {
    let mut r = rng(3);
    for case in 0..100 {
        let (n, m) = (2 + case % 4, 2 + case % 5);
        let l = 1 + case % m;
        let phi = random_field(&mut r, 4, n, m, 1 + case % n.min(m));
        let a: ReductionMatrix = random_matrix(&mut r, l, m).into();
        let direct = gramian_field(&apply_reduction(&phi, &a).unwrap());
        let congruent = reduced_gramian(&gramian_field(&phi), &a).unwrap();
        for (x, y) in direct.matrices().iter().zip(congruent.matrices()) {
            assert!(max_abs_diff(x, y) <= 1e-10 * (1.0 + x.max_abs()));
        }
    }
}

#[test]
fn rank_never_increases() {
    let mut r = rng(4);
    for case in 0..60 {
        let m = 2 + case % 4;
        let g = gramian_field(&random_field(&mut r, 5, 4, m, 1 + case % 3));
        let a: ReductionMatrix = random_rank(&mut r, m, m, 1 + case % m).into();
        let cert = is_generator_preserving(&g, &a, &CertifyOptions::default()).unwrap();
        assert!(cert.per_point.iter().all(|(before, after)| after <= before));
    }
}

#[test]
fn sincos_midpoint_grids_are_preserving() {
    let g = gramian_field(&scenarios::sincos(64).unwrap());
    let cert = is_generator_preserving(&g, &row_select(), &CertifyOptions::default()).unwrap();
    assert!(cert.preserving && cert.failing_points.is_empty());
}

#[test]
fn sincos_delta_matches_closed_form_and_bruteforce() {
    let tol = Tolerance::default();
    for n in [4usize, 16, 64] {
        let g = gramian_field(&scenarios::sincos(n).unwrap());
        let inf = friedrichs_infimum(&g, &row_select(), &tol).unwrap();
        assert!((inf.delta - (PI / n as f64).sin()).abs() < 1e-10, "n = {n}: {}", inf.delta);
        let w = &g.grid().coords[inf.argmin.unwrap()];
        assert!(((2.0 * PI * w[0]).sin().abs() - inf.delta).abs() < 1e-12);
        // Independent check of the sine at the extremal point.
        let kernel = numerics::kernel_basis(&real(1, 2, &[1.0, 0.0]), &tol);
        let range = numerics::range_basis(g.at(inf.argmin.unwrap()), &tol);
        let brute = oracle::friedrichs_sine_bruteforce(&kernel, &range, 5000, n as u64);
        assert!((brute - inf.delta).abs() < 2e-3);
    }
    assert!(((PI / 4.0).sin() - 0.70711).abs() < 1e-5);
    assert!(((PI / 64.0).sin() - 0.04907).abs() < 1e-5);
}

#[test]
fn sincos_frame_certificate_and_refinement_warning() {
    let opts = CertifyOptions::default();
    let g = gramian_field(&scenarios::sincos(64).unwrap());
    let cert = certify_frame_reduction(&g, &row_select(), &opts).unwrap();
    assert!(cert.certified);
    assert!((cert.delta - 0.04907).abs() < 1e-5);
    assert_eq!(cert.sandwich_holds, Some(true));

    let study = refinement_study(&[4, 16, 64], scenarios::sincos, &row_select(), &opts).unwrap();
    assert!(study.delta_decay_warning);
    assert_eq!(study.entries.iter().map(|e| e.points).collect::<Vec<_>>(), vec![16, 256, 4096]);
    for e in &study.entries {
        let n = e.grid_n as f64;
        assert!((e.moore_penrose_sup.unwrap() - (PI / n).cos()).abs() < 1e-10);
    }
}

#[test]
fn sincos_moore_penrose_sup_is_cosine() {
    for n in [4usize, 16, 64] {
        let g = gramian_field(&scenarios::sincos(n).unwrap());
        let r = moore_penrose_criterion(&g, &row_select(), &CertifyOptions::default()).unwrap();
        assert!(r.aa_star_invertible && r.passes);
        assert!((r.sup_norm - (PI / n as f64).cos()).abs() < 1e-10);
    }
}

#[test]
fn square_unitary_reduction_is_transparent() {
    let mut r = rng(5);
    let opts = CertifyOptions::default();
    let phi = scenarios::orthonormal(3, 6).unwrap();
    let g = gramian_field(&phi);
    let u: ReductionMatrix = random_unitary(&mut r, 3).into();
    let cert = certify_frame_reduction(&g, &u, &opts).unwrap();
    assert!(cert.certified);
    assert_eq!(cert.delta, 1.0);
    let [lo, hi] = cert.predicted_bounds.unwrap();
    assert!((lo - 1.0).abs() < 1e-10 && (hi - 1.0).abs() < 1e-10);
    assert!((cert.measured_bounds.alpha - 1.0).abs() < 1e-10 && (cert.measured_bounds.beta - 1.0).abs() < 1e-10);
    let mp = moore_penrose_criterion(&g, &u, &opts).unwrap();
    assert!(mp.passes && mp.sup_norm < 1e-10);
}

#[test]
fn hypothesis_violations_are_errors() {
    let g = gramian_field(&scenarios::orthonormal(3, 4).unwrap());
    let short: ReductionMatrix = ComplexMatrix::identity(3).select_columns(&[0, 1]).adjoint().into();
    assert!(matches!(certify_frame_reduction(&g, &short, &CertifyOptions::default()), Err(Error::Hypothesis(_))));
    assert!(matches!(
        sample_random_reductions(&g, 2, 5, 0, Distribution::Gaussian, &CertifyOptions::default()),
        Err(Error::Contract(_))
    ));
    let full: ReductionMatrix = ComplexMatrix::identity(3).into();
    let sc = gramian_field(&scenarios::sincos(4).unwrap());
    assert!(matches!(moore_penrose_criterion(&sc, &ComplexMatrix::identity(2).into(), &CertifyOptions::default()), Err(Error::Hypothesis(_))));
    assert!(certify_frame_reduction(&g, &full, &CertifyOptions::default()).is_ok());
}

#[test]
fn sincos_sampler_is_always_preserving() {
    let g = gramian_field(&scenarios::sincos(16).unwrap());
    let r = sample_random_reductions(&g, 1, 1000, 9, Distribution::Gaussian, &CertifyOptions::default()).unwrap();
    assert_eq!(r.preserving_count, 1000);
}

#[test]
fn sampler_does_not_depend_on_thread_count() {
    let g = gramian_field(&random_field(&mut rng(6), 5, 3, 4, 2));
    let opts = CertifyOptions::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_random_reductions(&g, 2, 50, 11, Distribution::Uniform, &opts).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn rank_deficient_reductions_are_detected() {
    let mut r = rng(8);
    let g = gramian_field(&random_field(&mut r, 6, 4, 4, 3));
    // Rank-2 A cannot keep rank-3 fibers.
    let a: ReductionMatrix = random_rank(&mut r, 4, 4, 2).into();
    let cert = is_generator_preserving(&g, &a, &CertifyOptions::default()).unwrap();
    assert!(!cert.preserving);
    assert!(cert.failing_points.iter().all(|&p| cert.per_point[p].0 == 3));
}

fn sandwich_case(seed: u64) -> Option<(FrameCertificate, Vec<Vec<f64>>)> {
    let mut r = rng(seed);
    let m = 2 + (seed % 3) as usize;
    let rank = 1 + (seed % m as u64) as usize;
    let g = gramian_field(&random_field(&mut r, 4, m + 1, m, rank));
    let length = model_length(&g, &Tolerance::default());
    let l = length + (seed as usize % (m - length + 1));
    let a: ReductionMatrix = random_matrix(&mut r, l, m).into();
    let cert = certify_frame_reduction(&g, &a, &CertifyOptions::default()).ok()?;
    Some((cert, reduced_gramian(&g, &a).unwrap().spectra()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certified_reductions_satisfy_sandwich(seed in 0u64..1_000_000) {
        if let Some((cert, spectra)) = sandwich_case(seed) {
            if let Some([lo, hi]) = cert.predicted_bounds {
                let tol = Tolerance::default();
                for s in &spectra {
                    for &e in model::positive_eigenvalues(s, &tol) {
                        prop_assert!(e >= lo - SANDWICH_SLACK && e <= hi + SANDWICH_SLACK);
                    }
                }
            }
        }
    }

    #[test]
    fn verdicts_are_unitarily_invariant(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let m = 2 + (seed % 3) as usize;
        let g = gramian_field(&random_field(&mut r, 4, m, m, 1 + (seed % m as u64) as usize));
        let length = model_length(&g, &Tolerance::default());
        let l = length.max(1);
        let a = if seed % 2 == 0 { random_matrix(&mut r, l, m) } else { random_rank(&mut r, l, m, 1) };
        let ua = &random_unitary(&mut r, l) * &a;
        let opts = CertifyOptions::default();
        let (a, ua): (ReductionMatrix, ReductionMatrix) = (a.into(), ua.into());
        prop_assert_eq!(
            is_generator_preserving(&g, &a, &opts).unwrap().preserving,
            is_generator_preserving(&g, &ua, &opts).unwrap().preserving
        );
        let (c1, c2) = (certify_frame_reduction(&g, &a, &opts).unwrap(), certify_frame_reduction(&g, &ua, &opts).unwrap());
        prop_assert_eq!(c1.certified, c2.certified);
        prop_assert!((c1.delta - c2.delta).abs() < 1e-8);
        if l == length {
            let (m1, m2) = (moore_penrose_criterion(&g, &a, &opts).unwrap(), moore_penrose_criterion(&g, &ua, &opts).unwrap());
            prop_assert_eq!(m1.passes, m2.passes);
        }
    }
}
