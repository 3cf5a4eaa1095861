//! Independent brute-force oracle for Friedrichs angles.
//!
//! Shares nothing with the SVD route: the intersection `S ∩ T` comes from
//! alternating projections (repeated squaring of `P_S P_T P_S`), and the
//! supremum in the definition of `G[S,T]` is approached by random unit
//! vectors followed by a random local search. Every candidate value is
//! attained by an actual vector, so the returned cosine is a lower bound on
//! `G[S,T]` and the returned sine an upper bound on `F[S,T]`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, SubspaceBasis};

const SQUARINGS: usize = 40;

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Projector onto `S ∩ T` by alternating projections.
fn intersection_projector(ps: &ComplexMatrix, pt: &ComplexMatrix) -> ComplexMatrix {
    let mut x = &(ps * pt) * ps;
    for _ in 0..SQUARINGS {
        x = (&x * &x).symmetrized();
    }
    // Columns of the limit span the intersection; orthonormalize them.
    let n = x.rows();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..n {
        let mut col = x.column(j);
        for _ in 0..2 {
            for b in &basis {
                let p: Complex64 = b.iter().zip(&col).map(|(u, v)| u.conj() * v).sum();
                for (c, bi) in col.iter_mut().zip(b) {
                    *c -= p * bi;
                }
            }
        }
        let nn = norm(&col);
        if nn > 1e-6 {
            basis.push(col.into_iter().map(|z| z / nn).collect());
        }
    }
    let b = ComplexMatrix::from_columns(n, &basis);
    &b * &b.adjoint()
}

/// Monte Carlo estimate of the Friedrichs sine `F[S,T]`.
pub fn friedrichs_sine_bruteforce(s: &SubspaceBasis, t: &SubspaceBasis, samples: usize, seed: u64) -> f64 {
    assert_eq!(s.ambient_dim(), t.ambient_dim(), "ambient dimension mismatch");
    assert!(samples >= 1, "at least one sample is required");
    if s.dim() == 0 || t.dim() == 0 {
        return 1.0;
    }
    let n = s.ambient_dim();
    let ps = s.projector();
    let pt = t.projector();
    let pi = intersection_projector(&ps, &pt);
    let s_rest = &ps - &pi;
    let t_rest = &pt - &pi;
    let trace = |m: &ComplexMatrix| (0..n).map(|i| m[(i, i)].re).sum::<f64>();
    if trace(&s_rest) < 0.5 || trace(&t_rest) < 0.5 {
        return 1.0;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // |<x, y>| over unit y in T' is maximized by y = P_T' x / |P_T' x|.
    let score = |x: &[Complex64]| norm(&t_rest.mul_vec(x));
    let draw = |rng: &mut ChaCha8Rng| -> Option<Vec<Complex64>> {
        let x = s_rest.mul_vec(&random_vector(rng, n));
        let nx = norm(&x);
        (nx > 1e-12).then(|| x.into_iter().map(|z| z / nx).collect())
    };

    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for _ in 0..samples {
        if let Some(x) = draw(&mut rng) {
            let v = score(&x);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, x));
            }
        }
    }
    let Some((mut g, mut x)) = best else {
        return 1.0;
    };

    let mut step = 0.1;
    for _ in 0..samples.max(1000) / 4 {
        let Some(dir) = draw(&mut rng) else { continue };
        let cand: Vec<Complex64> = x.iter().zip(&dir).map(|(a, b)| a + b * step).collect();
        let cand = s_rest.mul_vec(&cand);
        let nc = norm(&cand);
        if nc <= 1e-12 {
            continue;
        }
        let cand: Vec<Complex64> = cand.into_iter().map(|z| z / nc).collect();
        let v = score(&cand);
        if v > g {
            g = v;
            x = cand;
        } else {
            step = (step * 0.97).max(1e-7);
        }
    }
    let g = g.min(1.0);
    (1.0 - g * g).max(0.0).sqrt()
}
