#![allow(dead_code)]

use mispace::numerics::{ComplexMatrix, SubspaceBasis, Tolerance};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random matrix of the given rank (product of two Gaussian factors).
pub fn random_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> ComplexMatrix {
    let a = random_matrix(rng, rows, rank);
    let b = random_matrix(rng, rank, cols);
    &a * &b
}

pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> ComplexMatrix {
    let b = random_matrix(rng, n, rank);
    &b * &b.adjoint()
}

pub fn random_subspace(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> SubspaceBasis {
    if dim == 0 {
        return SubspaceBasis::trivial(n);
    }
    mispace::numerics::range_basis(&random_matrix(rng, n, dim), &Tolerance::default())
}

pub fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
    ComplexMatrix::new(rows, cols, v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}

/// Random fiber field on a 1D midpoint grid; each fiber has rank at most
/// `rank`, and a few points are made rank deficient.
pub fn random_field(rng: &mut ChaCha8Rng, points: usize, n: usize, m: usize, rank: usize) -> mispace::model::FiberField {
    use mispace::model::{FiberField, ModelMetadata, OmegaGrid};
    let grid = OmegaGrid::midpoint(&[points], 0.0, 1.0);
    let data = (0..points)
        .map(|p| {
            let r = if p % 3 == 2 { rank.saturating_sub(1) } else { rank };
            if r == 0 {
                ComplexMatrix::zeros(n, m)
            } else {
                random_rank(rng, n, m, r)
            }
        })
        .collect();
    FiberField::new(grid, n, m, data, ModelMetadata::new("random", "test")).unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    mispace::numerics::svd(&random_matrix(rng, n, n)).u
}

/// Free action of `Z_N` on `N * k` shuffled points with a random potential
/// `rho`, `J(g, x) = rho(sigma_g x) / rho(x)` and a random transversal as
/// tiling set. Half of the systems carry `rho` explicitly.
pub fn random_action(rng: &mut ChaCha8Rng, n: usize, k: usize) -> mispace::fiberization::ActionSystem {
    use rand::seq::SliceRandom;
    let size = n * k;
    let mut label: Vec<usize> = (0..size).collect();
    label.shuffle(rng);
    let rho: Vec<f64> = (0..size).map(|_| rng.random_range(0.5..2.0)).collect();
    let mut sigma = vec![vec![0; size]; n];
    for g in 0..n {
        for orbit_pos in 0..n {
            for c in 0..k {
                sigma[g][label[orbit_pos * k + c]] = label[((orbit_pos + g) % n) * k + c];
            }
        }
    }
    let jacobian = (0..n).map(|g| (0..size).map(|x| rho[sigma[g][x]] / rho[x]).collect()).collect();
    let tiling = (0..k).map(|c| label[rng.random_range(0..n) * k + c]).collect();
    let measure = if rng.random_bool(0.5) { Some(rho) } else { None };
    mispace::fiberization::ActionSystem::new(n, sigma, jacobian, tiling, measure).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| gaussian(rng)).collect()
}

/// Random subgroup of a random group with `|G| <= max_order`.
pub fn random_translate_system(rng: &mut ChaCha8Rng, max_order: usize, m: usize) -> mispace::fiberization::TranslateSystem {
    use mispace::fiberization::{FiniteAbelianGroup, Subgroup, TranslateSystem};
    let orders = loop {
        let d = rng.random_range(1..=3);
        let o: Vec<usize> = (0..d).map(|_| rng.random_range(1..=8)).collect();
        if o.iter().product::<usize>() <= max_order && o.iter().product::<usize>() >= 2 {
            break o;
        }
    };
    let g = FiniteAbelianGroup::new(orders.clone()).unwrap();
    let gens = (0..rng.random_range(0..=2))
        .map(|_| orders.iter().map(|&n| rng.random_range(0..n)).collect())
        .collect();
    let h = Subgroup::generated(&g, gens).unwrap();
    let seed = rng.random();
    TranslateSystem::random(h, m, seed)
}
