//! Built-in fiber fields.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{FiberField, ModelMetadata, OmegaGrid};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Two generators on `(-1/2, 1/2]^2` whose fibers are multiples of a single
/// coordinate `e_0`:
///
/// `Phi_1(w) = -sin(2 pi w_1) e_0`, `Phi_2(w) = exp(2 pi i w_2) cos(2 pi w_1) e_0`.
///
/// The fiber space is truncated to `e_0` plus one zero padding coordinate
/// (`n = 2`). The Friedrichs sine between `Ker (1, 0)` and the fiber span is
/// `|sin(2 pi w_1)|`, which has no positive lower bound on the continuum.
pub fn sincos(grid_n: usize) -> Result<FiberField> {
    if grid_n < 2 {
        return Err(Error::Contract(format!("sincos grid needs at least 2 points per axis, got {grid_n}")));
    }
    let grid = OmegaGrid::midpoint(&[grid_n, grid_n], -0.5, 0.5);
    let data = grid
        .coords
        .iter()
        .map(|w| {
            let (s, c) = (2.0 * PI * w[0]).sin_cos();
            let phase = Complex64::from_polar(1.0, 2.0 * PI * w[1]);
            let mut f = ComplexMatrix::zeros(2, 2);
            f[(0, 0)] = Complex64::new(-s, 0.0);
            f[(0, 1)] = phase * c;
            f
        })
        .collect();
    let meta = ModelMetadata::new("sincos", "exponentials exp(2 pi i <(k,j), w>), (k,j) in Z^2")
        .with_param("grid_n", grid_n);
    FiberField::new(grid, 2, 2, data, meta)
}

/// `m` generators with orthonormal fibers at every point of a midpoint grid
/// on `[-1/2, 1/2)`: `Phi_j(w) = exp(2 pi i j w) e_j`.
pub fn orthonormal(m: usize, grid_n: usize) -> Result<FiberField> {
    if m == 0 || grid_n == 0 {
        return Err(Error::Contract("orthonormal model needs m >= 1 and grid_n >= 1".into()));
    }
    let grid = OmegaGrid::midpoint(&[grid_n], -0.5, 0.5);
    let data = grid
        .coords
        .iter()
        .map(|w| {
            let mut f = ComplexMatrix::zeros(m, m);
            for j in 0..m {
                f[(j, j)] = Complex64::from_polar(1.0, 2.0 * PI * j as f64 * w[0]);
            }
            f
        })
        .collect();
    let meta = ModelMetadata::new("orthonormal", "exponentials exp(2 pi i k w), k in Z")
        .with_param("m", m)
        .with_param("grid_n", grid_n);
    FiberField::new(grid, m, m, data, meta)
}
