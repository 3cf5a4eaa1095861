//! Integer translates on the real line, fiberized over `[0, 1)` and
//! truncated to `|k| <= K`.
//!
//! The fiber of `phi` at `omega` is `(phi^(omega + k))_{k = -K..=K}`. The
//! neglected tail is `sum_{|k| > K} |phi^(omega + k)|^2`; for the box
//! function it is below [`box_tail_bound`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{FiberField, ModelMetadata, OmegaGrid};
use crate::numerics::ComplexMatrix;

/// Fourier samples of generator `j` at frequency `xi`.
pub fn fiberize_realline(
    phi_hat: impl Fn(usize, f64) -> Complex64 + Sync,
    generators: usize,
    grid_n: usize,
    truncation_k: usize,
) -> Result<FiberField> {
    if truncation_k < 1 || grid_n < 1 || generators < 1 {
        return Err(Error::Contract(format!(
            "real-line fiberization needs K >= 1, grid_n >= 1 and at least one generator, got K = {truncation_k}, grid_n = {grid_n}, m = {generators}"
        )));
    }
    let grid = OmegaGrid::midpoint(&[grid_n], 0.0, 1.0);
    let k = truncation_k as i64;
    let n = 2 * truncation_k + 1;
    let data = grid
        .coords
        .par_iter()
        .map(|w| ComplexMatrix::from_fn(n, generators, |row, j| phi_hat(j, w[0] + (row as i64 - k) as f64)))
        .collect::<Vec<_>>();
    if data.iter().flat_map(|m| m.as_slice()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Contract("Fourier samples must be finite".into()));
    }
    let meta = ModelMetadata::new("real-line", "characters exp(2 pi i k xi), k in Z")
        .with_param("grid_n", grid_n)
        .with_param("truncation_K", truncation_k);
    FiberField::new(grid, n, generators, data, meta)
}

/// `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Fourier transform of the indicator of `[0, 1)`, `e^{-pi i xi} sinc(xi)`.
pub fn box_hat(xi: f64) -> Complex64 {
    Complex64::from_polar(sinc(xi), -PI * xi)
}

/// Upper bound `2 / (pi^2 K)` on the truncated tail of the box function.
pub fn box_tail_bound(truncation_k: usize) -> f64 {
    2.0 / (PI * PI * truncation_k as f64)
}

/// Integer translates of the box function; the Gramian is identically 1
/// before truncation.
pub fn boxspline(grid_n: usize, truncation_k: usize) -> Result<FiberField> {
    let mut field = fiberize_realline(|_, xi| box_hat(xi), 1, grid_n, truncation_k)?;
    field.metadata.name = "boxspline".into();
    field.metadata.params.insert("tail_bound".into(), box_tail_bound(truncation_k).into());
    Ok(field)
}
