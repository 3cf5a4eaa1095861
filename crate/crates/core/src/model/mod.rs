//! Finitely generated MI spaces as fields of generator fibers over a grid.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second, `<x, y> = sum_k x_k conj(y_k)`, so that the Gramian entry
//! `(G)_ij = <Phi_i, Phi_j>`. Because the range function of an MI space is
//! the pointwise span of the generator fibers, every computation here is
//! fiberwise; the determining set only appears as a descriptor in metadata.

pub mod io;
pub mod scenarios;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, Tolerance};

pub const INNER_PRODUCT_CONVENTION: &str = "linear-in-first: <x,y> = sum_k x_k conj(y_k); G_ij = <Phi_i, Phi_j>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Every point is an atom of positive measure (finite-group sections).
    Exact,
    /// Points sample a continuum; "a.e." becomes "at every grid point".
    Sampled,
}

/// Sample points of the base domain together with their measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    pub kind: GridKind,
    /// Shape of the grid (e.g. `[n, n]` for a tensor midpoint grid).
    pub dims: Vec<usize>,
    pub coords: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl OmegaGrid {
    pub fn new(kind: GridKind, dims: Vec<usize>, coords: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if coords.len() != weights.len() {
            return Err(Error::Dimension(format!(
                "{} grid points but {} weights",
                coords.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Contract(format!("grid weights must be strictly positive, found {w}")));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Contract("grid coordinates must be finite".into()));
        }
        Ok(Self { kind, dims, coords, weights })
    }

    /// Tensor midpoint grid on the box `[lo, hi)^d`, uniform weights summing
    /// to the box volume. The last axis varies fastest.
    pub fn midpoint(dims: &[usize], lo: f64, hi: f64) -> Self {
        let count: usize = dims.iter().product();
        let volume = (hi - lo).powi(dims.len() as i32);
        let mut coords = Vec::with_capacity(count);
        for flat in 0..count {
            let mut rest = flat;
            let mut c = vec![0.0; dims.len()];
            for (axis, &n) in dims.iter().enumerate().rev() {
                let i = rest % n;
                rest /= n;
                c[axis] = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
            }
            coords.push(c);
        }
        Self {
            kind: GridKind::Sampled,
            dims: dims.to_vec(),
            coords,
            weights: vec![volume / count as f64; count],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

/// Provenance carried with a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub name: String,
    /// Human-readable description of the determining set.
    pub determining_set: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl ModelMetadata {
    pub fn new(name: impl Into<String>, determining_set: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            determining_set: determining_set.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Generator fibers: at each grid point an `n x m` matrix whose column `j`
/// is `Phi_j(omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberField {
    grid: OmegaGrid,
    fiber_dim: usize,
    generators: usize,
    data: Vec<ComplexMatrix>,
    pub metadata: ModelMetadata,
}

impl FiberField {
    pub fn new(grid: OmegaGrid, fiber_dim: usize, generators: usize, data: Vec<ComplexMatrix>, metadata: ModelMetadata) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Dimension(format!("{} fiber matrices for {} grid points", data.len(), grid.len())));
        }
        if let Some((p, m)) = data.iter().enumerate().find(|(_, m)| m.rows() != fiber_dim || m.cols() != generators) {
            return Err(Error::Dimension(format!(
                "fiber matrix at point {p} is {}x{}, expected {fiber_dim}x{generators}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Self { grid, fiber_dim, generators, data, metadata })
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn fibers(&self) -> &[ComplexMatrix] {
        &self.data
    }

    pub fn fiber(&self, point: usize) -> &ComplexMatrix {
        &self.data[point]
    }

    /// `sum_omega w(omega) |Phi_j(omega)|^2` for each generator.
    pub fn generator_norms_sqr(&self) -> Vec<f64> {
        (0..self.generators)
            .map(|j| {
                self.data
                    .iter()
                    .zip(&self.grid.weights)
                    .map(|(f, w)| w * (0..self.fiber_dim).map(|k| f[(k, j)].norm_sqr()).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    /// Same fibers multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { data: self.data.iter().map(|f| f.scale(c)).collect(), ..self.clone() }
    }
}

/// `m x m` Gramians of the generator fibers at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianField {
    grid: OmegaGrid,
    data: Vec<ComplexMatrix>,
}

impl GramianField {
    /// Wraps per-point Gramians after checking they are Hermitian PSD.
    pub fn new(grid: OmegaGrid, data: Vec<ComplexMatrix>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Dimension(format!("{} Gramians for {} grid points", data.len(), grid.len())));
        }
        let m = data.first().map_or(0, ComplexMatrix::rows);
        for (p, g) in data.iter().enumerate() {
            if g.rows() != m || g.cols() != m {
                return Err(Error::Dimension(format!("Gramian at point {p} is {}x{}", g.rows(), g.cols())));
            }
            let ev = numerics::hermitian_eigenvalues(g)?;
            let scale = g.frobenius_norm();
            if ev.first().is_some_and(|&e| e < -1e-10 * scale) {
                return Err(Error::Contract(format!("Gramian at point {p} is not positive semidefinite")));
            }
        }
        Ok(Self { grid, data })
    }

    pub(crate) fn from_parts_unchecked(grid: OmegaGrid, data: Vec<ComplexMatrix>) -> Self {
        Self { grid, data }
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn generator_count(&self) -> usize {
        self.data.first().map_or(0, ComplexMatrix::rows)
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.data
    }

    pub fn at(&self, point: usize) -> &ComplexMatrix {
        &self.data[point]
    }

    /// Ascending eigenvalues at every point.
    pub fn spectra(&self) -> Vec<Vec<f64>> {
        self.data
            .par_iter()
            .map(|g| numerics::hermitian_eigenvalues(g).expect("Gramian fields hold Hermitian matrices"))
            .collect()
    }
}

/// `G(omega) = Phi(omega)^T conj(Phi(omega))`, i.e. `G_ij = <Phi_i, Phi_j>`.
pub fn fiber_gramian(fiber: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (fiber.rows(), fiber.cols());
    let mut g = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v: Complex64 = (0..n).map(|k| fiber[(k, i)] * fiber[(k, j)].conj()).sum();
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
        g[(i, i)].im = 0.0;
    }
    g
}

pub fn gramian_field(phi: &FiberField) -> GramianField {
    let data = phi.data.par_iter().map(fiber_gramian).collect();
    GramianField::from_parts_unchecked(phi.grid.clone(), data)
}

/// Pointwise dimension of the range function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionProfile {
    pub ranks: Vec<usize>,
    pub length: usize,
    pub rank_histogram: BTreeMap<usize, usize>,
}

pub fn dimension_profile(g: &GramianField, tol: &Tolerance) -> DimensionProfile {
    let ranks: Vec<usize> = g.data.par_iter().map(|m| numerics::numerical_rank(m, tol)).collect();
    let mut rank_histogram = BTreeMap::new();
    for &r in &ranks {
        *rank_histogram.entry(r).or_insert(0) += 1;
    }
    DimensionProfile { length: ranks.iter().copied().max().unwrap_or(0), ranks, rank_histogram }
}

/// Extreme positive Gramian eigenvalues over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformFrameBounds {
    pub alpha: f64,
    pub beta: f64,
    pub positive_spectrum_present: bool,
    /// Grid index where `alpha` is attained.
    pub alpha_point: Option<usize>,
    /// Grid index where `beta` is attained.
    pub beta_point: Option<usize>,
}

/// Positive part of an ascending spectrum under the rank cutoff.
pub fn positive_eigenvalues<'a>(ascending: &'a [f64], tol: &Tolerance) -> &'a [f64] {
    let top = ascending.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let cut = tol.cutoff(top);
    let first = ascending.iter().position(|&e| e > cut).unwrap_or(ascending.len());
    &ascending[first..]
}

pub fn frame_bounds_from_spectra(spectra: &[Vec<f64>], tol: &Tolerance) -> UniformFrameBounds {
    let mut out = UniformFrameBounds {
        alpha: 0.0,
        beta: 0.0,
        positive_spectrum_present: false,
        alpha_point: None,
        beta_point: None,
    };
    for (p, ev) in spectra.iter().enumerate() {
        let pos = positive_eigenvalues(ev, tol);
        let (Some(&lo), Some(&hi)) = (pos.first(), pos.last()) else { continue };
        if !out.positive_spectrum_present || lo < out.alpha {
            out.alpha = lo;
            out.alpha_point = Some(p);
        }
        if !out.positive_spectrum_present || hi > out.beta {
            out.beta = hi;
            out.beta_point = Some(p);
        }
        out.positive_spectrum_present = true;
    }
    out
}

pub fn uniform_frame_bounds(g: &GramianField, tol: &Tolerance) -> UniformFrameBounds {
    frame_bounds_from_spectra(&g.spectra(), tol)
}
