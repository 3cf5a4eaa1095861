//! Linear reductions `Psi = A Phi^t` of a generator set and the certificates
//! that decide whether they keep generating the same MI space and whether
//! they keep a uniform frame.
//!
//! Over a sampled grid, "for a.e. omega" is read as "at every grid point",
//! optionally relaxed by [`CertifyOptions::ae_exception_fraction`]; every
//! certificate names the points that fail and the point where each extremum
//! is attained.

mod sampler;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, FiberField, GramianField, UniformFrameBounds};
use crate::numerics::{self, ComplexMatrix, Tolerance};

pub use sampler::{sample_random_reductions, Distribution, SamplerReport};

/// Slack allowed when comparing measured reduced spectra with the predicted
/// frame bounds.
pub const SANDWICH_SLACK: f64 = 1e-8;

/// Coefficient matrix `A` (`l x m`) of a reduction `Psi_i = sum_j a_ij Phi_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReductionMatrix(ComplexMatrix);

impl ReductionMatrix {
    pub fn new(matrix: ComplexMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Number of reduced generators `l`.
    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    /// Number of original generators `m`.
    pub fn cols(&self) -> usize {
        self.0.cols()
    }
}

impl From<ComplexMatrix> for ReductionMatrix {
    fn from(m: ComplexMatrix) -> Self {
        Self(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub tol: Tolerance,
    /// Fraction of grid points allowed to fail a pointwise test while the
    /// verdict still counts as holding almost everywhere.
    pub ae_exception_fraction: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { tol: Tolerance::default(), ae_exception_fraction: 0.0 }
    }
}

impl CertifyOptions {
    pub fn validated(self) -> Result<Self> {
        self.tol.validated()?;
        if !(0.0..=1.0).contains(&self.ae_exception_fraction) {
            return Err(Error::Contract(format!(
                "ae_exception_fraction must lie in [0, 1], got {}",
                self.ae_exception_fraction
            )));
        }
        Ok(self)
    }
}

fn check_cols(g: &GramianField, a: &ReductionMatrix) -> Result<()> {
    if a.cols() != g.generator_count() {
        return Err(Error::Dimension(format!(
            "reduction matrix has {} columns but the model has {} generators",
            a.cols(),
            g.generator_count()
        )));
    }
    Ok(())
}

/// Maximal rank of the Gramian over the grid, the length of the MI space.
pub fn model_length(g: &GramianField, tol: &Tolerance) -> usize {
    model::dimension_profile(g, tol).length
}

/// `Psi(omega) = Phi(omega) A^T`, the fibers of the reduced generators.
pub fn apply_reduction(phi: &FiberField, a: &ReductionMatrix) -> Result<FiberField> {
    if a.cols() != phi.generator_count() {
        return Err(Error::Dimension(format!(
            "reduction matrix has {} columns but the model has {} generators",
            a.cols(),
            phi.generator_count()
        )));
    }
    let at = a.matrix().transpose();
    let data = phi.fibers().par_iter().map(|f| f * &at).collect();
    let mut meta = phi.metadata.clone();
    meta.params.insert("reduced_generators".into(), a.rows().into());
    FiberField::new(phi.grid().clone(), phi.fiber_dim(), a.rows(), data, meta)
}

/// `G_Psi(omega) = A G_Phi(omega) A*`.
pub fn reduced_gramian(g: &GramianField, a: &ReductionMatrix) -> Result<GramianField> {
    check_cols(g, a)?;
    let data = g
        .matrices()
        .par_iter()
        .map(|m| m.congruence(a.matrix()).map(|r| r.symmetrized()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GramianField::from_parts_unchecked(g.grid().clone(), data))
}

/// Pointwise rank comparison `rk G(omega)` vs `rk A G(omega) A*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCertificate {
    pub preserving: bool,
    pub failing_points: Vec<usize>,
    pub failing_fraction: f64,
    /// `(rk G(omega), rk A G(omega) A*)` for every grid point.
    pub per_point: Vec<(usize, usize)>,
    pub tol: Tolerance,
    pub ae_exception_fraction: f64,
}

pub(crate) fn gramian_ranks(g: &GramianField, tol: &Tolerance) -> Vec<usize> {
    g.matrices().par_iter().map(|m| numerics::numerical_rank(m, tol)).collect()
}

pub(crate) fn generator_certificate_with_ranks(
    g: &GramianField,
    ranks: &[usize],
    a: &ReductionMatrix,
    opts: &CertifyOptions,
) -> Result<GeneratorCertificate> {
    let reduced: Vec<usize> = g
        .matrices()
        .par_iter()
        .map(|m| m.congruence(a.matrix()).map(|r| numerics::numerical_rank(&r, &opts.tol)))
        .collect::<Result<_>>()?;
    let per_point: Vec<(usize, usize)> = ranks.iter().copied().zip(reduced).collect();
    let failing_points: Vec<usize> =
        per_point.iter().enumerate().filter(|(_, (r, s))| r != s).map(|(p, _)| p).collect();
    let failing_fraction = if per_point.is_empty() { 0.0 } else { failing_points.len() as f64 / per_point.len() as f64 };
    Ok(GeneratorCertificate {
        preserving: failing_fraction <= opts.ae_exception_fraction,
        failing_points,
        failing_fraction,
        per_point,
        tol: opts.tol,
        ae_exception_fraction: opts.ae_exception_fraction,
    })
}

/// Does `Psi = A Phi^t` generate the same MI space as `Phi`?
pub fn is_generator_preserving(g: &GramianField, a: &ReductionMatrix, opts: &CertifyOptions) -> Result<GeneratorCertificate> {
    check_cols(g, a)?;
    if a.rows() > a.cols() {
        return Err(Error::Hypothesis(format!(
            "l = {} reduced generators exceeds m = {} original generators",
            a.rows(),
            a.cols()
        )));
    }
    generator_certificate_with_ranks(g, &gramian_ranks(g, &opts.tol), a, opts)
}

/// `delta = inf_omega F[Ker A, Im G(omega)]` over the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedrichsInfimum {
    pub delta: f64,
    /// Grid index attaining the minimum (first one on ties).
    pub argmin: Option<usize>,
    pub per_point: Vec<f64>,
}

pub fn friedrichs_infimum(g: &GramianField, a: &ReductionMatrix, tol: &Tolerance) -> Result<FriedrichsInfimum> {
    check_cols(g, a)?;
    let kernel = numerics::kernel_basis(a.matrix(), tol);
    let per_point: Vec<f64> = g
        .matrices()
        .par_iter()
        .map(|m| numerics::friedrichs_sine(&kernel, &numerics::range_basis(m, tol), tol))
        .collect::<Result<_>>()?;
    let mut argmin = None;
    let mut delta = 1.0;
    for (p, &f) in per_point.iter().enumerate() {
        if argmin.is_none() || f < delta {
            delta = f;
            argmin = Some(p);
        }
    }
    Ok(FriedrichsInfimum { delta, argmin, per_point })
}

/// Verdict on whether `Psi = A Phi^t` is again a uniform frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCertificate {
    pub condition1: GeneratorCertificate,
    pub delta: f64,
    pub delta_point: Option<usize>,
    pub certified: bool,
    /// Frame bounds of the original generators.
    pub model_bounds: UniformFrameBounds,
    /// Smallest non-zero singular value of `A`.
    pub sigma_min: f64,
    /// Spectral norm of `A`.
    pub norm: f64,
    /// `[sigma(A)^2 alpha delta^2, |A|^2 beta]`, present when certified.
    pub predicted_bounds: Option<[f64; 2]>,
    pub measured_bounds: UniformFrameBounds,
    /// Whether every positive reduced eigenvalue lies in the predicted
    /// interval (within [`SANDWICH_SLACK`]); present when certified.
    pub sandwich_holds: Option<bool>,
    pub per_point_sine: Vec<f64>,
}

fn check_length_hypothesis(g: &GramianField, a: &ReductionMatrix, tol: &Tolerance) -> Result<usize> {
    check_cols(g, a)?;
    let length = model_length(g, tol);
    let (l, m) = (a.rows(), a.cols());
    if l < length || l > m {
        return Err(Error::Hypothesis(format!(
            "the number of reduced generators must satisfy length <= l <= m, got length = {length}, l = {l}, m = {m}"
        )));
    }
    Ok(length)
}

/// Refuses a numerically zero `A` with [`Error::ZeroMatrix`].
pub fn certify_frame_reduction(g: &GramianField, a: &ReductionMatrix, opts: &CertifyOptions) -> Result<FrameCertificate> {
    check_length_hypothesis(g, a, &opts.tol)?;
    let tol = &opts.tol;
    let sv = numerics::singular_values(a.matrix());
    let norm = sv.first().copied().unwrap_or(0.0);
    let rank = numerics::rank_of_values(&sv, tol);
    if rank == 0 {
        return Err(Error::ZeroMatrix(norm));
    }
    let sigma_min = sv[rank - 1];
    let condition1 = is_generator_preserving(g, a, opts)?;
    let inf = friedrichs_infimum(g, a, tol)?;
    let model_bounds = model::uniform_frame_bounds(g, tol);
    let reduced = reduced_gramian(g, a)?;
    let measured_bounds = model::uniform_frame_bounds(&reduced, tol);


    let certified = condition1.preserving && inf.delta > 0.0;
    let (predicted_bounds, sandwich_holds) = if certified {
        let lo = sigma_min * sigma_min * model_bounds.alpha * inf.delta * inf.delta;
        let hi = norm * norm * model_bounds.beta;
        let holds = !measured_bounds.positive_spectrum_present
            || (measured_bounds.alpha >= lo - SANDWICH_SLACK && measured_bounds.beta <= hi + SANDWICH_SLACK);
        (Some([lo, hi]), Some(holds))
    } else {
        (None, None)
    };

    Ok(FrameCertificate {
        condition1,
        delta: inf.delta,
        delta_point: inf.argmin,
        certified,
        model_bounds,
        sigma_min,
        norm,
        predicted_bounds,
        measured_bounds,
        sandwich_holds,
        per_point_sine: inf.per_point,
    })
}

/// Frame-preservation test for reductions to exactly `length` generators:
/// `AA*` invertible and `sup_omega |(I - A*(AA*)^-1 A) G G^+| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoorePenroseReport {
    pub aa_star_invertible: bool,
    pub sup_norm: f64,
    pub sup_point: Option<usize>,
    pub passes: bool,
    pub per_point: Vec<f64>,
}

pub fn moore_penrose_criterion(g: &GramianField, a: &ReductionMatrix, opts: &CertifyOptions) -> Result<MoorePenroseReport> {
    check_cols(g, a)?;
    let tol = &opts.tol;
    let length = model_length(g, tol);
    if a.rows() != length {
        return Err(Error::Hypothesis(format!(
            "the criterion needs exactly l = length reduced generators, got l = {}, length = {length}",
            a.rows()
        )));
    }
    let am = a.matrix();
    let aa = am * &am.adjoint();
    let aa_star_invertible = numerics::numerical_rank(&aa, tol) == a.rows();
    // With AA* singular the pseudoinverse still yields the projector onto Ker(A)^perp.
    let row_projector = &(&am.adjoint() * &numerics::pseudoinverse(&aa, tol)) * am;
    let q = &ComplexMatrix::identity(a.cols()) - &row_projector;
    let per_point: Vec<f64> = g
        .matrices()
        .par_iter()
        .map(|m| {
            let p = m * &numerics::pseudoinverse(m, tol);
            (&q * &p).operator_norm()
        })
        .collect();
    let mut sup_norm = 0.0;
    let mut sup_point = None;
    for (p, &v) in per_point.iter().enumerate() {
        if sup_point.is_none() || v > sup_norm {
            sup_norm = v;
            sup_point = Some(p);
        }
    }
    let passes = aa_star_invertible && sup_norm < 1.0 - tol.intersection_tol;
    Ok(MoorePenroseReport { aa_star_invertible, sup_norm, sup_point, passes, per_point })
}

/// One row of a grid-refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementEntry {
    pub grid_n: usize,
    pub points: usize,
    pub delta: f64,
    pub delta_coords: Option<Vec<f64>>,
    pub certified: bool,
    /// Moore-Penrose supremum, when `l` equals the model length.
    pub moore_penrose_sup: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub entries: Vec<RefinementEntry>,
    /// `delta` strictly decreases under every refinement: a finite grid
    /// certifies, but the continuum infimum may well be zero.
    pub delta_decay_warning: bool,
}

/// Re-runs the frame certificate on successively finer grids.
pub fn refinement_study(
    grid_ns: &[usize],
    build: impl Fn(usize) -> Result<FiberField>,
    a: &ReductionMatrix,
    opts: &CertifyOptions,
) -> Result<RefinementReport> {
    let mut entries = Vec::with_capacity(grid_ns.len());
    for &n in grid_ns {
        let field = build(n)?;
        let g = model::gramian_field(&field);
        let cert = certify_frame_reduction(&g, a, opts)?;
        let moore_penrose_sup = if a.rows() == model_length(&g, &opts.tol) {
            Some(moore_penrose_criterion(&g, a, opts)?.sup_norm)
        } else {
            None
        };
        entries.push(RefinementEntry {
            grid_n: n,
            points: field.grid().len(),
            delta: cert.delta,
            delta_coords: cert.delta_point.map(|p| field.grid().coords[p].clone()),
            certified: cert.certified,
            moore_penrose_sup,
        });
    }
    let delta_decay_warning = entries.len() >= 2 && entries.windows(2).all(|w| w[1].delta < w[0].delta);
    Ok(RefinementReport { entries, delta_decay_warning })
}
