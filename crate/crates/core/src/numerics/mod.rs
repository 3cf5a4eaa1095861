//! Dense complex linear algebra: Hermitian eigendecompositions, SVD,
//! pseudoinverse, numerical rank and Friedrichs angles between subspaces.
//!
//! Every routine is a pure function of its inputs. Ties between equal
//! eigenvalues or singular values are broken by the original index so that
//! identical input bits give identical output bits.

mod jacobi;
mod matrix;
pub mod oracle;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use matrix::ComplexMatrix;

/// Thresholds that turn exact-rank statements into numerical ones.
///
/// The rank cutoff for a matrix `M` is `max(rank_rtol * sigma_max(M), abs_floor)`.
/// `intersection_tol` decides when a principal cosine counts as 1, i.e. when a
/// direction is shared by two subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_rtol: f64,
    pub abs_floor: f64,
    pub intersection_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rank_rtol: 1e-8, abs_floor: 1e-12, intersection_tol: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(rank_rtol: f64, abs_floor: f64) -> Result<Self> {
        Self { rank_rtol, abs_floor, ..Self::default() }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rank_rtol) || !ok(self.abs_floor) || !ok(self.intersection_tol) {
            return Err(Error::Contract(format!(
                "tolerances must be finite and strictly positive, got {self:?}"
            )));
        }
        Ok(self)
    }

    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.rank_rtol * sigma_max).max(self.abs_floor)
    }
}

/// `M = U diag(eigenvalues) U*` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let d = ComplexMatrix::from_diag(&self.eigenvalues);
        &(u * &d) * &u.adjoint()
    }
}

/// Thin SVD `M = U diag(s) V*`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s = ComplexMatrix::from_diag(&self.singular_values);
        &(&self.u * &s) * &self.v.adjoint()
    }
}

/// Orthonormal basis of a subspace of `C^ambient_dim`, stored as columns.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    basis: ComplexMatrix,
}

impl SubspaceBasis {
    /// Wraps columns that must already be orthonormal (within 1e-10).
    pub fn from_orthonormal(basis: ComplexMatrix) -> Result<Self> {
        let gram = &basis.adjoint() * &basis;
        let err = (&gram - &ComplexMatrix::identity(basis.cols())).frobenius_norm();
        if err > 1e-10 {
            return Err(Error::Contract(format!("basis columns are not orthonormal (defect {err:e})")));
        }
        Ok(Self { ambient_dim: basis.rows(), basis })
    }

    /// Orthonormal basis for the span of arbitrary vectors.
    pub fn span_of(ambient_dim: usize, vectors: &[Vec<Complex64>], tol: &Tolerance) -> Self {
        if vectors.is_empty() {
            return Self::trivial(ambient_dim);
        }
        range_basis(&ComplexMatrix::from_columns(ambient_dim, vectors), tol)
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: ComplexMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: ComplexMatrix::identity(ambient_dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// Orthogonal projector `B B*`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * &self.basis.adjoint()
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Contract(format!("expected a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let defect = m.hermitian_defect();
    let scale = m.frobenius_norm().max(1.0);
    if defect > 1e-10 * scale {
        return Err(Error::Contract(format!("matrix is not Hermitian (|M - M*| = {defect:e})")));
    }
    Ok(())
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// the Jacobi sweeps to absorb roundoff from assembly.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    check_hermitian(m)?;
    let (values, vectors) = jacobi::hermitian(m.symmetrized(), true);
    let vectors = vectors.expect("vectors requested");
    let order = ascending_order(&values);
    Ok(SpectralDecomposition {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: vectors.select_columns(&order),
    })
}

/// Ascending eigenvalues of a Hermitian matrix, without eigenvectors.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let (mut values, _) = jacobi::hermitian(m.symmetrized(), false);
    values.sort_by(f64::total_cmp);
    Ok(values)
}

struct FullSvd {
    /// One value per column of the input, descending.
    sigma: Vec<f64>,
    /// `M V`, columns in the same order as `sigma`.
    w: ComplexMatrix,
    /// Full cols x cols unitary.
    v: Option<ComplexMatrix>,
}

fn full_svd(m: &ComplexMatrix, want_v: bool) -> FullSvd {
    let (w, v) = jacobi::orthogonalize_columns(m, want_v);
    let raw: Vec<f64> = (0..w.cols()).map(|j| jacobi::column_norm_sqr(&w, j).sqrt()).collect();
    let order = descending_order(&raw);
    FullSvd {
        sigma: order.iter().map(|&i| raw[i]).collect(),
        w: w.select_columns(&order),
        v: v.map(|v| v.select_columns(&order)),
    }
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s = full_svd(m, false).sigma;
    s.truncate(m.rows().min(m.cols()));
    s
}

/// Thin singular value decomposition.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let k = m.rows().min(m.cols());
    let full = full_svd(m, true);
    let v = full.v.expect("v requested").select_columns(&(0..k).collect::<Vec<_>>());
    let sigma: Vec<f64> = full.sigma[..k].to_vec();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let noise = smax * (m.rows().max(m.cols()) as f64) * f64::EPSILON;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for (j, &s) in sigma.iter().enumerate() {
        if s > noise && s > 0.0 {
            cols.push(full.w.column(j).into_iter().map(|z| z / s).collect());
        } else {
            cols.push(Vec::new());
        }
    }
    let u = orthonormal_completion(m.rows(), cols);
    Svd { u, singular_values: sigma, v }
}

/// Re-orthonormalizes the given columns in order; empty columns are filled
/// with the first standard basis vector that is independent of the others.
fn orthonormal_completion(rows: usize, mut cols: Vec<Vec<Complex64>>) -> ComplexMatrix {
    let mut done: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    let mut next_unit = 0;
    for col in cols.iter_mut() {
        let mut candidate = if col.is_empty() { None } else { Some(std::mem::take(col)) };
        loop {
            let mut x = match candidate.take() {
                Some(x) => x,
                None => {
                    let mut e = vec![Complex64::new(0.0, 0.0); rows];
                    if next_unit < rows {
                        e[next_unit] = Complex64::new(1.0, 0.0);
                    }
                    next_unit += 1;
                    e
                }
            };
            for _ in 0..2 {
                for d in &done {
                    let proj: Complex64 = d.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                    for (xi, di) in x.iter_mut().zip(d) {
                        *xi -= proj * di;
                    }
                }
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 || next_unit > rows {
                let norm = norm.max(f64::MIN_POSITIVE);
                done.push(x.into_iter().map(|z| z / norm).collect());
                break;
            }
        }
    }
    ComplexMatrix::from_columns(rows, &done)
}

/// Number of singular values strictly above the rank cutoff.
pub fn numerical_rank(m: &ComplexMatrix, tol: &Tolerance) -> usize {
    rank_of_values(&singular_values(m), tol)
}

/// Rank from descending singular values (or absolute eigenvalues).
pub fn rank_of_values(sigma_desc: &[f64], tol: &Tolerance) -> usize {
    let smax = sigma_desc.iter().copied().fold(0.0, f64::max);
    let cut = tol.cutoff(smax);
    sigma_desc.iter().filter(|&&s| s > cut).count()
}

/// Moore-Penrose pseudoinverse, inverting singular values above the cutoff.
pub fn pseudoinverse(m: &ComplexMatrix, tol: &Tolerance) -> ComplexMatrix {
    let d = svd(m);
    let r = rank_of_values(&d.singular_values, tol);
    let mut out = ComplexMatrix::zeros(m.cols(), m.rows());
    for k in 0..r {
        let inv = 1.0 / d.singular_values[k];
        for i in 0..m.cols() {
            let vi = d.v[(i, k)] * inv;
            for j in 0..m.rows() {
                out[(i, j)] += vi * d.u[(j, k)].conj();
            }
        }
    }
    out
}

/// Orthonormal basis of `Im(M)`.
pub fn range_basis(m: &ComplexMatrix, tol: &Tolerance) -> SubspaceBasis {
    let d = svd(m);
    let r = rank_of_values(&d.singular_values, tol);
    SubspaceBasis { ambient_dim: m.rows(), basis: d.u.select_columns(&(0..r).collect::<Vec<_>>()) }
}

/// Orthonormal basis of `Ker(M)`.
pub fn kernel_basis(m: &ComplexMatrix, tol: &Tolerance) -> SubspaceBasis {
    let full = full_svd(m, true);
    let k = m.rows().min(m.cols());
    let r = rank_of_values(&full.sigma[..k], tol);
    let v = full.v.expect("v requested");
    SubspaceBasis { ambient_dim: m.cols(), basis: v.select_columns(&(r..m.cols()).collect::<Vec<_>>()) }
}

/// Cosines of the principal angles between `S` and `T`, descending.
pub fn principal_cosines(s: &SubspaceBasis, t: &SubspaceBasis) -> Result<Vec<f64>> {
    if s.ambient_dim != t.ambient_dim {
        return Err(Error::Contract(format!(
            "subspaces live in different spaces (C^{} vs C^{})",
            s.ambient_dim, t.ambient_dim
        )));
    }
    if s.dim() == 0 || t.dim() == 0 {
        return Ok(Vec::new());
    }
    let cross = &s.basis.adjoint() * &t.basis;
    Ok(singular_values(&cross).into_iter().map(|c| c.min(1.0)).collect())
}

/// Sine of the Friedrichs angle, `F[S,T] = sqrt(1 - G[S,T]^2)`.
///
/// `G` is the largest principal cosine after discarding the ones that count
/// as 1 (those span `S ∩ T`). Trivial subspaces and containments give `G = 0`.
pub fn friedrichs_sine(s: &SubspaceBasis, t: &SubspaceBasis, tol: &Tolerance) -> Result<f64> {
    let cosines = principal_cosines(s, t)?;
    let shared = cosines.iter().take_while(|&&c| c >= 1.0 - tol.intersection_tol).count();
    let g = cosines.get(shared).copied().unwrap_or(0.0).clamp(0.0, 1.0);
    Ok((1.0 - g * g).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: usize, cols: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::new(rows, cols, v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn eig_of_diagonal_is_sorted() {
        let d = hermitian_eig(&ComplexMatrix::from_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0]);
        let i3 = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(i3.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_of_complex_rank_one() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]).unwrap();
        let d = hermitian_eig(&m).unwrap();
        assert!(d.eigenvalues[0].abs() < 1e-14);
        assert!((d.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((&d.reconstruct() - &m).frobenius_norm() < 1e-13);
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(hermitian_eig(&ComplexMatrix::zeros(2, 3)), Err(Error::Contract(_))));
        let m = real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(hermitian_eig(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn svd_trivial_cases() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(2, 3)), vec![0.0, 0.0]);
        assert_eq!(singular_values(&ComplexMatrix::from_diag(&[3.0, 1.0])), vec![3.0, 1.0]);
        let d = svd(&ComplexMatrix::zeros(2, 3));
        assert!((&(&d.u.adjoint() * &d.u) - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rank_defaults() {
        let tol = Tolerance::default();
        assert_eq!(numerical_rank(&ComplexMatrix::identity(3), &tol), 3);
        assert_eq!(numerical_rank(&ComplexMatrix::from_diag(&[1.0, 1e-14]), &tol), 1);
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3, 3), &tol), 0);
    }

    #[test]
    fn pinv_trivial_cases() {
        let tol = Tolerance::default();
        let p = pseudoinverse(&ComplexMatrix::from_diag(&[2.0, 0.0]), &tol);
        assert!((&p - &ComplexMatrix::from_diag(&[0.5, 0.0])).frobenius_norm() < 1e-15);
        let z = pseudoinverse(&ComplexMatrix::zeros(2, 3), &tol);
        assert_eq!((z.rows(), z.cols()), (3, 2));
        assert_eq!(z.max_abs(), 0.0);
        let m = real(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let inv = real(2, 2, &[0.6, -0.2, -0.2, 0.4]);
        assert!((&pseudoinverse(&m, &tol) - &inv).frobenius_norm() < 1e-10);
    }

    #[test]
    fn range_and_kernel_trivial_cases() {
        let tol = Tolerance::default();
        assert_eq!(range_basis(&ComplexMatrix::identity(2), &tol).dim(), 2);
        assert_eq!(kernel_basis(&ComplexMatrix::identity(2), &tol).dim(), 0);
        assert_eq!(range_basis(&ComplexMatrix::zeros(2, 2), &tol).dim(), 0);
        assert_eq!(kernel_basis(&ComplexMatrix::zeros(2, 2), &tol).dim(), 2);
        let k = kernel_basis(&real(1, 2, &[1.0, 0.0]), &tol);
        assert_eq!(k.dim(), 1);
        assert!(k.basis()[(0, 0)].norm() < 1e-15);
        assert!((k.basis()[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn friedrichs_planar_and_containment() {
        let tol = Tolerance::default();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = SubspaceBasis::from_orthonormal(real(2, 1, &[1.0, 0.0])).unwrap();
        let t = SubspaceBasis::from_orthonormal(real(2, 1, &[h, h])).unwrap();
        assert!((friedrichs_sine(&s, &t, &tol).unwrap() - h).abs() < 1e-12);
        let full = SubspaceBasis::full(2);
        assert_eq!(friedrichs_sine(&s, &full, &tol).unwrap(), 1.0);
        assert_eq!(friedrichs_sine(&full, &s, &tol).unwrap(), 1.0);
        assert_eq!(friedrichs_sine(&SubspaceBasis::trivial(2), &s, &tol).unwrap(), 1.0);
        let other = SubspaceBasis::full(3);
        assert!(friedrichs_sine(&s, &other, &tol).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-12).is_err());
        assert!(Tolerance::new(1e-8, f64::NAN).is_err());
        assert!(Tolerance::new(1e-6, 1e-14).is_ok());
        assert_eq!(Tolerance::default().cutoff(0.0), 1e-12);
        assert_eq!(Tolerance::default().cutoff(10.0), 1e-7);
    }
}
