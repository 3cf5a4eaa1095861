//! Translate systems `{T_h phi_j : h in H}` on a finite abelian group and
//! their fiberization over a section of `G^ / H*`.
//!
//! Normalization: with the unitary DFT, the fiber at `omega` is
//! `sqrt(|H|) (f^(omega + delta))_{delta in H*}` and each section point has
//! weight `1 / |H|`. The map is isometric, and the fiber Gramian spectra are
//! exactly the frame bounds of the translates (no stray factor `|H|`).

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::{annihilator, dft, section, FiniteAbelianGroup, Subgroup};
use crate::container::{self, Encoding};
use crate::error::{Error, Result};
use crate::model::{self, FiberField, GridKind, ModelMetadata, OmegaGrid};
use crate::numerics::{self, ComplexMatrix, SubspaceBasis, Tolerance};

pub const TRANSLATE_FORMAT: &str = "mispace-translate";

#[derive(Debug, Clone, PartialEq)]
pub struct TranslateSystem {
    subgroup: Subgroup,
    generators: Vec<Vec<Complex64>>,
}

impl TranslateSystem {
    pub fn new(subgroup: Subgroup, generators: Vec<Vec<Complex64>>) -> Result<Self> {
        let order = subgroup.parent().order();
        if let Some(g) = generators.iter().find(|g| g.len() != order) {
            return Err(Error::Dimension(format!("generator has length {}, the group has order {order}", g.len())));
        }
        if generators.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("generator values must be finite".into()));
        }
        Ok(Self { subgroup, generators })
    }

    /// `m` generators with i.i.d. standard complex Gaussian values.
    pub fn random(subgroup: Subgroup, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = subgroup.parent().order();
        let generators = (0..m)
            .map(|_| (0..order).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
            .collect();
        Self { subgroup, generators }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.subgroup.parent()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn generators(&self) -> &[Vec<Complex64>] {
        &self.generators
    }

    /// Generators `psi_i = sum_j a_ij phi_j`.
    pub fn reduced(&self, a: &ComplexMatrix) -> Result<Self> {
        if a.cols() != self.generators.len() {
            return Err(Error::Dimension(format!(
                "reduction matrix has {} columns but the system has {} generators",
                a.cols(),
                self.generators.len()
            )));
        }
        let order = self.group().order();
        let generators = (0..a.rows())
            .map(|i| {
                (0..order)
                    .map(|x| (0..a.cols()).map(|j| a[(i, j)] * self.generators[j][x]).sum())
                    .collect()
            })
            .collect();
        Ok(Self { subgroup: self.subgroup.clone(), generators })
    }
}

/// `(T_h f)(x) = f(x - h)`.
pub fn translate(group: &FiniteAbelianGroup, f: &[Complex64], h: usize) -> Vec<Complex64> {
    let minus_h = group.neg(h);
    (0..group.order()).map(|x| f[group.add(x, minus_h)]).collect()
}

fn fibers_of(subgroup: &Subgroup, fhat: &[Complex64], section: &[usize], hstar: &Subgroup) -> Vec<Vec<Complex64>> {
    let g = subgroup.parent();
    let scale = (subgroup.order() as f64).sqrt();
    section
        .iter()
        .map(|&w| hstar.elements().iter().map(|&d| fhat[g.add(w, d)] * scale).collect())
        .collect()
}

/// Fiber of one function on `G`: `sqrt(|H|) (f^(omega + delta))_delta` at
/// each section point.
pub fn fiberize_function(subgroup: &Subgroup, f: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
    let fhat = dft(subgroup.parent(), f)?;
    Ok(fibers_of(subgroup, &fhat, &section(subgroup), &annihilator(subgroup)))
}

fn section_grid(subgroup: &Subgroup, section: &[usize]) -> OmegaGrid {
    let g = subgroup.parent();
    let coords = section.iter().map(|&w| g.element(w).iter().map(|&c| c as f64).collect()).collect();
    let weights = vec![1.0 / subgroup.order() as f64; section.len()];
    OmegaGrid::new(GridKind::Exact, vec![section.len()], coords, weights).expect("section weights are positive")
}

pub fn fiberize_group(ts: &TranslateSystem) -> Result<FiberField> {
    let h = &ts.subgroup;
    let g = h.parent();
    let sec = section(h);
    let hstar = annihilator(h);
    let per_generator = ts
        .generators
        .par_iter()
        .map(|f| Ok(fibers_of(h, &dft(g, f)?, &sec, &hstar)))
        .collect::<Result<Vec<_>>>()?;
    let n = hstar.order();
    let data = (0..sec.len())
        .map(|p| {
            let cols: Vec<Vec<Complex64>> = per_generator.iter().map(|fib| fib[p].clone()).collect();
            ComplexMatrix::from_columns(n, &cols)
        })
        .collect();
    let meta = ModelMetadata::new("translate-system", "characters of G restricted to H")
        .with_param("orders", g.orders().to_vec())
        .with_param("subgroup_generators", serde_json::to_value(h.generators())?)
        .with_param("annihilator", hstar.elements().iter().map(|&e| g.element(e)).collect::<Vec<_>>())
        .with_param("section", sec.iter().map(|&e| g.element(e)).collect::<Vec<_>>());
    FiberField::new(section_grid(h, &sec), n, ts.generators.len(), data, meta)
}

/// Unitary matrix of the fiberization `C^|G| -> (+)_omega C^|H*|` with the
/// section weights folded in. Row `p * |H*| + d` is fiber coordinate `d` at
/// section point `p`.
pub fn fiberization_matrix(subgroup: &Subgroup) -> ComplexMatrix {
    let g = subgroup.parent();
    let (sec, hstar) = (section(subgroup), annihilator(subgroup));
    let n = hstar.order();
    let norm = 1.0 / (g.order() as f64).sqrt();
    ComplexMatrix::from_fn(g.order(), g.order(), |row, x| {
        let gamma = g.add(sec[row / n], hstar.elements()[row % n]);
        g.character(x, gamma).conj() * norm
    })
}

/// Orthogonal projector onto `{f : Tf(omega) in span of the fibers of
/// `field` at omega}`, the space with range function `Im field(omega)`.
pub fn range_function_projector(subgroup: &Subgroup, field: &FiberField, tol: &Tolerance) -> Result<ComplexMatrix> {
    let u = fiberization_matrix(subgroup);
    let n = field.fiber_dim();
    if field.grid().len() * n != u.rows() {
        return Err(Error::Dimension("fiber field does not match the fiberization of this subgroup".into()));
    }
    let mut block = ComplexMatrix::zeros(u.rows(), u.rows());
    for (p, fiber) in field.fibers().iter().enumerate() {
        let proj = numerics::range_basis(fiber, tol).projector();
        for i in 0..n {
            for j in 0..n {
                block[(p * n + i, p * n + j)] = proj[(i, j)];
            }
        }
    }
    Ok(&(&u.adjoint() * &block) * &u)
}

/// The `|H| m` translates `T_h phi_j` as columns (generator-major).
pub fn synthesis_matrix(ts: &TranslateSystem) -> ComplexMatrix {
    let g = ts.group();
    let cols: Vec<Vec<Complex64>> = ts
        .generators
        .iter()
        .flat_map(|f| ts.subgroup.elements().iter().map(move |&h| translate(g, f, h)))
        .collect();
    ComplexMatrix::from_columns(g.order(), &cols)
}

/// Orthogonal projector onto the span of all translates.
pub fn translate_span_projector(ts: &TranslateSystem, tol: &Tolerance) -> ComplexMatrix {
    numerics::range_basis(&synthesis_matrix(ts), tol).projector()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectFrameBounds {
    pub alpha: f64,
    pub beta: f64,
    /// Dimension of the span of the translates.
    pub span_dim: usize,
}

/// Extreme positive eigenvalues of the frame operator `K K*` of the
/// translates, computed in `C^|G|` without any Fourier transform.
pub fn translate_frame_oracle(ts: &TranslateSystem, tol: &Tolerance) -> Result<DirectFrameBounds> {
    let k = synthesis_matrix(ts);
    // K K* and K* K share their non-zero spectrum; take the smaller one.
    let gram = if k.rows() <= k.cols() { &k * &k.adjoint() } else { &k.adjoint() * &k };
    let eig = numerics::hermitian_eigenvalues(&gram)?;
    let pos = model::positive_eigenvalues(&eig, tol);
    Ok(DirectFrameBounds {
        alpha: pos.first().copied().unwrap_or(0.0),
        beta: pos.last().copied().unwrap_or(0.0),
        span_dim: pos.len(),
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct TranslateHeader {
    format: String,
    schema_version: u32,
    orders: Vec<usize>,
    subgroup_generators: Vec<Vec<usize>>,
    m: usize,
}

/// Translate-system file: header `{orders, subgroup_generators, m}` and the
/// generator values, generator-major, elements in lexicographic order.
pub fn to_bytes(ts: &TranslateSystem, encoding: Encoding) -> Result<Vec<u8>> {
    let header = TranslateHeader {
        format: TRANSLATE_FORMAT.into(),
        schema_version: model::io::SCHEMA_VERSION,
        orders: ts.group().orders().to_vec(),
        subgroup_generators: ts.subgroup.generators().to_vec(),
        m: ts.generators.len(),
    };
    let values: Vec<Complex64> = ts.generators.iter().flatten().copied().collect();
    container::write(&header, &values, encoding)
}

pub fn from_bytes(bytes: &[u8]) -> Result<TranslateSystem> {
    let (raw, values) = container::read(bytes)?;
    container::expect_format(&raw, TRANSLATE_FORMAT)?;
    let header: TranslateHeader = container::header_as(&raw)?;
    if header.schema_version != model::io::SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {}", header.schema_version)));
    }
    let group = FiniteAbelianGroup::new(header.orders)?;
    let subgroup = Subgroup::generated(&group, header.subgroup_generators)?;
    let order = group.order();
    if values.len() != header.m * order {
        return Err(Error::Parse(format!("payload has {} values, expected m*|G| = {}", values.len(), header.m * order)));
    }
    TranslateSystem::new(subgroup, values.chunks(order.max(1)).map(<[_]>::to_vec).collect())
}

pub fn save(ts: &TranslateSystem, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    std::fs::write(path, to_bytes(ts, encoding)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<TranslateSystem> {
    from_bytes(&std::fs::read(path)?)
}

/// Basis of the span of the translates, for subspace comparisons.
pub fn translate_span(ts: &TranslateSystem, tol: &Tolerance) -> SubspaceBasis {
    numerics::range_basis(&synthesis_matrix(ts), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(n: usize) -> Vec<Complex64> {
        let mut d = vec![Complex64::new(0.0, 0.0); n];
        d[0] = Complex64::new(1.0, 0.0);
        d
    }

    #[test]
    fn delta_in_z4_with_half_subgroup() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let h = Subgroup::generated(&g, vec![vec![2]]).unwrap();
        let field = fiberize_group(&TranslateSystem::new(h, vec![delta(4)]).unwrap()).unwrap();
        assert_eq!(field.grid().len(), 2);
        assert_eq!(field.grid().weights, vec![0.5, 0.5]);
        let expected = 0.5 * 2f64.sqrt();
        for f in field.fibers() {
            assert!(f.as_slice().iter().all(|v| (v.re - expected).abs() < 1e-15 && v.im.abs() < 1e-15));
        }
    }

    #[test]
    fn delta_translates_over_whole_group_are_orthonormal() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        let ts = TranslateSystem::new(Subgroup::whole(&g), vec![delta(4)]).unwrap();
        let tol = Tolerance::default();
        let direct = translate_frame_oracle(&ts, &tol).unwrap();
        assert!((direct.alpha - 1.0).abs() < 1e-12 && (direct.beta - 1.0).abs() < 1e-12);
        let fb = model::uniform_frame_bounds(&model::gramian_field(&fiberize_group(&ts).unwrap()), &tol);
        assert!((fb.alpha - 1.0).abs() < 1e-12 && (fb.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fiberization_matrix_is_unitary() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let h = Subgroup::generated(&g, vec![vec![1, 2]]).unwrap();
        let u = fiberization_matrix(&h);
        assert!((&(&u * &u.adjoint()) - &ComplexMatrix::identity(8)).max_abs() < 1e-12);
    }

    #[test]
    fn file_round_trip() {
        let g = FiniteAbelianGroup::cyclic(8).unwrap();
        let h = Subgroup::generated(&g, vec![vec![4]]).unwrap();
        let ts = TranslateSystem::random(h, 2, 7);
        for enc in [Encoding::Csv, Encoding::Binary] {
            assert_eq!(from_bytes(&to_bytes(&ts, enc).unwrap()).unwrap(), ts);
        }
    }
}
