//! Quasi-invariant actions of `Gamma = Z_N` on a finite measure space `X`
//! with a tiling set `C`.
//!
//! `T(gamma) f(x) = J(-gamma, x)^{1/2} f(sigma_{-gamma}(x))` is unitary on
//! `L^2(X, rho)` when `J(gamma, x) = rho(sigma_gamma(x)) / rho(x)`. Unless an
//! explicit measure is given, `rho` is derived from `J` by setting `rho = 1`
//! on `C` and `rho(sigma_gamma(c)) = J(gamma, c)`.
//!
//! The fiber at `alpha in Z_N` is the function on `C`
//! `c -> sqrt(rho(c)) sum_gamma (T(gamma) psi)(c) exp(-2 pi i gamma alpha / N)`,
//! and each `alpha` carries weight `1 / N`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::container::{self, Encoding};
use crate::error::{Error, Result};
use crate::model::{self, FiberField, GridKind, ModelMetadata, OmegaGrid};
use crate::numerics::ComplexMatrix;

pub const ACTION_FORMAT: &str = "mispace-action";

/// Relative tolerance for the cocycle and measure identities.
pub const COCYCLE_TOL: f64 = 1e-10;

/// Witnesses kept per validation report.
pub const MAX_WITNESSES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionSystem {
    gamma_order: usize,
    /// `sigma[gamma][x] = sigma_gamma(x)`.
    sigma: Vec<Vec<usize>>,
    /// `jacobian[gamma][x] = J(gamma, x)`.
    jacobian: Vec<Vec<f64>>,
    tiling_set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NotPermutation { gamma: usize },
    IdentityLaw { x: usize },
    CompositionLaw { gamma: usize, gamma2: usize, x: usize },
    NonPositiveJacobian { gamma: usize, x: usize, value: f64 },
    Cocycle { gamma: usize, gamma2: usize, x: usize, lhs: f64, rhs: f64 },
    TilingUncovered { x: usize },
    TilingOverlap { x: usize, count: usize },
    NonPositiveMeasure { x: usize, value: f64 },
    Measure { gamma: usize, x: usize, expected: f64, found: f64 },
}

impl Violation {
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::NotPermutation { .. } => "sigma_gamma is a bijection",
            Violation::IdentityLaw { .. } => "sigma_0 = id",
            Violation::CompositionLaw { .. } => "sigma_{gamma+gamma'} = sigma_gamma o sigma_gamma'",
            Violation::NonPositiveJacobian { .. } => "J > 0",
            Violation::Cocycle { .. } => "J(gamma+gamma', x) = J(gamma, sigma_gamma'(x)) J(gamma', x)",
            Violation::TilingUncovered { .. } | Violation::TilingOverlap { .. } => "the sets sigma_gamma(C) partition X",
            Violation::NonPositiveMeasure { .. } => "rho > 0",
            Violation::Measure { .. } => "J(gamma, x) = rho(sigma_gamma(x)) / rho(x)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violation_count: usize,
    /// At most [`MAX_WITNESSES`] violations, in check order.
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn summary(&self) -> String {
        let shown: Vec<String> = self.violations.iter().take(3).map(|v| format!("{} violated: {v:?}", v.condition())).collect();
        format!("{} violation(s); {}", self.violation_count, shown.join("; "))
    }
}

struct Collector {
    count: usize,
    list: Vec<Violation>,
}

impl Collector {
    fn push(&mut self, v: Violation) {
        self.count += 1;
        if self.list.len() < MAX_WITNESSES {
            self.list.push(v);
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COCYCLE_TOL * a.abs().max(b.abs()).max(1.0)
}

impl ActionSystem {
    /// Checks table shapes and index ranges only; the action laws are checked
    /// by [`jacobian_cocycle_check`].
    pub fn new(
        gamma_order: usize,
        sigma: Vec<Vec<usize>>,
        jacobian: Vec<Vec<f64>>,
        tiling_set: Vec<usize>,
        measure: Option<Vec<f64>>,
    ) -> Result<Self> {
        if gamma_order == 0 {
            return Err(Error::Contract("Gamma = Z_N needs N >= 1".into()));
        }
        if sigma.len() != gamma_order || jacobian.len() != gamma_order {
            return Err(Error::Dimension(format!(
                "expected {gamma_order} rows in the sigma and jacobian tables, got {} and {}",
                sigma.len(),
                jacobian.len()
            )));
        }
        let size = sigma[0].len();
        if sigma.iter().any(|r| r.len() != size) || jacobian.iter().any(|r| r.len() != size) {
            return Err(Error::Dimension(format!("every sigma and jacobian row must have |X| = {size} entries")));
        }
        if let Some(x) = sigma.iter().flatten().chain(&tiling_set).find(|&&x| x >= size) {
            return Err(Error::Dimension(format!("point index {x} out of range for |X| = {size}")));
        }
        if jacobian.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Contract("jacobian values must be finite".into()));
        }
        if let Some(rho) = &measure {
            if rho.len() != size || rho.iter().any(|v| !v.is_finite()) {
                return Err(Error::Dimension(format!("measure must have |X| = {size} finite entries")));
            }
        }
        Ok(Self { gamma_order, sigma, jacobian, tiling_set, measure })
    }

    /// `Z_N` acting on itself by translation, `C = {0}`, `J = 1`.
    pub fn translation(n: usize) -> Result<Self> {
        let sigma = (0..n).map(|g| (0..n).map(|x| (x + g) % n).collect()).collect();
        Self::new(n, sigma, vec![vec![1.0; n]; n], vec![0], None)
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_order
    }

    pub fn space_size(&self) -> usize {
        self.sigma[0].len()
    }

    pub fn sigma(&self, gamma: usize, x: usize) -> usize {
        self.sigma[gamma % self.gamma_order][x]
    }

    pub fn jacobian(&self, gamma: usize, x: usize) -> f64 {
        self.jacobian[gamma % self.gamma_order][x]
    }

    pub fn tiling_set(&self) -> &[usize] {
        &self.tiling_set
    }

    /// Mutable Jacobian table, for constructing defective systems.
    pub fn jacobian_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.jacobian
    }

    pub fn tiling_set_mut(&mut self) -> &mut Vec<usize> {
        &mut self.tiling_set
    }

    fn neg(&self, gamma: usize) -> usize {
        (self.gamma_order - gamma % self.gamma_order) % self.gamma_order
    }

    /// Which `(gamma, c)` reach each point, if the translates of `C` tile.
    fn tiling_owner(&self) -> Vec<Vec<(usize, usize)>> {
        let mut owner = vec![Vec::new(); self.space_size()];
        for gamma in 0..self.gamma_order {
            for &c in &self.tiling_set {
                owner[self.sigma(gamma, c)].push((gamma, c));
            }
        }
        owner
    }

    fn derived_measure(&self) -> Option<Vec<f64>> {
        let owner = self.tiling_owner();
        owner
            .iter()
            .map(|o| match o.as_slice() {
                [(gamma, c)] => Some(self.jacobian(*gamma, *c)),
                _ => None,
            })
            .collect()
    }

    /// The measure `rho` on `X`: explicit, or derived from `J` and `C`.
    pub fn measure(&self) -> Result<Vec<f64>> {
        match &self.measure {
            Some(rho) => Ok(rho.clone()),
            None => self
                .derived_measure()
                .ok_or_else(|| Error::Validation("the tiling condition fails, so no measure can be derived".into())),
        }
    }

    /// `(T(gamma) f)(x) = J(-gamma, x)^{1/2} f(sigma_{-gamma}(x))`.
    pub fn represent(&self, gamma: usize, f: &[Complex64]) -> Vec<Complex64> {
        let ng = self.neg(gamma);
        (0..self.space_size()).map(|x| f[self.sigma(ng, x)] * self.jacobian(ng, x).sqrt()).collect()
    }
}

/// Checks the action laws, positivity and the cocycle identity of `J`, the
/// tiling condition and consistency of `J` with the measure.
pub fn jacobian_cocycle_check(sys: &ActionSystem) -> ValidationReport {
    let (n, size) = (sys.gamma_order, sys.space_size());
    let mut out = Collector { count: 0, list: Vec::new() };
    let mut permutations = true;
    for gamma in 0..n {
        let mut seen = vec![false; size];
        for x in 0..size {
            seen[sys.sigma(gamma, x)] = true;
        }
        if seen.contains(&false) {
            permutations = false;
            out.push(Violation::NotPermutation { gamma });
        }
    }
    for x in 0..size {
        if sys.sigma(0, x) != x {
            out.push(Violation::IdentityLaw { x });
        }
    }
    for gamma in 0..n {
        for gamma2 in 0..n {
            for x in 0..size {
                if sys.sigma(gamma + gamma2, x) != sys.sigma(gamma, sys.sigma(gamma2, x)) {
                    out.push(Violation::CompositionLaw { gamma, gamma2, x });
                }
            }
        }
    }
    for gamma in 0..n {
        for x in 0..size {
            let value = sys.jacobian(gamma, x);
            if value <= 0.0 {
                out.push(Violation::NonPositiveJacobian { gamma, x, value });
            }
        }
    }
    for gamma in 0..n {
        for gamma2 in 0..n {
            for x in 0..size {
                let lhs = sys.jacobian(gamma + gamma2, x);
                let rhs = sys.jacobian(gamma, sys.sigma(gamma2, x)) * sys.jacobian(gamma2, x);
                if !close(lhs, rhs) {
                    out.push(Violation::Cocycle { gamma, gamma2, x, lhs, rhs });
                }
            }
        }
    }
    let owner = sys.tiling_owner();
    for (x, o) in owner.iter().enumerate() {
        match o.len() {
            0 => out.push(Violation::TilingUncovered { x }),
            1 => {}
            count => out.push(Violation::TilingOverlap { x, count }),
        }
    }
    let rho = sys.measure.clone().or_else(|| sys.derived_measure());
    if let (Some(rho), true) = (rho, permutations) {
        for (x, &value) in rho.iter().enumerate() {
            if value <= 0.0 {
                out.push(Violation::NonPositiveMeasure { x, value });
            }
        }
        for gamma in 0..n {
            for x in 0..size {
                let expected = rho[sys.sigma(gamma, x)] / rho[x];
                let found = sys.jacobian(gamma, x);
                if !close(expected, found) {
                    out.push(Violation::Measure { gamma, x, expected, found });
                }
            }
        }
    }
    ValidationReport { valid: out.count == 0, violation_count: out.count, violations: out.list }
}

/// Fiberization of `psi_1..psi_m` over `Z_N^`; the system is validated first.
pub fn action_fiberize(sys: &ActionSystem, psi: &[Vec<Complex64>]) -> Result<FiberField> {
    let report = jacobian_cocycle_check(sys);
    if !report.valid {
        return Err(Error::Validation(report.summary()));
    }
    let size = sys.space_size();
    if let Some(p) = psi.iter().find(|p| p.len() != size) {
        return Err(Error::Dimension(format!("function has length {}, |X| = {size}", p.len())));
    }
    let n = sys.gamma_order;
    let rho = sys.measure()?;
    let c = &sys.tiling_set;
    // orbit[j][gamma] = T(gamma) psi_j
    let orbit: Vec<Vec<Vec<Complex64>>> =
        psi.par_iter().map(|p| (0..n).map(|g| sys.represent(g, p)).collect()).collect();
    let data = (0..n)
        .map(|alpha| {
            ComplexMatrix::from_fn(c.len(), psi.len(), |i, j| {
                let s: Complex64 = (0..n)
                    .map(|g| orbit[j][g][c[i]] * Complex64::from_polar(1.0, -2.0 * PI * ((g * alpha) % n) as f64 / n as f64))
                    .sum();
                s * rho[c[i]].sqrt()
            })
        })
        .collect();
    let coords = (0..n).map(|a| vec![a as f64]).collect();
    let grid = OmegaGrid::new(GridKind::Exact, vec![n], coords, vec![1.0 / n as f64; n])?;
    let meta = ModelMetadata::new("action-system", "characters of Z_N composed with the action")
        .with_param("gamma_order", n)
        .with_param("space_size", size)
        .with_param("tiling_set", c.clone());
    FiberField::new(grid, c.len(), psi.len(), data, meta)
}

/// `sum_x rho(x) |f(x)|^2`.
pub fn norm_sqr(rho: &[f64], f: &[Complex64]) -> f64 {
    rho.iter().zip(f).map(|(r, v)| r * v.norm_sqr()).sum()
}

#[derive(Debug, Serialize, Deserialize)]
struct ActionHeader {
    format: String,
    schema_version: u32,
    #[serde(flatten)]
    system: ActionSystem,
    m: usize,
}

/// Action-system file: header with the permutation, Jacobian and tiling
/// tables (and optionally the measure), payload the `m` functions on `X`,
/// function-major.
pub fn to_bytes(sys: &ActionSystem, psi: &[Vec<Complex64>], encoding: Encoding) -> Result<Vec<u8>> {
    let header = ActionHeader {
        format: ACTION_FORMAT.into(),
        schema_version: model::io::SCHEMA_VERSION,
        system: sys.clone(),
        m: psi.len(),
    };
    let values: Vec<Complex64> = psi.iter().flatten().copied().collect();
    container::write(&header, &values, encoding)
}

pub fn from_bytes(bytes: &[u8]) -> Result<(ActionSystem, Vec<Vec<Complex64>>)> {
    let (raw, values) = container::read(bytes)?;
    container::expect_format(&raw, ACTION_FORMAT)?;
    let header: ActionHeader = container::header_as(&raw)?;
    if header.schema_version != model::io::SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {}", header.schema_version)));
    }
    let s = header.system;
    let sys = ActionSystem::new(s.gamma_order, s.sigma, s.jacobian, s.tiling_set, s.measure)?;
    let size = sys.space_size();
    if values.len() != header.m * size {
        return Err(Error::Parse(format!("payload has {} values, expected m*|X| = {}", values.len(), header.m * size)));
    }
    Ok((sys, values.chunks(size.max(1)).map(<[_]>::to_vec).collect()))
}

pub fn save(sys: &ActionSystem, psi: &[Vec<Complex64>], path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    std::fs::write(path, to_bytes(sys, psi, encoding)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<(ActionSystem, Vec<Vec<Complex64>>)> {
    from_bytes(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_action_is_valid() {
        let sys = ActionSystem::translation(5).unwrap();
        let r = jacobian_cocycle_check(&sys);
        assert!(r.valid, "{r:?}");
        assert_eq!(sys.measure().unwrap(), vec![1.0; 5]);
    }

    #[test]
    fn perturbed_jacobian_is_reported() {
        let mut sys = ActionSystem::translation(4).unwrap();
        sys.jacobian_mut()[1][2] *= 1.0 + 1e-3;
        let r = jacobian_cocycle_check(&sys);
        assert!(!r.valid);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Cocycle { .. })));
        assert!(matches!(action_fiberize(&sys, &[vec![Complex64::new(1.0, 0.0); 4]]), Err(Error::Validation(_))));
    }

    #[test]
    fn missing_tile_point_is_reported() {
        let sigma = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]];
        let mut sys = ActionSystem::new(2, sigma, vec![vec![1.0; 4]; 2], vec![0, 2], None).unwrap();
        assert!(jacobian_cocycle_check(&sys).valid);
        sys.tiling_set_mut().pop();
        let r = jacobian_cocycle_check(&sys);
        let uncovered: Vec<usize> =
            r.violations.iter().filter_map(|v| if let Violation::TilingUncovered { x } = v { Some(*x) } else { None }).collect();
        assert_eq!(uncovered, vec![2, 3]);
    }

    #[test]
    fn shape_errors() {
        assert!(ActionSystem::new(2, vec![vec![0, 1]], vec![vec![1.0; 2]; 2], vec![0], None).is_err());
        assert!(ActionSystem::new(1, vec![vec![0, 5]], vec![vec![1.0; 2]], vec![0], None).is_err());
    }
}
