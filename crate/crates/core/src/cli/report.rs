//! Report envelope and CSV tables written by the command-line tool.

use serde::Serialize;
use serde_json::Value;

use crate::model::{OmegaGrid, INNER_PRODUCT_CONVENTION};
use crate::numerics::Tolerance;
use crate::reduction::{CertifyOptions, SANDWICH_SLACK};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub model: Option<ModelInfo>,
    pub tolerances: TolerancesUsed,
    pub conventions: Conventions,
    pub results: Value,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub path: Option<String>,
    pub format: String,
    pub digest: String,
    pub name: String,
    pub grid_kind: crate::model::GridKind,
    pub points: usize,
    pub fiber_dim: usize,
    pub generators: usize,
}

#[derive(Debug, Serialize)]
pub struct TolerancesUsed {
    pub rank_rtol: f64,
    pub abs_floor: f64,
    pub intersection_tol: f64,
    pub ae_exception_fraction: f64,
    pub sandwich_slack: f64,
}

impl From<&CertifyOptions> for TolerancesUsed {
    fn from(o: &CertifyOptions) -> Self {
        let Tolerance { rank_rtol, abs_floor, intersection_tol } = o.tol;
        Self { rank_rtol, abs_floor, intersection_tol, ae_exception_fraction: o.ae_exception_fraction, sandwich_slack: SANDWICH_SLACK }
    }
}

#[derive(Debug, Serialize)]
pub struct Conventions {
    pub inner_product: &'static str,
    pub rank_cutoff: &'static str,
    pub reduction: &'static str,
    pub essential_extrema: &'static str,
    pub dft: &'static str,
    pub group_fiber: &'static str,
    pub action_fiber: &'static str,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            inner_product: INNER_PRODUCT_CONVENTION,
            rank_cutoff: "singular values above max(rank_rtol * sigma_max, abs_floor) count",
            reduction: "Psi(omega) = Phi(omega) A^T, G_Psi = A G_Phi A*",
            essential_extrema: "ess inf / ess sup over the grid are the grid min / max; a.e. means all but ae_exception_fraction of the points",
            dft: "f^(gamma) = |G|^-1/2 sum_x f(x) conj((x,gamma)), (x,gamma) = exp(2 pi i sum_k x_k gamma_k / N_k)",
            group_fiber: "Tf(omega) = sqrt(|H|) (f^(omega+delta))_{delta in H*}, section weight 1/|H|, section = lexicographically smallest coset representatives",
            action_fiber: "T f(alpha)(c) = sqrt(rho(c)) sum_gamma (T(gamma)f)(c) exp(-2 pi i gamma alpha / N), weight 1/N",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Removes per-point diagnostics (keys starting with `per_point`).
pub fn strip_per_point(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.starts_with("per_point"));
            map.values_mut().for_each(strip_per_point);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_per_point),
        _ => {}
    }
}

#[derive(Debug, Default, Clone)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    /// Header `omega_0, ..., omega_{d-1}` followed by `extra`.
    pub fn per_point(grid: &OmegaGrid, extra: &[&str]) -> Self {
        let d = grid.coords.first().map_or(0, Vec::len);
        let mut header: Vec<String> = (0..d).map(|k| format!("omega_{k}")).collect();
        header.extend(extra.iter().map(|s| s.to_string()));
        Self::new(header)
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Coordinates of a grid point followed by the given cells.
pub fn point_row(grid: &OmegaGrid, p: usize, cells: impl IntoIterator<Item = String>) -> Vec<String> {
    grid.coords[p].iter().map(|c| c.to_string()).chain(cells).collect()
}
