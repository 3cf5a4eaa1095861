//! Input files: models (directly or through a fiberization backend) and
//! reduction matrices.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::container;
use crate::error::{Error, Result};
use crate::fiberization::{action, action_fiberize, fiberize_group, translate};
use crate::model::{io, FiberField};
use crate::numerics::ComplexMatrix;
use crate::reduction::ReductionMatrix;

pub const MATRIX_FORMAT: &str = "mispace-matrix";

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub field: FiberField,
    /// Format tag of the file the field came from.
    pub format: String,
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a model, translate-system or action-system file; the latter two
/// are fiberized on load.
pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let bytes = std::fs::read(path)?;
    let (header, _) = container::read(&bytes)?;
    let format = header.get("format").and_then(|f| f.as_str()).unwrap_or_default().to_string();
    let field = match format.as_str() {
        io::MODEL_FORMAT => io::from_bytes(&bytes)?,
        translate::TRANSLATE_FORMAT => fiberize_group(&translate::from_bytes(&bytes)?)?,
        action::ACTION_FORMAT => {
            let (sys, psi) = action::from_bytes(&bytes)?;
            action_fiberize(&sys, &psi)?
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown file format {other:?}; expected one of {:?}, {:?}, {:?}",
                io::MODEL_FORMAT,
                translate::TRANSLATE_FORMAT,
                action::ACTION_FORMAT
            )))
        }
    };
    Ok(LoadedModel { field, format, digest: format!("sha256:{}", sha256_hex(&bytes)) })
}

/// `{"format": "mispace-matrix", "rows": l, "cols": m, "data": [[re, im], ...]}`,
/// entries row-major.
#[derive(Debug, Serialize, Deserialize)]
struct MatrixFile {
    format: String,
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

pub fn matrix_to_json(a: &ComplexMatrix) -> Result<String> {
    let file = MatrixFile {
        format: MATRIX_FORMAT.into(),
        rows: a.rows(),
        cols: a.cols(),
        data: a.as_slice().iter().map(|z| [z.re, z.im]).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn matrix_from_json(text: &str) -> Result<ReductionMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad matrix file: {e}")))?;
    if file.format != MATRIX_FORMAT {
        return Err(Error::Parse(format!("expected a {MATRIX_FORMAT:?} file, found {:?}", file.format)));
    }
    if file.data.len() != file.rows * file.cols {
        return Err(Error::Parse(format!(
            "matrix file declares {}x{} but holds {} entries",
            file.rows,
            file.cols,
            file.data.len()
        )));
    }
    let data = file.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    Ok(ReductionMatrix::new(ComplexMatrix::new(file.rows, file.cols, data)?))
}

pub fn load_matrix(path: &Path) -> Result<ReductionMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}
