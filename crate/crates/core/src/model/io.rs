//! Model files: a [`crate::container`] whose header describes the grid and
//! dimensions. Payload order is point-major, then generator, then fiber
//! coordinate: value `(p * m + j) * n + k` is `Phi_j(omega_p)[k]`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FiberField, ModelMetadata, OmegaGrid, INNER_PRODUCT_CONVENTION};
use crate::container::{self, Encoding};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

pub const MODEL_FORMAT: &str = "mispace-model";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct ModelHeader {
    format: String,
    schema_version: u32,
    grid: OmegaGrid,
    n: usize,
    m: usize,
    inner_product: String,
    metadata: ModelMetadata,
}

pub fn to_bytes(field: &FiberField, encoding: Encoding) -> Result<Vec<u8>> {
    let header = ModelHeader {
        format: MODEL_FORMAT.into(),
        schema_version: SCHEMA_VERSION,
        grid: field.grid().clone(),
        n: field.fiber_dim(),
        m: field.generator_count(),
        inner_product: INNER_PRODUCT_CONVENTION.into(),
        metadata: field.metadata.clone(),
    };
    let (n, m) = (field.fiber_dim(), field.generator_count());
    let mut values = Vec::with_capacity(field.grid().len() * n * m);
    for f in field.fibers() {
        for j in 0..m {
            for k in 0..n {
                values.push(f[(k, j)]);
            }
        }
    }
    container::write(&header, &values, encoding)
}

pub fn from_bytes(bytes: &[u8]) -> Result<FiberField> {
    let (raw, values) = container::read(bytes)?;
    container::expect_format(&raw, MODEL_FORMAT)?;
    let header: ModelHeader = container::header_as(&raw)?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {}", header.schema_version)));
    }
    if header.inner_product != INNER_PRODUCT_CONVENTION {
        return Err(Error::Parse(format!("unsupported inner-product convention {:?}", header.inner_product)));
    }
    let grid = OmegaGrid::new(header.grid.kind, header.grid.dims, header.grid.coords, header.grid.weights)?;
    let (n, m) = (header.n, header.m);
    if values.len() != grid.len() * n * m {
        return Err(Error::Parse(format!(
            "payload has {} values, expected points*n*m = {}",
            values.len(),
            grid.len() * n * m
        )));
    }
    let data = (0..grid.len())
        .map(|p| {
            let chunk = &values[p * n * m..(p + 1) * n * m];
            let mut row_major = vec![Complex64::new(0.0, 0.0); n * m];
            for j in 0..m {
                for k in 0..n {
                    row_major[k * m + j] = chunk[j * n + k];
                }
            }
            ComplexMatrix::new(n, m, row_major)
        })
        .collect::<Result<Vec<_>>>()?;
    FiberField::new(grid, n, m, data, header.metadata)
}

pub fn save(field: &FiberField, path: impl AsRef<Path>, encoding: Encoding) -> Result<()> {
    std::fs::write(path, to_bytes(field, encoding)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<FiberField> {
    from_bytes(&std::fs::read(path)?)
}
