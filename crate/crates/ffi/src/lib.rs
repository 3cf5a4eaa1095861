//! C interface to `mispace`.
//!
//! Models are opaque handles created by `mispace_model_load` or
//! `mispace_model_sincos` and released with `mispace_model_free`. Every
//! fallible call returns a [`MispaceStatus`]; on failure the message is
//! available from `mispace_last_error_message` on the same thread.
//!
//! Matrices cross the boundary row-major with interleaved real and imaginary
//! parts: entry `(i, j)` is `data[2 * (i * cols + j)] + i * data[2 * (i * cols + j) + 1]`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use mispace::cli::load::load_model;
use mispace::model::{self, gramian_field, scenarios, FiberField, GramianField};
use mispace::numerics::{ComplexMatrix, Tolerance};
use mispace::reduction::{self, CertifyOptions, ReductionMatrix};
use mispace::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MispaceStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Dimension = 5,
    Contract = 6,
    Hypothesis = 7,
    ZeroMatrix = 8,
    Validation = 9,
    Internal = 10,
}

/// Numerical tolerances; pass `NULL` wherever accepted to use the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MispaceOptions {
    pub rank_rtol: f64,
    pub abs_floor: f64,
    pub intersection_tol: f64,
    pub ae_exception_fraction: f64,
}

/// Outcome of `mispace_certify_frame`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MispaceFrameResult {
    /// 1 if the reduction is certified to preserve frames, else 0.
    pub certified: i32,
    /// 1 if every generator fiber is preserved (a.e.), else 0.
    pub generator_preserving: i32,
    /// Infimum over the grid of the sine between `Im G(omega)` and `Ker A`.
    pub delta: f64,
    /// Predicted frame bounds; zero when not certified.
    pub predicted_lower: f64,
    pub predicted_upper: f64,
    /// Frame bounds measured on the reduced Gramian.
    pub measured_lower: f64,
    pub measured_upper: f64,
}

/// Opaque model handle.
pub struct MispaceModel {
    field: FiberField,
    gramian: GramianField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MispaceStatus {
    match err {
        Error::Dimension(_) => MispaceStatus::Dimension,
        Error::Contract(_) => MispaceStatus::Contract,
        Error::Hypothesis(_) => MispaceStatus::Hypothesis,
        Error::ZeroMatrix(_) => MispaceStatus::ZeroMatrix,
        Error::Validation(_) => MispaceStatus::Validation,
        Error::Parse(_) | Error::Json(_) => MispaceStatus::Parse,
        Error::Io(_) => MispaceStatus::Io,
    }
}

struct Failure(MispaceStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MispaceStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MispaceStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MispaceStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MispaceStatus::Internal
        }
    }
}

unsafe fn model_ref<'a>(model: *const MispaceModel) -> Result<&'a MispaceModel, Failure> {
    model.as_ref().ok_or_else(|| null("model"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn options(opts: *const MispaceOptions) -> Result<CertifyOptions, Failure> {
    let Some(o) = opts.as_ref() else { return Ok(CertifyOptions::default()) };
    let tol = Tolerance { rank_rtol: o.rank_rtol, abs_floor: o.abs_floor, intersection_tol: o.intersection_tol };
    Ok(CertifyOptions { tol, ae_exception_fraction: o.ae_exception_fraction }.validated()?)
}

unsafe fn matrix(rows: usize, cols: usize, data: *const f64) -> Result<ReductionMatrix, Failure> {
    if data.is_null() {
        return Err(null("matrix data"));
    }
    let len = rows.checked_mul(cols).and_then(|n| n.checked_mul(2)).ok_or_else(|| {
        Failure(MispaceStatus::InvalidArgument, format!("matrix size {rows}x{cols} overflows"))
    })?;
    let raw = std::slice::from_raw_parts(data, len);
    let entries = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok(ReductionMatrix::new(ComplexMatrix::new(rows, cols, entries)?))
}

fn boxed(field: FiberField) -> *mut MispaceModel {
    let gramian = gramian_field(&field);
    Box::into_raw(Box::new(MispaceModel { field, gramian }))
}

/// Message of the last failed call on this thread, or `NULL`. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mispace_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mispace_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default tolerances.
#[no_mangle]
pub extern "C" fn mispace_options_default() -> MispaceOptions {
    let d = CertifyOptions::default();
    MispaceOptions {
        rank_rtol: d.tol.rank_rtol,
        abs_floor: d.tol.abs_floor,
        intersection_tol: d.tol.intersection_tol,
        ae_exception_fraction: d.ae_exception_fraction,
    }
}

/// Loads a model, translate-system or action-system file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_load(path: *const c_char, out: *mut *mut MispaceModel) -> MispaceStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure(MispaceStatus::InvalidArgument, "path is not valid UTF-8".into()))?;
        let loaded = load_model(Path::new(path))?;
        out.write(boxed(loaded.field));
        Ok(())
    })
}

/// The two-generator `(sin 2 pi w, cos 2 pi w)` model on an `n x n` grid.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_sincos(grid_n: usize, out: *mut *mut MispaceModel) -> MispaceStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(boxed(scenarios::sincos(grid_n)?));
        Ok(())
    })
}

/// Releases a model. `NULL` is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_free(model: *mut MispaceModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of grid points, fiber dimension and number of generators.
///
/// # Safety
/// `model` must be a live handle; each output pointer must be valid.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_shape(
    model: *const MispaceModel,
    points: *mut usize,
    fiber_dim: *mut usize,
    generators: *mut usize,
) -> MispaceStatus {
    guard(|| {
        let m = model_ref(model)?;
        write_out(points, m.field.grid().len(), "points")?;
        write_out(fiber_dim, m.field.fiber_dim(), "fiber_dim")?;
        write_out(generators, m.field.generator_count(), "generators")
    })
}

/// Length: largest Gramian rank over the grid.
///
/// # Safety
/// `model` must be a live handle, `opts` `NULL` or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_length(
    model: *const MispaceModel,
    opts: *const MispaceOptions,
    out: *mut usize,
) -> MispaceStatus {
    guard(|| {
        let m = model_ref(model)?;
        let o = options(opts)?;
        write_out(out, reduction::model_length(&m.gramian, &o.tol), "out")
    })
}

/// Extreme positive Gramian eigenvalues; both are zero for a zero model.
///
/// # Safety
/// `model` must be a live handle, `opts` `NULL` or valid, outputs valid.
#[no_mangle]
pub unsafe extern "C" fn mispace_model_frame_bounds(
    model: *const MispaceModel,
    opts: *const MispaceOptions,
    alpha: *mut f64,
    beta: *mut f64,
) -> MispaceStatus {
    guard(|| {
        let m = model_ref(model)?;
        let o = options(opts)?;
        let b = model::uniform_frame_bounds(&m.gramian, &o.tol);
        write_out(alpha, b.alpha, "alpha")?;
        write_out(beta, b.beta, "beta")
    })
}

/// Whether the `rows x cols` matrix preserves the generator fibers; writes 1 or 0.
///
/// # Safety
/// `data` must hold `2 * rows * cols` doubles; the other pointers as above.
#[no_mangle]
pub unsafe extern "C" fn mispace_is_generator_preserving(
    model: *const MispaceModel,
    rows: usize,
    cols: usize,
    data: *const f64,
    opts: *const MispaceOptions,
    out: *mut i32,
) -> MispaceStatus {
    guard(|| {
        let m = model_ref(model)?;
        let a = matrix(rows, cols, data)?;
        let cert = reduction::is_generator_preserving(&m.gramian, &a, &options(opts)?)?;
        write_out(out, cert.preserving as i32, "out")
    })
}

/// Frame certificate for the `rows x cols` reduction matrix.
///
/// # Safety
/// `data` must hold `2 * rows * cols` doubles; the other pointers as above.
#[no_mangle]
pub unsafe extern "C" fn mispace_certify_frame(
    model: *const MispaceModel,
    rows: usize,
    cols: usize,
    data: *const f64,
    opts: *const MispaceOptions,
    out: *mut MispaceFrameResult,
) -> MispaceStatus {
    guard(|| {
        let m = model_ref(model)?;
        let a = matrix(rows, cols, data)?;
        let cert = reduction::certify_frame_reduction(&m.gramian, &a, &options(opts)?)?;
        let [lo, hi] = cert.predicted_bounds.unwrap_or([0.0, 0.0]);
        let result = MispaceFrameResult {
            certified: cert.certified as i32,
            generator_preserving: cert.condition1.preserving as i32,
            delta: cert.delta,
            predicted_lower: lo,
            predicted_upper: hi,
            measured_lower: cert.measured_bounds.alpha,
            measured_upper: cert.measured_bounds.beta,
        };
        write_out(out, result, "out")
    })
}
