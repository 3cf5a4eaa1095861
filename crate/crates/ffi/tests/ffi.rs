use std::ffi::{CStr, CString};
use std::ptr;

use mispace_ffi::*;

fn last_error() -> String {
    let p = mispace_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sincos(n: usize) -> *mut MispaceModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { mispace_model_sincos(n, &mut m) }, MispaceStatus::Ok);
    m
}

#[test]
fn sincos_shape_length_and_bounds() {
    let m = sincos(8);
    let (mut points, mut dim, mut gens, mut len) = (0, 0, 0, 0);
    let (mut alpha, mut beta) = (0.0, 0.0);
    unsafe {
        assert_eq!(mispace_model_shape(m, &mut points, &mut dim, &mut gens), MispaceStatus::Ok);
        assert_eq!(mispace_model_length(m, ptr::null(), &mut len), MispaceStatus::Ok);
        assert_eq!(mispace_model_frame_bounds(m, ptr::null(), &mut alpha, &mut beta), MispaceStatus::Ok);
        mispace_model_free(m);
    }
    assert_eq!((points, dim, gens, len), (64, 2, 2, 1));
    assert!((alpha - 1.0).abs() < 1e-12 && (beta - 1.0).abs() < 1e-12);
    assert!(mispace_last_error_message().is_null());
}

#[test]
fn frame_certificate_through_the_abi() {
    let m = sincos(4);
    let a = [1.0, 0.0, 0.0, 0.0];
    let mut r = MispaceFrameResult::default();
    let mut preserving = -1;
    unsafe {
        assert_eq!(mispace_certify_frame(m, 1, 2, a.as_ptr(), ptr::null(), &mut r), MispaceStatus::Ok);
        assert_eq!(mispace_is_generator_preserving(m, 1, 2, a.as_ptr(), ptr::null(), &mut preserving), MispaceStatus::Ok);
    }
    let delta = (std::f64::consts::PI / 4.0).sin();
    assert_eq!((r.certified, r.generator_preserving, preserving), (1, 1, 1));
    assert!((r.delta - delta).abs() < 1e-10);
    assert!((r.predicted_lower - delta * delta).abs() < 1e-10 && (r.predicted_upper - 1.0).abs() < 1e-12);
    assert!(r.measured_lower >= r.predicted_lower - 1e-8 && r.measured_upper <= r.predicted_upper + 1e-8);

    let zero = [0.0; 4];
    assert_eq!(unsafe { mispace_certify_frame(m, 1, 2, zero.as_ptr(), ptr::null(), &mut r) }, MispaceStatus::ZeroMatrix);
    assert!(last_error().contains("zero"));
    let wide = [1.0; 12];
    assert_eq!(unsafe { mispace_certify_frame(m, 3, 2, wide.as_ptr(), ptr::null(), &mut r) }, MispaceStatus::Hypothesis);
    assert_eq!(unsafe { mispace_certify_frame(m, 1, 3, wide.as_ptr(), ptr::null(), &mut r) }, MispaceStatus::Dimension);
    unsafe { mispace_model_free(m) };
}

#[test]
fn options_are_validated() {
    let m = sincos(4);
    let mut len = 0;
    let mut o = mispace_options_default();
    assert_eq!(o.rank_rtol, 1e-8);
    assert_eq!(unsafe { mispace_model_length(m, &o, &mut len) }, MispaceStatus::Ok);
    o.ae_exception_fraction = 2.0;
    assert_eq!(unsafe { mispace_model_length(m, &o, &mut len) }, MispaceStatus::Contract);
    unsafe { mispace_model_free(m) };
}

#[test]
fn null_and_bad_inputs() {
    let mut m = ptr::null_mut();
    let mut len = 0;
    unsafe {
        assert_eq!(mispace_model_sincos(4, ptr::null_mut()), MispaceStatus::NullPointer);
        assert_eq!(mispace_model_length(ptr::null(), ptr::null(), &mut len), MispaceStatus::NullPointer);
        assert_eq!(mispace_model_load(ptr::null(), &mut m), MispaceStatus::NullPointer);
        let missing = CString::new("/nonexistent/model.txt").unwrap();
        assert_eq!(mispace_model_load(missing.as_ptr(), &mut m), MispaceStatus::Io);
        assert!(m.is_null());
        mispace_model_free(ptr::null_mut());
    }
}

#[test]
fn load_matches_core() {
    let dir = tempfile::TempDir::new().unwrap();
    let path = dir.path().join("o.txt");
    let field = mispace::model::scenarios::orthonormal(3, 16).unwrap();
    mispace::model::io::save(&field, &path, mispace::container::Encoding::Csv).unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut m = ptr::null_mut();
    let mut len = 0;
    unsafe {
        assert_eq!(mispace_model_load(c.as_ptr(), &mut m), MispaceStatus::Ok);
        assert_eq!(mispace_model_length(m, ptr::null(), &mut len), MispaceStatus::Ok);
        mispace_model_free(m);
    }
    assert_eq!(len, 3);

    std::fs::write(&path, b"garbage").unwrap();
    assert_eq!(unsafe { mispace_model_load(c.as_ptr(), &mut m) }, MispaceStatus::Parse);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(mispace_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
