use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use lindfrag_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(lf_last_error_message()) }.to_string_lossy().into_owned()
}

fn builtin(name: &str, n: usize) -> (LfStatus, *mut LfModel) {
    let name = CString::new(name).unwrap();
    let mut model = ptr::null_mut();
    let status = unsafe { lf_model_builtin(name.as_ptr(), n, 1.0, 0.5, &mut model) };
    (status, model)
}

#[test]
fn histogram_round_trip() {
    let (status, model) = builtin("cluster_ziz", 8);
    assert_eq!(status, LfStatus::Ok);
    let mut needed = 0;
    let status = unsafe { lf_fragment_histogram(model, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(status, LfStatus::BufferTooSmall);
    assert_eq!(needed, 9);
    let mut counts = vec![0u64; needed];
    assert_eq!(unsafe { lf_fragment_histogram(model, counts.as_mut_ptr(), counts.len(), &mut needed) }, LfStatus::Ok);
    assert_eq!(counts.iter().sum::<u64>(), 11664);
    let mut total = 0;
    assert_eq!(unsafe { lf_fragment_count(model, &mut total) }, LfStatus::Ok);
    assert_eq!(total, 11664);
    let mut n = 0;
    assert_eq!(unsafe { lf_model_n_qubits(model, &mut n) }, LfStatus::Ok);
    assert_eq!(n, 8);
    unsafe { lf_model_free(model) };
}

#[test]
fn errors_are_reported() {
    let (status, model) = builtin("cluster_x", 6);
    assert_eq!(status, LfStatus::InvalidArgument);
    assert!(model.is_null());
    assert!(last_error().contains("cluster_x"));

    let (status, _) = builtin("cluster_y", 3);
    assert_eq!(status, LfStatus::InvalidArgument);

    let json = CString::new(
        r#"{"n_qubits": 2, "hamiltonian": [{"coeff": 1.0, "pauli": "XI"}, {"coeff": 1.0, "pauli": "ZI"}], "jumps": []}"#,
    )
    .unwrap();
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { lf_model_from_json(json.as_ptr(), &mut model) }, LfStatus::Validation);
    assert!(last_error().contains("do not commute"));

    assert_eq!(unsafe { lf_model_from_json(ptr::null(), &mut model) }, LfStatus::NullPointer);
    assert_eq!(unsafe { lf_fragment_count(ptr::null(), &mut 0) }, LfStatus::NullPointer);
    unsafe { lf_model_free(ptr::null_mut()) };
}

#[test]
fn success_clears_the_message() {
    builtin("nope", 4);
    assert!(!last_error().is_empty());
    let (status, model) = builtin("cluster_y", 4);
    assert_eq!(status, LfStatus::Ok);
    assert!(last_error().is_empty());
    unsafe { lf_model_free(model) };
}

#[test]
fn tfim_modes_match_the_library() {
    let mut ks = vec![LfComplex::default(); 8];
    let mut es = vec![LfComplex::default(); 8];
    let mut len = 0;
    let status =
        unsafe { lf_tfim_modes(8, 1.0, 0.4, true, true, ks.as_mut_ptr(), es.as_mut_ptr(), ks.len(), &mut len) };
    assert_eq!(status, LfStatus::Ok);
    assert_eq!(len, 8);
    let sol = lindfrag::tfim::obc_spectrum(&lindfrag::tfim::TfimSpec::new(8, 1.0, 0.4, true, true)).unwrap();
    for (got, mode) in es.iter().zip(&sol.modes) {
        assert_eq!((got.re, got.im), (mode.energy.re, mode.energy.im));
    }
    let status = unsafe { lf_tfim_modes(1, 1.0, 0.4, true, true, ks.as_mut_ptr(), es.as_mut_ptr(), 8, &mut len) };
    assert_eq!(status, LfStatus::InvalidArgument);
}

#[test]
fn rmt_spectrum_is_conjugation_symmetric() {
    let mut values = vec![LfComplex::default(); 32];
    let mut len = 0;
    let status = unsafe { lf_rmt_eigenvalues(32, 1.0, 5, values.as_mut_ptr(), values.len(), &mut len) };
    assert_eq!(status, LfStatus::Ok);
    let im_sum: f64 = values.iter().map(|z| z.im).sum();
    assert!(im_sum.abs() < 1e-10);
    assert_eq!(unsafe { lf_rmt_eigenvalues(12, 1.0, 5, values.as_mut_ptr(), 32, &mut len) }, LfStatus::InvalidArgument);
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(lf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/lindfrag.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in ["lf_model_builtin", "lf_fragment_histogram", "lf_tfim_modes", "LF_STATUS_PANIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
