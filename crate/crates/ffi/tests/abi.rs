use std::ffi::{CStr, CString};
use std::ptr;

use spinvqe_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(svq_last_error()) }.to_string_lossy().into_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { svq_string_free(s) };
    text
}

#[test]
fn ring_hamiltonian_round_trip() {
    let kind = CString::new("ring").unwrap();
    let dims = [4usize];
    let mut h = ptr::null_mut();
    let status = unsafe { svq_hamiltonian_new(kind.as_ptr(), dims.as_ptr(), 1, ptr::null(), 0, 0, &mut h) };
    assert_eq!(status, SvqStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { svq_hamiltonian_nqubits(h, &mut n) }, SvqStatus::Ok);
    assert_eq!(n, 4);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { svq_hamiltonian_to_json(h, &mut json) }, SvqStatus::Ok);
    assert!(take(json).contains("\"nqubits\": 4"));
    let mut e = 0.0;
    assert_eq!(unsafe { svq_exact_ground_energy(h, 0.0, &mut e) }, SvqStatus::Ok);
    assert!((e + 8.0).abs() < 1e-9);
    unsafe { svq_hamiltonian_free(h) };
}

#[test]
fn errors_set_status_and_message() {
    let kind = CString::new("hexagon").unwrap();
    let dims = [4usize];
    let mut h = ptr::null_mut();
    let status = unsafe { svq_hamiltonian_new(kind.as_ptr(), dims.as_ptr(), 1, ptr::null(), 0, 0, &mut h) };
    assert_eq!(status, SvqStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(last_error().contains("hexagon"));

    let status = unsafe { svq_hamiltonian_new(ptr::null(), dims.as_ptr(), 1, ptr::null(), 0, 0, &mut h) };
    assert_eq!(status, SvqStatus::NullPointer);
    let mut n = 0;
    assert_eq!(unsafe { svq_hamiltonian_nqubits(ptr::null(), &mut n) }, SvqStatus::NullPointer);

    let hva = CString::new(
        "[lattice]\nkind = \"square\"\nrows = 2\ncols = 2\n[ansatz]\nfamily = \"hamiltonian_variational\"\n\
         [optimizer]\nmethod = \"gradient_free\"\nmax_evals = 10\n",
    )
    .unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { svq_problem_new(hva.as_ptr(), &mut p) }, SvqStatus::Unsupported);
    assert!(p.is_null());
}

#[test]
fn problem_energy_and_run() {
    let cfg = CString::new(
        "[lattice]\nkind = \"ring\"\nn = 4\n[ansatz]\nfamily = \"xy\"\n[optimizer]\nmethod = \"quasi_newton\"\nmax_evals = 2000\n",
    )
    .unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { svq_problem_new(cfg.as_ptr(), &mut p) }, SvqStatus::Ok);
    let mut count = 0;
    assert_eq!(unsafe { svq_problem_parameter_count(p, &mut count) }, SvqStatus::Ok);
    assert_eq!(count, 12);
    let zeros = vec![0.0; count];
    let mut e = 0.0;
    assert_eq!(unsafe { svq_problem_energy(p, zeros.as_ptr(), count, 1, &mut e) }, SvqStatus::Ok);
    assert!((e + 4.0).abs() < 1e-12);
    assert_eq!(unsafe { svq_problem_energy(p, zeros.as_ptr(), 3, 1, &mut e) }, SvqStatus::InvalidArgument);
    assert!(last_error().contains("12"));
    unsafe { svq_problem_free(p) };

    let mut summary = ptr::null_mut();
    let mut trace = ptr::null_mut();
    assert_eq!(unsafe { svq_run_vqe(cfg.as_ptr(), &mut summary, &mut trace) }, SvqStatus::Ok);
    let summary: serde_json::Value = serde_json::from_str(&take(summary)).unwrap();
    assert!((summary["energy"].as_f64().unwrap() + 8.0).abs() < 1e-6);
    assert!(take(trace).starts_with("eval,energy,best,seconds\n"));
    assert_eq!(last_error(), "");
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(svq_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
