use std::ffi::{c_char, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use symforge_ffi::*;

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { sf_string_free(p) };
    s
}

fn golden() -> SfPhaseState {
    SfPhaseState {
        theta: 1.2,
        phi: 0.2,
        p_theta: 0.4,
        p_phi: 0.8,
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(sf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn invalid_ratio_sets_error() {
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { sf_classical_new(2, 4, &mut set) }, SfStatus::InvalidArgument);
    assert!(set.is_null());
    assert!(last_error().unwrap().contains("ratio"));
    assert_eq!(
        unsafe { sf_classical_new(1, 1, ptr::null_mut()) },
        SfStatus::NullPointer
    );
}

#[test]
fn classical_handle_round_trip() {
    let mut set = ptr::null_mut();
    assert_eq!(unsafe { sf_classical_new(2, 1, &mut set) }, SfStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(
        unsafe { sf_classical_text(set, SfFunction::E, &mut text) },
        SfStatus::Ok
    );
    assert!(take_string(text).contains("p_th"));
    let s = golden();
    let mut hphi = 0.0;
    assert_eq!(
        unsafe { sf_classical_eval(set, SfFunction::HPhi, &s, 1.0, &mut hphi) },
        SfStatus::Ok
    );
    assert!((hphi - (0.64 + 1.0 / 0.2f64.cos().powi(2))).abs() < 1e-12);
    let bad = SfPhaseState { theta: 4.0, ..s };
    assert_eq!(
        unsafe { sf_classical_eval(set, SfFunction::O, &bad, 1.0, &mut hphi) },
        SfStatus::Domain
    );
    unsafe { sf_classical_free(set) };
    unsafe { sf_classical_free(ptr::null_mut()) };
}

#[test]
fn verify_returns_a_valid_report() {
    let mut json = ptr::null_mut();
    let mut passed = false;
    assert_eq!(
        unsafe { sf_verify(SfTarget::Classical, 1, 2, 0, &mut json, &mut passed) },
        SfStatus::Ok
    );
    assert!(passed);
    let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    symforge::report::validate_document(&v).unwrap();
}

#[test]
fn integration_and_partial_output() {
    let mut traj = ptr::null_mut();
    let s = golden();
    assert_eq!(
        unsafe { sf_integrate(3, 2, 1.0, &s, 10.0, 1e-10, 0.1, &mut traj) },
        SfStatus::Ok
    );
    assert_eq!(unsafe { sf_trajectory_len(traj) }, 101);
    let mut last = SfSample::default();
    assert_eq!(unsafe { sf_trajectory_sample(traj, 100, &mut last) }, SfStatus::Ok);
    assert!((last.t - 10.0).abs() < 1e-9);
    assert!(unsafe { sf_trajectory_max_drift(traj) } <= 1e-8);
    assert_eq!(
        unsafe { sf_trajectory_sample(traj, 101, &mut last) },
        SfStatus::InvalidArgument
    );
    unsafe { sf_trajectory_free(traj) };

    let fall = SfPhaseState {
        phi: 0.0,
        p_phi: 0.0,
        ..s
    };
    assert_eq!(
        unsafe { sf_integrate(3, 2, 0.0, &fall, 10.0, 1e-10, 0.01, &mut traj) },
        SfStatus::Integration
    );
    assert!(!traj.is_null() && unsafe { sf_trajectory_len(traj) } > 1);
    unsafe { sf_trajectory_free(traj) };
}

#[test]
fn spectra() {
    let mut eig = [0.0; 3];
    assert_eq!(unsafe { sf_phi_levels(2.0, 1000, 3, eig.as_mut_ptr()) }, SfStatus::Ok);
    assert!((eig[0] - 4.0).abs() < 1e-3);
    assert_eq!(
        unsafe { sf_theta_levels(-1.0, 100, 3, eig.as_mut_ptr()) },
        SfStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { sf_theta_levels(1.0, 100, 3, ptr::null_mut()) },
        SfStatus::NullPointer
    );
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_is_current() {
    let h = std::fs::read_to_string(manifest().join("include/symforge.h")).unwrap();
    for f in [
        "sf_classical_new",
        "sf_verify",
        "sf_integrate",
        "sf_trajectory_sample",
        "sf_last_error_message",
        "SF_STATUS_INTEGRATION",
    ] {
        assert!(h.contains(f), "{f} missing from header");
    }
}

#[test]
fn c_program_compiles_against_the_header() {
    let dir = tempfile::tempdir().unwrap();
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-x", lang, "-Wall", "-Werror", "-c"])
            .arg(manifest().join("examples/smoke.c"))
            .arg("-I")
            .arg(manifest().join("include"))
            .arg("-o")
            .arg(dir.path().join(format!("smoke-{lang}.o")))
            .status()
            .expect(compiler);
        assert!(status.success(), "{compiler}");
    }
}
