//! C ABI over `symforge`.
//!
//! Every fallible function returns an [`SfStatus`]; on failure the message is
//! available from [`sf_last_error_message`] on the same thread. Objects are
//! opaque handles released by their `_free` function. Strings returned through
//! out-parameters belong to the caller and are released with
//! [`sf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symforge::classical::{ClassicalSymmetrySet, RationalK};
use symforge::cli::{self, Target};
use symforge::dynamics::{self, KValue, PhaseState, Trajectory};
use symforge::report::ReportDocument;
use symforge::spectral;
use symforge::symexpr::EvalEnv;
use symforge::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    /// The integrator stopped early; a partial trajectory is still returned.
    Integration = 4,
    Spectral = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfTarget {
    Classical = 0,
    Quantum = 1,
    All = 2,
}

/// Classical functions held by [`SfClassicalSet`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfFunction {
    H = 0,
    HPhi = 1,
    O = 2,
    E = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SfPhaseState {
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

/// One trajectory sample with its conservation ledger.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SfSample {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
    pub h: f64,
    pub hphi: f64,
    pub o: f64,
    pub e: f64,
}

/// Opaque classical symmetry set for one ratio `k = m/n`.
pub struct SfClassicalSet(ClassicalSymmetrySet);

/// Opaque integrated trajectory.
pub struct SfTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SfStatus {
    match e {
        Error::InvalidRatio(_) | Error::Invalid(_) | Error::ForeignSymbol(_) | Error::Unbound(_) => {
            SfStatus::InvalidArgument
        }
        Error::Domain(_) => SfStatus::Domain,
        Error::Spectral(_) => SfStatus::Spectral,
        _ => SfStatus::Internal,
    }
}

fn fail(e: Error) -> SfStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(name: &str) -> SfStatus {
    set_error(format!("{name} is null"));
    SfStatus::NullPointer
}

fn guard(f: impl FnOnce() -> SfStatus) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            SfStatus::Panic
        }
    }
}

fn give_string(s: String, out: *mut *mut c_char) -> SfStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: checked non-null by the caller
            unsafe { *out = c.into_raw() };
            SfStatus::Ok
        }
        Err(_) => {
            set_error("string contains an interior NUL");
            SfStatus::Internal
        }
    }
}

fn state_of(s: &SfPhaseState) -> PhaseState {
    PhaseState::new(0.0, s.theta, s.phi, s.p_theta, s.p_phi)
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build `H, H_φ, O, E` for `k = m/n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_classical_new(m: u32, n: u32, out: *mut *mut SfClassicalSet) -> SfStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let set = match RationalK::new(m, n).and_then(ClassicalSymmetrySet::build) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(SfClassicalSet(set)));
        SfStatus::Ok
    })
}

/// # Safety
/// `set` must come from [`sf_classical_new`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_classical_free(set: *mut SfClassicalSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

fn function(set: &SfClassicalSet, which: SfFunction) -> &symforge::PhaseExpr {
    match which {
        SfFunction::H => &set.0.h,
        SfFunction::HPhi => &set.0.hphi,
        SfFunction::O => &set.0.o,
        SfFunction::E => &set.0.e,
    }
}

/// Canonical text of one function; free the result with [`sf_string_free`].
///
/// # Safety
/// `set` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_classical_text(
    set: *const SfClassicalSet,
    which: SfFunction,
    out: *mut *mut c_char,
) -> SfStatus {
    guard(|| {
        let Some(set) = set.as_ref() else { return null("set") };
        if out.is_null() {
            return null("out");
        }
        give_string(function(set, which).to_string(), out)
    })
}

/// Evaluate one function at a phase-space point; the value is real for all
/// four functions.
///
/// # Safety
/// `set` must be a live handle, `state` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sf_classical_eval(
    set: *const SfClassicalSet,
    which: SfFunction,
    state: *const SfPhaseState,
    alpha2: f64,
    out: *mut f64,
) -> SfStatus {
    guard(|| {
        let Some(set) = set.as_ref() else { return null("set") };
        let Some(state) = state.as_ref() else {
            return null("state");
        };
        if out.is_null() {
            return null("out");
        }
        let env = EvalEnv { alpha2, k: None };
        match function(set, which).eval_with(&state_of(state), &env) {
            Ok(v) => {
                *out = v.re;
                SfStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Run verification suites. `m = n = 0` sweeps every admissible ratio. The
/// JSON report (without timings) goes to `out_json`; `out_passed` is set to
/// whether no entry failed.
///
/// # Safety
/// `out_json` and `out_passed` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sf_verify(
    target: SfTarget,
    m: u32,
    n: u32,
    seed: u64,
    out_json: *mut *mut c_char,
    out_passed: *mut bool,
) -> SfStatus {
    guard(|| {
        if out_json.is_null() || out_passed.is_null() {
            return null("output pointer");
        }
        let case = if m == 0 && n == 0 {
            None
        } else {
            match RationalK::new(m, n) {
                Ok(k) => Some(k),
                Err(e) => return fail(e),
            }
        };
        let target = match target {
            SfTarget::Classical => Target::Classical,
            SfTarget::Quantum => Target::Quantum,
            SfTarget::All => Target::All,
        };
        let reports = match cli::verify_reports(target, case, seed, None) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        let mut doc = ReportDocument::new(seed, reports);
        doc.strip_timings();
        *out_passed = doc.passed();
        match serde_json::to_string(&doc) {
            Ok(s) => give_string(s, out_json),
            Err(e) => fail(Error::Internal(e.to_string())),
        }
    })
}

/// Integrate the orbit of `k = m/n` from `initial` to `t_max`, sampled every
/// `sample_dt`. On [`SfStatus::Integration`] `*out` still receives the
/// partial trajectory.
///
/// # Safety
/// `initial` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sf_integrate(
    m: u32,
    n: u32,
    alpha2: f64,
    initial: *const SfPhaseState,
    t_max: f64,
    tol: f64,
    sample_dt: f64,
    out: *mut *mut SfTrajectory,
) -> SfStatus {
    guard(|| {
        let Some(initial) = initial.as_ref() else {
            return null("initial");
        };
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        if !(t_max > 0.0 && tol > 0.0 && sample_dt > 0.0) {
            return fail(Error::Invalid("t_max, tol and sample_dt must be positive".into()));
        }
        let k = match RationalK::new(m, n) {
            Ok(k) => KValue::Rational(k),
            Err(e) => return fail(e),
        };
        let state = state_of(initial);
        if let Err(e) = state.check_domain() {
            return fail(e);
        }
        let opts = dynamics::IntegrateOptions {
            sample_dt,
            ..dynamics::IntegrateOptions::new(tol)
        };
        match dynamics::integrate_with(state, k, alpha2, t_max, opts) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(SfTrajectory(t)));
                SfStatus::Ok
            }
            Err(f) => {
                set_error(f.to_string());
                *out = Box::into_raw(Box::new(SfTrajectory(*f.partial)));
                SfStatus::Integration
            }
        }
    })
}

/// # Safety
/// `traj` must come from [`sf_integrate`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_trajectory_free(traj: *mut SfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_trajectory_len(traj: *const SfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.samples.len())
}

/// # Safety
/// `traj` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sf_trajectory_sample(traj: *const SfTrajectory, index: usize, out: *mut SfSample) -> SfStatus {
    guard(|| {
        let Some(traj) = traj.as_ref() else { return null("traj") };
        if out.is_null() {
            return null("out");
        }
        let (Some(s), Some(l)) = (traj.0.samples.get(index), traj.0.ledger.get(index)) else {
            return fail(Error::Invalid(format!("sample {index} out of range")));
        };
        *out = SfSample {
            t: s.t,
            theta: s.theta,
            phi: s.phi,
            p_theta: s.p_theta,
            p_phi: s.p_phi,
            h: l.h,
            hphi: l.hphi,
            o: l.o,
            e: l.e,
        };
        SfStatus::Ok
    })
}

/// Largest relative drift of `H, H_φ, O, E`; NaN for NULL.
///
/// # Safety
/// `traj` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn sf_trajectory_max_drift(traj: *const SfTrajectory) -> f64 {
    traj.as_ref().map_or(f64::NAN, |t| t.0.drift().max())
}

/// Lowest `count` eigenvalues of the φ problem (`alpha2`) on `grid` points.
///
/// # Safety
/// `out` must point to `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_phi_levels(alpha2: f64, grid: usize, count: usize, out: *mut f64) -> SfStatus {
    guard(|| levels(spectral::solve_phi(alpha2, grid, count), out))
}

/// Lowest `count` eigenvalues of the θ problem with parameter `big_m`.
///
/// # Safety
/// `out` must point to `count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sf_theta_levels(big_m: f64, grid: usize, count: usize, out: *mut f64) -> SfStatus {
    guard(|| levels(spectral::solve_theta(big_m, grid, count), out))
}

unsafe fn levels(res: symforge::Result<Vec<spectral::Eigenpair>>, out: *mut f64) -> SfStatus {
    if out.is_null() {
        return null("out");
    }
    match res {
        Ok(pairs) => {
            for (i, p) in pairs.iter().enumerate() {
                *out.add(i) = p.eigenvalue;
            }
            SfStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Copy of the last error message; convenience for Rust callers and tests.
pub fn last_error() -> Option<String> {
    let p = sf_last_error_message();
    // SAFETY: pointer is either null or a live thread-local CString
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_codes() {
        assert_eq!(status_of(&Error::InvalidRatio("2/4".into())), SfStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Domain("x".into())), SfStatus::Domain);
        assert_eq!(status_of(&Error::Spectral("x".into())), SfStatus::Spectral);
        assert_eq!(status_of(&Error::ZeroDenominator), SfStatus::Internal);
    }

    #[test]
    fn panics_become_status_codes() {
        let prev = std::panic::take_hook();
        std::panic::set_hook(Box::new(|_| {}));
        let s = guard(|| panic!("boom"));
        std::panic::set_hook(prev);
        assert_eq!(s, SfStatus::Panic);
        assert_eq!(last_error().unwrap(), "panic: boom");
    }
}
