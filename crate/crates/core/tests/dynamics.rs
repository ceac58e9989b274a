use symforge::classical::RationalK;
use symforge::dynamics::{
    detect_closure, integrate, integrate_with, time_reversal_error, IntegrateOptions, KValue, PhaseState,
};

fn golden() -> PhaseState {
    PhaseState::new(0.0, 1.2, 0.2, 0.4, 0.8)
}

fn k(m: u32, n: u32) -> KValue {
    KValue::Rational(RationalK::new(m, n).unwrap())
}

#[test]
fn golden_orbit_conserves_all_four_quantities() {
    let traj = integrate(golden(), k(3, 2), 1.0, 100.0, 1e-10).unwrap();
    let d = traj.drift();
    assert!(d.max() <= 1e-8, "{d:?}");
    assert!(traj.product_check().unwrap() < 1e-8);
    assert_eq!(traj.samples.len(), traj.ledger.len());
    assert!((traj.samples.last().unwrap().t - 100.0).abs() < 1e-9);
}

#[test]
fn tighter_tolerance_reduces_drift() {
    let loose = integrate(golden(), k(3, 2), 1.0, 20.0, 1e-6).unwrap().drift().max();
    let tight = integrate(golden(), k(3, 2), 1.0, 20.0, 1e-9).unwrap().drift().max();
    assert!(tight < loose, "{tight} vs {loose}");
}

#[test]
fn time_reversal_returns_home() {
    assert!(time_reversal_error(golden(), k(3, 2), 1.0, 100.0, 1e-10).unwrap() <= 1e-6);
}

#[test]
fn irrational_k_has_no_polynomial_ledger() {
    let traj = integrate(golden(), KValue::Float(std::f64::consts::SQRT_2), 1.0, 5.0, 1e-9).unwrap();
    assert!(traj.ledger.iter().all(|l| l.o.is_nan() && l.e.is_nan()));
    assert!(traj.drift().h <= 1e-8);
}

#[test]
fn falling_into_the_pole_keeps_partial_output() {
    let init = PhaseState::new(0.0, 1.2, 0.0, 0.4, 0.0);
    let err = integrate(init, k(3, 2), 0.0, 10.0, 1e-10).unwrap_err();
    assert!(err.t > 0.0 && err.t < 10.0);
    assert!(!err.partial.samples.is_empty());
    assert!(err.partial.samples.iter().all(|s| s.t <= err.t));
}

#[test]
fn step_budget_is_enforced() {
    let opts = IntegrateOptions {
        max_steps: 10,
        ..IntegrateOptions::new(1e-10)
    };
    assert!(integrate_with(golden(), k(1, 1), 1.0, 100.0, opts).is_err());
}

#[test]
fn commensurate_orbit_closes() {
    let init = PhaseState::new(0.0, 1.3, 0.3, 0.2, 0.5);
    let traj = integrate(init, k(1, 1), 0.5, 30.0, 1e-11).unwrap();
    assert!(detect_closure(&traj, 1e-4).is_some());
}
