use symforge::classical::{RationalK, Sign};
use symforge::diffop::{intertwine_check, ops, OnShell};
use symforge::poly::{Poly, Var};
use symforge::quantum::{
    build_x_quantum, verify_hermitian, verify_quantum_algebra, verify_quantum_algebra_with, QuantumOptions,
    QuantumSymmetrySet,
};
use symforge::report::{Fault, Status};
use symforge::DiffOp;

fn k(m: u32, n: u32) -> RationalK {
    RationalK::new(m, n).unwrap()
}

#[test]
fn ladder_and_shift_intertwine() {
    let r = intertwine_check();
    assert!(r.passed(), "{r}");
}

#[test]
fn x_operators_commute_with_h_on_eigenfunctions() {
    for kk in RationalK::enumerate(4) {
        let h = ops::hamiltonian(&kk.value());
        let shell = OnShell::new(&kk.value());
        for sign in [Sign::Plus, Sign::Minus] {
            let c = h.commutator(&build_x_quantum(&kk, sign));
            assert!(!c.is_zero());
            assert!(shell.reduce_op(&c).is_zero(), "{kk} {sign:?}");
        }
    }
}

#[test]
fn o_and_e_are_symmetries() {
    let set = QuantumSymmetrySet::build(k(1, 2)).unwrap();
    assert!(set.h.commutator(&set.o).is_zero());
    assert!(set.h.commutator(&set.e).is_zero());
    assert!(!set.o.is_zero() && !set.e.is_zero());
}

#[test]
fn hamiltonian_is_formally_self_adjoint() {
    let h = ops::hamiltonian(&k(3, 2).value());
    assert_eq!(h.adjoint(), h);
    assert_eq!(ops::hphi().adjoint(), ops::hphi());
}

#[test]
fn lambda_matches_the_factorization() {
    let m = Poly::var(Var::M);
    let lhs = ops::a_plus(&m).compose(&ops::a_minus(&m)) + DiffOp::scalar(ops::lambda(&m));
    assert_eq!(lhs, ops::htheta(&m));
}

#[test]
fn small_cases_verify() {
    for kk in RationalK::enumerate(4) {
        let r = verify_quantum_algebra(kk).unwrap();
        assert!(r.passed(), "{r}");
        let h = verify_hermitian(kk).unwrap();
        assert!(h.passed() && h.discrepancies().count() == 0, "{h}");
    }
}

#[test]
fn faults_are_detected() {
    for (fault, kk) in [
        (Fault::WrongLambda, k(2, 1)),
        (Fault::WrongChainIndex, k(2, 1)),
        (Fault::WrongCommutatorPower, k(1, 2)),
    ] {
        let r = verify_quantum_algebra_with(kk, QuantumOptions { fault: Some(fault) }).unwrap();
        assert!(r.entries.iter().any(|e| e.status == Status::Fail), "{fault:?}");
    }
}
