use symforge::classical::{
    build_x, verify_classical_algebra, verify_classical_algebra_with, ClassicalOptions, ClassicalSymmetrySet,
    RationalK, Sign,
};
use symforge::report::{Fault, Status};
use symforge::symexpr::{poisson, PhaseExpr};

fn k(m: u32, n: u32) -> RationalK {
    RationalK::new(m, n).unwrap()
}

#[test]
fn ratios_must_be_coprime_and_positive() {
    assert!(RationalK::new(2, 4).is_err());
    assert!(RationalK::new(0, 1).is_err());
    assert_eq!(RationalK::enumerate(4).len(), 4);
}

#[test]
fn symmetries_commute_with_the_hamiltonian() {
    for kk in RationalK::enumerate(5) {
        let set = ClassicalSymmetrySet::build(kk).unwrap();
        for (name, f) in [("O", &set.o), ("E", &set.e), ("X+", &set.x_plus)] {
            assert!(poisson(&set.h, f).is_zero(), "{kk}: {{H, {name}}}");
        }
    }
}

#[test]
fn x_minus_is_the_conjugate() {
    let kk = k(3, 2);
    assert_eq!(build_x(&kk, Sign::Plus).conj(), build_x(&kk, Sign::Minus));
}

#[test]
fn product_identity_for_two_one() {
    let set = ClassicalSymmetrySet::build(k(2, 1)).unwrap();
    let lhs = &(&set.o.pow(2) * &PhaseExpr::hphi()) + &set.e.pow(2);
    assert_eq!(lhs, set.product_rhs());
}

#[test]
fn reports_pass_apart_from_documented_coefficients() {
    for kk in RationalK::enumerate(5)
        .into_iter()
        .filter(|kk| (kk.m(), kk.n()) != (3, 1))
    {
        let r = verify_classical_algebra(kk).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.discrepancies().count(), 0, "{r}");
    }
    let r = verify_classical_algebra(k(3, 1)).unwrap();
    assert!(r.passed());
    let disc: Vec<_> = r.discrepancies().map(|e| e.identity.as_str()).collect();
    assert_eq!(disc, ["printed {H_phi, O} = -1 E", "printed {H_phi, E} = 1 H_phi O"]);
}

#[test]
fn flipped_convention_is_caught() {
    let opts = ClassicalOptions {
        fault: Some(Fault::FlippedPoissonConvention),
        seed: 0,
    };
    let r = verify_classical_algebra_with(k(1, 1), opts).unwrap();
    assert!(r.entries.iter().any(|e| e.status == Status::Fail));
}
