//! Published closed forms for the low-order cases `(m, n) ∈ {(1,1), (1,2),
//! (2,1), (3,1)}`, transcribed once by hand into the canonical symbol set.

use crate::diffop::{ops, DiffOp};
use crate::poly::{q, qi, trig::*, Poly, Var, Q};
use crate::symexpr::PhaseExpr;

/// `{O, E}` as a function of `(O, H, H_φ)`.
pub type BracketRhs = fn(&PhaseExpr, &PhaseExpr, &PhaseExpr) -> PhaseExpr;

/// Closed forms of the classical symmetries for one case.
pub struct ClassicalReference {
    pub o: PhaseExpr,
    pub e: PhaseExpr,
    /// Coefficient `c` in the printed relation `{H_φ, O} = −c E`.
    pub hphi_o_coeff: Q,
    /// Coefficient `c` in the printed relation `{H_φ, E} = c H_φ O`.
    pub hphi_e_coeff: Q,
    /// Printed right-hand side of `{O, E}` as a function of `(O, H, H_φ)`.
    pub o_e_bracket: BracketRhs,
}

/// Closed forms of the quantum symmetries for one case.
pub struct QuantumReference {
    pub o: DiffOp,
    pub e: DiffOp,
    pub p1: Poly,
    pub p2: Poly,
}

fn pt() -> Poly {
    Poly::var(Var::PTheta)
}
fn pp() -> Poly {
    Poly::var(Var::PPhi)
}
fn a() -> Poly {
    alpha2()
}
fn c(n: i64) -> Poly {
    Poly::int(n)
}
fn r(n: i64, d: i64) -> Poly {
    Poly::rat(n, d)
}

fn o11() -> Poly {
    -(pp() * cot_t() * cos_p()) - sin_p() * pt()
}

fn e11() -> Poly {
    -(cos_p() * pt() * pp()) + cot_t() * (pp().pow(2) * sin_p() + a() * sec_p() * tan_p())
}

fn o12() -> Poly {
    let inner = -(pp().pow(2) * cos_p().pow(2) * cot_t()) - c(4) * pt() * pp() * cos_p() * sin_p()
        + cot_t() * (pp().pow(2) * sin_p().pow(2) + a() * tan_p().pow(2));
    inner.scale(&q(1, 2))
}

fn e12() -> Poly {
    -(pt() * pp().pow(2) * cos_p().pow(2))
        + pp().pow(3) * cos_p() * cot_t() * sin_p()
        + pt() * pp().pow(2) * sin_p().pow(2)
        + a() * tan_p() * (pp() * cot_t() + pt() * tan_p())
}

fn o21() -> Poly {
    -(c(4) * pt() * pp() * cos_p() * cot_t()) - (pt().pow(2) - c(4) * pp().pow(2) * cot_t().pow(2)) * sin_p()
        + c(4) * a() * cot_t().pow(2) * sec_p() * tan_p()
}

fn e21() -> Poly {
    -(pp() * cos_p() * (pt().pow(2) - c(4) * pp().pow(2) * cot_t().pow(2)))
        + c(4)
            * cot_t()
            * (pp() * a() * cot_t() * sec_p() + pt() * pp().pow(2) * sin_p() + pt() * a() * sec_p() * tan_p())
}

fn o31() -> Poly {
    c(9) * pp() * cos_p() * cot_t() * (pt().pow(2) - c(3) * pp().pow(2) * cot_t().pow(2))
        - c(27) * pp() * a() * cot_t().pow(3) * sec_p()
        + pt().pow(3) * sin_p()
        - c(27) * pt() * cot_t().pow(2) * (pp().pow(2) * sin_p() + a() * sec_p() * tan_p())
}

fn e31() -> Poly {
    let sq = (pp().pow(2) + c(2) * a() + pp().pow(2) * cos_2p()).pow(2);
    let bracket = c(3) * pt() * pp() * a() * cot_t() * sec_p()
        - r(3, 4) * sq * cot_t().pow(2) * sec_p().pow(3) * tan_p()
        + pt().pow(2) * (pp().pow(2) * sin_p() + a() * sec_p() * tan_p());
    pt() * pp() * cos_p() * (pt().pow(2) - c(27) * pp().pow(2) * cot_t().pow(2)) - c(9) * cot_t() * bracket
}

fn ph(p: Poly) -> PhaseExpr {
    PhaseExpr::from_poly(p)
}

fn bracket_11(o: &PhaseExpr, h: &PhaseExpr, hp: &PhaseExpr) -> PhaseExpr {
    let a = PhaseExpr::alpha2();
    -o.pow(2) - (hp - &a) + (h - hp)
}

fn bracket_12(o: &PhaseExpr, h: &PhaseExpr, hp: &PhaseExpr) -> PhaseExpr {
    let a = PhaseExpr::alpha2();
    let u = hp - &a;
    let v = h - &hp.scale(&q(1, 4));
    -o.pow(2).scale(&qi(2)) + (u.scale(&q(-1, 2)) + v.scale(&qi(4))) * u
}

fn bracket_21(o: &PhaseExpr, h: &PhaseExpr, hp: &PhaseExpr) -> PhaseExpr {
    let a = PhaseExpr::alpha2();
    let u = hp - &a;
    let v = h - &hp.scale(&qi(4));
    -o.pow(2) + (u.scale(&qi(-8)) + v.clone()) * v
}

fn bracket_31(o: &PhaseExpr, h: &PhaseExpr, hp: &PhaseExpr) -> PhaseExpr {
    let a = PhaseExpr::alpha2();
    let u = hp - &a;
    let v = h - &hp.scale(&qi(9));
    -o.pow(2) + (u.scale(&qi(-27)) + v.clone()) * v.pow(2)
}

/// Classical reference forms, when the case has one.
pub fn classical_case(m: u32, n: u32) -> Option<ClassicalReference> {
    let (o, e, co, ce, br): (Poly, Poly, Q, Q, BracketRhs) = match (m, n) {
        (1, 1) => (o11(), e11(), qi(2), qi(2), bracket_11),
        (1, 2) => (o12(), e12(), qi(4), qi(4), bracket_12),
        (2, 1) => (o21(), e21(), qi(2), qi(2), bracket_21),
        (3, 1) => (o31(), e31(), qi(1), qi(1), bracket_31),
        _ => return None,
    };
    Some(ClassicalReference {
        o: ph(o),
        e: ph(e),
        hphi_o_coeff: co,
        hphi_e_coeff: ce,
        o_e_bracket: br,
    })
}

fn t(coef: Poly, i: u16, j: u16) -> DiffOp {
    DiffOp::term(coef, i, j)
}

/// `op ∘ Ĥ_φ^e`.
fn hp(op: DiffOp, e: u32) -> DiffOp {
    op.compose(&ops::hphi().pow(e))
}

fn h(e: i32, f: i32) -> Poly {
    Poly::var_pow(Var::Energy, e as i16) * Poly::var_pow(Var::Hphi, f as i16)
}

fn quantum_11() -> QuantumReference {
    let o = t(-(cot_t() * cos_p()), 0, 1) + t(-sin_p(), 1, 0);
    let e = hp(t(cot_t() * sin_p(), 0, 0), 1) + t(cos_p(), 1, 1);
    let p1 = -(a() * h(1, 0)) + (a() - c(1) + h(1, 0)) * h(0, 1) - h(0, 2);
    let p2 = a() + h(1, 0) - c(2) * h(0, 1);
    QuantumReference { o, e, p1, p2 }
}

fn quantum_12() -> QuantumReference {
    let o = hp(t(r(1, 2) * cot_t() * sin_p().pow(2), 0, 0), 1)
        + t(-(r(1, 2) * cot_t() * sin_2p()), 0, 1)
        + t(r(1, 2) * cot_t() * cos_p().pow(2), 0, 2)
        + t(cos_2p(), 1, 0)
        + t(sin_2p(), 1, 1);
    let e = hp(t(-(r(1, 2) * cot_t() * cos_2p()), 0, 0), 1)
        + hp(t(-(r(1, 2) * cot_t() * sin_2p()), 0, 1), 1)
        + hp(t(-sin_p().pow(2), 1, 0), 1)
        + t(sin_2p(), 1, 1)
        + t(-cos_p().pow(2), 1, 2);
    let p1 = a() * (a() - c(2)) * h(1, 0)
        + r(1, 4) * (c(-4) + c(10) * a() - a().pow(2) + c(4) * (c(5) - c(2) * a()) * h(1, 0)) * h(0, 1)
        + r(1, 4) * (c(-13) + c(2) * a() + c(4) * h(1, 0)) * h(0, 2)
        - r(1, 4) * h(0, 3);
    let p2 = a() * (c(1) - r(1, 2) * a())
        + c(2) * (c(1) - c(2) * a()) * h(1, 0)
        + (c(2) * a() - c(3)) * h(0, 1)
        + c(4) * h(1, 1)
        - r(3, 2) * h(0, 2);
    QuantumReference { o, e, p1, p2 }
}

fn quantum_21() -> QuantumReference {
    let csc2 = csc_t().pow(2);
    let o = t(-((c(3) + cos_2t()) * csc2.clone() * cos_p()), 0, 1)
        + hp(t(c(4) * cot_t().pow(2) * sin_p(), 0, 0), 1)
        + t(-(cot_t() * sin_p()), 1, 0)
        + t(c(4) * cot_t() * cos_p(), 1, 1)
        + t(sin_p(), 2, 0);
    let e = hp(t((c(3) + c(2) * cos_2t()) * csc2 * sin_p(), 0, 0), 1)
        + hp(t(-(c(4) * cot_t().pow(2) * cos_p()), 0, 1), 1)
        + hp(t(-(c(4) * cot_t() * sin_p()), 1, 0), 1)
        + t(cot_t() * cos_p(), 1, 1)
        + t(-cos_p(), 2, 1);
    let p1 = a() * (c(2) - h(1, 0)) * h(1, 0)
        + (c(4) - c(20) * a() + (c(8) * a() - c(10)) * h(1, 0) + h(2, 0)) * h(0, 1)
        + (c(52) - c(16) * a() - c(8) * h(1, 0)) * h(0, 2)
        + c(16) * h(0, 3);
    let p2 = c(-4) * a()
        + c(2) * (c(4) * a() - c(1)) * h(1, 0)
        + h(2, 0)
        + c(8) * (c(3) - c(4) * a() - c(2) * h(1, 0)) * h(0, 1)
        + c(48) * h(0, 2);
    QuantumReference { o, e, p1, p2 }
}

fn quantum_31() -> QuantumReference {
    let csc2 = csc_t().pow(2);
    let cos3sum = c(15) * cos_t() + cos_3t();
    let o = hp(
        t(r(27, 2) * cot_t() * (c(3) + cos_2t()) * csc2.clone() * sin_p(), 0, 0),
        1,
    ) + hp(t(-(c(27) * cot_t().pow(3) * cos_p()), 0, 1), 1)
        + hp(t(-(c(27) * cot_t().pow(2) * sin_p()), 1, 0), 1)
        + t(-(r(3, 2) * cos3sum.clone() * csc_t().pow(3) * cos_p()), 0, 1)
        + t(-((c(2) + cos_2t()) * csc2.clone() * sin_p()), 1, 0)
        + t(cos_p() * (c(18) * cot_t().pow(2) + c(9) * csc2.clone()), 1, 1)
        + t(c(3) * cot_t() * sin_p(), 2, 0)
        + t(-(c(9) * cos_p() * cot_t()), 2, 1)
        + t(-sin_p(), 3, 0);
    let inner = hp(t(c(3) * (c(3) + cos_2t()) * cot_t() * cos_p(), 0, 1), 1)
        + hp(t(-(c(6) * cos_t().pow(2) * cos_p()), 1, 1), 1)
        + hp(t(sin_p() * c(2) * (c(2) + cos_2t()), 1, 0), 1)
        + hp(t(-(sin_p() * sin_2t()), 2, 0), 1);
    let e = hp(t(c(27) * cot_t().pow(3) * sin_p(), 0, 0), 2)
        + hp(t(r(3, 2) * csc2.clone() * cos3sum * csc_t() * sin_p(), 0, 0), 1)
        + inner.left_mul(&(r(-9, 2) * csc2.clone()))
        + t(cos_p() * (c(2) + cos_2t()) * csc2, 1, 1)
        + t(-(c(3) * cos_p() * cot_t()), 2, 1)
        + t(cos_p(), 3, 1);
    let p1 = a() * (c(-12) * h(1, 0) + c(8) * h(2, 0) - h(3, 0))
        + (c(-36) + c(360) * a() + (c(120) - c(351) * a()) * h(1, 0) + (c(27) * a() - c(35)) * h(2, 0) + h(3, 0))
            * h(0, 1)
        + (c(-1737) + c(2511) * a() + (c(837) - c(243) * a()) * h(1, 0) - c(27) * h(2, 0)) * h(0, 2)
        + (c(-4698) + c(729) * a() + c(243) * h(1, 0)) * h(0, 3)
        - c(729) * h(0, 4);
    let p2 = c(36) * a()
        + (c(12) - c(108) * a()) * h(1, 0)
        + (c(27) * a() - c(8)) * h(2, 0)
        + h(3, 0)
        + (c(-396) + c(1377) * a() + (c(459) - c(486) * a()) * h(1, 0) - c(54) * h(2, 0)) * h(0, 1)
        + (c(-3888) + c(2187) * a() + c(729) * h(1, 0)) * h(0, 2)
        - c(2916) * h(0, 3);
    QuantumReference { o, e, p1, p2 }
}

/// Quantum reference forms, when the case has one.
pub fn quantum_case(m: u32, n: u32) -> Option<QuantumReference> {
    match (m, n) {
        (1, 1) => Some(quantum_11()),
        (1, 2) => Some(quantum_12()),
        (2, 1) => Some(quantum_21()),
        (3, 1) => Some(quantum_31()),
        _ => None,
    }
}
