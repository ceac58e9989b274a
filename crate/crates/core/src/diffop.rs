//! Normal-ordered linear differential operators in `∂_θ, ∂_φ`.
//!
//! Coefficients are [`Poly`] values in the trigonometric symbols, `a`, the
//! formal eigenvalue `ε` and the formal shift parameter `M`. Derivatives
//! always stand to the right of coefficients, so an operator is zero exactly
//! when every stored coefficient is zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{qi, trig, Monomial, Poly, Var, Q};

const OP_VARS: [Var; 8] = [
    Var::Alpha2,
    Var::SinTheta,
    Var::CosTheta,
    Var::CosPhi,
    Var::SinPhi,
    Var::Eps,
    Var::M,
    Var::Energy,
];

/// `Σ c_{ij} ∂_θ^i ∂_φ^j`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    terms: BTreeMap<(u16, u16), Poly>,
}

fn binomial(n: u16, k: u16) -> i64 {
    let mut r: i64 = 1;
    for t in 0..k as i64 {
        r = r * (n as i64 - t) / (t + 1);
    }
    r
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        DiffOp::scalar(Poly::one())
    }

    /// Multiplication operator by `c`.
    pub fn scalar(c: Poly) -> Self {
        DiffOp::term(c, 0, 0)
    }

    pub fn constant(c: Q) -> Self {
        DiffOp::scalar(Poly::constant(c))
    }

    /// `c ∂_θ^i ∂_φ^j`.
    pub fn term(c: Poly, i: u16, j: u16) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        DiffOp { terms }
    }

    /// Like [`DiffOp::term`] but rejects phase-space symbols.
    pub fn try_term(c: Poly, i: u16, j: u16) -> Result<Self> {
        for (m, _) in c.terms() {
            for v in Var::ALL {
                if m.exp(v) != 0 && !OP_VARS.contains(&v) {
                    return Err(Error::ForeignSymbol(format!("{v:?}")));
                }
            }
        }
        Ok(DiffOp::term(c, i, j))
    }

    pub fn d_theta() -> Self {
        DiffOp::term(Poly::one(), 1, 0)
    }

    pub fn d_phi() -> Self {
        DiffOp::term(Poly::one(), 0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `((i, j), c)` for each term `c ∂_θ^i ∂_φ^j`, sorted by `(i, j)`.
    pub fn terms(&self) -> impl Iterator<Item = (&(u16, u16), &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u16, j: u16) -> Poly {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Total derivative order (0 for the zero operator).
    pub fn order(&self) -> u16 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Highest-order part.
    pub fn top_part(&self) -> DiffOp {
        let d = self.order();
        DiffOp {
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| i + j == d)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        self.terms.values().any(|c| c.contains(v))
    }

    fn add_term(&mut self, key: (u16, u16), c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn scale(&self, c: &Q) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero();
        }
        self.map_coeffs(|p| p.scale(c))
    }

    /// Left multiplication by a function: `f ∘ P`.
    pub fn left_mul(&self, f: &Poly) -> DiffOp {
        self.map_coeffs(|p| p * f)
    }

    fn map_coeffs(&self, f: impl Fn(&Poly) -> Poly) -> DiffOp {
        let mut out = DiffOp::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, f(c));
        }
        out
    }

    /// Substitute a polynomial for a coefficient symbol.
    pub fn substitute(&self, v: Var, value: &Poly) -> DiffOp {
        self.map_coeffs(|p| p.substitute(v, value))
    }

    /// `ε → ε + δ`.
    pub fn shift_eps(&self, delta: i64) -> DiffOp {
        self.map_coeffs(|p| p.shift(Var::Eps, &qi(delta)))
    }

    /// `P = Σ ε^j D_j`, returned as `j ↦ D_j`.
    pub fn eps_parts(&self) -> BTreeMap<i16, DiffOp> {
        let mut out: BTreeMap<i16, DiffOp> = BTreeMap::new();
        for (k, c) in &self.terms {
            for (e, part) in c.split_by(Var::Eps) {
                out.entry(e).or_default().add_term(*k, part);
            }
        }
        out
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let mut out = DiffOp::zero();
        for (&(qi_, qj), d) in &other.terms {
            // derivs[r][t] = ∂_θ^r ∂_φ^t d
            let mut derivs: Vec<Vec<Poly>> = Vec::with_capacity(max_i as usize + 1);
            let mut row0 = vec![d.clone()];
            for t in 1..=max_j as usize {
                let next = row0[t - 1].d_phi();
                row0.push(next);
            }
            derivs.push(row0);
            for r in 1..=max_i as usize {
                let row: Vec<Poly> = derivs[r - 1].iter().map(|p| p.d_theta()).collect();
                derivs.push(row);
            }
            for (&(a, b), c) in &self.terms {
                for r in 0..=a {
                    for t in 0..=b {
                        let dd = &derivs[r as usize][t as usize];
                        if dd.is_zero() {
                            continue;
                        }
                        let mult = binomial(a, r) * binomial(b, t);
                        let coeff = (c * dd).scale(&qi(mult));
                        out.add_term((a - r + qi_, b - t + qj), coeff);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffOp {
        let mut out = DiffOp::identity();
        for _ in 0..e {
            out = out.compose(self);
        }
        out
    }

    /// `[P, Q] = PQ − QP`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        &self.compose(other) - &other.compose(self)
    }

    /// Formal adjoint for the measure `sin θ dθ dφ`:
    /// `∂_θ† = −(∂_θ + cot θ)`, `∂_φ† = −∂_φ`, real functions self-adjoint.
    pub fn adjoint(&self) -> DiffOp {
        let max_i = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let dt_adj = -(DiffOp::d_theta() + DiffOp::scalar(trig::cot_t()));
        let mut theta_pows = vec![DiffOp::identity()];
        for _ in 0..max_i {
            let next = theta_pows.last().unwrap().compose(&dt_adj);
            theta_pows.push(next);
        }
        let mut out = DiffOp::zero();
        for (&(i, j), c) in &self.terms {
            // (c ∂_θ^i ∂_φ^j)† = (∂_φ†)^j (∂_θ†)^i c
            let tail = theta_pows[i as usize].compose(&DiffOp::scalar(c.clone()));
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let piece = shift_phi(&tail, j).scale(&qi(sign));
            out = out + piece;
        }
        out
    }

    /// Apply to a function given as a coefficient-ring element.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            let mut g = f.clone();
            for _ in 0..i {
                g = g.d_theta();
            }
            for _ in 0..j {
                g = g.d_phi();
            }
            out += &(c * &g);
        }
        out
    }

    /// Principal symbol of order `d`: `∂_θ → i p_θ`, `∂_φ → i p_φ` on the
    /// terms of total order `d`.
    pub fn principal_symbol(&self, d: u16) -> Poly {
        let mut out = Poly::zero();
        for (&(i, j), c) in &self.terms {
            if i + j != d {
                continue;
            }
            let mono = Monomial::ONE.with(Var::PTheta, i as i16).with(Var::PPhi, j as i16);
            let i_pow = Poly::var(Var::I).pow((i + j) as u32);
            out += &(&(c * &i_pow) * &Poly::monomial(mono, Q::one()));
        }
        out
    }

    /// Numerical evaluation of `(P f)(θ, φ)` where the caller supplies all
    /// needed partial derivatives of `f` through `df(i, j)`.
    pub fn eval_on(&self, values: &[f64; crate::poly::NVARS], mut df: impl FnMut(u16, u16) -> f64) -> f64 {
        self.terms.iter().map(|(&(i, j), c)| c.eval(values).re * df(i, j)).sum()
    }
}

/// `∂_φ^j ∘ P`.
fn shift_phi(p: &DiffOp, j: u16) -> DiffOp {
    if j == 0 {
        return p.clone();
    }
    DiffOp::term(Poly::one(), 0, j).compose(p)
}

impl<'a> Add<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &'a DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &'a DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.map_coeffs(|p| -p)
    }
}

impl Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        -&self
    }
}

/// Operator product.
impl<'a> Mul<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &'a DiffOp) -> DiffOp {
        self.compose(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DiffOp {
            type Output = DiffOp;
            fn $m(self, rhs: DiffOp) -> DiffOp {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a DiffOp> for DiffOp {
            type Output = DiffOp;
            fn $m(self, rhs: &'a DiffOp) -> DiffOp {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<DiffOp> for &'a DiffOp {
            type Output = DiffOp;
            fn $m(self, rhs: DiffOp) -> DiffOp {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "*Dth^{i}")?;
            }
            if j > 0 {
                write!(f, "*Dph^{j}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOp({self})")
    }
}

/// Standard operators of the quantum problem.
pub mod ops {
    use super::*;

    /// `Ĥ_φ = −∂_φ² + a/cos²φ`.
    pub fn hphi() -> DiffOp {
        DiffOp::term(-Poly::one(), 0, 2) + DiffOp::scalar(trig::alpha2() * trig::sec_p().pow(2))
    }

    /// `Ĥ_θ^M = −∂_θ² − cot θ ∂_θ + M²/sin²θ`.
    pub fn htheta(m: &Poly) -> DiffOp {
        DiffOp::term(-Poly::one(), 2, 0)
            + DiffOp::term(-trig::cot_t(), 1, 0)
            + DiffOp::scalar(m.pow(2) * trig::csc_t().pow(2))
    }

    /// `Ĥ = −∂_θ² − cot θ ∂_θ + k²/sin²θ · Ĥ_φ`.
    pub fn hamiltonian(k: &Q) -> DiffOp {
        DiffOp::term(-Poly::one(), 2, 0)
            + DiffOp::term(-trig::cot_t(), 1, 0)
            + hphi().left_mul(&(trig::csc_t().pow(2).scale(&(k * k))))
    }

    /// `B̂⁺_x = −cos φ ∂_φ + x sin φ`.
    pub fn b_plus(x: &Poly) -> DiffOp {
        DiffOp::term(-trig::cos_p(), 0, 1) + DiffOp::scalar(x * &trig::sin_p())
    }

    /// `B̂⁻_x = cos φ ∂_φ + (x+1) sin φ`.
    pub fn b_minus(x: &Poly) -> DiffOp {
        DiffOp::term(trig::cos_p(), 0, 1) + DiffOp::scalar(&(x + &Poly::one()) * &trig::sin_p())
    }

    /// `Â⁺_M = −∂_θ + (M−1) cot θ`.
    pub fn a_plus(m: &Poly) -> DiffOp {
        DiffOp::term(-Poly::one(), 1, 0) + DiffOp::scalar(&(m - &Poly::one()) * &trig::cot_t())
    }

    /// `Â⁻_M = ∂_θ + M cot θ`.
    pub fn a_minus(m: &Poly) -> DiffOp {
        DiffOp::d_theta() + DiffOp::scalar(m * &trig::cot_t())
    }

    /// `λ_M = M(M−1)`.
    pub fn lambda(m: &Poly) -> Poly {
        m * &(m - &Poly::one())
    }

    /// Map a polynomial in the commuting symbols `Ĥ` ([`Var::Energy`]) and
    /// `Ĥ_φ` ([`Var::Hphi`]) to the corresponding operator.
    pub fn poly_in_h(p: &Poly, h: &DiffOp, hp: &DiffOp) -> DiffOp {
        let mut h_pows = vec![DiffOp::identity()];
        let mut hp_pows = vec![DiffOp::identity()];
        let mut out = DiffOp::zero();
        for (m, c) in p.terms() {
            let (eh, ep) = (m.exp(Var::Energy) as usize, m.exp(Var::Hphi) as usize);
            while h_pows.len() <= eh {
                let next = h_pows.last().unwrap().compose(h);
                h_pows.push(next);
            }
            while hp_pows.len() <= ep {
                let next = hp_pows.last().unwrap().compose(hp);
                hp_pows.push(next);
            }
            let rest = Poly::monomial(m.with(Var::Energy, 0).with(Var::Hphi, 0), c.clone());
            out = out + h_pows[eh].compose(&hp_pows[ep]).left_mul(&rest);
        }
        out
    }
}

/// Reduction of an operator acting on a separated formal eigenfunction
/// `Ψ = Θ(θ) Φ(φ)` with `Ĥ_φ Φ = ε² Φ` and `Ĥ Ψ = E Ψ` (`E` is
/// [`Var::Energy`]). Every operator collapses to
/// `c₀₀ Ψ + c₁₀ Θ'Φ + c₀₁ ΘΦ' + c₁₁ Θ'Φ'`; the four coefficients are
/// returned in that order.
#[derive(Clone, Debug)]
pub struct OnShell {
    k2: Q,
}

impl OnShell {
    pub fn new(k: &Q) -> Self {
        OnShell { k2: k * k }
    }

    /// `(Φ^{(j)} = r0 Φ + r1 Φ')` for `j = 0..=n`.
    fn phi_table(&self, n: u16) -> Vec<(Poly, Poly)> {
        let v = trig::alpha2() * trig::sec_p().pow(2) - Poly::var_pow(Var::Eps, 2);
        let mut out = vec![(Poly::one(), Poly::zero())];
        for _ in 0..n {
            let (r0, r1) = out.last().unwrap();
            let n0 = r0.d_phi() + r1 * &v;
            let n1 = r0 + &r1.d_phi();
            out.push((n0, n1));
        }
        out
    }

    /// `(Θ^{(i)} = u0 Θ + u1 Θ')` for `i = 0..=n`, with `M = kε`.
    fn theta_table(&self, n: u16) -> Vec<(Poly, Poly)> {
        let u0 = (Poly::var_pow(Var::Eps, 2) * trig::csc_t().pow(2)).scale(&self.k2) - Poly::var(Var::Energy);
        let u1 = -trig::cot_t();
        let mut out = vec![(Poly::one(), Poly::zero())];
        for _ in 0..n {
            let (a0, a1) = out.last().unwrap();
            let n0 = a0.d_theta() + a1 * &u0;
            let n1 = &(a0 + &a1.d_theta()) + &(a1 * &u1);
            out.push((n0, n1));
        }
        out
    }

    pub fn reduce(&self, op: &DiffOp) -> [Poly; 4] {
        let max_i = op.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = op.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let th = self.theta_table(max_i);
        let ph = self.phi_table(max_j);
        let mut out: [Poly; 4] = Default::default();
        for (&(i, j), c) in &op.terms {
            let (u0, u1) = &th[i as usize];
            let (r0, r1) = &ph[j as usize];
            let cu0 = c * u0;
            let cu1 = c * u1;
            out[0] += &(&cu0 * r0);
            out[1] += &(&cu1 * r0);
            out[2] += &(&cu0 * r1);
            out[3] += &(&cu1 * r1);
        }
        out
    }

    /// Reduced form as an operator of order ≤ 1 in each variable.
    pub fn reduce_op(&self, op: &DiffOp) -> DiffOp {
        let [c00, c10, c01, c11] = self.reduce(op);
        DiffOp::term(c00, 0, 0) + DiffOp::term(c10, 1, 0) + DiffOp::term(c01, 0, 1) + DiffOp::term(c11, 1, 1)
    }
}

/// Verify the θ-hierarchy intertwining and factorization with `M` formal.
pub fn intertwine_check() -> crate::report::VerificationReport {
    intertwine_check_with(None)
}

pub fn intertwine_check_with(fault: Option<crate::report::Fault>) -> crate::report::VerificationReport {
    use crate::report::{AlphaMode, CaseId, Fault, VerificationReport};
    let k = crate::classical::RationalK::new(1, 1).expect("unit ratio");
    let mut r = VerificationReport::new("intertwining", CaseId::new(&k, AlphaMode::Symbolic));
    let m = Poly::var(Var::M);
    let m1 = &m - &Poly::one();
    let lam = match fault {
        Some(Fault::WrongLambda) => &m * &(&m + &Poly::one()),
        _ => ops::lambda(&m),
    };
    r.check_zero("A+_M A-_M + lambda_M = H_theta^M", "theta-factorization", || {
        ops::a_plus(&m).compose(&ops::a_minus(&m)) + DiffOp::scalar(lam.clone()) - ops::htheta(&m)
    });
    r.check_zero("A-_M H_theta^M = H_theta^(M-1) A-_M", "theta-intertwining", || {
        ops::a_minus(&m).compose(&ops::htheta(&m)) - ops::htheta(&m1).compose(&ops::a_minus(&m))
    });
    r.check_zero("A+_M H_theta^(M-1) = H_theta^M A+_M", "theta-intertwining", || {
        ops::a_plus(&m).compose(&ops::htheta(&m1)) - ops::htheta(&m).compose(&ops::a_plus(&m))
    });
    r.check_zero("A-_1 H^1 - H^0 A-_1 = 0", "theta-intertwining", || {
        let one = Poly::one();
        let zero = Poly::zero();
        ops::a_minus(&one).compose(&ops::htheta(&one)) - ops::htheta(&zero).compose(&ops::a_minus(&one))
    });
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::trig::*;

    #[test]
    fn leibniz_example() {
        let got = DiffOp::d_phi().compose(&DiffOp::scalar(cos_p()));
        let expect = DiffOp::term(cos_p(), 0, 1) - DiffOp::scalar(sin_p());
        assert_eq!(got, expect);
    }

    #[test]
    fn ladder_factorization_exact_and_on_shell() {
        let eps = Poly::var(Var::Eps);
        let prod = ops::b_minus(&eps).compose(&ops::b_plus(&eps));
        let scalar = &(&eps * &(&eps + &Poly::one())) - &alpha2();
        let exact =
            ops::hphi().left_mul(&cos_p().pow(2)) + DiffOp::scalar(-(cos_p().pow(2) * eps.pow(2)) + scalar.clone());
        assert_eq!(prod, exact);
        let red = OnShell::new(&qi(1)).reduce_op(&prod);
        assert_eq!(red, DiffOp::scalar(scalar));
    }

    #[test]
    fn theta_factorization() {
        let m = Poly::var(Var::M);
        let lhs = ops::a_plus(&m).compose(&ops::a_minus(&m)) + DiffOp::scalar(ops::lambda(&m));
        assert_eq!(lhs, ops::htheta(&m));
    }

    #[test]
    fn intertwining_report_passes_and_mutation_fails() {
        assert!(intertwine_check().passed());
        let bad = intertwine_check_with(Some(crate::report::Fault::WrongLambda));
        assert!(!bad.passed());
    }

    #[test]
    fn adjoint_atoms() {
        assert_eq!(DiffOp::identity().adjoint(), DiffOp::identity());
        assert_eq!(DiffOp::d_phi().adjoint(), -DiffOp::d_phi());
        assert_eq!(
            DiffOp::d_theta().adjoint(),
            -(DiffOp::d_theta() + DiffOp::scalar(cot_t()))
        );
        let h = ops::hamiltonian(&qi(2));
        assert_eq!(h.adjoint(), h);
        assert_eq!(ops::hphi().adjoint(), ops::hphi());
    }

    #[test]
    fn separability() {
        let h = ops::hamiltonian(&crate::poly::q(3, 2));
        assert!(h.commutator(&ops::hphi()).is_zero());
    }

    #[test]
    fn poly_in_h_maps_symbols() {
        let p = Poly::var(Var::Energy) * Poly::var(Var::Hphi) - trig::alpha2();
        let h = ops::hamiltonian(&qi(1));
        let hp = ops::hphi();
        let got = ops::poly_in_h(&p, &h, &hp);
        let expect = h.compose(&hp) - DiffOp::scalar(trig::alpha2());
        assert_eq!(got, expect);
    }

    #[test]
    fn foreign_symbols_rejected() {
        assert!(DiffOp::try_term(Poly::var(Var::PTheta), 0, 0).is_err());
        assert!(DiffOp::try_term(Poly::var(Var::Eps), 1, 0).is_ok());
    }

    #[test]
    fn eps_parts_roundtrip() {
        let eps = Poly::var(Var::Eps);
        let x = ops::a_plus(&eps).compose(&ops::b_plus(&eps));
        let parts = x.eps_parts();
        let mut back = DiffOp::zero();
        for (e, d) in parts {
            back = back + d.left_mul(&Poly::var_pow(Var::Eps, e));
        }
        assert_eq!(back, x);
    }
}
