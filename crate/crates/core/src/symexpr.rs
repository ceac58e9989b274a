//! Exact commutative expressions on the classical phase space
//! `(θ, φ, p_θ, p_φ)`.
//!
//! A [`PhaseExpr`] is stored as `N / H_φ^j` where `N` is a reduced [`Poly`]
//! that may contain the adjunct `s = √H_φ` (degree ≤ 1) and the imaginary
//! unit. Negative powers of `s` only arise from differentiating `s`; they are
//! written as `s⁻¹ = s·H_φ⁻¹`. Canonical form keeps `j` minimal, so two
//! expressions are equal iff their canonical representations coincide.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::dynamics::PhaseState;
use crate::error::{Error, Result};
use crate::poly::{q, qi, trig, Monomial, Poly, Var, NVARS, Q};

const TRIG_VARS: [Var; 5] = [Var::Alpha2, Var::SinTheta, Var::CosTheta, Var::CosPhi, Var::SinPhi];

const PHASE_VARS: [Var; 10] = [
    Var::Alpha2,
    Var::SinTheta,
    Var::CosTheta,
    Var::CosPhi,
    Var::SinPhi,
    Var::PTheta,
    Var::PPhi,
    Var::SqrtHphi,
    Var::I,
    Var::K,
];

/// Momentum variables, for degree counting.
pub const MOMENTA: [Var; 2] = [Var::PTheta, Var::PPhi];

fn only_vars(p: &Poly, allowed: &[Var]) -> Result<()> {
    for (m, _) in p.terms() {
        for v in Var::ALL {
            if m.exp(v) != 0 && !allowed.contains(&v) {
                return Err(Error::ForeignSymbol(format!("{v:?}")));
            }
        }
    }
    Ok(())
}

/// Trigonometric-rational scalar in `cos θ, sin θ, cos φ, sin φ` and `a = α²`.
///
/// The canonical representative is a reduced Laurent polynomial; the only
/// denominators are monomials `sin^i θ · cos^j φ`, which is enough for
/// `cot θ, csc θ, sec φ, tan φ`. [`TrigCoeff::numerator`] and
/// [`TrigCoeff::denominator`] recover the fraction view.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct TrigCoeff(Poly);

impl TrigCoeff {
    pub fn new(p: Poly) -> Result<Self> {
        only_vars(&p, &TRIG_VARS)?;
        Ok(TrigCoeff(p))
    }

    /// `num / den`, where `den` must be a nonzero monomial in `sin θ`, `cos φ`.
    pub fn ratio(num: &Poly, den: &Poly) -> Result<Self> {
        only_vars(num, &TRIG_VARS)?;
        only_vars(den, &TRIG_VARS)?;
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (m, c) = match den.len() {
            1 => den.terms().next().map(|(m, c)| (*m, c.clone())).unwrap(),
            _ => return Err(Error::NotInvertible(den.to_string())),
        };
        let mut inv = Monomial::ONE;
        for v in Var::ALL {
            let e = m.exp(v);
            if e != 0 {
                if !v.is_laurent() {
                    return Err(Error::NotInvertible(den.to_string()));
                }
                inv = inv.with(v, -e);
            }
        }
        Ok(TrigCoeff(num.mul_monomial(&inv, &(Q::one() / c))))
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Smallest monomial `sin^i θ cos^j φ` clearing all negative exponents.
    pub fn denominator(&self) -> Poly {
        let mut d = Monomial::ONE;
        for (m, _) in self.0.terms() {
            for v in [Var::SinTheta, Var::CosPhi] {
                let e = m.exp(v);
                if -e > d.exp(v) {
                    d = d.with(v, -e);
                }
            }
        }
        Poly::monomial(d, Q::one())
    }

    pub fn numerator(&self) -> Poly {
        &self.0 * &self.denominator()
    }
}

impl fmt::Display for TrigCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Differentiation variables of the phase space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseVar {
    Theta,
    Phi,
    PTheta,
    PPhi,
}

/// Sign convention of the Poisson bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convention {
    /// `{f,g} = Σ ∂f/∂q ∂g/∂p − ∂f/∂p ∂g/∂q`
    #[default]
    Standard,
    /// The opposite sign; only used to check that the standard one is forced.
    Flipped,
}

/// `H_φ = p_φ² + a / cos²φ` as a raw polynomial.
pub fn hphi_poly() -> Poly {
    Poly::var_pow(Var::PPhi, 2) + trig::alpha2() * trig::sec_p().pow(2)
}

/// Exact phase-space function `num / H_φ^hphi_pow`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PhaseExpr {
    num: Poly,
    hphi_pow: u32,
}

impl PhaseExpr {
    pub fn zero() -> Self {
        PhaseExpr::default()
    }

    pub fn one() -> Self {
        PhaseExpr::from_poly(Poly::one())
    }

    pub fn constant(c: Q) -> Self {
        PhaseExpr::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        PhaseExpr::constant(qi(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        PhaseExpr::constant(q(n, d))
    }

    /// Wrap a polynomial. Quantum-only symbols are rejected.
    pub fn try_from_poly(p: Poly) -> Result<Self> {
        only_vars(&p, &PHASE_VARS)?;
        Ok(PhaseExpr { num: p, hphi_pow: 0 })
    }

    pub fn from_poly(p: Poly) -> Self {
        PhaseExpr::try_from_poly(p).expect("phase expression contains a foreign symbol")
    }

    pub fn from_trig(c: &TrigCoeff) -> Self {
        PhaseExpr::from_poly(c.poly().clone())
    }

    pub fn p_theta() -> Self {
        PhaseExpr::from_poly(Poly::var(Var::PTheta))
    }

    pub fn p_phi() -> Self {
        PhaseExpr::from_poly(Poly::var(Var::PPhi))
    }

    /// The adjunct `s = √H_φ`.
    pub fn s() -> Self {
        PhaseExpr::from_poly(Poly::var(Var::SqrtHphi))
    }

    pub fn i() -> Self {
        PhaseExpr::from_poly(Poly::var(Var::I))
    }

    pub fn alpha2() -> Self {
        PhaseExpr::from_poly(trig::alpha2())
    }

    pub fn hphi() -> Self {
        PhaseExpr::from_poly(hphi_poly())
    }

    /// Numerator of the canonical fraction.
    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// Power of `H_φ` in the denominator.
    pub fn hphi_power(&self) -> u32 {
        self.hphi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Polynomial view; `None` when a `H_φ` denominator remains.
    pub fn as_poly(&self) -> Option<&Poly> {
        (self.hphi_pow == 0).then_some(&self.num)
    }

    /// Canonical form: strips every factor `H_φ` common to numerator and
    /// denominator. All arithmetic already returns canonical values, so this
    /// is idempotent.
    pub fn canonicalize(&self) -> PhaseExpr {
        let mut num = self.num.clone();
        let mut j = self.hphi_pow;
        while j > 0 {
            match divide_by_hphi(&num) {
                Some(quot) => {
                    num = quot;
                    j -= 1;
                }
                None => break,
            }
        }
        PhaseExpr { num, hphi_pow: j }
    }

    fn raw(num: Poly, hphi_pow: u32) -> PhaseExpr {
        PhaseExpr { num, hphi_pow }.canonicalize()
    }

    /// Numerator lifted to denominator `H_φ^target`.
    fn lifted(&self, target: u32) -> Poly {
        debug_assert!(target >= self.hphi_pow);
        let extra = target - self.hphi_pow;
        if extra == 0 {
            self.num.clone()
        } else {
            &self.num * &hphi_poly().pow(extra)
        }
    }

    pub fn scale(&self, c: &Q) -> PhaseExpr {
        PhaseExpr {
            num: self.num.scale(c),
            hphi_pow: if c.is_zero() { 0 } else { self.hphi_pow },
        }
    }

    pub fn pow(&self, e: u32) -> PhaseExpr {
        PhaseExpr::raw(self.num.pow(e), self.hphi_pow * e)
    }

    /// Complex conjugate (`i → −i`).
    pub fn conj(&self) -> PhaseExpr {
        PhaseExpr {
            num: self.num.conj(),
            hphi_pow: self.hphi_pow,
        }
    }

    /// Real part, for expressions whose other symbols are real.
    pub fn re(&self) -> PhaseExpr {
        PhaseExpr::raw(self.num.re(), self.hphi_pow)
    }

    /// Imaginary part.
    pub fn im(&self) -> PhaseExpr {
        PhaseExpr::raw(self.num.im(), self.hphi_pow)
    }

    /// Split `e = A + B·s` into `(A, B)`, both free of `s`.
    pub fn split_s(&self) -> (PhaseExpr, PhaseExpr) {
        (
            PhaseExpr::raw(self.num.coeff_of(Var::SqrtHphi, 0), self.hphi_pow),
            PhaseExpr::raw(self.num.coeff_of(Var::SqrtHphi, 1), self.hphi_pow),
        )
    }

    /// Total degree in `(p_θ, p_φ)` of the numerator minus twice the
    /// denominator power; `s` counts as degree one.
    pub fn momentum_degree(&self) -> i16 {
        self.num.total_degree(&[Var::PTheta, Var::PPhi, Var::SqrtHphi]) - 2 * self.hphi_pow as i16
    }

    pub fn contains(&self, v: Var) -> bool {
        self.num.contains(v)
    }

    /// Substitute a rational value for a symbol (e.g. `k`, or `a` for display).
    pub fn substitute_value(&self, v: Var, value: &Q) -> PhaseExpr {
        if v == Var::Alpha2 && self.hphi_pow > 0 {
            // H_φ itself depends on a; clear the denominator first.
            let hp = hphi_poly().substitute(v, &Poly::constant(value.clone()));
            let num = self.num.substitute(v, &Poly::constant(value.clone()));
            if let Some(c) = hp.as_constant() {
                let inv = (Q::one() / c).pow(self.hphi_pow as i32);
                return PhaseExpr::from_poly(num.scale(&inv));
            }
            return PhaseExpr {
                num,
                hphi_pow: self.hphi_pow,
            };
        }
        PhaseExpr::raw(self.num.substitute(v, &Poly::constant(value.clone())), self.hphi_pow)
    }

    /// Formal partial derivative. `∂s/∂φ = (a sin φ / cos³φ)/s`,
    /// `∂s/∂p_φ = p_φ/s`, with `s⁻¹ = s/H_φ`.
    pub fn diff(&self, v: PhaseVar) -> PhaseExpr {
        let (pv, dh) = match v {
            PhaseVar::Theta => (Var::SinTheta, None),
            PhaseVar::PTheta => (Var::PTheta, None),
            PhaseVar::Phi => (Var::CosPhi, Some(hphi_poly().d_phi())),
            PhaseVar::PPhi => (Var::PPhi, Some(hphi_poly().diff(Var::PPhi))),
        };
        let n_v = self.num.diff(pv);
        let dh = match dh {
            None => return PhaseExpr::raw(n_v, self.hphi_pow),
            Some(dh) => dh,
        };
        let b = self.num.diff(Var::SqrtHphi);
        let j = self.hphi_pow;
        if b.is_zero() && j == 0 {
            return PhaseExpr::raw(n_v, 0);
        }
        // [H·N_v + B·s·∂H/2 − j·N·∂H] / H^{j+1}
        let mut num = &hphi_poly() * &n_v;
        if !b.is_zero() {
            let bs = &b * &Poly::var(Var::SqrtHphi);
            num += &(&bs * &dh).scale(&q(1, 2));
        }
        if j > 0 {
            num -= &(&self.num * &dh).scale(&qi(j as i64));
        }
        PhaseExpr::raw(num, j + 1)
    }

    /// Numerical value at a physical state, with `s = +√H_φ(state)`.
    pub fn eval_numeric(&self, state: &PhaseState, alpha2: f64) -> Result<Complex64> {
        self.eval_with(state, &EvalEnv { alpha2, k: None })
    }

    pub fn eval_with(&self, state: &PhaseState, env: &EvalEnv) -> Result<Complex64> {
        let values = phase_values(state, env, self.num.contains(Var::K))?;
        let hphi = values[Var::SqrtHphi.idx()].powi(2);
        if self.hphi_pow > 0 && hphi == 0.0 {
            return Err(Error::Domain("H_phi vanishes under a H_phi denominator".into()));
        }
        Ok(self.num.eval(&values) / hphi.powi(self.hphi_pow as i32))
    }

    /// Compile to a floating-point evaluator for hot loops.
    pub fn compile(&self) -> CompiledExpr {
        CompiledExpr::new(self)
    }
}

/// Numeric parameters for evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalEnv {
    pub alpha2: f64,
    /// Value of the symbol `k`, when an expression keeps it symbolic.
    pub k: Option<f64>,
}

fn phase_values(state: &PhaseState, env: &EvalEnv, needs_k: bool) -> Result<[f64; NVARS]> {
    state.check_domain()?;
    let mut v = [0.0; NVARS];
    let cp = state.phi.cos();
    let hphi = state.p_phi * state.p_phi + env.alpha2 / (cp * cp);
    if hphi < 0.0 {
        return Err(Error::Domain(format!("negative H_phi = {hphi}")));
    }
    v[Var::Alpha2.idx()] = env.alpha2;
    v[Var::SinTheta.idx()] = state.theta.sin();
    v[Var::CosTheta.idx()] = state.theta.cos();
    v[Var::CosPhi.idx()] = cp;
    v[Var::SinPhi.idx()] = state.phi.sin();
    v[Var::PTheta.idx()] = state.p_theta;
    v[Var::PPhi.idx()] = state.p_phi;
    v[Var::SqrtHphi.idx()] = hphi.sqrt();
    if needs_k {
        v[Var::K.idx()] = env.k.ok_or(Error::Unbound("k"))?;
    }
    Ok(v)
}

/// Exact division of `n` by `H_φ`, treating `p_φ` as the main variable.
fn divide_by_hphi(n: &Poly) -> Option<Poly> {
    if n.is_zero() {
        return Some(Poly::zero());
    }
    let mut rem = n.split_by(Var::PPhi);
    let top = *rem.keys().next_back().unwrap();
    if top < 2 {
        return None;
    }
    let lower = Monomial::ONE.with(Var::Alpha2, 1).with(Var::CosPhi, -2);
    let mut quot = Poly::zero();
    for d in (2..=top).rev() {
        let r = match rem.remove(&d) {
            Some(r) if !r.is_zero() => r,
            _ => continue,
        };
        quot += &r.mul_monomial(&Monomial::ONE.with(Var::PPhi, d - 2), &Q::one());
        let sub = r.mul_monomial(&lower, &Q::one());
        let slot = rem.entry(d - 2).or_default();
        *slot -= &sub;
    }
    if rem.values().all(|r| r.is_zero()) {
        Some(quot)
    } else {
        None
    }
}

/// Poisson bracket `Σ_q ∂f/∂q ∂g/∂p_q − ∂f/∂p_q ∂g/∂q`.
pub fn poisson(f: &PhaseExpr, g: &PhaseExpr) -> PhaseExpr {
    poisson_with(f, g, Convention::Standard)
}

pub fn poisson_with(f: &PhaseExpr, g: &PhaseExpr, conv: Convention) -> PhaseExpr {
    let mut out = PhaseExpr::zero();
    for (qv, pv) in [(PhaseVar::Theta, PhaseVar::PTheta), (PhaseVar::Phi, PhaseVar::PPhi)] {
        let fq = f.diff(qv);
        let gp = g.diff(pv);
        let fp = f.diff(pv);
        let gq = g.diff(qv);
        out = out + &fq * &gp - &fp * &gq;
    }
    match conv {
        Convention::Standard => out,
        Convention::Flipped => -out,
    }
}

/// Canonical form of an expression (free function form).
pub fn canonicalize(e: &PhaseExpr) -> PhaseExpr {
    e.canonicalize()
}

impl<'a> Add<&'a PhaseExpr> for &'a PhaseExpr {
    type Output = PhaseExpr;
    fn add(self, rhs: &'a PhaseExpr) -> PhaseExpr {
        if self.hphi_pow == rhs.hphi_pow {
            return PhaseExpr::raw(&self.num + &rhs.num, self.hphi_pow);
        }
        let j = self.hphi_pow.max(rhs.hphi_pow);
        PhaseExpr::raw(self.lifted(j) + rhs.lifted(j), j)
    }
}

impl<'a> Sub<&'a PhaseExpr> for &'a PhaseExpr {
    type Output = PhaseExpr;
    fn sub(self, rhs: &'a PhaseExpr) -> PhaseExpr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a PhaseExpr> for &'a PhaseExpr {
    type Output = PhaseExpr;
    fn mul(self, rhs: &'a PhaseExpr) -> PhaseExpr {
        PhaseExpr::raw(&self.num * &rhs.num, self.hphi_pow + rhs.hphi_pow)
    }
}

impl Neg for &PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        PhaseExpr {
            num: -&self.num,
            hphi_pow: self.hphi_pow,
        }
    }
}

impl Neg for PhaseExpr {
    type Output = PhaseExpr;
    fn neg(self) -> PhaseExpr {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PhaseExpr {
            type Output = PhaseExpr;
            fn $m(self, rhs: PhaseExpr) -> PhaseExpr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a PhaseExpr> for PhaseExpr {
            type Output = PhaseExpr;
            fn $m(self, rhs: &'a PhaseExpr) -> PhaseExpr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<PhaseExpr> for &'a PhaseExpr {
            type Output = PhaseExpr;
            fn $m(self, rhs: PhaseExpr) -> PhaseExpr {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<Poly> for PhaseExpr {
    fn from(p: Poly) -> Self {
        PhaseExpr::from_poly(p)
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hphi_pow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / Hphi^{}", self.num, self.hphi_pow)
        }
    }
}

impl fmt::Debug for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseExpr({self})")
    }
}

/// Floating-point image of a [`PhaseExpr`].
#[derive(Clone, Debug)]
pub struct CompiledExpr {
    terms: Vec<(f64, bool, Monomial)>,
    hphi_pow: i32,
    needs_k: bool,
}

impl CompiledExpr {
    fn new(e: &PhaseExpr) -> Self {
        CompiledExpr {
            terms: e
                .num
                .terms()
                .map(|(m, c)| (crate::poly::q_to_f64(c), m.exp(Var::I) == 1, *m))
                .collect(),
            hphi_pow: e.hphi_pow as i32,
            needs_k: e.num.contains(Var::K),
        }
    }

    pub fn eval(&self, state: &PhaseState, env: &EvalEnv) -> Result<Complex64> {
        let v = phase_values(state, env, self.needs_k)?;
        let mut re = 0.0;
        let mut im = 0.0;
        for (c, imag, m) in &self.terms {
            let mut t = *c;
            for (k, &e) in m.0.iter().enumerate() {
                if e != 0 && k != Var::I.idx() {
                    t *= v[k].powi(e as i32);
                }
            }
            if *imag {
                im += t;
            } else {
                re += t;
            }
        }
        let z = Complex64::new(re, im);
        if self.hphi_pow == 0 {
            Ok(z)
        } else {
            let h = v[Var::SqrtHphi.idx()].powi(2);
            Ok(z / h.powi(self.hphi_pow))
        }
    }

    /// `Σ |term|`, the magnitude that bounds rounding error of [`Self::eval`].
    pub fn magnitude(&self, state: &PhaseState, env: &EvalEnv) -> Result<f64> {
        let v = phase_values(state, env, self.needs_k)?;
        let mut acc = 0.0;
        for (c, _, m) in &self.terms {
            let mut t = c.abs();
            for (k, &e) in m.0.iter().enumerate() {
                if e != 0 && k != Var::I.idx() {
                    t *= v[k].abs().powi(e as i32);
                }
            }
            acc += t;
        }
        let h = v[Var::SqrtHphi.idx()].powi(2);
        Ok(acc / h.powi(self.hphi_pow))
    }

    /// Real part only; skips the complex bookkeeping.
    pub fn eval_real(&self, state: &PhaseState, env: &EvalEnv) -> Result<f64> {
        self.eval(state, env).map(|z| z.re)
    }
}
