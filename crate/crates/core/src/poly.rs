//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! One polynomial type serves every symbolic layer of the crate. The variable
//! set is fixed (see [`Var`]) and a few of the variables carry algebraic
//! relations that are applied eagerly on multiplication, so every stored
//! polynomial is in normal form:
//!
//! * `cos θ` has degree ≤ 1 (`cos²θ → 1 − sin²θ`), `sin θ` is a Laurent variable;
//! * `sin φ` has degree ≤ 1 (`sin²φ → 1 − cos²φ`), `cos φ` is a Laurent variable;
//! * `s = √H_φ` has degree ≤ 1 (`s² → p_φ² + a·cos⁻²φ`);
//! * `i` has degree ≤ 1 (`i² → −1`).
//!
//! Over `Q[a, sin θ^±1, cos φ^±1, …]` the reduced monomials form a basis, so a
//! polynomial is zero as a function exactly when its normal form is empty.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Q = BigRational;

/// Build the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Build the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Symbols understood by the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// The potential strength `a = α²`.
    Alpha2,
    SinTheta,
    CosTheta,
    CosPhi,
    SinPhi,
    PTheta,
    PPhi,
    /// `s = √H_φ`, the formal square-root adjunct.
    SqrtHphi,
    /// Imaginary unit.
    I,
    /// Formal eigenvalue `ε = √E_φ` of the quantum φ-problem.
    Eps,
    /// Formal shift parameter `M` of the θ hierarchy.
    M,
    /// Energy `E`, or the commuting symbol `Ĥ` inside P₁/P₂.
    Energy,
    /// Commuting symbol `Ĥ_φ` inside P₁/P₂.
    Hphi,
    /// Frequency ratio `k` when it is kept symbolic.
    K,
}

pub const NVARS: usize = 14;

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::Alpha2,
        Var::SinTheta,
        Var::CosTheta,
        Var::CosPhi,
        Var::SinPhi,
        Var::PTheta,
        Var::PPhi,
        Var::SqrtHphi,
        Var::I,
        Var::Eps,
        Var::M,
        Var::Energy,
        Var::Hphi,
        Var::K,
    ];

    #[inline]
    pub fn idx(self) -> usize {
        self as usize
    }

    /// Laurent variables may carry negative exponents.
    pub fn is_laurent(self) -> bool {
        matches!(self, Var::SinTheta | Var::CosPhi)
    }

    fn name(self) -> &'static str {
        match self {
            Var::Alpha2 => "a",
            Var::SinTheta => "sin(th)",
            Var::CosTheta => "cos(th)",
            Var::CosPhi => "cos(ph)",
            Var::SinPhi => "sin(ph)",
            Var::PTheta => "p_th",
            Var::PPhi => "p_ph",
            Var::SqrtHphi => "s",
            Var::I => "I",
            Var::Eps => "eps",
            Var::M => "M",
            Var::Energy => "H",
            Var::Hphi => "Hphi",
            Var::K => "k",
        }
    }
}

/// Exponent vector indexed by [`Var`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub [i16; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    #[inline]
    pub fn exp(&self, v: Var) -> i16 {
        self.0[v.idx()]
    }

    #[inline]
    pub fn with(mut self, v: Var, e: i16) -> Self {
        self.0[v.idx()] = e;
        self
    }

    #[inline]
    fn bump(mut self, v: Var, d: i16) -> Self {
        self.0[v.idx()] += d;
        self
    }

    fn add(&self, other: &Monomial) -> Monomial {
        let mut e = [0i16; NVARS];
        for (k, slot) in e.iter_mut().enumerate() {
            *slot = self.0[k] + other.0[k];
        }
        Monomial(e)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Expand a raw exponent vector into reduced monomials with ±1 multipliers.
fn push_reduced(out: &mut Vec<(Monomial, i32)>, e: Monomial, c: i32) {
    if e.exp(Var::CosTheta) >= 2 {
        let base = e.bump(Var::CosTheta, -2);
        push_reduced(out, base, c);
        push_reduced(out, base.bump(Var::SinTheta, 2), -c);
    } else if e.exp(Var::SinPhi) >= 2 {
        let base = e.bump(Var::SinPhi, -2);
        push_reduced(out, base, c);
        push_reduced(out, base.bump(Var::CosPhi, 2), -c);
    } else if e.exp(Var::SqrtHphi) >= 2 {
        let base = e.bump(Var::SqrtHphi, -2);
        push_reduced(out, base.bump(Var::PPhi, 2), c);
        push_reduced(out, base.bump(Var::Alpha2, 1).bump(Var::CosPhi, -2), c);
    } else if e.exp(Var::I) >= 2 {
        push_reduced(out, e.bump(Var::I, -2), -c);
    } else {
        out.push((e, c));
    }
}

/// A polynomial in normal form. Terms with zero coefficient are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(qi(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Poly::constant(q(n, d))
    }

    /// A single variable.
    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::ONE.with(v, 1), Q::one())
    }

    /// `v^e`; negative `e` is only allowed for Laurent variables.
    pub fn var_pow(v: Var, e: i16) -> Self {
        assert!(e >= 0 || v.is_laurent(), "negative power of non-Laurent {v:?}");
        let mut out = Vec::new();
        push_reduced(&mut out, Monomial::ONE.with(v, e), 1);
        let mut p = Poly::zero();
        for (m, c) in out {
            p.add_term(m, qi(c as i64));
        }
        p
    }

    /// Monomial with coefficient; the monomial is reduced if necessary.
    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut out = Vec::new();
        push_reduced(&mut out, m, 1);
        let mut p = Poly::zero();
        for (mm, s) in out {
            p.add_term(mm, &c * qi(s as i64));
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// The constant value if the polynomial has no variable part.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    /// Add `c·m` where `m` is already reduced.
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Multiply by a monomial that needs no reduction against `self`
    /// (used for cheap shifts of Laurent exponents and plain variables).
    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.terms.len());
        let mut buf = Vec::with_capacity(8);
        for (mm, x) in &self.terms {
            buf.clear();
            push_reduced(&mut buf, mm.add(m), 1);
            let base = x * c;
            for (r, s) in &buf {
                accumulate(&mut acc, *r, signed(&base, *s));
            }
        }
        from_acc(acc)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Maximum exponent of `v` (0 for the zero polynomial).
    pub fn degree_in(&self, v: Var) -> i16 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    /// Maximum total degree over the given variables.
    pub fn total_degree(&self, vars: &[Var]) -> i16 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|v| m.exp(*v)).sum::<i16>())
            .max()
            .unwrap_or(0)
    }

    /// Does any term mention `v`?
    pub fn contains(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    /// Split into coefficients of `v^e`, with `v` removed from each part.
    pub fn split_by(&self, v: Var) -> BTreeMap<i16, Poly> {
        let mut out: BTreeMap<i16, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            out.entry(e).or_default().terms.insert(m.with(v, 0), c.clone());
        }
        out
    }

    /// Coefficient of `v^e` (with `v` removed).
    pub fn coeff_of(&self, v: Var, e: i16) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(v) == e)
                .map(|(m, c)| (m.with(v, 0), c.clone()))
                .collect(),
        }
    }

    /// Terms whose total degree in `vars` equals `d`.
    pub fn homogeneous_part(&self, vars: &[Var], d: i16) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().map(|v| m.exp(*v)).sum::<i16>() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Complex conjugation `i → −i` (all other symbols are real).
    pub fn conj(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, if m.exp(Var::I) == 1 { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    /// Real part: terms without `i`.
    pub fn re(&self) -> Poly {
        self.coeff_of(Var::I, 0)
    }

    /// Imaginary part: coefficient of `i`.
    pub fn im(&self) -> Poly {
        self.coeff_of(Var::I, 1)
    }

    /// Partial derivative. For the angles the trig relations are used; every
    /// other variable (including `s`) is treated as independent.
    pub fn diff(&self, v: Var) -> Poly {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in &self.terms {
            match v {
                Var::SinTheta | Var::CosTheta => diff_theta(&mut acc, m, c),
                Var::SinPhi | Var::CosPhi => diff_phi(&mut acc, m, c),
                _ => {
                    let e = m.exp(v);
                    if e != 0 {
                        accumulate(&mut acc, m.bump(v, -1), c * qi(e as i64));
                    }
                }
            }
        }
        from_acc(acc)
    }

    /// `d/dθ`.
    pub fn d_theta(&self) -> Poly {
        self.diff(Var::SinTheta)
    }

    /// `d/dφ`.
    pub fn d_phi(&self) -> Poly {
        self.diff(Var::CosPhi)
    }

    /// Replace `v` by `value` everywhere. `v` must not appear with negative
    /// exponent.
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let parts = self.split_by(v);
        let mut powers: Vec<Poly> = vec![Poly::one()];
        let mut out = Poly::zero();
        for (e, part) in parts {
            assert!(e >= 0, "cannot substitute into negative power of {v:?}");
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            out += &(&part * &powers[e as usize]);
        }
        out
    }

    /// Shift `v → v + delta`.
    pub fn shift(&self, v: Var, delta: &Q) -> Poly {
        if delta.is_zero() {
            return self.clone();
        }
        self.substitute(v, &(Poly::var(v) + Poly::constant(delta.clone())))
    }

    /// Numerical evaluation; `values[v]` is used for every variable (the value
    /// for `I` is ignored, `i` is exact).
    pub fn eval(&self, values: &[f64; NVARS]) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (m, c) in &self.terms {
            let mut t = q_to_f64(c);
            for v in Var::ALL {
                let e = m.exp(v);
                if e != 0 && v != Var::I {
                    t *= values[v.idx()].powi(e as i32);
                }
            }
            if m.exp(Var::I) == 1 {
                im += t;
            } else {
                re += t;
            }
        }
        Complex64::new(re, im)
    }

    /// Largest absolute coefficient (0 for the zero polynomial).
    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

fn signed(c: &Q, s: i32) -> Q {
    match s {
        1 => c.clone(),
        -1 => -c.clone(),
        _ => c * qi(s as i64),
    }
}

#[inline]
fn accumulate(acc: &mut HashMap<Monomial, Q>, m: Monomial, c: Q) {
    use std::collections::hash_map::Entry;
    match acc.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
        }
    }
}

fn from_acc(acc: HashMap<Monomial, Q>) -> Poly {
    Poly {
        terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    }
}

// sin^k θ cos^e θ with e ∈ {0, 1}:
//   e = 0: d/dθ = k sin^{k-1} cos
//   e = 1: d/dθ = k sin^{k-1} − (k+1) sin^{k+1}
fn diff_theta(acc: &mut HashMap<Monomial, Q>, m: &Monomial, c: &Q) {
    let k = m.exp(Var::SinTheta);
    if m.exp(Var::CosTheta) == 0 {
        if k != 0 {
            let mm = m.bump(Var::SinTheta, -1).with(Var::CosTheta, 1);
            accumulate(acc, mm, c * qi(k as i64));
        }
    } else {
        let base = m.with(Var::CosTheta, 0);
        if k != 0 {
            accumulate(acc, base.bump(Var::SinTheta, -1), c * qi(k as i64));
        }
        accumulate(acc, base.bump(Var::SinTheta, 1), c * qi(-(k as i64 + 1)));
    }
}

// cos^k φ sin^e φ with e ∈ {0, 1}:
//   e = 0: d/dφ = −k cos^{k-1} sin
//   e = 1: d/dφ = −k cos^{k-1} + (k+1) cos^{k+1}
fn diff_phi(acc: &mut HashMap<Monomial, Q>, m: &Monomial, c: &Q) {
    let k = m.exp(Var::CosPhi);
    if m.exp(Var::SinPhi) == 0 {
        if k != 0 {
            let mm = m.bump(Var::CosPhi, -1).with(Var::SinPhi, 1);
            accumulate(acc, mm, c * qi(-(k as i64)));
        }
    } else {
        let base = m.with(Var::SinPhi, 0);
        if k != 0 {
            accumulate(acc, base.bump(Var::CosPhi, -1), c * qi(-(k as i64)));
        }
        accumulate(acc, base.bump(Var::CosPhi, 1), c * qi(k as i64 + 1));
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.terms.len() * rhs.terms.len());
        let mut buf = Vec::with_capacity(8);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let c = c1 * c2;
                buf.clear();
                push_reduced(&mut buf, m1.add(m2), 1);
                if buf.len() == 1 {
                    let (m, s) = buf[0];
                    accumulate(&mut acc, m, signed(&c, s));
                } else {
                    for (m, s) in &buf {
                        accumulate(&mut acc, *m, signed(&c, *s));
                    }
                }
            }
        }
        from_acc(acc)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Poly> for Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        &self * rhs
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

fn fmt_rational(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for v in Var::ALL {
        let e = m.exp(v);
        match e {
            0 => {}
            1 => parts.push(v.name().to_string()),
            _ => parts.push(format!("{}^{}", v.name(), e)),
        }
    }
    parts.join("*")
}

/// Stable text form: terms in monomial order, `coef*var^e*…`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", fmt_monomial(m))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// Shorthands for the trigonometric functions used throughout the crate.
pub mod trig {
    use super::*;

    pub fn sin_t() -> Poly {
        Poly::var(Var::SinTheta)
    }
    pub fn cos_t() -> Poly {
        Poly::var(Var::CosTheta)
    }
    pub fn cot_t() -> Poly {
        Poly::monomial(Monomial::ONE.with(Var::CosTheta, 1).with(Var::SinTheta, -1), Q::one())
    }
    pub fn csc_t() -> Poly {
        Poly::var_pow(Var::SinTheta, -1)
    }
    pub fn cos_2t() -> Poly {
        Poly::one() - Poly::var_pow(Var::SinTheta, 2).scale(&qi(2))
    }
    pub fn sin_2t() -> Poly {
        (sin_t() * cos_t()).scale(&qi(2))
    }
    pub fn cos_3t() -> Poly {
        // 4cos³θ − 3cosθ
        cos_t().pow(3).scale(&qi(4)) - cos_t().scale(&qi(3))
    }
    pub fn sin_p() -> Poly {
        Poly::var(Var::SinPhi)
    }
    pub fn cos_p() -> Poly {
        Poly::var(Var::CosPhi)
    }
    pub fn sec_p() -> Poly {
        Poly::var_pow(Var::CosPhi, -1)
    }
    pub fn tan_p() -> Poly {
        Poly::monomial(Monomial::ONE.with(Var::SinPhi, 1).with(Var::CosPhi, -1), Q::one())
    }
    pub fn cos_2p() -> Poly {
        Poly::var_pow(Var::CosPhi, 2).scale(&qi(2)) - Poly::one()
    }
    pub fn sin_2p() -> Poly {
        (sin_p() * cos_p()).scale(&qi(2))
    }
    pub fn alpha2() -> Poly {
        Poly::var(Var::Alpha2)
    }
}

#[cfg(test)]
mod tests {
    use super::trig::*;
    use super::*;

    fn vals(theta: f64, phi: f64) -> [f64; NVARS] {
        let mut v = [0.0; NVARS];
        v[Var::SinTheta.idx()] = theta.sin();
        v[Var::CosTheta.idx()] = theta.cos();
        v[Var::SinPhi.idx()] = phi.sin();
        v[Var::CosPhi.idx()] = phi.cos();
        v[Var::Alpha2.idx()] = 1.3;
        v
    }

    #[test]
    fn pythagoras_reduces_to_one() {
        let p = sin_p().pow(2) + cos_p().pow(2);
        assert_eq!(p, Poly::one());
        let t = sin_t().pow(2) + cos_t().pow(2);
        assert_eq!(t, Poly::one());
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Poly::var(Var::I);
        assert_eq!(&i * &i, Poly::int(-1));
        assert_eq!((&i * &i) * Poly::var(Var::PTheta), -Poly::var(Var::PTheta));
    }

    #[test]
    fn s_squared_is_hphi() {
        let s = Poly::var(Var::SqrtHphi);
        let hphi = Poly::var_pow(Var::PPhi, 2) + alpha2() * sec_p().pow(2);
        assert_eq!(&s * &s, hphi);
    }

    #[test]
    fn laurent_cancellation() {
        assert_eq!(cot_t() * Poly::var(Var::SinTheta), cos_t());
        assert_eq!(tan_p() * cos_p(), sin_p());
        assert_eq!(csc_t() * sin_t(), Poly::one());
    }

    #[test]
    fn trig_derivatives_match_finite_differences() {
        let exprs = [
            cot_t().pow(3) * sin_p(),
            tan_p() * sec_p().pow(2) * csc_t(),
            cos_3t() * cos_2p(),
            cos_t() * sin_t().pow(4) * sin_p() * cos_p().pow(3),
        ];
        let (theta, phi, h) = (0.9_f64, 0.35_f64, 1e-6);
        for e in &exprs {
            let dt = e.d_theta().eval(&vals(theta, phi)).re;
            let fd = (e.eval(&vals(theta + h, phi)).re - e.eval(&vals(theta - h, phi)).re) / (2.0 * h);
            assert!((dt - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{e}: {dt} vs {fd}");
            let dp = e.d_phi().eval(&vals(theta, phi)).re;
            let fd = (e.eval(&vals(theta, phi + h)).re - e.eval(&vals(theta, phi - h)).re) / (2.0 * h);
            assert!((dp - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{e}: {dp} vs {fd}");
        }
    }

    #[test]
    fn substitution_and_shift() {
        let eps = Poly::var(Var::Eps);
        let p = &eps * &eps + eps.scale(&qi(3));
        let shifted = p.shift(Var::Eps, &qi(-1));
        // (e-1)^2 + 3(e-1) = e^2 + e - 2
        let expect = &eps * &eps + eps.clone() - Poly::int(2);
        assert_eq!(shifted, expect);
    }

    #[test]
    fn display_is_stable() {
        let p = Poly::var(Var::PTheta).scale(&q(3, 2)) - cot_t();
        assert_eq!(p.to_string(), format!("{}", p.clone()));
        assert!(p.to_string().contains("3/2*p_th"));
    }
}
