//! Hamilton's equations for the classical system, an adaptive Dormand–Prince
//! integrator with dense output, conservation ledgers and closure detection.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{hamiltonian, hamiltonian_symbolic_k, ClassicalSymmetrySet, RationalK};
use crate::error::{Error, Result};
use crate::symexpr::{CompiledExpr, EvalEnv, PhaseExpr, PhaseVar};

/// A point of phase space at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

impl PhaseState {
    pub fn new(t: f64, theta: f64, phi: f64, p_theta: f64, p_phi: f64) -> Self {
        PhaseState {
            t,
            theta,
            phi,
            p_theta,
            p_phi,
        }
    }

    /// `0 < θ < π`, `−π/2 < φ < π/2`, all coordinates finite.
    pub fn check_domain(&self) -> Result<()> {
        use std::f64::consts::{FRAC_PI_2, PI};
        let finite = [self.t, self.theta, self.phi, self.p_theta, self.p_phi]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return Err(Error::Domain(format!("theta = {} outside (0, pi)", self.theta)));
        }
        if !(self.phi > -FRAC_PI_2 && self.phi < FRAC_PI_2) {
            return Err(Error::Domain(format!("phi = {} outside (-pi/2, pi/2)", self.phi)));
        }
        Ok(())
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.theta, self.phi, self.p_theta, self.p_phi]
    }

    pub fn from_coords(t: f64, y: &[f64; 4]) -> Self {
        PhaseState::new(t, y[0], y[1], y[2], y[3])
    }

    /// Same configuration with both momenta negated.
    pub fn reversed(&self) -> Self {
        PhaseState::new(self.t, self.theta, self.phi, -self.p_theta, -self.p_phi)
    }
}

/// Frequency ratio used by the integrator. `Float` bypasses [`RationalK`] and
/// carries no polynomial symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KValue {
    Rational(RationalK),
    Float(f64),
}

impl KValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            KValue::Rational(k) => k.as_f64(),
            KValue::Float(k) => *k,
        }
    }
}

impl From<RationalK> for KValue {
    fn from(k: RationalK) -> Self {
        KValue::Rational(k)
    }
}

/// Compiled equations of motion and monitored quantities.
#[derive(Clone, Debug)]
pub struct Model {
    pub k: KValue,
    pub alpha2: f64,
    env: EvalEnv,
    rhs: [CompiledExpr; 4],
    h: CompiledExpr,
    hphi: CompiledExpr,
    o: Option<CompiledExpr>,
    e: Option<CompiledExpr>,
    x_plus: Option<CompiledExpr>,
}

impl Model {
    pub fn new(k: KValue, alpha2: f64) -> Result<Self> {
        let (h, sym) = match k {
            KValue::Rational(rk) => (hamiltonian(&rk), Some(ClassicalSymmetrySet::build(rk)?)),
            KValue::Float(kf) => {
                if !(kf.is_finite() && kf > 0.0) {
                    return Err(Error::InvalidRatio(format!("k = {kf}")));
                }
                (hamiltonian_symbolic_k(), None)
            }
        };
        let rhs = [
            h.diff(PhaseVar::PTheta),
            h.diff(PhaseVar::PPhi),
            -h.diff(PhaseVar::Theta),
            -h.diff(PhaseVar::Phi),
        ];
        let env = EvalEnv {
            alpha2,
            k: Some(k.as_f64()),
        };
        Ok(Model {
            k,
            alpha2,
            env,
            rhs: rhs.map(|e| e.compile()),
            h: h.compile(),
            hphi: PhaseExpr::hphi().compile(),
            o: sym.as_ref().map(|s| s.o.compile()),
            e: sym.as_ref().map(|s| s.e.compile()),
            x_plus: sym.as_ref().map(|s| s.x_plus.compile()),
        })
    }

    /// `(θ̇, φ̇, ṗ_θ, ṗ_φ)`.
    pub fn rhs(&self, state: &PhaseState) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (slot, f) in out.iter_mut().zip(&self.rhs) {
            *slot = f.eval_real(state, &self.env)?;
        }
        Ok(out)
    }

    pub fn energy(&self, state: &PhaseState) -> Result<f64> {
        self.h.eval_real(state, &self.env)
    }

    pub fn ledger(&self, state: &PhaseState) -> Result<LedgerRow> {
        let opt = |c: &Option<CompiledExpr>| -> Result<f64> {
            match c {
                Some(c) => c.eval_real(state, &self.env),
                None => Ok(f64::NAN),
            }
        };
        Ok(LedgerRow {
            h: self.h.eval_real(state, &self.env)?,
            hphi: self.hphi.eval_real(state, &self.env)?,
            o: opt(&self.o)?,
            e: opt(&self.e)?,
        })
    }

    /// `X⁺` at a state, when `k` is rational.
    pub fn x_plus(&self, state: &PhaseState) -> Result<Option<Complex64>> {
        self.x_plus.as_ref().map(|c| c.eval(state, &self.env)).transpose()
    }
}

/// `(θ̇, φ̇, ṗ_θ, ṗ_φ)` from the symbolic derivatives of `H`.
pub fn hamilton_rhs(state: &PhaseState, k: KValue, alpha2: f64) -> Result<[f64; 4]> {
    Model::new(k, alpha2)?.rhs(state)
}

/// Values of the monitored quantities at one sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub h: f64,
    pub hphi: f64,
    /// `NaN` when `k` is not rational.
    pub o: f64,
    pub e: f64,
}

/// Constant values fixed by the initial state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub energy: f64,
    pub energy_phi: f64,
    /// `Q⁺ = q e^{iφ₀}`; `NaN` when `k` is not rational.
    pub q: f64,
    pub phi0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub k: f64,
    pub alpha2: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub rtol: f64,
    pub atol: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Dense-output polynomial of one accepted step.
#[derive(Clone, Copy, Debug)]
struct Segment {
    t0: f64,
    h: f64,
    r: [[f64; 4]; 5],
}

impl Segment {
    fn eval(&self, t: f64) -> [f64; 4] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut y = [0.0; 4];
        for (i, yi) in y.iter_mut().enumerate() {
            let r = |k: usize| self.r[k][i];
            *yi = r(0) + s * (r(1) + s1 * (r(2) + s * (r(3) + s1 * r(4))));
        }
        y
    }
}

/// Integrated orbit with its conservation ledger.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub ledger: Vec<LedgerRow>,
    pub constants: Constants,
    pub params: Params,
    pub stats: IntegratorStats,
    segments: Vec<Segment>,
}

/// Maximum relative drift of each monitored quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Drift {
    pub h: f64,
    pub hphi: f64,
    pub o: f64,
    pub e: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        [self.h, self.hphi, self.o, self.e]
            .into_iter()
            .filter(|x| !x.is_nan())
            .fold(0.0, f64::max)
    }
}

fn rel(x: f64, x0: f64) -> f64 {
    if x0.abs() < 1e-12 {
        (x - x0).abs()
    } else {
        ((x - x0) / x0).abs()
    }
}

impl Trajectory {
    /// Relative drift `max_t |Q(t) − Q(0)| / |Q(0)|` (absolute when `|Q(0)|` is
    /// below `1e−12`).
    pub fn drift(&self) -> Drift {
        let first = match self.ledger.first() {
            Some(r) => *r,
            None => return Drift::default(),
        };
        let mut d = Drift::default();
        for row in &self.ledger {
            d.h = d.h.max(rel(row.h, first.h));
            d.hphi = d.hphi.max(rel(row.hphi, first.hphi));
            d.o = d.o.max(rel(row.o, first.o));
            d.e = d.e.max(rel(row.e, first.e));
        }
        if first.o.is_nan() {
            d.o = f64::NAN;
            d.e = f64::NAN;
        }
        d
    }

    /// Relative mismatch between `q²` and `(E_φ − α²)ⁿ (E − k²E_φ)ᵐ`.
    pub fn product_check(&self) -> Option<f64> {
        let (m, n) = (self.params.m?, self.params.n?);
        let c = &self.constants;
        let k2 = self.params.k * self.params.k;
        let rhs = (c.energy_phi - self.params.alpha2).powi(n as i32) * (c.energy - k2 * c.energy_phi).powi(m as i32);
        Some(rel(c.q * c.q, rhs))
    }

    /// State at time `t` from the dense output.
    pub fn state_at(&self, t: f64) -> Option<PhaseState> {
        let first = self.segments.first()?;
        let last = self.segments.last()?;
        if t < first.t0 || t > last.t0 + last.h {
            return None;
        }
        let idx = self
            .segments
            .partition_point(|s| s.t0 + s.h < t)
            .min(self.segments.len() - 1);
        Some(PhaseState::from_coords(t, &self.segments[idx].eval(t)))
    }

    pub fn final_state(&self) -> Option<PhaseState> {
        let last = self.segments.last()?;
        self.state_at(last.t0 + last.h)
    }

    /// CSV with header `t,theta,phi,p_theta,p_phi,H,Hphi,O,E`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,theta,phi,p_theta,p_phi,H,Hphi,O,E")?;
        for (s, l) in self.samples.iter().zip(&self.ledger) {
            writeln!(
                w,
                "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}",
                s.t, s.theta, s.phi, s.p_theta, s.p_phi, l.h, l.hphi, l.o, l.e
            )?;
        }
        Ok(())
    }
}

/// Integration options.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    /// Sample spacing of the output.
    pub sample_dt: f64,
    pub max_steps: usize,
}

impl IntegrateOptions {
    pub fn new(tol: f64) -> Self {
        IntegrateOptions {
            tol,
            sample_dt: 0.01,
            max_steps: 10_000_000,
        }
    }
}

/// Integration stopped early; `partial` holds everything computed so far.
#[derive(Debug, thiserror::Error)]
#[error("integration stopped at t = {t}: {error}")]
pub struct IntegrationFailure {
    pub t: f64,
    pub error: Error,
    pub partial: Box<Trajectory>,
}

/// Per-step error control runs at `tol` times this factor.
pub const LOCAL_TOL_FACTOR: f64 = 1e-2;

/// New state, embedded error estimate and the seven stage slopes.
type StepResult = ([f64; 4], [f64; 4], [[f64; 4]; 7]);

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

struct Stepper<'a> {
    model: &'a Model,
    evaluations: usize,
}

impl Stepper<'_> {
    fn f(&mut self, t: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
        self.evaluations += 1;
        let st = PhaseState::from_coords(t, y);
        st.check_domain()?;
        self.model.rhs(&st)
    }

    /// One trial step; returns `(y_new, error estimate, k1..k7)`.
    fn step(&mut self, t: f64, y: &[f64; 4], k1: &[f64; 4], h: f64) -> Result<StepResult> {
        let mut k = [[0.0; 4]; 7];
        k[0] = *k1;
        for s in 1..7 {
            let mut ys = *y;
            for (i, yi) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *yi += h * A[s][j] * k[j][i];
                }
            }
            k[s] = self.f(t + C[s] * h, &ys)?;
        }
        let mut y_new = *y;
        let mut err = [0.0; 4];
        for i in 0..4 {
            for j in 0..6 {
                y_new[i] += h * A[6][j] * k[j][i];
            }
            for j in 0..7 {
                err[i] += h * E[j] * k[j][i];
            }
        }
        Ok((y_new, err, k))
    }
}

fn err_norm(err: &[f64; 4], y0: &[f64; 4], y1: &[f64; 4], rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / 4.0).sqrt()
}

/// Integrate from `initial` to `initial.t + t_max` with per-step error control
/// at `tol`.
pub fn integrate(
    initial: PhaseState,
    k: KValue,
    alpha2: f64,
    t_max: f64,
    tol: f64,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    integrate_with(initial, k, alpha2, t_max, IntegrateOptions::new(tol))
}

pub fn integrate_with(
    initial: PhaseState,
    k: KValue,
    alpha2: f64,
    t_max: f64,
    opts: IntegrateOptions,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let model = match Model::new(k, alpha2) {
        Ok(m) => m,
        Err(e) => return Err(empty_failure(initial, k, alpha2, e)),
    };
    integrate_model(&model, initial, t_max, opts)
}

fn empty_failure(initial: PhaseState, k: KValue, alpha2: f64, error: Error) -> IntegrationFailure {
    IntegrationFailure {
        t: initial.t,
        error,
        partial: Box::new(Trajectory {
            samples: Vec::new(),
            ledger: Vec::new(),
            constants: Constants {
                energy: f64::NAN,
                energy_phi: f64::NAN,
                q: f64::NAN,
                phi0: f64::NAN,
            },
            params: params_of(k, alpha2),
            stats: IntegratorStats::default(),
            segments: Vec::new(),
        }),
    }
}

fn params_of(k: KValue, alpha2: f64) -> Params {
    let (m, n) = match k {
        KValue::Rational(r) => (Some(r.m()), Some(r.n())),
        KValue::Float(_) => (None, None),
    };
    Params {
        m,
        n,
        k: k.as_f64(),
        alpha2,
    }
}

/// Integrate with an already compiled model.
pub fn integrate_model(
    model: &Model,
    initial: PhaseState,
    t_max: f64,
    opts: IntegrateOptions,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let fail0 = |e: Error| empty_failure(initial, model.k, model.alpha2, e);
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(fail0(Error::Invalid(format!("tol = {}", opts.tol))));
    }
    if !t_max.is_finite() || t_max < 0.0 || opts.sample_dt.is_nan() || opts.sample_dt <= 0.0 {
        return Err(fail0(Error::Invalid("t_max and sample_dt must be positive".into())));
    }
    if let Err(e) = initial.check_domain() {
        return Err(fail0(e));
    }
    let first = match model.ledger(&initial) {
        Ok(r) => r,
        Err(e) => return Err(fail0(e)),
    };
    let xp = model.x_plus(&initial).ok().flatten();
    let constants = Constants {
        energy: first.h,
        energy_phi: first.hphi,
        q: xp.map_or(f64::NAN, |z| z.norm()),
        phi0: xp.map_or(f64::NAN, |z| z.arg()),
    };
    let local = opts.tol * LOCAL_TOL_FACTOR;
    let (rtol, atol) = (local, local);
    let mut traj = Trajectory {
        samples: vec![initial],
        ledger: vec![first],
        constants,
        params: params_of(model.k, model.alpha2),
        stats: IntegratorStats {
            rtol,
            atol,
            ..Default::default()
        },
        segments: Vec::new(),
    };
    let mut st = Stepper { model, evaluations: 0 };
    let t_end = initial.t + t_max;
    let mut t = initial.t;
    let mut y = initial.coords();
    let mut k1 = match st.f(t, &y) {
        Ok(k) => k,
        Err(e) => return Err(fail0(e)),
    };
    let scale = y.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    let fnorm = k1.iter().fold(1e-10f64, |a, b| a.max(b.abs()));
    let mut h = (0.01 * scale / fnorm).min(opts.sample_dt).min(t_max.max(1e-12));
    let mut next_sample = 1usize;
    let mut accepted_since_reject = true;

    while t < t_end {
        if traj.stats.accepted + traj.stats.rejected >= opts.max_steps {
            return Err(failure(
                traj,
                t,
                Error::Invalid("step budget exhausted".into()),
                st.evaluations,
            ));
        }
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return Err(failure(
                traj,
                t,
                Error::Domain(format!("step size underflow (h = {h:e})")),
                st.evaluations,
            ));
        }
        let h_try = h.min(t_end - t);
        let trial = st.step(t, &y, &k1, h_try);
        let (y_new, err, ks) = match trial {
            Ok(v) => v,
            Err(Error::Domain(_)) => {
                traj.stats.rejected += 1;
                h = h_try * 0.25;
                accepted_since_reject = false;
                continue;
            }
            Err(e) => return Err(failure(traj, t, e, st.evaluations)),
        };
        let en = err_norm(&err, &y, &y_new, rtol, atol);
        if en <= 1.0 && PhaseState::from_coords(t + h_try, &y_new).check_domain().is_ok() {
            let mut r = [[0.0; 4]; 5];
            for i in 0..4 {
                let dy = y_new[i] - y[i];
                let bspl = h_try * ks[0][i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - h_try * ks[6][i] - bspl;
                r[4][i] = h_try * (0..7).map(|j| D[j] * ks[j][i]).sum::<f64>();
            }
            let seg = Segment { t0: t, h: h_try, r };
            let t_new = t + h_try;
            loop {
                let ts = initial.t + next_sample as f64 * opts.sample_dt;
                if ts > t_new + 1e-12 * t_new.abs().max(1.0) || ts > t_end + 1e-12 {
                    break;
                }
                let ts = ts.min(t_new);
                let sample = PhaseState::from_coords(ts, &seg.eval(ts));
                match model.ledger(&sample) {
                    Ok(row) => {
                        traj.samples.push(sample);
                        traj.ledger.push(row);
                    }
                    Err(e) => return Err(failure(traj, t, e, st.evaluations)),
                }
                next_sample += 1;
            }
            traj.segments.push(seg);
            t = t_new;
            y = y_new;
            k1 = ks[6];
            traj.stats.accepted += 1;
            let fac = if en == 0.0 {
                5.0
            } else {
                (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
            };
            let fac = if accepted_since_reject { fac } else { fac.min(1.0) };
            h = h_try * fac;
            accepted_since_reject = true;
        } else {
            traj.stats.rejected += 1;
            let fac = if en.is_finite() {
                (0.9 * en.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.25
            };
            h = h_try * fac;
            accepted_since_reject = false;
        }
    }
    let last_t = traj.samples.last().map_or(initial.t, |s| s.t);
    if t_end - last_t > 1e-9 * t_end.abs().max(1.0) {
        let sample = PhaseState::from_coords(t, &y);
        match model.ledger(&sample) {
            Ok(row) => {
                traj.samples.push(sample);
                traj.ledger.push(row);
            }
            Err(e) => return Err(failure(traj, t, e, st.evaluations)),
        }
    }
    traj.stats.evaluations = st.evaluations;
    Ok(traj)
}

fn failure(mut traj: Trajectory, t: f64, error: Error, evaluations: usize) -> IntegrationFailure {
    traj.stats.evaluations = evaluations;
    IntegrationFailure {
        t,
        error,
        partial: Box::new(traj),
    }
}

/// Integrate to `t_max`, flip the momenta, integrate back, and return the
/// max-norm distance to the initial state.
pub fn time_reversal_error(initial: PhaseState, k: KValue, alpha2: f64, t_max: f64, tol: f64) -> Result<f64> {
    let model = Model::new(k, alpha2)?;
    let opts = IntegrateOptions {
        sample_dt: t_max.max(1e-3),
        ..IntegrateOptions::new(tol)
    };
    let fwd = integrate_model(&model, initial, t_max, opts).map_err(|f| f.error)?;
    let end = fwd.final_state().ok_or(Error::Internal("empty trajectory".into()))?;
    let back = integrate_model(&model, end.reversed(), t_max, opts).map_err(|f| f.error)?;
    let ret = back
        .final_state()
        .ok_or(Error::Internal("empty trajectory".into()))?
        .reversed();
    Ok(max_dist(&ret.coords(), &initial.coords()))
}

fn max_dist(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn euclid(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Smallest `t > 0` at which every coordinate is back within `eps` of the
/// initial state. Candidates are local minima of the sampled distance, refined
/// on the dense output.
pub fn detect_closure(traj: &Trajectory, eps: f64) -> Option<f64> {
    if traj.samples.len() < 2 {
        return None;
    }
    if eps.is_infinite() && eps > 0.0 {
        return Some(traj.samples[1].t);
    }
    let y0 = traj.samples[0].coords();
    let d: Vec<f64> = traj.samples.iter().map(|s| euclid(&s.coords(), &y0)).collect();
    for i in 1..d.len() - 1 {
        if !(d[i] <= d[i - 1] && d[i] <= d[i + 1]) {
            continue;
        }
        let (mut a, mut b) = (traj.samples[i - 1].t, traj.samples[i + 1].t);
        let dist = |t: f64| traj.state_at(t).map_or(f64::INFINITY, |s| euclid(&s.coords(), &y0));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut e = a + g * (b - a);
        let (mut fc, mut fe) = (dist(c), dist(e));
        for _ in 0..80 {
            if fc < fe {
                b = e;
                e = c;
                fe = fc;
                c = b - g * (b - a);
                fc = dist(c);
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + g * (b - a);
                fe = dist(e);
            }
        }
        let tm = 0.5 * (a + b);
        if let Some(s) = traj.state_at(tm) {
            if max_dist(&s.coords(), &y0) < eps {
                return Some(tm - traj.samples[0].t);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(m: u32, n: u32) -> KValue {
        KValue::Rational(RationalK::new(m, n).unwrap())
    }

    #[test]
    fn theta_rate_is_twice_momentum() {
        let st = PhaseState::new(0.0, 1.1, -0.4, 0.37, 0.2);
        let f = hamilton_rhs(&st, k(3, 2), 1.3).unwrap();
        assert!((f[0] - 0.74).abs() < 1e-14);
    }

    #[test]
    fn symmetric_point_has_no_theta_force() {
        let st = PhaseState::new(0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0, 1.0);
        let f = hamilton_rhs(&st, k(1, 1), 1.0).unwrap();
        assert!(f[2].abs() < 1e-14);
    }

    #[test]
    fn rhs_matches_finite_differences() {
        let st = PhaseState::new(0.0, 1.0, 0.3, 0.5, 0.7);
        let model = Model::new(k(2, 1), 1.0).unwrap();
        let f = model.rhs(&st).unwrap();
        let hstep = 1e-6;
        let e = |d: [f64; 4]| {
            let mut y = st.coords();
            for i in 0..4 {
                y[i] += d[i];
            }
            model.energy(&PhaseState::from_coords(0.0, &y)).unwrap()
        };
        let grad = |i: usize| {
            let mut p = [0.0; 4];
            p[i] = hstep;
            let mut m = [0.0; 4];
            m[i] = -hstep;
            (e(p) - e(m)) / (2.0 * hstep)
        };
        let fd = [grad(2), grad(3), -grad(0), -grad(1)];
        for i in 0..4 {
            assert!((f[i] - fd[i]).abs() < 1e-8, "{i}: {} vs {}", f[i], fd[i]);
        }
    }

    #[test]
    fn equilibrium_point_conserves_energy() {
        let st = PhaseState::new(0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0);
        let tr = integrate(st, k(1, 1), 1.0, 10.0, 1e-10).unwrap();
        assert!((tr.ledger[0].h - 1.0).abs() < 1e-15);
        assert!(tr.drift().h <= 1e-10);
    }

    #[test]
    fn domain_error_on_bad_initial_state() {
        let st = PhaseState::new(0.0, 3.5, 0.0, 0.0, 0.0);
        let err = integrate(st, k(1, 1), 1.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err.error, Error::Domain(_)));
    }

    #[test]
    fn closure_with_infinite_threshold_is_first_sample() {
        let st = PhaseState::new(0.0, 1.2, 0.2, 0.4, 0.8);
        let tr = integrate(st, k(1, 1), 1.0, 1.0, 1e-8).unwrap();
        assert_eq!(detect_closure(&tr, f64::INFINITY), Some(tr.samples[1].t));
    }

    #[test]
    fn csv_has_nine_columns() {
        let st = PhaseState::new(0.0, 1.2, 0.2, 0.4, 0.8);
        let tr = integrate(st, k(1, 1), 1.0, 0.05, 1e-8).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,theta,phi,p_theta,p_phi,H,Hphi,O,E");
        for l in lines {
            assert_eq!(l.split(',').count(), 9);
        }
    }
}
