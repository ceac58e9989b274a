//! Seeded numerical oracles for symbolic brackets: central finite differences
//! of the factors and numeric Jacobi sums at random physical states.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::PhaseState;
use crate::error::Result;
use crate::symexpr::{poisson, CompiledExpr, EvalEnv, PhaseExpr};

pub const FD_STEP: f64 = 1e-5;

/// `count` states drawn uniformly from a compact box inside the physical
/// domain.
pub fn random_states(seed: u64, count: usize) -> Vec<PhaseState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            PhaseState::new(
                0.0,
                rng.gen_range(0.6..std::f64::consts::PI - 0.6),
                rng.gen_range(-0.9..0.9),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect()
}

fn shifted(s: &PhaseState, axis: usize, h: f64) -> PhaseState {
    let mut y = s.coords();
    y[axis] += h;
    PhaseState::from_coords(s.t, &y)
}

fn gradient(f: &CompiledExpr, s: &PhaseState, env: &EvalEnv, h: f64) -> Result<[Complex64; 4]> {
    let mut g = [Complex64::new(0.0, 0.0); 4];
    for (axis, slot) in g.iter_mut().enumerate() {
        let up = f.eval(&shifted(s, axis, h), env)?;
        let down = f.eval(&shifted(s, axis, -h), env)?;
        *slot = (up - down) / (2.0 * h);
    }
    Ok(g)
}

/// Finite-difference bracket at one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdBracket {
    pub value: Complex64,
    /// `Σ |∂f| |∂g|` over the four products.
    pub scale: f64,
    /// Estimated rounding error of `value`.
    pub noise: f64,
}

pub fn fd_poisson(f: &CompiledExpr, g: &CompiledExpr, state: &PhaseState, env: &EvalEnv, h: f64) -> Result<FdBracket> {
    let df = gradient(f, state, env, h)?;
    let dg = gradient(g, state, env, h)?;
    // rounding error of one difference quotient
    let rf = 4.0 * f64::EPSILON * f.magnitude(state, env)? / h;
    let rg = 4.0 * f64::EPSILON * g.magnitude(state, env)? / h;
    // coords are (θ, φ, p_θ, p_φ)
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut noise = 0.0;
    for (q, p) in [(0, 2), (1, 3)] {
        value += df[q] * dg[p] - df[p] * dg[q];
        scale += (df[q] * dg[p]).norm() + (df[p] * dg[q]).norm();
        noise += rf * (dg[p].norm() + dg[q].norm()) + rg * (df[p].norm() + df[q].norm());
    }
    Ok(FdBracket { value, scale, noise })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSummary {
    pub states: usize,
    /// Largest `|fd − symbolic| / max(|symbolic|, scale)`.
    pub max_rel: f64,
    /// States where `|fd − symbolic|` exceeded `tol · max(|symbolic|, scale)`
    /// plus the rounding estimate of both sides.
    pub failed: usize,
    /// States where the rounding estimate exceeded the relative allowance.
    pub rounding_limited: usize,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

impl std::fmt::Display for OracleSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} states, max rel {:.3e}, {} failed, {} rounding-limited",
            self.states, self.max_rel, self.failed, self.rounding_limited
        )
    }
}

/// Compare the symbolic bracket `{f, g}` against central finite differences
/// with relative tolerance `tol`.
pub fn check_bracket(
    f: &PhaseExpr,
    g: &PhaseExpr,
    env: &EvalEnv,
    states: &[PhaseState],
    tol: f64,
) -> Result<OracleSummary> {
    let sym = poisson(f, g).compile();
    let (fc, gc) = (f.compile(), g.compile());
    let mut out = OracleSummary {
        states: states.len(),
        max_rel: 0.0,
        failed: 0,
        rounding_limited: 0,
    };
    for s in states {
        let exact = sym.eval(s, env)?;
        let fd = fd_poisson(&fc, &gc, s, env, FD_STEP)?;
        let den = exact.norm().max(fd.scale).max(f64::MIN_POSITIVE);
        let err = (fd.value - exact).norm();
        let noise = fd.noise + 4.0 * f64::EPSILON * sym.magnitude(s, env)?;
        out.max_rel = out.max_rel.max(err / den);
        if err > tol * den + noise {
            out.failed += 1;
        }
        if noise > tol * den {
            out.rounding_limited += 1;
        }
    }
    Ok(out)
}

/// Largest numeric Jacobi sum `{f,{g,h}} + {g,{h,f}} + {h,{f,g}}` relative
/// to the largest of its three terms.
pub fn check_jacobi(f: &PhaseExpr, g: &PhaseExpr, h: &PhaseExpr, env: &EvalEnv, states: &[PhaseState]) -> Result<f64> {
    let terms = [
        poisson(f, &poisson(g, h)).compile(),
        poisson(g, &poisson(h, f)).compile(),
        poisson(h, &poisson(f, g)).compile(),
    ];
    let mut max_rel = 0.0f64;
    for s in states {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for t in &terms {
            let v = t.eval(s, env)?;
            sum += v;
            scale = scale.max(v.norm());
        }
        max_rel = max_rel.max(sum.norm() / scale.max(1.0));
    }
    Ok(max_rel)
}

/// Largest value of `|e|` over the states; a numeric zero test.
pub fn max_abs(e: &PhaseExpr, env: &EvalEnv, states: &[PhaseState]) -> Result<f64> {
    let c = e.compile();
    let mut m = 0.0f64;
    for s in states {
        m = m.max(c.eval(s, env)?.norm());
    }
    Ok(m)
}
