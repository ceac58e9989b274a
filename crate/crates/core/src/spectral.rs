//! Finite-difference spectra of the one-dimensional problems
//! `Ĥ_φ = −∂_φ² + a/cos²φ` on `(−π/2, π/2)` and `Ĥ_θ^M` on `(0, π)`,
//! used as numerical oracles for ladder and shift relations.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use crate::diffop::{ops, DiffOp};
use crate::error::{Error, Result};
use crate::poly::{Poly, Var, NVARS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridVar {
    Phi,
    Theta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `N` interior nodes, Dirichlet ends, `h = L/(N+1)`.
    Nodes,
    /// `N` cell centres, `h = L/N`.
    Cells,
}

/// Uniform grid on the open interval of `var`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub var: GridVar,
    pub layout: Layout,
    pub n: usize,
    pub h: f64,
    pub left: f64,
}

fn interval(var: GridVar) -> (f64, f64) {
    match var {
        GridVar::Phi => (-FRAC_PI_2, FRAC_PI_2),
        GridVar::Theta => (0.0, PI),
    }
}

impl Grid1D {
    pub fn new(var: GridVar, n: usize) -> Self {
        let (left, right) = interval(var);
        Grid1D {
            var,
            layout: Layout::Nodes,
            n,
            h: (right - left) / (n as f64 + 1.0),
            left,
        }
    }

    pub fn cells(var: GridVar, n: usize) -> Self {
        let (left, right) = interval(var);
        Grid1D {
            var,
            layout: Layout::Cells,
            n,
            h: (right - left) / n as f64,
            left,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        let off = match self.layout {
            Layout::Nodes => 1.0,
            Layout::Cells => 0.5,
        };
        self.left + (i as f64 + off) * self.h
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.x(i))
    }

    /// Measure weight of the physical inner product (`sin θ` for θ).
    pub fn weight(&self, x: f64) -> f64 {
        match self.var {
            GridVar::Phi => 1.0,
            GridVar::Theta => x.sin(),
        }
    }

    fn values_at(&self, x: f64, base: &[f64; NVARS]) -> [f64; NVARS] {
        let mut v = *base;
        match self.var {
            GridVar::Phi => {
                v[Var::CosPhi.idx()] = x.cos();
                v[Var::SinPhi.idx()] = x.sin();
            }
            GridVar::Theta => {
                v[Var::SinTheta.idx()] = x.sin();
                v[Var::CosTheta.idx()] = x.cos();
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub eigenvalue: f64,
    /// Eigenfunction at the grid points (`Φ` or `Θ`), normalized in the
    /// weighted grid inner product.
    pub values: Vec<f64>,
    pub index: usize,
    pub grid: Grid1D,
}

impl Eigenpair {
    /// `ε = +√E_φ`.
    pub fn eps(&self) -> f64 {
        self.eigenvalue.sqrt()
    }
}

/// Symmetric tridiagonal matrix `diag(d) + offdiag(e)`.
struct Tridiag {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl Tridiag {
    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.d.len() {
            let qq = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / qq;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.d.len() {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 }
                + if i + 1 < self.d.len() { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// `j`-th smallest eigenvalue by bisection on the Sturm count.
    fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T − σ) x = b` by LU with partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut dl: Vec<f64> = self.e.clone();
        let mut d: Vec<f64> = self.d.iter().map(|x| x - sigma).collect();
        let mut du: Vec<f64> = self.e.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut piv = vec![false; n];
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                piv[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        let mut x = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            if piv[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= dl[i] * x[i];
        }
        x[n - 1] /= d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }

    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.d.len();
        let sigma = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            x = self.solve_shifted(sigma, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }
}

fn normalize(x: &mut [f64], h: f64) {
    let norm = (x.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
    let big = x
        .iter()
        .cloned()
        .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    let s = if big < 0.0 { -1.0 / norm } else { 1.0 / norm };
    for v in x {
        *v *= s;
    }
}

fn check_size(n: usize, count: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Spectral(format!("grid too small (N = {n})")));
    }
    if count > n {
        return Err(Error::Spectral(format!("{count} levels requested on N = {n}")));
    }
    Ok(())
}

/// Lowest `count` eigenpairs of a symmetric tridiagonal matrix, vectors
/// normalized with `Σ v² h = 1`.
fn lowest_pairs(t: &Tridiag, h: f64, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let lam = t.eigenvalue(j);
        let mut v = t.eigenvector(lam);
        normalize(&mut v, h);
        let res = residual(t, lam, &v);
        if !(res.is_finite() && res < 1e-6 * lam.abs().max(1.0)) {
            return Err(Error::Spectral(format!(
                "level {j}: eigenvalue {lam}, residual {res:e} after inverse iteration"
            )));
        }
        out.push((lam, v));
    }
    Ok(out)
}

/// `−ψ'' + V ψ` on Dirichlet nodes.
fn solve_tridiag(grid: &Grid1D, potential: impl Fn(f64) -> f64, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    check_size(grid.n, count)?;
    let h2 = grid.h * grid.h;
    let t = Tridiag {
        d: grid.points().map(|x| 2.0 / h2 + potential(x)).collect(),
        e: vec![-1.0 / h2; grid.n - 1],
    };
    lowest_pairs(&t, grid.h, count)
}

fn residual(t: &Tridiag, lam: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    let mut nv = 0.0;
    for i in 0..n {
        let mut r = (t.d[i] - lam) * v[i];
        if i > 0 {
            r += t.e[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            r += t.e[i] * v[i + 1];
        }
        acc += r * r;
        nv += v[i] * v[i];
    }
    (acc / nv).sqrt()
}

/// Lowest `count` eigenpairs of `−∂_φ² + a/cos²φ` on `(−π/2, π/2)`.
pub fn solve_phi(alpha2: f64, n: usize, count: usize) -> Result<Vec<Eigenpair>> {
    if alpha2.is_nan() || alpha2 < 0.0 {
        return Err(Error::Invalid(format!("alpha2 = {alpha2} must be non-negative")));
    }
    let grid = Grid1D::new(GridVar::Phi, n);
    let pairs = solve_tridiag(&grid, |x| alpha2 / x.cos().powi(2), count)?;
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(index, (eigenvalue, values))| Eigenpair {
            eigenvalue,
            values,
            index,
            grid: grid.clone(),
        })
        .collect())
}

/// Below this `M` the θ problem uses the conservative cell-centred scheme.
pub const CHI_FORM_MIN_M: f64 = 0.5;

/// Lowest `count` eigenpairs of `Ĥ_θ^M`; returned values are `Θ`.
///
/// For `M ≥ ½` the problem is solved for `χ = √sinθ Θ` from
/// `−χ'' + [(M² − ¼)/sin²θ − ¼] χ` on Dirichlet nodes. Smaller `M` factor out
/// `sin^M θ` and solve the remaining regular problem on cell centres.
pub fn solve_theta(m: f64, n: usize, count: usize) -> Result<Vec<Eigenpair>> {
    if m.is_nan() || m < 0.0 {
        return Err(Error::Invalid(format!("M = {m} must be non-negative")));
    }
    let (grid, pairs) = if m >= CHI_FORM_MIN_M {
        let grid = Grid1D::new(GridVar::Theta, n);
        let pairs = theta_chi(m, n, count)?
            .into_iter()
            .map(|(e, chi)| {
                let theta = chi
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c / grid.x(i).sin().sqrt())
                    .collect();
                (e, theta)
            })
            .collect();
        (grid, pairs)
    } else {
        (Grid1D::cells(GridVar::Theta, n), theta_weighted(m, n, count)?)
    };
    Ok(pairs
        .into_iter()
        .enumerate()
        .map(|(index, (eigenvalue, values))| Eigenpair {
            eigenvalue,
            values,
            index,
            grid: grid.clone(),
        })
        .collect())
}

fn theta_chi(m: f64, n: usize, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let grid = Grid1D::new(GridVar::Theta, n);
    solve_tridiag(&grid, |x| (m * m - 0.25) / x.sin().powi(2) - 0.25, count)
}

/// Cell-centred scheme for `Θ = sin^M θ · u`, where
/// `−(w u')'/w + M(M+1) u` with `w = sin^{2M+1}θ`. Returns `Θ` with
/// `Σ sinθ Θ² h = 1`.
fn theta_weighted(m: f64, n: usize, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    check_size(n, count)?;
    let grid = Grid1D::cells(GridVar::Theta, n);
    let h = grid.h;
    let p = 2.0 * m + 1.0;
    let s: Vec<f64> = grid.points().map(f64::sin).collect();
    let w: Vec<f64> = s.iter().map(|v| v.powf(p)).collect();
    let face = |i: usize| (grid.left + (i as f64 + 1.0) * h).sin().powf(p);
    let d = (0..n)
        .map(|i| {
            let left = if i == 0 { 0.0 } else { face(i - 1) };
            let right = if i + 1 == n { 0.0 } else { face(i) };
            (left + right) / (h * h * w[i]) + m * (m + 1.0)
        })
        .collect();
    let e = (0..n - 1)
        .map(|i| -face(i) / (h * h * (w[i] * w[i + 1]).sqrt()))
        .collect();
    let t = Tridiag { d, e };
    Ok(lowest_pairs(&t, h, count)?
        .into_iter()
        .map(|(lam, y)| (lam, y.iter().zip(&s).map(|(v, si)| v / si.sqrt()).collect()))
        .collect())
}

fn chi_of(grid: &Grid1D, theta: &[f64]) -> Vec<f64> {
    theta
        .iter()
        .enumerate()
        .map(|(i, v)| v * grid.x(i).sin().sqrt())
        .collect()
}

/// Apply a one-variable operator of order ≤ 2 on the grid with central
/// differences; `base` supplies the values of the non-grid symbols.
pub fn apply_discrete(op: &DiffOp, grid: &Grid1D, base: &[f64; NVARS], psi: &[f64]) -> Result<Vec<f64>> {
    let n = grid.n;
    if psi.len() != n {
        return Err(Error::Invalid("vector length does not match the grid".into()));
    }
    let at = |i: isize| -> f64 {
        if i < 0 || i >= n as isize {
            0.0
        } else {
            psi[i as usize]
        }
    };
    let mut out = vec![0.0; n];
    for (&(i, j), c) in op.terms() {
        let order = match grid.var {
            GridVar::Phi if i == 0 => j,
            GridVar::Theta if j == 0 => i,
            _ => {
                return Err(Error::Invalid(format!(
                    "operator term of order ({i}, {j}) on a one-variable grid"
                )))
            }
        };
        if order > 2 {
            return Err(Error::Invalid(format!("derivative order {order} is not discretized")));
        }
        for (p, slot) in out.iter_mut().enumerate() {
            let coeff = c.eval(&grid.values_at(grid.x(p), base)).re;
            let q = p as isize;
            let d = match order {
                0 => at(q),
                1 => (at(q + 1) - at(q - 1)) / (2.0 * grid.h),
                _ => (at(q + 1) - 2.0 * at(q) + at(q - 1)) / (grid.h * grid.h),
            };
            *slot += coeff * d;
        }
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `1 − |⟨u, v⟩| / (‖u‖ ‖v‖)`.
pub fn alignment_defect(u: &[f64], v: &[f64]) -> f64 {
    (1.0 - dot(u, v).abs() / (norm(u) * norm(v))).max(0.0)
}

/// Ladder diagnostics for level `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderResidual {
    /// Alignment of `B̂⁺_ε Φ_j` with `Φ_{j+1}`.
    pub alignment: f64,
    /// `‖B̂⁻_ε B̂⁺_ε Φ_j − (ε(ε+1) − a) Φ_j‖ / ‖Φ_j‖`.
    pub factorization: f64,
}

fn base_values(alpha2: f64, eps: f64, m: f64) -> [f64; NVARS] {
    let mut v = [0.0; NVARS];
    v[Var::Alpha2.idx()] = alpha2;
    v[Var::Eps.idx()] = eps;
    v[Var::M.idx()] = m;
    v
}

/// Ladder residuals with `ε` taken from level `j` (plus `eps_offset`, zero
/// except for mutation experiments).
pub fn ladder_residual_with(alpha2: f64, j: usize, n: usize, eps_offset: f64) -> Result<LadderResidual> {
    let pairs = solve_phi(alpha2, n, j + 2)?;
    let grid = Grid1D::new(GridVar::Phi, n);
    let eps = pairs[j].eps() + eps_offset;
    let base = base_values(alpha2, eps, 0.0);
    let e = Poly::var(Var::Eps);
    let raised = apply_discrete(&ops::b_plus(&e), &grid, &base, &pairs[j].values)?;
    let alignment = alignment_defect(&raised, &pairs[j + 1].values);
    let composite = ops::b_minus(&e).compose(&ops::b_plus(&e));
    let lhs = apply_discrete(&composite, &grid, &base, &pairs[j].values)?;
    let c = eps * (eps + 1.0) - alpha2;
    let diff: Vec<f64> = lhs.iter().zip(&pairs[j].values).map(|(l, p)| l - c * p).collect();
    Ok(LadderResidual {
        alignment,
        factorization: norm(&diff) / norm(&pairs[j].values),
    })
}

pub fn ladder_residual(alpha2: f64, j: usize, n: usize) -> Result<LadderResidual> {
    ladder_residual_with(alpha2, j, n, 0.0)
}

/// Shift diagnostics at one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftResidual {
    pub energy: f64,
    /// Alignment of `Â⁻_M Θ_E^M` with `Θ_E^{M−1}`.
    pub alignment: f64,
    /// `‖Ĥ_θ^M Θ − (Â⁺_M Â⁻_M + λ_M) Θ‖ / ‖Θ‖`.
    pub factorization: f64,
}

fn find_level(pairs: &[(f64, Vec<f64>)], e: f64, tol: f64) -> Result<usize> {
    pairs
        .iter()
        .position(|(l, _)| (l - e).abs() <= tol * e.abs().max(1.0))
        .ok_or_else(|| Error::Spectral(format!("energy {e} not found in the spectrum")))
}

/// `Â⁻_M Θ = Θ' + M cotθ Θ` on cell centres, odd reflection at both ends.
fn lower_theta_cells(grid: &Grid1D, m: f64, theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    let at = |i: isize| -> f64 {
        if i < 0 {
            -theta[0]
        } else if i >= n as isize {
            -theta[n - 1]
        } else {
            theta[i as usize]
        }
    };
    (0..n)
        .map(|i| {
            let q = i as isize;
            let x = grid.x(i);
            (at(q + 1) - at(q - 1)) / (2.0 * grid.h) + m * x.cos() / x.sin() * theta[i]
        })
        .collect()
}

/// Intertwining check of `Â⁻_M` between `Ĥ_θ^M` and `Ĥ_θ^{M−1}` at energy `e`.
pub fn shift_residual(m: f64, e: f64, n: usize) -> Result<ShiftResidual> {
    if m.is_nan() || m < 1.0 {
        return Err(Error::Invalid(format!("shift needs M >= 1, got {m}")));
    }
    let grid = Grid1D::new(GridVar::Theta, n);
    let count = 12;
    let tol = 1e-3;
    let upper = theta_chi(m, n, count)?;
    let iu = find_level(&upper, e, tol)?;
    let (eu, chi) = &upper[iu];
    let mv = Poly::var(Var::M);
    let half = Poly::rat(1, 2);
    // χ-space images: Â⁻ = ∂ + (M − ½) cot, Â⁺ = −∂ + (M − ½) cot.
    let c = &(&mv - &half) * &crate::poly::trig::cot_t();
    let a_minus = DiffOp::d_theta() + DiffOp::scalar(c.clone());
    let a_plus = -DiffOp::d_theta() + DiffOp::scalar(c);
    let base = base_values(0.0, 0.0, m);
    let alignment = if m - 1.0 >= CHI_FORM_MIN_M {
        let lower = theta_chi(m - 1.0, n, count)?;
        let il = find_level(&lower, e, tol)?;
        let image = apply_discrete(&a_minus, &grid, &base, chi)?;
        alignment_defect(&image, &lower[il].1)
    } else {
        let cells = Grid1D::cells(GridVar::Theta, n);
        let up = theta_weighted(m, n, count)?;
        let lo = theta_weighted(m - 1.0, n, count)?;
        let iu = find_level(&up, e, tol)?;
        let il = find_level(&lo, e, tol)?;
        let image = lower_theta_cells(&cells, m, &up[iu].1);
        alignment_defect(&chi_of(&cells, &image), &chi_of(&cells, &lo[il].1))
    };
    let composite = a_plus.compose(&a_minus) + DiffOp::scalar(ops::lambda(&mv));
    let lhs = apply_discrete(&composite, &grid, &base, chi)?;
    let diff: Vec<f64> = lhs.iter().zip(chi).map(|(l, x)| l - eu * x).collect();
    Ok(ShiftResidual {
        energy: *eu,
        alignment,
        factorization: norm(&diff) / norm(chi),
    })
}

/// `(4 λ_{2N} − λ_N) / 3`.
pub fn richardson(lambda_n: f64, lambda_2n: f64) -> f64 {
    (4.0 * lambda_2n - lambda_n) / 3.0
}

/// Total energy `E` of the separated state with φ-level `eps`, `M = k ε` and
/// θ-level `l`.
pub fn total_energy(k: f64, eps: f64, l: usize, n: usize) -> Result<f64> {
    let pairs = solve_theta(k * eps, n, l + 1)?;
    Ok(pairs[l].eigenvalue)
}

/// Degeneracy witness: levels `(ε_j, ℓ)` and `(ε_{j+n}, ℓ − m)` of the ratio
/// `m/n` have equal total energy. Returns both energies.
pub fn degeneracy_pair(m: u32, n_ratio: u32, alpha2: f64, j: usize, l: usize, n: usize) -> Result<(f64, f64)> {
    if l < m as usize {
        return Err(Error::Invalid(format!("theta level {l} is below the shift {m}")));
    }
    let k = m as f64 / n_ratio as f64;
    let phi = solve_phi(alpha2, n, j + n_ratio as usize + 1)?;
    let e1 = total_energy(k, phi[j].eps(), l, n)?;
    let e2 = total_energy(k, phi[j + n_ratio as usize].eps(), l - m as usize, n)?;
    Ok((e1, e2))
}

/// CSV dump `x,psi`.
pub fn write_eigenfunction_csv<W: Write>(pair: &Eigenpair, mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,psi")?;
    for (i, v) in pair.values.iter().enumerate() {
        writeln!(w, "{:.15e},{:.15e}", pair.grid.x(i), v)?;
    }
    Ok(())
}

/// Weighted-grid norm of `Θ` values (equals the χ norm).
pub fn theta_norm(grid: &Grid1D, theta: &[f64]) -> f64 {
    (chi_of(grid, theta).iter().map(|c| c * c).sum::<f64>() * grid.h).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_box_limit() {
        let pairs = solve_phi(0.0, 800, 4).unwrap();
        for (j, p) in pairs.iter().enumerate() {
            let exact = ((j + 1) * (j + 1)) as f64;
            assert!((p.eigenvalue - exact).abs() < 1e-3 * exact, "{j}: {}", p.eigenvalue);
        }
    }

    #[test]
    fn phi_ground_state_for_alpha2_two() {
        let pairs = solve_phi(2.0, 1000, 3).unwrap();
        assert!((pairs[0].eps() - 2.0).abs() < 1e-4);
        assert!((pairs[1].eps() - pairs[0].eps() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn theta_levels_follow_factorization() {
        let pairs = solve_theta(1.5, 1000, 3).unwrap();
        for (l, p) in pairs.iter().enumerate() {
            let m = 1.5 + l as f64;
            assert!((p.eigenvalue - m * (m + 1.0)).abs() < 1e-4 * m * m);
            assert!((theta_norm(&p.grid, &p.values) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_m_uses_regular_solutions() {
        for m in [0.0, 0.3] {
            let pairs = solve_theta(m, 2000, 4).unwrap();
            assert_eq!(pairs[0].grid.layout, Layout::Cells);
            for (l, p) in pairs.iter().enumerate() {
                let mu = m + l as f64;
                assert!(
                    (p.eigenvalue - mu * (mu + 1.0)).abs() < 1e-4 * mu.max(1.0).powi(2),
                    "M={m} l={l}: {}",
                    p.eigenvalue
                );
                assert!((theta_norm(&p.grid, &p.values) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_into_m_zero() {
        let r = shift_residual(1.0, 6.0, 2000).unwrap();
        assert!(r.alignment < 1e-4 && r.factorization < 1e-5, "{r:?}");
    }

    #[test]
    fn apply_discrete_rejects_mixed_terms() {
        let grid = Grid1D::new(GridVar::Phi, 10);
        let op = DiffOp::d_theta();
        let base = [0.0; NVARS];
        assert!(apply_discrete(&op, &grid, &base, &[0.0; 10]).is_err());
    }

    #[test]
    fn missing_energy_is_an_error() {
        assert!(matches!(shift_residual(2.0, 7.0, 400), Err(Error::Spectral(_))));
    }
}
