//! `symforge` command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{self, ClassicalOptions, ClassicalSymmetrySet, RationalK};
use crate::diffop;
use crate::dynamics::{self, Constants, Drift, IntegrateOptions, IntegratorStats, KValue, Params, PhaseState};
use crate::error::Error;
use crate::poly::{Var, Q};
use crate::quantum::{self, QuantumOptions, QuantumSymmetrySet};
use crate::report::{Fault, ReportDocument, VerificationReport, SCHEMA_VERSION};
use crate::spectral;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;

pub const CLASSICAL_MAX_SUM: u32 = 6;
pub const QUANTUM_MAX_SUM: u32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "symforge",
    version,
    about = "Exact and numerical verification of polynomial symmetry algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Integrate Hamilton's equations and monitor the conserved quantities.
    Simulate(SimulateArgs),
    /// Print a generated expression in canonical text form.
    Show(ShowArgs),
    /// Solve the one-dimensional spectral problems and dump eigenfunctions.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Classical,
    Quantum,
    All,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub target: Target,
    /// Numerator of k; omit together with --n to sweep every admissible case.
    #[arg(long, requires = "n")]
    pub m: Option<u32>,
    #[arg(long, requires = "m")]
    pub n: Option<u32>,
    /// Report path (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed of the numerical oracle states.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep per-entry timings in the report.
    #[arg(long)]
    pub timings: bool,
    /// Run with a deliberate fault; the run is expected to fail.
    #[arg(long, value_enum)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, clap::Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 1.2, allow_negative_numbers = true)]
    pub theta0: f64,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    pub ptheta0: f64,
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub pphi0: f64,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output sample spacing.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Trajectory CSV; the summary goes to `<out>.report.json`.
    #[arg(long, default_value = "trajectory.csv")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "O")]
    O,
    #[value(name = "E")]
    E,
    #[value(name = "Ohat")]
    Ohat,
    #[value(name = "Ehat")]
    Ehat,
    #[value(name = "P1")]
    P1,
    #[value(name = "P2")]
    P2,
}

#[derive(Debug, clap::Args)]
pub struct ShowArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(value_enum)]
    pub which: Which,
    /// Substitute a rational value for α² (e.g. `0`, `1/2`).
    #[arg(long)]
    pub alpha2: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Phi,
    Theta,
}

#[derive(Debug, clap::Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value = "phi")]
    pub problem: Problem,
    /// α² for the φ problem.
    #[arg(long, default_value_t = 2.0)]
    pub alpha2: f64,
    /// M for the θ problem.
    #[arg(long = "M", default_value_t = 2.0)]
    pub big_m: f64,
    /// Interior grid points.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Directory for `level_<j>.csv` files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    configure_threads();
    let out = io::stdout();
    let mut out = out.lock();
    let res = match cli.command {
        Command::Verify(a) => cmd_verify(&a, &mut out),
        Command::Simulate(a) => cmd_simulate(&a, &mut out),
        Command::Show(a) => cmd_show(&a, &mut out),
        Command::Spectrum(a) => cmd_spectrum(&a, &mut out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidRatio(_) | Error::Invalid(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("SYMFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Job {
    Intertwine,
    Classical(RationalK),
    Quantum(RationalK),
    Hermitian(RationalK),
}

fn plan(target: Target, case: Option<RationalK>) -> Vec<Job> {
    let cases = |max: u32| match case {
        Some(k) => vec![k],
        None => RationalK::enumerate(max),
    };
    let mut jobs = Vec::new();
    if matches!(target, Target::Classical | Target::All) {
        jobs.extend(cases(CLASSICAL_MAX_SUM).into_iter().map(Job::Classical));
    }
    if matches!(target, Target::Quantum | Target::All) {
        jobs.push(Job::Intertwine);
        for k in cases(QUANTUM_MAX_SUM) {
            jobs.push(Job::Quantum(k));
            jobs.push(Job::Hermitian(k));
        }
    }
    jobs
}

fn run_job(job: Job, seed: u64, fault: Option<Fault>) -> crate::Result<VerificationReport> {
    match job {
        Job::Intertwine => Ok(diffop::intertwine_check_with(fault)),
        Job::Classical(k) => classical::verify_classical_algebra_with(k, ClassicalOptions { fault, seed }),
        Job::Quantum(k) => quantum::verify_quantum_algebra_with(k, QuantumOptions { fault }),
        Job::Hermitian(k) => quantum::verify_hermitian(k),
    }
}

/// Run the planned suites in parallel; reports come back in plan order.
pub fn verify_reports(
    target: Target,
    case: Option<RationalK>,
    seed: u64,
    fault: Option<Fault>,
) -> crate::Result<Vec<VerificationReport>> {
    plan(target, case)
        .into_par_iter()
        .map(|j| run_job(j, seed, fault))
        .collect()
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let case = match (a.m, a.n) {
        (Some(m), Some(n)) => Some(RationalK::new(m, n)?),
        _ => None,
    };
    let reports = verify_reports(a.target, case, a.seed, a.inject_fault)?;
    let mut doc = ReportDocument::new(a.seed, reports);
    if !a.timings {
        doc.strip_timings();
    }
    write_summary(&doc, out)?;
    if let Some(path) = &a.out {
        write_json(path, &doc)?;
    }
    Ok(if doc.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn write_summary(doc: &ReportDocument, out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<12} {:>4} {:>4} {:>6} {:>6} {:>6} {:>5}",
        "suite", "m", "n", "k", "pass", "fail", "disc"
    )?;
    for r in &doc.reports {
        let count = |s| r.entries.iter().filter(|e| e.status == s).count();
        writeln!(
            out,
            "{:<12} {:>4} {:>4} {:>6} {:>6} {:>6} {:>5}",
            r.suite,
            r.case.m,
            r.case.n,
            r.case.k,
            count(crate::report::Status::Pass),
            count(crate::report::Status::Fail),
            count(crate::report::Status::Discrepancy),
        )?;
    }
    for r in &doc.reports {
        for e in r.entries.iter().filter(|e| e.status != crate::report::Status::Pass) {
            let tag = if e.status == crate::report::Status::Fail {
                "FAIL"
            } else {
                "DISC"
            };
            writeln!(
                out,
                "{tag} {} (m={}, n={}): {}",
                r.suite, r.case.m, r.case.n, e.identity
            )?;
            if let Some(note) = &e.note {
                writeln!(out, "     {note}")?;
            }
        }
    }
    writeln!(out, "{}", if doc.passed() { "result: pass" } else { "result: FAIL" })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> crate::Result<()> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    Ok(())
}

/// Sidecar summary of a `simulate` run.
#[derive(Debug, Serialize)]
pub struct SimulationSummary {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub params: Params,
    pub initial: PhaseState,
    pub t_end: f64,
    pub tol: f64,
    pub constants: Constants,
    pub drift: Drift,
    pub max_drift: f64,
    /// Relative mismatch of `|Q⁺|²` against the product formula.
    pub product_check: Option<f64>,
    pub stats: IntegratorStats,
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let k = RationalK::new(a.m, a.n)?;
    let initial = PhaseState::new(0.0, a.theta0, a.phi0, a.ptheta0, a.pphi0);
    initial.check_domain().map_err(|e| Error::Invalid(e.to_string()))?;
    if !(a.tmax > 0.0 && a.tol > 0.0 && a.dt > 0.0) {
        return Err(Error::Invalid("--tmax, --tol and --dt must be positive".into()));
    }
    let opts = IntegrateOptions {
        sample_dt: a.dt,
        ..IntegrateOptions::new(a.tol)
    };
    let (traj, failure) = match dynamics::integrate_with(initial, KValue::Rational(k), a.alpha2, a.tmax, opts) {
        Ok(t) => (t, None),
        Err(f) => (*f.partial, Some((f.t, f.error))),
    };
    let csv = File::create(&a.out).map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    traj.write_csv(BufWriter::new(csv))?;
    let drift = traj.drift();
    let summary = SimulationSummary {
        schema_version: SCHEMA_VERSION,
        tool: "symforge",
        version: env!("CARGO_PKG_VERSION"),
        status: if failure.is_some() { "integration-error" } else { "ok" },
        error: failure.as_ref().map(|(t, e)| format!("t = {t}: {e}")),
        params: traj.params,
        initial,
        t_end: traj.samples.last().map_or(initial.t, |s| s.t),
        tol: a.tol,
        constants: traj.constants,
        drift,
        max_drift: drift.max(),
        product_check: traj.product_check(),
        stats: traj.stats,
    };
    let mut sidecar = a.out.clone().into_os_string();
    sidecar.push(".report.json");
    write_json(Path::new(&sidecar), &summary)?;

    eprintln!(
        "relative drift: H {:.3e}  H_phi {:.3e}  O {:.3e}  E {:.3e}  (max {:.3e})",
        drift.h,
        drift.hphi,
        drift.o,
        drift.e,
        drift.max()
    );
    if let Some(p) = summary.product_check {
        eprintln!("|Q+|^2 vs (E_phi - a)^n (E - k^2 E_phi)^m: relative mismatch {p:.3e}");
    }
    writeln!(out, "wrote {} samples to {}", traj.samples.len(), a.out.display())?;
    match failure {
        Some((t, e)) => {
            eprintln!("error: integration stopped at t = {t}: {e}");
            Ok(EXIT_INTEGRATION)
        }
        None => Ok(EXIT_OK),
    }
}

fn parse_rational(s: &str) -> crate::Result<Q> {
    let bad = || Error::Invalid(format!("`{s}` is not a rational number"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s.trim(), "1"),
    };
    let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
    let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
    if den == num_bigint::BigInt::from(0) {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

/// Canonical text of one generated expression.
pub fn show_text(m: u32, n: u32, which: Which, alpha2: Option<&str>) -> crate::Result<String> {
    let k = RationalK::new(m, n)?;
    let a = alpha2.map(parse_rational).transpose()?;
    let text = match which {
        Which::O | Which::E => {
            let set = ClassicalSymmetrySet::build(k)?;
            let e = if which == Which::O { set.o } else { set.e };
            match &a {
                Some(v) => e.substitute_value(Var::Alpha2, v).to_string(),
                None => e.to_string(),
            }
        }
        Which::Ohat | Which::Ehat => {
            let set = QuantumSymmetrySet::build(k)?;
            let d = if which == Which::Ohat { set.o } else { set.e };
            match &a {
                Some(v) => d
                    .substitute(Var::Alpha2, &crate::poly::Poly::constant(v.clone()))
                    .to_string(),
                None => d.to_string(),
            }
        }
        Which::P1 | Which::P2 => {
            let (p1, p2) = quantum::compute_p(&k);
            let p = if which == Which::P1 { p1 } else { p2 };
            match &a {
                Some(v) => p
                    .substitute(Var::Alpha2, &crate::poly::Poly::constant(v.clone()))
                    .to_string(),
                None => p.to_string(),
            }
        }
    };
    Ok(text)
}

fn cmd_show(a: &ShowArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let text = show_text(a.m, a.n, a.which, a.alpha2.as_deref())?;
    writeln!(out, "{text}")?;
    Ok(EXIT_OK)
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let pairs = match a.problem {
        Problem::Phi => spectral::solve_phi(a.alpha2, a.grid, a.levels)?,
        Problem::Theta => spectral::solve_theta(a.big_m, a.grid, a.levels)?,
    };
    writeln!(out, "level,eigenvalue,sqrt")?;
    for p in &pairs {
        writeln!(out, "{},{:.12},{:.12}", p.index, p.eigenvalue, p.eps())?;
    }
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for p in &pairs {
            let path = dir.join(format!("level_{}.csv", p.index));
            let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            spectral::write_eigenfunction_csv(p, BufWriter::new(f))?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_sizes() {
        assert_eq!(plan(Target::Classical, None).len(), 8);
        let k = RationalK::new(1, 1).unwrap();
        assert_eq!(plan(Target::All, Some(k)).len(), 4);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("1/2").unwrap(), Q::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-3").unwrap(), Q::from_integer((-3).into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            main_with_args(["symforge", "verify", "--m", "2", "--n", "4"]),
            EXIT_USAGE
        );
        assert_eq!(main_with_args(["symforge", "verify", "--m", "1"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["symforge", "show", "--m", "1", "--n", "1", "Q"]),
            EXIT_USAGE
        );
    }
}
