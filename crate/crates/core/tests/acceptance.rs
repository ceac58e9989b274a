//! Acceptance run: one line per criterion, nonzero exit if any is red.

use std::time::{Duration, Instant};

use symforge::classical::{
    verify_classical_algebra, verify_classical_algebra_with, ClassicalOptions, ClassicalSymmetrySet, RationalK,
};
use symforge::dynamics::{integrate, time_reversal_error, KValue, PhaseState};
use symforge::oracle;
use symforge::quantum::{verify_hermitian, verify_quantum_algebra, verify_quantum_algebra_with, QuantumOptions};
use symforge::report::{Fault, Status, VerificationReport};
use symforge::spectral;
use symforge::symexpr::EvalEnv;

const GOLDEN: [(u32, u32); 4] = [(1, 1), (1, 2), (2, 1), (3, 1)];

/// Entries allowed to be `discrepancy`: printed closed forms that the engine
/// shows to be inconsistent.
/// `m = 0` matches every case.
const KNOWN_DISCREPANCIES: [(&str, u32, u32, &str); 4] = [
    ("classical", 3, 1, "printed {H_phi, O} = -1 E"),
    ("classical", 3, 1, "printed {H_phi, E} = 1 H_phi O"),
    ("quantum", 2, 1, "E matches reference closed form"),
    (
        "quantum",
        0,
        0,
        "printed -O H_phi O + E'^2 - n^2/4 O^2 = +/- (P1 + n/2 P2)",
    ),
];

fn known(r: &VerificationReport, identity: &str) -> bool {
    KNOWN_DISCREPANCIES
        .iter()
        .any(|(s, m, n, id)| *s == r.suite && (*m == 0 || (*m == r.case.m && *n == r.case.n)) && *id == identity)
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn k(m: u32, n: u32) -> RationalK {
    RationalK::new(m, n).unwrap()
}

/// Non-pass entries must be fails-free and every discrepancy documented.
fn audit(r: &VerificationReport, disc: &mut Vec<String>) -> Result<(), String> {
    for e in &r.entries {
        match e.status {
            Status::Pass => {}
            Status::Fail => {
                return Err(format!(
                    "{} m={} n={}: {} failed",
                    r.suite, r.case.m, r.case.n, e.identity
                ))
            }
            Status::Discrepancy if known(r, &e.identity) => {
                disc.push(format!("{}({},{}) {}", r.suite, r.case.m, r.case.n, e.identity))
            }
            Status::Discrepancy => {
                return Err(format!(
                    "undocumented discrepancy {} m={} n={}: {}",
                    r.suite, r.case.m, r.case.n, e.identity
                ))
            }
        }
    }
    Ok(())
}

fn status_of(r: &VerificationReport, identity: &str) -> Option<Status> {
    r.entry(identity).map(|e| e.status)
}

fn criterion_1() -> Outcome {
    let mut signs = Vec::new();
    for (m, n) in GOLDEN {
        let t0 = Instant::now();
        let r = verify_classical_algebra(k(m, n)).unwrap();
        let dt = t0.elapsed();
        for id in ["O matches reference closed form", "E matches reference closed form"] {
            if status_of(&r, id) != Some(Status::Pass) {
                return outcome(false, format!("({m},{n}): {id} not passing"));
            }
        }
        if dt > Duration::from_secs(10) {
            return outcome(false, format!("({m},{n}) took {dt:?}"));
        }
        let sign = r.entry("O matches reference closed form").unwrap().witness.clone();
        signs.push(format!("({m},{n}) {sign} in {:.0} ms", dt.as_secs_f64() * 1e3));
    }
    outcome(true, signs.join("; "))
}

fn criterion_2() -> Outcome {
    let mut disc = Vec::new();
    let cases = RationalK::enumerate(6);
    for &kk in &cases {
        let r = verify_classical_algebra(kk).unwrap();
        if let Err(e) = audit(&r, &mut disc) {
            return outcome(false, e);
        }
    }
    let ok = disc.len() == 2;
    outcome(ok, format!("{} cases; discrepancies: {}", cases.len(), disc.join(", ")))
}

fn criterion_3() -> Outcome {
    for kk in RationalK::enumerate(6) {
        let r = verify_classical_algebra(kk).unwrap();
        for id in ["{H, O} = 0", "{H, E} = 0"] {
            if status_of(&r, id) != Some(Status::Pass) {
                return outcome(false, format!("k={kk}: {id}"));
            }
        }
    }
    outcome(true, "{H,O} = {H,E} = 0 exactly for all coprime m+n <= 6")
}

fn criterion_4() -> Outcome {
    let mut disc = Vec::new();
    let mut slowest = Duration::ZERO;
    for kk in RationalK::enumerate(5) {
        let t0 = Instant::now();
        let r = verify_quantum_algebra(kk).unwrap();
        let dt = t0.elapsed();
        slowest = slowest.max(dt);
        if dt > Duration::from_secs(60) {
            return outcome(false, format!("k={kk} took {dt:?}"));
        }
        for id in ["[H, O] = 0", "[H, E] = 0"] {
            if status_of(&r, id) != Some(Status::Pass) {
                return outcome(false, format!("k={kk}: {id}"));
            }
        }
        if GOLDEN.contains(&(kk.m(), kk.n())) {
            for id in [
                "O matches reference closed form",
                "E matches reference closed form",
                "P1 matches reference closed form",
                "P2 matches reference closed form",
            ] {
                match status_of(&r, id) {
                    Some(Status::Pass) => {}
                    Some(Status::Discrepancy) if known(&r, id) => disc.push(format!("({},{}) {id}", kk.m(), kk.n())),
                    other => return outcome(false, format!("k={kk}: {id} is {other:?}")),
                }
            }
        }
    }
    let mut detail = format!("slowest case {:.2} s", slowest.as_secs_f64());
    if !disc.is_empty() {
        detail.push_str(&format!("; documented discrepancy: {}", disc.join(", ")));
    }
    outcome(true, detail)
}

fn criterion_5() -> Outcome {
    let mut disc = Vec::new();
    for kk in RationalK::enumerate(5) {
        let r = verify_quantum_algebra(kk).unwrap();
        if let Err(e) = audit(&r, &mut disc) {
            return outcome(false, e);
        }
    }
    outcome(true, format!("{} documented discrepancies", disc.len()))
}

fn criterion_6() -> Outcome {
    for kk in RationalK::enumerate(5) {
        let r = verify_hermitian(kk).unwrap();
        if !r.passed() || r.discrepancies().next().is_some() {
            return outcome(
                false,
                format!("k={kk}: {:?}", r.failures().map(|e| &e.identity).collect::<Vec<_>>()),
            );
        }
    }
    outcome(true, "O, E, E' adjoint rules exact for all coprime m+n <= 5")
}

fn criterion_7() -> Outcome {
    let t0 = Instant::now();
    let init = PhaseState::new(0.0, 1.2, 0.2, 0.4, 0.8);
    let kk = KValue::Rational(k(3, 2));
    let traj = match integrate(init, kk, 1.0, 100.0, 1e-10) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let drift = traj.drift().max();
    let back = time_reversal_error(init, kk, 1.0, 100.0, 1e-10).unwrap();
    let set = ClassicalSymmetrySet::build(k(3, 2)).unwrap();
    let states = oracle::random_states(0, 100);
    let env = EvalEnv { alpha2: 1.0, k: None };
    let pairs = [
        (&set.h, &set.hphi),
        (&set.h, &set.o),
        (&set.h, &set.e),
        (&set.hphi, &set.o),
        (&set.hphi, &set.e),
        (&set.o, &set.e),
    ];
    let mut worst = 0.0f64;
    let mut oracle_ok = true;
    for (f, g) in pairs {
        let s = oracle::check_bracket(f, g, &env, &states, 1e-6).unwrap();
        worst = worst.max(s.max_rel);
        oracle_ok &= s.passed() && s.max_rel <= 1e-6;
    }
    let dt = t0.elapsed();
    let ok = drift <= 1e-8 && back <= 1e-6 && oracle_ok && dt < Duration::from_secs(60);
    outcome(
        ok,
        format!(
            "max drift {drift:.2e}, reversal {back:.2e}, oracle max rel {worst:.2e}, {:.2} s",
            dt.as_secs_f64()
        ),
    )
}

fn criterion_8() -> Outcome {
    let n = 2000;
    let t0 = Instant::now();
    let phi = spectral::solve_phi(2.0, n, 8).unwrap();
    let solve_time = t0.elapsed();
    let spacing = (0..5)
        .map(|j| (phi[j + 1].eps() - phi[j].eps() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut align = 0.0f64;
    let mut fact = 0.0f64;
    for j in 0..3 {
        let r = spectral::ladder_residual(2.0, j, n).unwrap();
        align = align.max(r.alignment);
        fact = fact.max(r.factorization);
    }
    let mut shift = 0.0f64;
    let mut lam = 0.0f64;
    let t1 = Instant::now();
    for (m, e) in [(2.0, 12.0), (1.0, 6.0), (2.5, 15.75)] {
        let r = spectral::shift_residual(m, e, n).unwrap();
        shift = shift.max(r.alignment);
        lam = lam.max(r.factorization);
    }
    let slowest = solve_time.max(t1.elapsed() / 3);
    let ok = align <= 1e-4
        && fact <= 1e-5
        && shift <= 1e-4
        && lam <= 1e-5
        && spacing <= 1e-4
        && slowest < Duration::from_secs(30);
    outcome(
        ok,
        format!("ladder {align:.1e}, fact {fact:.1e}, shift {shift:.1e}, lambda_M {lam:.1e}, spacing {spacing:.1e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut hits = Vec::new();
    let classical = verify_classical_algebra_with(
        k(1, 1),
        ClassicalOptions {
            fault: Some(Fault::FlippedPoissonConvention),
            seed: 0,
        },
    )
    .unwrap();
    hits.push(("flipped PB convention", classical.failures().count()));
    // n^2 -> n is invisible at n = 1
    for (name, fault, case) in [
        ("wrong lambda_M", Fault::WrongLambda, k(2, 1)),
        ("wrong chain index", Fault::WrongChainIndex, k(2, 1)),
        ("wrong commutator power", Fault::WrongCommutatorPower, k(1, 2)),
    ] {
        let r = verify_quantum_algebra_with(case, QuantumOptions { fault: Some(fault) }).unwrap();
        hits.push((name, r.failures().count()));
    }
    let base = spectral::ladder_residual(2.0, 1, 2000).unwrap().alignment;
    let mutated = spectral::ladder_residual_with(2.0, 1, 2000, 0.5).unwrap().alignment;
    let ok = hits.iter().all(|(_, c)| *c > 0) && mutated >= 10.0 * base;
    let detail = hits
        .iter()
        .map(|(n, c)| format!("{n}: {c} failing"))
        .chain(std::iter::once(format!(
            "eps+0.5 defect x{:.1e}",
            mutated / base.max(f64::MIN_POSITIVE)
        )))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(ok, detail)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden classical expressions", criterion_1),
        ("classical algebra", criterion_2),
        ("classical symmetry", criterion_3),
        ("quantum golden", criterion_4),
        ("quantum algebra", criterion_5),
        ("hermitian rules", criterion_6),
        ("dynamics", criterion_7),
        ("spectral oracles", criterion_8),
        ("mutation sensitivity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.ok {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {}",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
