//! Structured pass/fail records for identity verification.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classical::RationalK;

/// Version of the JSON report layout written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A published closed form disagrees with the engine while the general
    /// relation holds.
    Discrepancy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMode {
    Symbolic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseId {
    pub m: u32,
    pub n: u32,
    pub k: String,
    pub alpha2_mode: AlphaMode,
}

impl CaseId {
    pub fn new(k: &RationalK, alpha2_mode: AlphaMode) -> Self {
        CaseId {
            m: k.m(),
            n: k.n(),
            k: k.to_string(),
            alpha2_mode,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub identity: String,
    pub anchor: String,
    pub status: Status,
    /// `"0"` for a vanishing canonical residual, otherwise the residual (or a
    /// numeric summary).
    pub witness: String,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub case: CaseId,
    pub entries: Vec<Entry>,
}

/// Anything that can serve as a residual witness.
pub trait Residual {
    fn vanishes(&self) -> bool;
    fn render(&self) -> String;
}

impl Residual for crate::symexpr::PhaseExpr {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Residual for crate::diffop::DiffOp {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Residual for crate::poly::Poly {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

const WITNESS_LIMIT: usize = 2000;

fn clip(s: String) -> String {
    if s.len() <= WITNESS_LIMIT {
        return s;
    }
    let mut cut = WITNESS_LIMIT;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{} … ({} bytes total)", &s[..cut], s.len())
}

impl VerificationReport {
    pub fn new(suite: &str, case: CaseId) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            case,
            entries: Vec::new(),
        }
    }

    /// Record an identity `residual == 0`.
    pub fn check_zero<R: Residual>(&mut self, identity: &str, anchor: &str, residual: impl FnOnce() -> R) -> bool {
        let t0 = Instant::now();
        let r = residual();
        let ok = r.vanishes();
        let witness = if ok { "0".to_string() } else { clip(r.render()) };
        self.push(Entry {
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness,
            elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
            note: None,
        });
        ok
    }

    /// Record a boolean property with a free-form witness.
    pub fn check(&mut self, identity: &str, anchor: &str, f: impl FnOnce() -> (bool, String)) -> bool {
        let t0 = Instant::now();
        let (ok, witness) = f();
        self.push(Entry {
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            witness: clip(witness),
            elapsed_ms: t0.elapsed().as_secs_f64() * 1e3,
            note: None,
        });
        ok
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e);
    }

    /// Attach a note to the most recent entry.
    pub fn annotate(&mut self, note: impl Into<String>) {
        if let Some(e) = self.entries.last_mut() {
            e.note = Some(note.into());
        }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| e.status == Status::Discrepancy)
    }

    pub fn entry(&self, identity: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.identity == identity)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} m={} n={} k={} ({:?})",
            self.suite, self.case.m, self.case.n, self.case.k, self.case.alpha2_mode
        )?;
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Discrepancy => "DISC",
            };
            writeln!(f, "  [{tag}] {:<52} {:>10.1} ms", e.identity, e.elapsed_ms)?;
        }
        Ok(())
    }
}

/// Deliberate faults used to show that the suites can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Use `λ_M = M(M+1)` instead of `M(M−1)` in the θ factorization.
    WrongLambda,
    /// Offset every index of the ladder chain inside `X̂±` by one.
    WrongChainIndex,
    /// Use the opposite Poisson-bracket sign convention.
    FlippedPoissonConvention,
    /// Replace `n²` by `n` in `[Ĥ_φ, Ô]`.
    WrongCommutatorPower,
}

/// One JSON document per CLI invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub seed: u64,
    pub reports: Vec<VerificationReport>,
}

impl ReportDocument {
    pub fn new(seed: u64, reports: Vec<VerificationReport>) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: "symforge".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            timestamp,
            seed,
            reports,
        }
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(VerificationReport::passed)
    }

    /// Zero every `elapsed_ms`, making documents of identical runs equal up to
    /// `timestamp`.
    pub fn strip_timings(&mut self) {
        for r in &mut self.reports {
            for e in &mut r.entries {
                e.elapsed_ms = 0.0;
            }
        }
    }
}

/// Check a parsed document against the current schema.
pub fn validate_document(v: &serde_json::Value) -> std::result::Result<(), String> {
    let obj = v.as_object().ok_or("document is not an object")?;
    match obj.get("schema_version").and_then(|x| x.as_u64()) {
        Some(s) if s == u64::from(SCHEMA_VERSION) => {}
        Some(s) => return Err(format!("unsupported schema_version {s}")),
        None => return Err("missing schema_version".into()),
    }
    for key in ["tool", "version"] {
        if !obj.get(key).is_some_and(|x| x.is_string()) {
            return Err(format!("missing string field `{key}`"));
        }
    }
    for key in ["timestamp", "seed"] {
        if !obj.get(key).is_some_and(|x| x.is_u64()) {
            return Err(format!("missing integer field `{key}`"));
        }
    }
    let reports = obj
        .get("reports")
        .and_then(|x| x.as_array())
        .ok_or("missing array `reports`")?;
    for (i, r) in reports.iter().enumerate() {
        serde_json::from_value::<VerificationReport>(r.clone()).map_err(|e| format!("reports[{i}]: {e}"))?;
    }
    let known: [&str; 6] = ["schema_version", "tool", "version", "timestamp", "seed", "reports"];
    if let Some(extra) = obj.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(format!("unknown field `{extra}`"));
    }
    Ok(())
}
