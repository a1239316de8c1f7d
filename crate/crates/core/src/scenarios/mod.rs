//! Named end-to-end computations with pass/fail reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::graded_algebra::{BigradedDims, GradedDims};
use crate::spectral_sequence::DegreeRow;

pub mod file;
mod ku_ss;
mod misc;
mod thh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Conditional,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Conditional => "conditional",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub degrees: Vec<DegreeRow>,
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            status: Status::from_bool(passed),
            degrees: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witnesses.push(w.into());
        self
    }

    /// Compares two Hilbert functions degree by degree.
    pub fn dims(name: impl Into<String>, expected: &GradedDims, actual: &GradedDims) -> Self {
        let cap = expected.cap().min(actual.cap());
        let degrees: Vec<DegreeRow> = (0..=cap)
            .map(|n| DegreeRow {
                n,
                expected: expected.get(n),
                actual: actual.get(n),
            })
            .collect();
        let first = degrees.iter().find(|r| r.expected != r.actual).map(|r| r.n);
        let mut c = Check::new(name, first.is_none());
        c.degrees = degrees;
        if let Some(n) = first {
            c.witnesses.push(format!("first mismatch in degree {n}"));
        }
        c
    }

    /// Compares bigraded dimensions; the table shows total degrees.
    pub fn bigraded(
        name: impl Into<String>,
        expected: &BigradedDims,
        actual: &BigradedDims,
    ) -> Self {
        let mut c = Check::dims(name, &expected.total(), &actual.total());
        if let Some((s, t)) = expected.first_difference(actual) {
            c.status = Status::Fail;
            c.witnesses.push(format!(
                "first bidegree mismatch at (s, t) = ({s}, {t}): expected {}, got {}",
                expected.get(s, t),
                actual.get(s, t)
            ));
        }
        c
    }

    /// A failed check recording an engine error.
    pub fn error(name: impl Into<String>, e: &Error) -> Self {
        Check::new(name, false).witness(format!("error: {e}"))
    }
}

/// Runs a check body, turning an error into a failed check.
pub(crate) fn attempt(name: &str, body: impl FnOnce() -> Result<Check>) -> Check {
    body().unwrap_or_else(|e| Check::error(name, &e))
}

/// Like [`attempt`] for bodies producing several checks.
pub(crate) fn attempt_many(name: &str, body: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    body().unwrap_or_else(|e| vec![Check::error(name, &e)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub prime: u32,
    pub cap: u32,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn empty(scenario: impl Into<String>, prime: u32, cap: u32) -> Self {
        Report {
            scenario: scenario.into(),
            prime,
            cap,
            warnings: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    /// Applies the small-cap rule: below 2p^2 the differential ranges are
    /// (partly) empty, so passes are only conditional.
    fn apply_cap_warning(&mut self) {
        let min = 2 * self.prime * self.prime;
        if self.cap < min {
            self.warnings.push(format!(
                "CapTooSmall: cap {} < 2p^2 = {min}; differential ranges may be vacuous",
                self.cap
            ));
            for c in &mut self.checks {
                if c.status == Status::Pass {
                    c.status = Status::Conditional;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "scenario {}  p = {}  cap = {}",
        r.scenario, r.prime, r.cap
    );
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for c in &r.checks {
        let _ = writeln!(s, "[{}] {}", c.status.label(), c.name);
        if !c.degrees.is_empty() {
            let _ = writeln!(s, "    {:>5} {:>9} {:>9}", "n", "expected", "actual");
            for d in &c.degrees {
                let mark = if d.expected == d.actual { "" } else { "  <--" };
                let _ = writeln!(s, "    {:>5} {:>9} {:>9}{mark}", d.n, d.expected, d.actual);
            }
        }
        for w in &c.witnesses {
            let _ = writeln!(s, "    - {w}");
        }
    }
    let fails = r.checks.iter().filter(|c| c.status == Status::Fail).count();
    let conds = r
        .checks
        .iter()
        .filter(|c| c.status == Status::Conditional)
        .count();
    let _ = writeln!(
        s,
        "{} checks, {} failed, {} conditional",
        r.checks.len(),
        fails,
        conds
    );
    s
}

pub struct ScenarioInfo {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(PrimeField, u32) -> Vec<Check>,
}

pub const CATALOG: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "thhz",
        about: "V(1)_* THH(Z_(p)) from the Tor spectral sequence over P(v) ⊗ E(dv)",
        run: thh::thhz,
    },
    ScenarioInfo {
        name: "thh-ell-log",
        about: "V(1)_* THH(ell, D(v)) via the chain of three Tor spectral sequences",
        run: thh::thh_ell_log,
    },
    ScenarioInfo {
        name: "thh-ku-basechange",
        about: "V(1)_* THH(ku, D(u)) by base change along ell -> ku, d log v -> -d log u",
        run: thh::thh_ku_basechange,
    },
    ScenarioInfo {
        name: "thh-ku-ss",
        about: "Tor spectral sequence over E(du) for ku, its d^2, extensions, and the du·z = 0 exclusion",
        run: ku_ss::thh_ku_ss,
    },
    ScenarioInfo {
        name: "ausoni",
        about: "E(lambda1) ⊗ Theta_* bookkeeping against ker and im of rho'",
        run: misc::ausoni,
    },
    ScenarioInfo {
        name: "les-ell",
        about: "long exact sequence THH(Z) -> THH(ell) -> THH(ell, D(v))",
        run: misc::les_ell,
    },
    ScenarioInfo {
        name: "les-ku",
        about: "long exact sequence THH(Z) -> THH(ku) -> THH(ku, D(u))",
        run: misc::les_ku,
    },
    ScenarioInfo {
        name: "suspension",
        about: "circle-action derivation sigma on four carriers, naturality, mutations",
        run: misc::suspension,
    },
    ScenarioInfo {
        name: "tor-oracle",
        about: "closed-form Tor against the resolution oracle on a small exhaustive grid",
        run: misc::tor_oracle_sweep,
    },
    ScenarioInfo {
        name: "inputs",
        about: "homology of cyclic and replete bar constructions of D(x), repletion map",
        run: misc::inputs,
    },
];

pub fn scenario_names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|s| s.name)
}

pub fn run_scenario(name: &str, p: u32, cap: u32) -> Result<Report> {
    let info = CATALOG
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    let f = PrimeField::new(p)?;
    let mut report = Report::empty(name, p, cap);
    report.checks = (info.run)(f, cap);
    report.apply_cap_warning();
    Ok(report)
}

/// Every check of a finished report, for wrapping file-based scenarios.
pub(crate) fn finish(name: &str, p: u32, cap: u32, checks: Vec<Check>) -> Report {
    let mut report = Report::empty(name, p, cap);
    report.checks = checks;
    report.apply_cap_warning();
    report
}
