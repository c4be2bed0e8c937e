//! Check reports shared by every validator.

use serde::Serialize;
use std::fmt;

use crate::Id;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// Holds automatically because every space involved is finite and discrete.
    AutoPassFinite,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::AutoPassFinite => "auto-pass-finite",
            Status::Skipped => "skipped",
        };
        f.write_str(s)
    }
}

/// A counterexample: element ids in the order the law quantifies them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub ids: Vec<Id>,
    pub note: String,
}

impl Witness {
    pub fn new(ids: Vec<Id>, note: impl Into<String>) -> Self {
        Witness { ids, note: note.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Number of tuples enumerated.
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
}

impl CheckResult {
    pub fn pass(check: impl Into<String>, count: u64) -> Self {
        CheckResult {
            check: check.into(),
            status: Status::Pass,
            witness: None,
            count,
            max_residual: None,
        }
    }

    pub fn fail(check: impl Into<String>, count: u64, witness: Witness) -> Self {
        CheckResult {
            check: check.into(),
            status: Status::Fail,
            witness: Some(witness),
            count,
            max_residual: None,
        }
    }

    pub fn auto(check: impl Into<String>) -> Self {
        CheckResult {
            check: check.into(),
            status: Status::AutoPassFinite,
            witness: None,
            count: 0,
            max_residual: None,
        }
    }

    pub fn skipped(check: impl Into<String>) -> Self {
        CheckResult {
            check: check.into(),
            status: Status::Skipped,
            witness: None,
            count: 0,
            max_residual: None,
        }
    }

    pub fn from_scan(check: impl Into<String>, scan: Scan) -> Self {
        let check = check.into();
        match scan.witness {
            None => CheckResult::pass(check, scan.count),
            Some(w) => CheckResult::fail(check, scan.count, w),
        }
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.max_residual = Some(r);
        self
    }

    pub fn is_ok(&self) -> bool {
        matches!(self.status, Status::Pass | Status::AutoPassFinite)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    /// True when no check failed. Skipped checks do not count as failures.
    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.failures().next()
    }

    pub fn get(&self, check: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn status(&self, check: &str) -> Option<Status> {
        self.get(check).map(|c| c.status)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:<28} {:<16} n={}", c.check, c.status.to_string(), c.count)?;
            if let Some(r) = c.max_residual {
                write!(f, " residual={r:.3e}")?;
            }
            if let Some(w) = &c.witness {
                write!(f, " witness={:?} {}", w.ids, w.note)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Running tally for one law: tuples visited and the first failure seen.
#[derive(Debug, Clone, Default)]
pub struct Scan {
    pub count: u64,
    pub witness: Option<Witness>,
}

impl Scan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counts one tuple; records it as the witness if `ok` is false and none is set yet.
    pub fn check(&mut self, ok: bool, ids: impl FnOnce() -> Vec<Id>, note: &str) {
        self.count += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(Witness::new(ids(), note));
        }
    }

    pub fn fail(&mut self, ids: Vec<Id>, note: &str) {
        if self.witness.is_none() {
            self.witness = Some(Witness::new(ids, note));
        }
    }

    /// Appends `later` after `self`, keeping the earlier witness.
    pub fn merge(mut self, later: Scan) -> Scan {
        self.count += later.count;
        if self.witness.is_none() {
            self.witness = later.witness;
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }
}

/// Runs `f` on each outer index in parallel and merges the results in index
/// order, so the witness is the same one a sequential scan would find.
pub fn par_scan<F>(n: usize, f: F) -> Scan
where
    F: Fn(usize) -> Scan + Sync + Send,
{
    use rayon::prelude::*;
    let parts: Vec<Scan> = (0..n).into_par_iter().map(f).collect();
    parts.into_iter().fold(Scan::new(), Scan::merge)
}

/// Same as [`par_scan`] for several laws visited by one pass.
pub fn par_scan_many<const K: usize, F>(n: usize, f: F) -> [Scan; K]
where
    F: Fn(usize) -> [Scan; K] + Sync + Send,
{
    use rayon::prelude::*;
    let parts: Vec<[Scan; K]> = (0..n).into_par_iter().map(f).collect();
    let mut acc: [Scan; K] = std::array::from_fn(|_| Scan::new());
    for p in parts {
        for (a, s) in acc.iter_mut().zip(p) {
            *a = std::mem::take(a).merge(s);
        }
    }
    acc
}
