//! Exact-arithmetic toolkit for finite ringed spaces, gluing data and sheaf
//! cohomology on 2-dimensional semisimplicial sets.
//!
//! Everything here is computed over the rationals with no floating point:
//! linear algebra runs fraction-free on big integers, rings are structural
//! localized polynomial rings, and all topology is Alexandrov topology on
//! finite preorders.

pub mod bundles;
pub mod cli;
pub mod cohomology;
pub mod cschtwo;
pub mod exact;
pub mod finspace;
pub mod formats;
pub mod gluing;
pub mod poly;
pub mod ringcat;
pub mod sheafcore;
pub mod sscomplex;

use thiserror::Error;

/// Crate-wide error type. Validation checks that are expected to fail on
/// legitimate inputs return report values instead of this.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Three-valued answer for decision procedures that are only complete on the
/// structural fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

impl Verdict {
    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
    pub fn is_no(self) -> bool {
        self == Verdict::No
    }
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Yes => write!(f, "yes"),
            Verdict::No => write!(f, "no"),
            Verdict::Undecided => write!(f, "undecided"),
        }
    }
}

/// Outcome of a validation pass: either clean or a list of violations.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Report {
    pub problems: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report { problems: Vec::new() }
    }

    pub fn push(&mut self, problem: impl Into<String>) {
        self.problems.push(problem.into());
    }

    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.problems.extend(other.problems);
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            for p in &self.problems {
                writeln!(f, "FAIL: {p}")?;
            }
            Ok(())
        }
    }
}

/// Number of worker threads for internally parallel computations, capped by
/// the `GLUEFORGE_THREADS` environment variable. Defaults to 1.
pub fn thread_cap() -> usize {
    std::env::var("GLUEFORGE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}
