//! Compatibility of vector valued forms with homological derivations, and
//! the degree one correspondences built on it.

pub mod compat;
pub mod contact;
pub mod dirac;
pub mod foliation;
pub mod lcs;
pub mod multivector;
pub mod poisson;
pub mod rank;
pub mod spencer_op;

use std::fmt;

pub use compat::{check_compat, compat_report, CompatReport, Obstruction, ObstructionKind};
pub use multivector::{schouten_bracket, MultivectorField};
pub use rank::Nondegeneracy;

/// One named condition of a classifier, with the first failure if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Number of instances (pairs, triples, ...) that were examined.
    pub checked: usize,
    pub witness: Option<String>,
    /// Informational checks are reported but do not enter the verdict.
    pub informational: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, checked: usize, witness: Option<String>) -> Self {
        Check { name: name.into(), passed: witness.is_none(), checked, witness, informational: false }
    }

    pub fn pass(name: impl Into<String>, checked: usize) -> Self {
        Self::new(name, checked, None)
    }

    pub fn fail(name: impl Into<String>, checked: usize, witness: impl Into<String>) -> Self {
        Self::new(name, checked, Some(witness.into()))
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

/// Verdict of a classifier: a list of checks plus free-form notes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// True when every non-informational check passed.
    pub fn passes(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether the named check exists and passed.
    pub fn passed(&self, name: &str) -> bool {
        self.check(name).is_some_and(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.passes() { "pass" } else { "fail" })?;
        for c in &self.checks {
            let tag = if c.passed { "ok" } else if c.informational { "note" } else { "FAIL" };
            write!(f, "  [{tag}] {} ({} checked)", c.name, c.checked)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
