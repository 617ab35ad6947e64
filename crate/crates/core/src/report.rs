//! Pass/fail records produced by the verification operations.

use alloc::string::String;
use alloc::vec::Vec;

/// One named condition with its worst-case slack.
///
/// `slack >= 0` means the condition held everywhere it was sampled, with
/// `location` the sample where it was tightest. Informational checks are
/// reported but do not affect [`ValidationReport::passed`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub slack: f64,
    pub location: Option<[f64; 2]>,
    pub value: Option<f64>,
    pub informational: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, slack: f64) -> Self {
        Self {
            name: name.into(),
            passed,
            slack,
            location: None,
            value: None,
            informational: false,
            note: None,
        }
    }

    /// A check that passes iff `slack >= -tol`.
    pub fn slack(name: impl Into<String>, slack: f64, tol: f64) -> Self {
        Self::new(name, slack >= -tol, slack)
    }

    pub fn at(mut self, location: [f64; 2]) -> Self {
        self.location = Some(location);
        self
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = Some(value);
        self
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// True when every gating check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.informational && !c.passed)
    }

    /// Smallest slack over gating checks (`+inf` if there are none).
    pub fn worst_slack(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| !c.informational)
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}
