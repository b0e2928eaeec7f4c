//! Pass/fail rows shared by the property checkers.

use serde::Serialize;

/// Residual tolerance and Loewner slack for a property suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub residual: f64,
    pub slack: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            slack: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `residual ≤ tolerance`.
    pub fn equality(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }

    /// Order check from a Loewner margin (see [`crate::linalg::loewner_margin`]);
    /// the residual is the size of the violation.
    pub fn order(name: impl Into<String>, margin: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            residual: (-margin).max(0.0),
            tolerance: slack,
            passed: margin >= -slack,
        }
    }

    /// A boolean outcome with an informational residual.
    pub fn flag(name: impl Into<String>, residual: f64, tolerance: f64, passed: bool) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
