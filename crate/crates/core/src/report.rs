//! Pass/fail lines shared by all verification reports.

use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckLine {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckLine { name: name.into(), measured, threshold, pass: measured.is_finite() && measured <= threshold }
    }

    /// Exact integer match, recorded as |a − b| against zero.
    pub fn equal(name: impl Into<String>, a: usize, b: usize) -> Self {
        CheckLine { name: name.into(), measured: (a as f64 - b as f64).abs(), threshold: 0.0, pass: a == b }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub lines: Vec<CheckLine>,
}

impl Report {
    pub fn push(&mut self, line: CheckLine) {
        self.lines.push(line);
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> Vec<&CheckLine> {
        self.lines.iter().filter(|l| !l.pass).collect()
    }
}
