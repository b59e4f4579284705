use std::collections::BTreeMap;

use serde::Serialize;

use crate::geometry::{PathMeasure, Point};

/// Most failure exemplars kept per report.
pub const MAX_EXEMPLARS: usize = 5;

/// One named check with its worst observed error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub pass: bool,
}

impl Check {
    /// Passes iff `max_error ≤ tolerance`.
    pub fn within(name: impl Into<String>, max_error: f64, tolerance: f64, cases: usize) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
            cases,
            pass: max_error <= tolerance,
        }
    }

    /// Passes iff no violation was counted; `max_error` is the violation count.
    pub fn exact(name: impl Into<String>, violations: usize, cases: usize) -> Self {
        Self {
            name: name.into(),
            max_error: violations as f64,
            tolerance: 0.0,
            cases,
            pass: violations == 0,
        }
    }
}

/// One rung of the continuity ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderRow {
    pub scale: f64,
    pub max_ratio: f64,
    /// `max_ratio` over the previous rung's; absent on the first rung.
    pub growth: Option<f64>,
}

/// A failing case with its full inputs.
#[derive(Clone, Debug, Serialize)]
pub struct Exemplar {
    pub check: String,
    pub detail: String,
    pub inputs: Vec<Point>,
    pub measure: Option<PathMeasure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub suite: String,
    pub planner: Option<String>,
    pub space: Option<String>,
    pub pass: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Support size → number of sampled inputs.
    pub support_histogram: BTreeMap<usize, usize>,
    pub ladder: Vec<LadderRow>,
    pub exemplars: Vec<Exemplar>,
    pub wall_time_ms: Option<f64>,
}

impl AuditReport {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            planner: None,
            space: None,
            pass: true,
            seed,
            checks: Vec::new(),
            support_histogram: BTreeMap::new(),
            ladder: Vec::new(),
            exemplars: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn exemplar(&mut self, exemplar: Exemplar) {
        if self.exemplars.len() < MAX_EXEMPLARS {
            self.exemplars.push(exemplar);
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `suite [planner space]: PASS|FAIL`, for terminal output.
    pub fn summary_line(&self) -> String {
        let target = match (&self.planner, &self.space) {
            (Some(p), Some(s)) => format!(" {p} on {s}"),
            _ => String::new(),
        };
        let failing: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        if self.pass {
            format!("{}{target}: PASS", self.suite)
        } else {
            format!("{}{target}: FAIL ({})", self.suite, failing.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exemplars_are_capped() {
        let mut r = AuditReport::new("support", 42);
        for i in 0..9 {
            r.exemplar(Exemplar {
                check: "x".into(),
                detail: i.to_string(),
                inputs: vec![],
                measure: None,
            });
        }
        assert_eq!(r.exemplars.len(), MAX_EXEMPLARS);
    }

    #[test]
    fn pass_is_conjunction() {
        let mut r = AuditReport::new("monad", 1);
        r.push(Check::exact("a", 0, 3));
        assert!(r.pass);
        r.push(Check::within("b", 2e-9, 1e-9, 3));
        assert!(!r.pass);
        assert!(r.summary_line().ends_with("FAIL (b)"));
    }
}
