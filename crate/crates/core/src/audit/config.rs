//! Flat `key = value` audit configuration.
//!
//! Lines are `key = value`; `#` starts a comment; lists are comma separated.
//! Unknown keys, duplicate keys and malformed values are reported with their
//! line number.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::planners::{catalog, PlannerParams};

/// Suites that audit a planner.
pub const PLANNER_SUITES: &[&str] = &["support", "section", "continuity"];
/// Suites that check algebraic laws and need no planner.
pub const LAW_SUITES: &[&str] = &[
    "monad",
    "transfer",
    "boxtimes",
    "transport-oracle",
    "group-action",
];
/// Shorthand expanding to all planner suites.
pub const BUNDLE: &str = "bundle";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuityMetric {
    W1,
    Lp,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    pub suites: Vec<String>,
    pub planners: Vec<String>,
    /// Sphere and projective dimensions to audit.
    pub dims: Vec<usize>,
    pub torus_n: usize,
    pub arity: usize,
    pub samples: usize,
    pub pairs_per_rung: usize,
    pub ladder: Vec<f64>,
    /// Largest allowed ratio growth between consecutive ladder rungs.
    pub growth_limit: f64,
    pub metric: ContinuityMetric,
    pub section_tol: f64,
    pub algebra_tol: f64,
    /// Randomized cases of the transfer and boxtimes suites.
    pub law_cases: usize,
    pub oracle_instances: usize,
    pub metric_triples: usize,
    pub monad_max_points: usize,
    pub monad_max_denominator: u32,
    pub action_denominator: u32,
    pub shift_denominator: u32,
    pub shift_window: usize,
    pub seed: u64,
    /// Record wall time in reports (breaks byte-identical reruns).
    pub timing: bool,
    // output locations are left out of reports so reruns elsewhere compare equal
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub report_file: String,
    #[serde(skip)]
    pub samples_file: String,
    /// Plans traced into the CSV per planner run.
    pub trace_samples: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let params = PlannerParams::default();
        Self {
            suites: Vec::new(),
            planners: Vec::new(),
            dims: vec![params.dim],
            torus_n: params.torus_n,
            arity: params.arity,
            samples: 10_000,
            pairs_per_rung: 1_000,
            ladder: vec![1e-2, 1e-3, 1e-4, 1e-5],
            growth_limit: 4.0,
            metric: ContinuityMetric::W1,
            section_tol: 1e-7,
            algebra_tol: 1e-9,
            law_cases: 10_000,
            oracle_instances: 200,
            metric_triples: 1_000,
            monad_max_points: 4,
            monad_max_denominator: 6,
            action_denominator: 4,
            shift_denominator: 5,
            shift_window: 11,
            seed: 42,
            timing: false,
            output_dir: PathBuf::from("analogmp-out"),
            report_file: "report.json".into(),
            samples_file: "samples.csv".into(),
            trace_samples: 2,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config {
        line,
        message: format!("invalid value `{value}` for `{key}`"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

impl AuditConfig {
    /// Sets one key; `line` is used for diagnostics (0 for command-line flags).
    pub fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "suites" | "suite" => self.suites = parse_list(line, key, value)?,
            "planners" | "planner" => self.planners = parse_list(line, key, value)?,
            "dims" | "dim" | "d" => self.dims = parse_list(line, key, value)?,
            "torus_n" | "n" => self.torus_n = parse_value(line, key, value)?,
            "arity" | "r" => self.arity = parse_value(line, key, value)?,
            "samples" => self.samples = parse_value(line, key, value)?,
            "pairs_per_rung" => self.pairs_per_rung = parse_value(line, key, value)?,
            "ladder" => self.ladder = parse_list(line, key, value)?,
            "growth_limit" => self.growth_limit = parse_value(line, key, value)?,
            "metric" => {
                self.metric = match value {
                    "w1" => ContinuityMetric::W1,
                    "lp" => ContinuityMetric::Lp,
                    _ => {
                        return Err(Error::Config {
                            line,
                            message: format!("metric must be w1 or lp, got `{value}`"),
                        })
                    }
                }
            }
            "section_tol" => self.section_tol = parse_value(line, key, value)?,
            "algebra_tol" => self.algebra_tol = parse_value(line, key, value)?,
            "law_cases" => self.law_cases = parse_value(line, key, value)?,
            "oracle_instances" => self.oracle_instances = parse_value(line, key, value)?,
            "metric_triples" => self.metric_triples = parse_value(line, key, value)?,
            "monad_max_points" => self.monad_max_points = parse_value(line, key, value)?,
            "monad_max_denominator" => self.monad_max_denominator = parse_value(line, key, value)?,
            "action_denominator" => self.action_denominator = parse_value(line, key, value)?,
            "shift_denominator" => self.shift_denominator = parse_value(line, key, value)?,
            "shift_window" => self.shift_window = parse_value(line, key, value)?,
            "seed" => self.seed = parse_value(line, key, value)?,
            "timing" => self.timing = parse_value(line, key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "report_file" => self.report_file = value.to_string(),
            "samples_file" => self.samples_file = value.to_string(),
            "trace_samples" => self.trace_samples = parse_value(line, key, value)?,
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// Parses and validates a config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            seen.push(key);
            config.set(line, key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    /// Checks the invariants; line 0 marks whole-config problems.
    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Err(Error::Config { line: 0, message });
        if self.suites.is_empty() {
            return fail("no suites listed".into());
        }
        for s in &self.suites {
            if s != BUNDLE
                && !PLANNER_SUITES.contains(&s.as_str())
                && !LAW_SUITES.contains(&s.as_str())
            {
                return Err(Error::UnknownSuite(s.clone()));
            }
        }
        for p in &self.planners {
            if !catalog().iter().any(|info| info.name == p) {
                return Err(Error::UnknownPlanner(p.clone()));
            }
        }
        if self
            .expanded_suites()
            .iter()
            .any(|s| PLANNER_SUITES.contains(&s.as_str()))
            && self.planners.is_empty()
        {
            return fail("planner suites need at least one planner".into());
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return fail("dims must be a nonempty list of positive integers".into());
        }
        let counts = [
            ("samples", self.samples),
            ("pairs_per_rung", self.pairs_per_rung),
            ("law_cases", self.law_cases),
            ("oracle_instances", self.oracle_instances),
            ("metric_triples", self.metric_triples),
            ("torus_n", self.torus_n),
            ("arity", self.arity),
            ("monad_max_points", self.monad_max_points),
        ];
        if let Some((key, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return fail(format!("`{key}` must be positive"));
        }
        if self.ladder.len() < 2 {
            return fail("ladder needs at least two rungs".into());
        }
        if self.ladder.iter().any(|h| h.is_nan() || *h <= 0.0)
            || self.ladder.windows(2).any(|w| w[1] >= w[0])
        {
            return fail("ladder must be positive and strictly decreasing".into());
        }
        let below = |x: f64, min: f64| x.is_nan() || x < min;
        if below(self.growth_limit, 1.0)
            || below(self.section_tol, 0.0)
            || below(self.algebra_tol, 0.0)
        {
            return fail("tolerances must be nonnegative and growth_limit at least 1".into());
        }
        if self.monad_max_denominator == 0 {
            return fail("`monad_max_denominator` must be positive".into());
        }
        Ok(())
    }

    /// Suites in execution order with `bundle` expanded.
    pub fn expanded_suites(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.suites {
            let names: Vec<&str> = if s == BUNDLE {
                PLANNER_SUITES.to_vec()
            } else {
                vec![s.as_str()]
            };
            for n in names {
                if !out.iter().any(|o| o == n) {
                    out.push(n.to_string());
                }
            }
        }
        out
    }

    pub fn params(&self, dim: usize) -> PlannerParams {
        PlannerParams {
            dim,
            torus_n: self.torus_n,
            arity: self.arity,
        }
    }

    pub fn report_path(&self) -> PathBuf {
        self.output_dir.join(&self.report_file)
    }

    pub fn samples_path(&self) -> PathBuf {
        self.output_dir.join(&self.samples_file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_comments() {
        let c = AuditConfig::parse(
            "# audit\nsuites = bundle, monad  # trailing\nplanners = rp_tc\ndims = 1, 3\nladder = 1e-2, 1e-3\n",
        )
        .unwrap();
        assert_eq!(c.dims, vec![1, 3]);
        assert_eq!(c.ladder, vec![1e-2, 1e-3]);
        assert_eq!(
            c.expanded_suites(),
            vec!["support", "section", "continuity", "monad"]
        );
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = AuditConfig::parse("suites = monad\n\nsamples = many\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
        let err = AuditConfig::parse("suites = monad\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = AuditConfig::parse("suites = monad\nno equals sign\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }));
        let err = AuditConfig::parse("suites = monad\nseed = 1\nseed = 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }));
    }

    #[test]
    fn rejects_bad_ladders_and_names() {
        assert!(AuditConfig::parse("suites = monad\nladder = 1e-3, 1e-2\n").is_err());
        assert!(AuditConfig::parse("suites = monad\nladder = 1e-3\n").is_err());
        assert!(matches!(
            AuditConfig::parse("suites = nope\n"),
            Err(Error::UnknownSuite(_))
        ));
        assert!(matches!(
            AuditConfig::parse("suites = support\nplanners = nope\n"),
            Err(Error::UnknownPlanner(_))
        ));
        assert!(AuditConfig::parse("suites = support\n").is_err());
        assert!(AuditConfig::parse("suites = monad\nsamples = 0\n").is_err());
    }

    #[test]
    fn set_overrides_file_values() {
        let mut c = AuditConfig::parse("suites = monad\nseed = 7\n").unwrap();
        c.set(0, "seed", "9").unwrap();
        assert_eq!(c.seed, 9);
    }
}
