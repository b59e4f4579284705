//! Audit engine: planner audits and law suites driven by an [`AuditConfig`],
//! with JSON and CSV output.

mod config;
mod laws;
mod probes;
mod report;

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Space;
use crate::planners::{build, AnalogPlanner};

pub use config::{AuditConfig, ContinuityMetric, BUNDLE, LAW_SUITES, PLANNER_SUITES};
pub use laws::{
    boxtimes_suite, group_action_suite, monad_suite, rational_grid, transfer_suite,
    transport_oracle_suite,
};
pub use probes::{continuity_probe, section_audit, support_audit, trial_inputs, LadderSpec};
pub use report::{AuditReport, Check, Exemplar, LadderRow, MAX_EXEMPLARS};

/// Grid points per path in `samples.csv`.
const TRACE_GRID: usize = 16;

/// Everything written to `report.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub pass: bool,
    pub config: AuditConfig,
    pub reports: Vec<AuditReport>,
}

impl RunReport {
    pub fn failing(&self) -> impl Iterator<Item = &AuditReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

impl AuditConfig {
    pub fn ladder_spec(&self) -> LadderSpec {
        LadderSpec {
            ladder: self.ladder.clone(),
            pairs_per_rung: self.pairs_per_rung,
            growth_limit: self.growth_limit,
            metric: self.metric,
        }
    }
}

/// Runs one planner suite.
pub fn planner_suite(
    suite: &str,
    planner: &AnalogPlanner,
    config: &AuditConfig,
) -> Result<AuditReport> {
    Ok(match suite {
        "support" => support_audit(planner, config.samples, config.seed),
        "section" => section_audit(planner, config.samples, config.seed, config.section_tol),
        "continuity" => continuity_probe(planner, &config.ladder_spec(), config.seed),
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

/// Runs one law suite.
pub fn law_suite(suite: &str, config: &AuditConfig) -> Result<AuditReport> {
    let seed = config.seed;
    Ok(match suite {
        "monad" => monad_suite(config.monad_max_points, config.monad_max_denominator, seed),
        "transfer" => transfer_suite(config.law_cases, seed),
        "boxtimes" => boxtimes_suite(config.law_cases, seed),
        "transport-oracle" => transport_oracle_suite(
            config.oracle_instances,
            config.metric_triples,
            config.algebra_tol,
            seed,
        ),
        "group-action" => group_action_suite(
            config.action_denominator,
            config.shift_denominator,
            config.shift_window,
            seed,
        ),
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

/// The configured planners, one per distinct space across `dims`.
pub fn configured_planners(config: &AuditConfig) -> Result<Vec<AnalogPlanner>> {
    let mut out: Vec<AnalogPlanner> = Vec::new();
    for name in &config.planners {
        let mut spaces: Vec<Space> = Vec::new();
        for &d in &config.dims {
            let p = build(name, &config.params(d))?;
            if !spaces.contains(p.space()) {
                spaces.push(p.space().clone());
                out.push(p);
            }
        }
    }
    Ok(out)
}

fn timed(config: &AuditConfig, f: impl FnOnce() -> Result<AuditReport>) -> Result<AuditReport> {
    let start = Instant::now();
    let mut report = f()?;
    if config.timing {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

/// Executes every configured suite, without touching the file system.
pub fn execute(config: &AuditConfig) -> Result<RunReport> {
    config.validate()?;
    let planners = configured_planners(config)?;
    let mut reports = Vec::new();
    for suite in config.expanded_suites() {
        if PLANNER_SUITES.contains(&suite.as_str()) {
            for p in &planners {
                reports.push(timed(config, || planner_suite(&suite, p, config))?);
            }
        } else {
            reports.push(timed(config, || law_suite(&suite, config))?);
        }
    }
    Ok(RunReport {
        pass: reports.iter().all(|r| r.pass),
        config: config.clone(),
        reports,
    })
}

/// `samples.csv`: sampled plans of each configured planner on the path grid.
pub fn samples_csv(config: &AuditConfig) -> Result<String> {
    let mut out = String::from("planner,space,sample,atom,weight,t,coordinates\n");
    for p in configured_planners(config)? {
        for i in 0..config.trace_samples {
            let (_, inputs) = trial_inputs(&p, config.seed, i);
            let Ok(measure) = p.plan(&inputs) else {
                continue;
            };
            for (a, (path, w)) in measure.iter().enumerate() {
                for (j, point) in path.sample(TRACE_GRID).iter().enumerate() {
                    let t = j as f64 / TRACE_GRID as f64;
                    let coords: Vec<String> =
                        point.coordinates().iter().map(|c| c.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "{},{},{i},{a},{w},{t},{}",
                        p.name(),
                        p.space(),
                        coords.join(" ")
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Runs the config and writes the JSON report and CSV samples.
pub fn run(config: &AuditConfig) -> Result<RunReport> {
    let report = execute(config)?;
    fs::create_dir_all(&config.output_dir)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(config.report_path(), json + "\n")?;
    fs::write(config.samples_path(), samples_csv(config)?)?;
    Ok(report)
}
