//! Support, section and continuity audits of a single planner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ContinuityMetric;
use super::report::{AuditReport, Check, Exemplar, LadderRow};
use crate::geometry::{vector, PathMeasure, Point, PATH_GRID};
use crate::planners::AnalogPlanner;
use crate::transport::{path_measure_distance, path_measure_levy};

/// The rng and inputs of trial `trial`; even trials probe the critical locus.
pub fn trial_inputs(planner: &AnalogPlanner, seed: u64, trial: usize) -> (ChaCha8Rng, Vec<Point>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
    let inputs = if trial.is_multiple_of(2) {
        planner.sample_critical(&mut rng)
    } else {
        planner.sample_inputs(&mut rng)
    };
    (rng, inputs)
}

fn planner_report(suite: &str, planner: &AnalogPlanner, seed: u64) -> AuditReport {
    let mut report = AuditReport::new(suite, seed);
    report.planner = Some(planner.name().to_string());
    report.space = Some(planner.space().to_string());
    report
}

struct Trial {
    support: usize,
    error: f64,
    failure: Option<Exemplar>,
}

fn run_trials(
    planner: &AnalogPlanner,
    samples: usize,
    seed: u64,
    judge: impl Fn(&[Point], &PathMeasure) -> Trial + Sync,
) -> Vec<Trial> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let (_, inputs) = trial_inputs(planner, seed, i);
            match planner.plan(&inputs) {
                Ok(m) => judge(&inputs, &m),
                Err(e) => Trial {
                    support: 0,
                    error: f64::INFINITY,
                    failure: Some(Exemplar {
                        check: "plan".into(),
                        detail: e.to_string(),
                        inputs,
                        measure: None,
                    }),
                },
            }
        })
        .collect()
}

fn plan_errors(trials: &[Trial]) -> usize {
    trials.iter().filter(|t| t.support == 0).count()
}

/// Largest support size against the declared bound, with a histogram.
pub fn support_audit(planner: &AnalogPlanner, samples: usize, seed: u64) -> AuditReport {
    let bound = planner.bound();
    let trials = run_trials(planner, samples, seed, |inputs, m| {
        let support = m.support_size();
        Trial {
            support,
            error: support as f64,
            failure: (support > bound).then(|| Exemplar {
                check: "support_bound".into(),
                detail: format!("support {support} exceeds bound {bound}"),
                inputs: inputs.to_vec(),
                measure: Some(m.clone()),
            }),
        }
    });
    let mut report = planner_report("support", planner, seed);
    for t in &trials {
        if t.support > 0 {
            *report.support_histogram.entry(t.support).or_default() += 1;
        }
    }
    let max_support = trials.iter().map(|t| t.support).max().unwrap_or(0);
    report.push(Check::within(
        "support_bound",
        max_support as f64,
        bound as f64,
        samples,
    ));
    report.push(Check::exact("plan_errors", plan_errors(&trials), samples));
    for t in trials.into_iter().filter_map(|t| t.failure) {
        report.exemplar(t);
    }
    report
}

/// Largest deviation of path evaluations from the prescribed points.
pub fn section_audit(planner: &AnalogPlanner, samples: usize, seed: u64, tol: f64) -> AuditReport {
    let trials = run_trials(planner, samples, seed, |inputs, m| {
        let error = planner.section_error(inputs, m);
        Trial {
            support: m.support_size(),
            error,
            failure: (error > tol).then(|| Exemplar {
                check: "section".into(),
                detail: format!("endpoint deviation {error:e}"),
                inputs: inputs.to_vec(),
                measure: Some(m.clone()),
            }),
        }
    });
    let mut report = planner_report("section", planner, seed);
    let planned: Vec<&Trial> = trials.iter().filter(|t| t.support > 0).collect();
    let max_error = planned.iter().map(|t| t.error).fold(0.0, f64::max);
    report.push(Check::within("section", max_error, tol, planned.len()));
    report.push(Check::exact("plan_errors", plan_errors(&trials), samples));
    for t in trials.into_iter().filter_map(|t| t.failure) {
        report.exemplar(t);
    }
    report
}

/// Settings of [`continuity_probe`].
#[derive(Clone, Debug)]
pub struct LadderSpec {
    pub ladder: Vec<f64>,
    pub pairs_per_rung: usize,
    pub growth_limit: f64,
    pub metric: ContinuityMetric,
}

struct Probe {
    ratios: Vec<f64>,
    /// Inputs on either side at the finest rung.
    finest: Option<(Vec<Point>, Vec<Point>, PathMeasure)>,
    error: Option<(String, Vec<Point>)>,
}

fn perturbed(
    planner: &AnalogPlanner,
    inputs: &[Point],
    k: usize,
    tangent: &[f64],
    step: f64,
) -> Vec<Point> {
    let mut out = inputs.to_vec();
    let scaled = vector::scale(tangent, step);
    out[k] = planner
        .space()
        .canonicalize(&planner.space().exp(&inputs[k], &scaled));
    out
}

fn probe_trial(planner: &AnalogPlanner, spec: &LadderSpec, seed: u64, trial: usize) -> Probe {
    let (mut rng, center) = trial_inputs(planner, seed, trial);
    let k = rng.random_range(0..center.len());
    let space = planner.space();
    let raw = space.random_tangent(&center[k], &mut rng);
    let norm = space.tangent_norm(&raw);
    let mut probe = Probe {
        ratios: vec![0.0; spec.ladder.len()],
        finest: None,
        error: None,
    };
    if norm == 0.0 {
        return probe;
    }
    let tangent = vector::scale(&raw, 1.0 / norm);
    for (j, &h) in spec.ladder.iter().enumerate() {
        let x = perturbed(planner, &center, k, &tangent, -h / 2.0);
        let y = perturbed(planner, &center, k, &tangent, h / 2.0);
        let denom = space.distance(&x[k], &y[k]);
        if denom == 0.0 {
            continue;
        }
        let outcome = planner.plan(&x).and_then(|mx| {
            let my = planner.plan(&y)?;
            let d = match spec.metric {
                ContinuityMetric::W1 => path_measure_distance(&mx, &my, PATH_GRID)?,
                ContinuityMetric::Lp => path_measure_levy(&mx, &my, PATH_GRID)?,
            };
            Ok((d, mx))
        });
        match outcome {
            Ok((d, mx)) => {
                probe.ratios[j] = d / denom;
                if j + 1 == spec.ladder.len() {
                    probe.finest = Some((x, y, mx));
                }
            }
            Err(e) => {
                probe.error = Some((e.to_string(), x.into_iter().chain(y).collect()));
                return probe;
            }
        }
    }
    probe
}

fn growth(prev: f64, cur: f64) -> f64 {
    match (prev == 0.0, cur == 0.0) {
        (_, true) => 1.0,
        (true, false) => f64::INFINITY,
        _ => cur / prev,
    }
}

/// Per-rung maximal ratio `dist(plan(x), plan(y)) / d(x, y)` over symmetric
/// perturbations of common centers; passes iff the ratio never grows by more
/// than `growth_limit` between consecutive rungs.
pub fn continuity_probe(planner: &AnalogPlanner, spec: &LadderSpec, seed: u64) -> AuditReport {
    let probes: Vec<Probe> = (0..spec.pairs_per_rung)
        .into_par_iter()
        .map(|i| probe_trial(planner, spec, seed, i))
        .collect();
    let mut report = planner_report("continuity", planner, seed);
    let maxima: Vec<f64> = (0..spec.ladder.len())
        .map(|j| probes.iter().map(|p| p.ratios[j]).fold(0.0, f64::max))
        .collect();
    for (j, &scale) in spec.ladder.iter().enumerate() {
        report.ladder.push(LadderRow {
            scale,
            max_ratio: maxima[j],
            growth: (j > 0).then(|| growth(maxima[j - 1], maxima[j])),
        });
    }
    let max_growth = maxima
        .windows(2)
        .map(|w| growth(w[0], w[1]))
        .fold(0.0, f64::max);
    let inflation = maxima
        .windows(3)
        .map(|w| growth(w[0], w[2]))
        .fold(0.0, f64::max);
    report.push(Check::within(
        "ratio_growth",
        max_growth,
        spec.growth_limit,
        spec.pairs_per_rung,
    ));
    if spec.ladder.len() >= 3 {
        report.push(Check::within(
            "two_rung_inflation",
            inflation,
            spec.growth_limit * spec.growth_limit,
            spec.pairs_per_rung,
        ));
    }
    let errors = probes.iter().filter(|p| p.error.is_some()).count();
    report.push(Check::exact("plan_errors", errors, spec.pairs_per_rung));

    for (detail, inputs) in probes.iter().filter_map(|p| p.error.clone()) {
        report.exemplar(Exemplar {
            check: "plan_errors".into(),
            detail,
            inputs,
            measure: None,
        });
    }
    if !report.pass {
        // the worst pair at the finest rung
        let last = spec.ladder.len() - 1;
        let worst = probes
            .iter()
            .enumerate()
            .filter(|(_, p)| p.error.is_none())
            .max_by(|a, b| {
                a.1.ratios[last]
                    .total_cmp(&b.1.ratios[last])
                    .then(b.0.cmp(&a.0))
            });
        if let Some((_, p)) = worst {
            if let Some((x, y, m)) = &p.finest {
                report.exemplar(Exemplar {
                    check: "ratio_growth".into(),
                    detail: format!(
                        "ratio {:e} at scale {:e}; inputs are the two perturbed tuples",
                        p.ratios[last], spec.ladder[last]
                    ),
                    inputs: x.iter().chain(y).cloned().collect(),
                    measure: Some(m.clone()),
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::geometry::Space;
    use crate::planners::{build, PlannerParams};

    fn spec() -> LadderSpec {
        LadderSpec {
            ladder: vec![1e-2, 1e-3, 1e-4],
            pairs_per_rung: 200,
            growth_limit: 4.0,
            metric: ContinuityMetric::W1,
        }
    }

    fn rp(name: &str, dim: usize) -> AnalogPlanner {
        build(
            name,
            &PlannerParams {
                dim,
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn rp_tc_support_is_two() {
        let r = support_audit(&rp("rp_tc", 2), 2000, 42);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.check("support_bound").unwrap().max_error, 2.0);
        assert_eq!(r.support_histogram.values().sum::<usize>(), 2000);
    }

    #[test]
    fn constant_planner_has_unit_support_and_zero_ratios() {
        let space = Space::Sphere { dim: 2 };
        let inner = space.clone();
        let p = AnalogPlanner::new(
            "const",
            space.clone(),
            1,
            1,
            Some(Point::Vector(vec![1.0, 0.0, 0.0])),
            move |_: &[Point]| -> Result<PathMeasure> {
                Ok(PathMeasure::dirac(
                    inner.constant_path(&Point::Vector(vec![1.0, 0.0, 0.0]))?,
                ))
            },
        )
        .unwrap();
        let r = support_audit(&p, 50, 1);
        assert_eq!(
            r.support_histogram.keys().copied().collect::<Vec<_>>(),
            vec![1]
        );
        let c = continuity_probe(&p, &spec(), 1);
        assert!(c.ladder.iter().all(|row| row.max_ratio == 0.0));
        assert!(c.pass);
    }

    #[test]
    fn misdeclared_bound_fails_with_exemplar() {
        let r = support_audit(&rp("rp_tc_bound1", 2), 200, 42);
        assert!(!r.pass);
        assert!(!r.exemplars.is_empty() && r.exemplars.len() <= 5);
        assert_eq!(r.exemplars[0].measure.as_ref().unwrap().support_size(), 2);
    }

    #[test]
    fn shifted_endpoint_fails_section() {
        let r = section_audit(&rp("sphere_acat_shifted", 2), 100, 42, 1e-7);
        assert!(!r.pass);
        let e = r.check("section").unwrap().max_error;
        assert!((e - 1e-3).abs() < 1e-6, "{e}");
        assert!(section_audit(&rp("sphere_acat", 2), 500, 42, 1e-7).pass);
    }

    #[test]
    fn sequential_circle_matches_inputs() {
        let r = section_audit(&rp("circle_tc_seq", 1), 500, 42, 1e-7);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn continuity_separates_rp_tc_from_naive() {
        let good = continuity_probe(&rp("rp_tc", 2), &spec(), 42);
        assert!(good.pass, "{:?}", good.ladder);
        let bad = continuity_probe(&rp("rp_tc_naive", 2), &spec(), 42);
        assert!(!bad.pass);
        assert!(
            bad.check("two_rung_inflation").unwrap().max_error >= 100.0,
            "{:?}",
            bad.ladder
        );
    }

    #[test]
    fn probe_is_deterministic() {
        let a = continuity_probe(&rp("rp_tc", 3), &spec(), 5);
        let b = continuity_probe(&rp("rp_tc", 3), &spec(), 5);
        assert_eq!(a.ladder, b.ladder);
    }
}
