//! Law suites: monad, covering transfer, external product, transport oracle
//! and group action.

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{AuditReport, Check, Exemplar};
use crate::error::Result;
use crate::geometry::{sphere_distance, CoveringMap, Point, Space};
use crate::group::{
    act, free_action_probe, grid_points, skeleton_index, torsion_fixed_point_witness, ActionModel,
    FiniteGroup, SimplexPoint,
};
use crate::measure::{Atom, ProbMeasure};
use crate::transport::{levy_prokhorov, w1_oracle, wasserstein1};

type Exact<A> = ProbMeasure<A, Rational64>;

fn rng_for(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

fn note(report: &mut AuditReport, check: &str, detail: String) {
    report.exemplar(Exemplar {
        check: check.into(),
        detail,
        inputs: Vec::new(),
        measure: None,
    });
}

/// Every measure on `{0, …, n−1}` with weights of denominator at most `max_den`.
pub fn rational_grid(n: usize, max_den: u32) -> Vec<Exact<usize>> {
    let mut out: Vec<Exact<usize>> = Vec::new();
    for q in 1..=max_den {
        for counts in grid_points(n, q) {
            let raw = counts
                .iter()
                .enumerate()
                .map(|(x, &k)| (x, Rational64::new(k as i64, q as i64)))
                .collect();
            let m = ProbMeasure::normalize(raw).expect("grid point");
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// Kernels `x ↦ base[(a·x + b) mod |base|]` over a small measure family.
fn kernels(n: usize) -> Vec<Vec<Exact<usize>>> {
    let base = rational_grid(n, 2);
    let len = base.len();
    (1..=3)
        .flat_map(|a| (0..len).map(move |b| (a, b)))
        .map(|(a, b)| (0..n).map(|x| base[(a * x + b) % len].clone()).collect())
        .collect()
}

#[derive(Default, Clone, Copy)]
struct MonadCounts {
    cases: [usize; 6],
    violations: [usize; 6],
}

const MONAD_LAWS: [&str; 6] = [
    "left_unit",
    "right_unit",
    "bind_associativity",
    "flatten_unit",
    "flatten_associativity",
    "functor_composition",
];

fn monad_laws(n: usize, max_den: u32) -> MonadCounts {
    let measures = rational_grid(n, max_den);
    let ks = kernels(n);
    let mut c = MonadCounts::default();
    let mut tally = |law: usize, ok: bool| {
        c.cases[law] += 1;
        if !ok {
            c.violations[law] += 1;
        }
    };
    let apply = |f: &Vec<Exact<usize>>, x: &usize| -> Result<Exact<usize>> { Ok(f[*x].clone()) };
    for f in &ks {
        for x in 0..n {
            tally(
                0,
                Exact::dirac(x).bind(|y| apply(f, y)).ok() == Some(f[x].clone()),
            );
        }
    }
    for mu in &measures {
        tally(
            1,
            mu.bind(|x| Ok(Exact::dirac(*x))).ok().as_ref() == Some(mu),
        );
        tally(3, Exact::flatten(&Exact::dirac(mu.clone())) == *mu);
        tally(
            3,
            Exact::flatten(&mu.pushforward(|x| Exact::dirac(*x))) == *mu,
        );
        for f in &ks {
            for g in &ks {
                let lhs = mu
                    .bind(|x| apply(f, x))
                    .and_then(|m| m.bind(|y| apply(g, y)));
                let rhs = mu.bind(|x| f[*x].bind(|y| apply(g, y)));
                tally(2, lhs.is_ok() && lhs == rhs);
            }
        }
        for (f, g) in ks.iter().zip(ks.iter().rev()).take(8) {
            let nested = mu.pushforward(|x| f[*x].pushforward(|y| g[*y].clone()));
            let inner_first = Exact::flatten(&nested.pushforward(Exact::flatten));
            let outer_first = Exact::flatten(&Exact::flatten(&nested));
            tally(4, inner_first == outer_first);
        }
        for a in 0..n {
            let f = |x: &usize| (x + a) % n;
            let g = |x: &usize| (x * 3 + 1) % n;
            tally(
                5,
                mu.pushforward(|x| g(&f(x))) == mu.pushforward(f).pushforward(g),
            );
        }
        tally(5, mu.pushforward(|x| *x) == *mu);
    }
    c
}

/// Monad laws with exact rational weights, exhaustive over grid measures on
/// discrete spaces of size up to `max_points`.
pub fn monad_suite(max_points: usize, max_den: u32, seed: u64) -> AuditReport {
    let mut report = AuditReport::new("monad", seed);
    let per_size: Vec<MonadCounts> = (1..=max_points)
        .into_par_iter()
        .map(|n| monad_laws(n, max_den))
        .collect();
    for (i, law) in MONAD_LAWS.iter().enumerate() {
        let cases = per_size.iter().map(|c| c.cases[i]).sum();
        let violations: usize = per_size.iter().map(|c| c.violations[i]).sum();
        report.push(Check::exact(*law, violations, cases));
        if violations > 0 {
            note(&mut report, law, format!("{violations} violations"));
        }
    }
    report
}

fn random_measure(space: &Space, rng: &mut ChaCha8Rng, max_support: usize) -> ProbMeasure<Point> {
    let k = rng.random_range(1..=max_support);
    let raw: Vec<(Point, f64)> = (0..k)
        .map(|_| (space.sample(rng), rng.random_range(0.05..1.0)))
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    ProbMeasure::normalize(raw.into_iter().map(|(p, w)| (p, w / total)).collect())
        .expect("positive weights")
}

/// `max |μ(x) − ν(x)|` over the union of supports, or ∞ if supports differ.
fn weight_gap(mu: &ProbMeasure<Point>, nu: &ProbMeasure<Point>) -> f64 {
    if mu.support_size() != nu.support_size()
        || !mu.support().all(|x| nu.support().any(|y| x.same_atom(y)))
    {
        return f64::INFINITY;
    }
    mu.iter()
        .map(|(x, w)| (w - nu.weight_of(x)).abs())
        .fold(0.0, f64::max)
}

fn transfer_covers() -> Vec<CoveringMap> {
    vec![
        CoveringMap::Antipodal { dim: 1 },
        CoveringMap::Antipodal { dim: 2 },
        CoveringMap::Antipodal { dim: 3 },
        CoveringMap::Power { k: 3 },
        CoveringMap::Product(vec![
            CoveringMap::Antipodal { dim: 2 },
            CoveringMap::Power { k: 2 },
        ]),
    ]
}

struct TransferCase {
    section: f64,
    fiber: f64,
    support_excess: usize,
    error: Option<String>,
}

/// `p_* p^* μ = μ`, uniform fiber weights and `|supp p^*μ| ≤ k |supp μ|` on
/// random measures over several covers.
pub fn transfer_suite(cases: usize, seed: u64) -> AuditReport {
    let covers = transfer_covers();
    let results: Vec<TransferCase> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let cover = &covers[i % covers.len()];
            let mut rng = rng_for(seed, i);
            let mu = random_measure(&cover.base(), &mut rng, 4);
            match ProbMeasure::cover_pullback(cover, &mu) {
                Ok(lifted) => {
                    let k = cover.degree() as f64;
                    let fiber = lifted
                        .iter()
                        .map(|(e, w)| (w - mu.weight_of(&cover.project(e)) / k).abs())
                        .fold(0.0, f64::max);
                    TransferCase {
                        section: weight_gap(&lifted.pushforward(|e| cover.project(e)), &mu),
                        fiber,
                        support_excess: lifted
                            .support_size()
                            .saturating_sub(cover.degree() * mu.support_size()),
                        error: None,
                    }
                }
                Err(e) => TransferCase {
                    section: f64::INFINITY,
                    fiber: f64::INFINITY,
                    support_excess: 0,
                    error: Some(format!("{cover}: {e}")),
                },
            }
        })
        .collect();
    let mut report = AuditReport::new("transfer", seed);
    let max = |f: fn(&TransferCase) -> f64| results.iter().map(f).fold(0.0, f64::max);
    report.push(Check::within(
        "pushforward_of_transfer",
        max(|c| c.section),
        1e-12,
        cases,
    ));
    report.push(Check::within(
        "uniform_fibers",
        max(|c| c.fiber),
        1e-12,
        cases,
    ));
    let excess = results.iter().filter(|c| c.support_excess > 0).count();
    report.push(Check::exact("support_bound", excess, cases));
    let errors: Vec<String> = results.iter().filter_map(|c| c.error.clone()).collect();
    report.push(Check::exact("errors", errors.len(), cases));
    for e in errors {
        note(&mut report, "errors", e);
    }
    report
}

/// Marginals of `μ ⊠ ν` recover `μ` and `ν`; `|supp μ ⊠ ν| = |supp μ| |supp ν|`.
pub fn boxtimes_suite(cases: usize, seed: u64) -> AuditReport {
    let (x, y) = (Space::Sphere { dim: 2 }, Space::Torus { n: 2 });
    let results: Vec<(f64, bool)> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let mu = random_measure(&x, &mut rng, 4);
            let nu = random_measure(&y, &mut rng, 4);
            let product = mu.boxtimes(&nu);
            let (m1, m2) = product.marginals();
            let gap = weight_gap(&m1, &mu).max(weight_gap(&m2, &nu));
            let size_ok = product.support_size() == mu.support_size() * nu.support_size();
            (gap, size_ok)
        })
        .collect();
    let mut report = AuditReport::new("boxtimes", seed);
    let gap = results.iter().map(|r| r.0).fold(0.0, f64::max);
    report.push(Check::within("marginal_retraction", gap, 1e-12, cases));
    let bad = results.iter().filter(|r| !r.1).count();
    report.push(Check::exact("support_product", bad, cases));
    report
}

/// `W₁` against the spanning-tree oracle, plus metric axioms of `W₁` and
/// Lévy–Prokhorov on random triples.
pub fn transport_oracle_suite(
    instances: usize,
    triples: usize,
    tol: f64,
    seed: u64,
) -> AuditReport {
    let sphere = Space::Sphere { dim: 2 };
    let ground = |a: &Point, b: &Point| {
        sphere_distance(a.as_vector().unwrap_or(&[]), b.as_vector().unwrap_or(&[]))
    };
    let circle = Space::Circle;
    let oracle: Vec<Result<f64>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i);
            let space = if i % 2 == 0 { &sphere } else { &circle };
            let mu = random_measure(space, &mut rng, 3);
            let nu = random_measure(space, &mut rng, 3);
            let g = |a: &Point, b: &Point| space.distance(a, b);
            Ok((wasserstein1(&mu, &nu, &g)? - w1_oracle(&mu, &nu, &g)?).abs())
        })
        .collect();
    let axioms: Vec<Result<[f64; 4]>> = (0..triples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed.wrapping_add(1 << 32), i);
            let [a, b, c] = [0; 3].map(|_| random_measure(&sphere, &mut rng, 5));
            let w = |p: &ProbMeasure<Point>, q: &ProbMeasure<Point>| wasserstein1(p, q, &ground);
            let lp = |p: &ProbMeasure<Point>, q: &ProbMeasure<Point>| levy_prokhorov(p, q, &ground);
            let identity = w(&a, &a)?.max(lp(&a, &a)?);
            let symmetry = (w(&a, &b)? - w(&b, &a)?)
                .abs()
                .max((lp(&a, &b)? - lp(&b, &a)?).abs());
            let triangle = (w(&a, &c)? - w(&a, &b)? - w(&b, &c)?).max(0.0);
            let lp_triangle = (lp(&a, &c)? - lp(&a, &b)? - lp(&b, &c)?).max(0.0);
            Ok([identity, symmetry, triangle, lp_triangle])
        })
        .collect();
    let mut report = AuditReport::new("transport-oracle", seed);
    let errors =
        oracle.iter().filter(|r| r.is_err()).count() + axioms.iter().filter(|r| r.is_err()).count();
    let oracle_gap = oracle
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .fold(0.0, |a: f64, b| a.max(*b));
    report.push(Check::within("w1_vs_oracle", oracle_gap, tol, instances));
    let names = ["identity", "symmetry", "w1_triangle", "lp_triangle"];
    for (k, name) in names.iter().enumerate() {
        let worst = axioms
            .iter()
            .filter_map(|r| r.as_ref().ok())
            .map(|v| v[k])
            .fold(0.0, f64::max);
        report.push(Check::within(*name, worst, tol, triples));
    }
    report.push(Check::exact("errors", errors, instances + triples));
    report
}

/// Group action laws exhaustively over the catalogue, torsion witnesses, and
/// the shift-window freeness check.
pub fn group_action_suite(
    action_den: u32,
    shift_den: u32,
    window: usize,
    seed: u64,
) -> AuditReport {
    let mut report = AuditReport::new("group-action", seed);
    let mut groups = vec![FiniteGroup::cyclic(1).expect("trivial group")];
    groups.extend(FiniteGroup::catalog());

    let law: Vec<(usize, usize, usize)> = groups
        .par_iter()
        .map(|group| {
            let n = group.order();
            let (mut cases, mut action, mut invariants) = (0, 0, 0);
            for q in 1..=action_den {
                for counts in grid_points(n, q) {
                    let raw = counts
                        .iter()
                        .enumerate()
                        .map(|(x, &k)| (x, Rational64::new(k as i64, q as i64)))
                        .collect();
                    let xi = SimplexPoint::normalize(raw).expect("grid point");
                    for g in 0..n {
                        let moved = act(group, g, &xi);
                        if skeleton_index(&moved) != skeleton_index(&xi)
                            || moved.total_mass() != Rational64::from_integer(1)
                        {
                            invariants += 1;
                        }
                        for h in 0..n {
                            cases += 1;
                            if act(group, g, &act(group, h, &xi))
                                != act(group, group.mul(g, h), &xi)
                            {
                                action += 1;
                            }
                        }
                    }
                    if act(group, group.identity(), &xi) != xi {
                        action += 1;
                    }
                }
            }
            (cases, action, invariants)
        })
        .collect();
    let cases: usize = law.iter().map(|l| l.0).sum();
    report.push(Check::exact(
        "action_law",
        law.iter().map(|l| l.1).sum(),
        cases,
    ));
    report.push(Check::exact(
        "skeleton_and_mass",
        law.iter().map(|l| l.2).sum(),
        cases,
    ));

    let (mut witnesses, mut unfixed, mut not_found) = (0, 0, 0);
    for group in &groups {
        let model = ActionModel::Finite(group.clone());
        for g in (0..group.order()).filter(|&g| g != group.identity()) {
            witnesses += 1;
            match torsion_fixed_point_witness(&model, g as i64) {
                Ok(w) if act(group, g, &w) == w && w.support_size() == group.element_order(g) => {}
                _ => {
                    unfixed += 1;
                    note(
                        &mut report,
                        "torsion_witness",
                        format!("{} element {}", group.name(), group.label(g)),
                    );
                }
            }
        }
        match free_action_probe(&model, action_den.clamp(1, 6)) {
            Ok(r) if r.free == (group.order() == 1) => {}
            _ => {
                not_found += 1;
                note(&mut report, "finite_fixed_point", group.name().to_string());
            }
        }
    }
    report.push(Check::exact("torsion_witness", unfixed, witnesses));
    report.push(Check::exact("finite_fixed_point", not_found, groups.len()));

    let shift = ActionModel::Shift { window };
    match free_action_probe(&shift, shift_den) {
        Ok(r) => {
            report.push(Check::exact(
                "shift_fixed_points",
                r.fixed_pairs,
                r.points_checked * r.nontrivial_elements,
            ));
        }
        Err(e) => {
            report.push(Check::exact("shift_fixed_points", 1, 0));
            note(&mut report, "shift_fixed_points", e.to_string());
        }
    }
    let infinite = matches!(
        torsion_fixed_point_witness(&shift, 1),
        Err(crate::error::Error::InfiniteOrder)
    );
    report.push(Check::exact(
        "shift_infinite_order",
        usize::from(!infinite),
        1,
    ));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_grid_counts() {
        // distinct points of the 1-simplex with denominators ≤ 3: 0, 1/3, 1/2, 2/3, 1
        assert_eq!(rational_grid(2, 3).len(), 5);
        assert_eq!(rational_grid(1, 6).len(), 1);
    }

    #[test]
    fn monad_small() {
        let r = monad_suite(3, 3, 0);
        assert!(r.pass, "{:?}", r.checks);
        assert!(r.checks.iter().all(|c| c.cases > 0));
    }

    #[test]
    fn transfer_and_boxtimes_small() {
        let t = transfer_suite(200, 1);
        assert!(t.pass, "{:?}", t.checks);
        let b = boxtimes_suite(200, 1);
        assert!(b.pass, "{:?}", b.checks);
    }

    #[test]
    fn transport_small() {
        let r = transport_oracle_suite(40, 40, 1e-9, 3);
        assert!(r.pass, "{:?}", r.checks);
    }

    #[test]
    fn group_action_small() {
        let r = group_action_suite(2, 3, 7, 0);
        assert!(r.pass, "{:?}", r.checks);
    }
}
