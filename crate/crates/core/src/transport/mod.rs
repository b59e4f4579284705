//! Exact distances between finitely supported measures.
//!
//! [`wasserstein1`] solves the transport problem with a transportation simplex,
//! [`w1_oracle`] enumerates every spanning-tree basic solution for tiny
//! instances, and [`levy_prokhorov`] uses max-flow feasibility of couplings.

mod levy;
mod oracle;
mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GeoPath, PathMeasure};
use crate::measure::{Atom, ProbMeasure};

/// Largest support handled by the exact solvers.
pub const MAX_SUPPORT: usize = 64;
/// Largest support handled by the brute-force oracle.
pub const ORACLE_SUPPORT: usize = 3;

/// A distance on atoms. Any `Fn(&A, &A) -> f64` qualifies.
pub trait GroundMetric<A> {
    fn distance(&self, a: &A, b: &A) -> f64;
}

impl<A, F: Fn(&A, &A) -> f64> GroundMetric<A> for F {
    fn distance(&self, a: &A, b: &A) -> f64 {
        self(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Flow {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

/// Optimal coupling between the atoms of `μ` (sources) and `ν` (targets),
/// indexed in lowest-terms atom order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportPlan {
    pub flows: Vec<Flow>,
    pub cost: f64,
}

impl TransportPlan {
    /// Largest deviation of the plan's marginals from the given weights.
    pub fn marginal_error(&self, supply: &[f64], demand: &[f64]) -> f64 {
        let mut rows = vec![0.0; supply.len()];
        let mut cols = vec![0.0; demand.len()];
        for f in &self.flows {
            rows[f.source] += f.mass;
            cols[f.target] += f.mass;
        }
        rows.iter()
            .zip(supply)
            .chain(cols.iter().zip(demand))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn weights<A: Atom>(mu: &ProbMeasure<A>) -> Vec<f64> {
    mu.iter().map(|(_, w)| *w).collect()
}

fn check_size(m: usize, n: usize, limit: usize) -> Result<()> {
    let size = m.max(n);
    if size > limit {
        return Err(Error::SupportTooLarge { size, limit });
    }
    Ok(())
}

fn cost_matrix<A: Atom>(
    mu: &ProbMeasure<A>,
    nu: &ProbMeasure<A>,
    g: &impl GroundMetric<A>,
) -> Vec<Vec<f64>> {
    mu.support()
        .map(|a| nu.support().map(|b| g.distance(a, b)).collect())
        .collect()
}

/// Optimal plan for `W₁(μ, ν)` under the ground metric `g`.
pub fn optimal_plan<A: Atom>(
    mu: &ProbMeasure<A>,
    nu: &ProbMeasure<A>,
    g: &impl GroundMetric<A>,
) -> Result<TransportPlan> {
    check_size(mu.support_size(), nu.support_size(), MAX_SUPPORT)?;
    let sol = simplex::solve(&weights(mu), &weights(nu), &cost_matrix(mu, nu, g))?;
    let flows = sol
        .cells
        .into_iter()
        .filter(|c| c.2 > 0.0)
        .map(|(source, target, mass)| Flow {
            source,
            target,
            mass,
        })
        .collect();
    Ok(TransportPlan {
        flows,
        cost: sol.cost.max(0.0),
    })
}

/// Wasserstein-1 distance.
pub fn wasserstein1<A: Atom>(
    mu: &ProbMeasure<A>,
    nu: &ProbMeasure<A>,
    g: &impl GroundMetric<A>,
) -> Result<f64> {
    Ok(optimal_plan(mu, nu, g)?.cost)
}

/// Minimum transport cost over all spanning-tree basic feasible solutions.
pub fn w1_oracle<A: Atom>(
    mu: &ProbMeasure<A>,
    nu: &ProbMeasure<A>,
    g: &impl GroundMetric<A>,
) -> Result<f64> {
    check_size(mu.support_size(), nu.support_size(), ORACLE_SUPPORT)?;
    Ok(oracle::min_over_trees(&weights(mu), &weights(nu), &cost_matrix(mu, nu, g)).max(0.0))
}

/// Lévy–Prokhorov distance `inf{ε : ∃ coupling π, π(g > ε) ≤ ε}`.
pub fn levy_prokhorov<A: Atom>(
    mu: &ProbMeasure<A>,
    nu: &ProbMeasure<A>,
    g: &impl GroundMetric<A>,
) -> Result<f64> {
    check_size(mu.support_size(), nu.support_size(), MAX_SUPPORT)?;
    Ok(levy::levy_prokhorov(
        &weights(mu),
        &weights(nu),
        &cost_matrix(mu, nu, g),
    ))
}

/// `W₁` between path measures with the grid sup-distance as ground metric.
pub fn path_measure_distance(mu: &PathMeasure, nu: &PathMeasure, grid: usize) -> Result<f64> {
    wasserstein1(mu, nu, &|a: &GeoPath, b: &GeoPath| a.sup_distance(b, grid))
}

/// Lévy–Prokhorov counterpart of [`path_measure_distance`].
pub fn path_measure_levy(mu: &PathMeasure, nu: &PathMeasure, grid: usize) -> Result<f64> {
    levy_prokhorov(mu, nu, &|a: &GeoPath, b: &GeoPath| a.sup_distance(b, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Space, PATH_GRID};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(a: &u32, b: &u32) -> f64 {
        (*a as f64 - *b as f64).abs()
    }

    fn pm(raw: &[(u32, f64)]) -> ProbMeasure<u32> {
        ProbMeasure::normalize(raw.to_vec()).unwrap()
    }

    fn random_measure(rng: &mut ChaCha8Rng, labels: u32, max_atoms: usize) -> ProbMeasure<u32> {
        let k = rng.random_range(1..=max_atoms);
        let raw: Vec<(u32, f64)> = (0..k)
            .map(|_| (rng.random_range(0..labels), rng.random_range(0.05..1.0)))
            .collect();
        let total: f64 = raw.iter().map(|r| r.1).sum();
        ProbMeasure::normalize(raw.into_iter().map(|(a, w)| (a, w / total)).collect()).unwrap()
    }

    #[test]
    fn two_atoms_on_the_line() {
        let (mu, nu) = (pm(&[(0, 0.3), (1, 0.7)]), pm(&[(0, 0.6), (1, 0.4)]));
        // brute force over the couplings of a 2x2 instance: the free parameter
        // is the mass moved 0 → 0, the rest is forced by the marginals
        let brute = (0..=30_000)
            .map(|k| k as f64 / 100_000.0)
            .map(|x00| {
                let (x01, x10) = (0.3 - x00, 0.6 - x00);
                let x11 = 0.7 - x10;
                if x01 < -1e-15 || x10 < -1e-15 || x11 < -1e-15 {
                    f64::INFINITY
                } else {
                    x01 + x10
                }
            })
            .fold(f64::INFINITY, f64::min);
        let w = wasserstein1(&mu, &nu, &line).unwrap();
        assert!((brute - 0.3).abs() < 1e-12);
        assert!((w - brute).abs() < 1e-12);
        assert!((w1_oracle(&mu, &nu, &line).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn diracs_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mu = random_measure(&mut rng, 9, 5);
            assert_eq!(wasserstein1(&mu, &mu, &line).unwrap(), 0.0);
            assert_eq!(levy_prokhorov(&mu, &mu, &line).unwrap(), 0.0);
        }
        let (x, y) = (ProbMeasure::dirac(2u32), ProbMeasure::dirac(7u32));
        assert_eq!(wasserstein1(&x, &y, &line).unwrap(), 5.0);
        assert_eq!(w1_oracle(&x, &y, &line).unwrap(), 5.0);
        assert_eq!(levy_prokhorov(&x, &y, &line).unwrap(), 1.0);
        let scaled = |a: &u32, b: &u32| line(a, b) / 10.0;
        assert!((levy_prokhorov(&x, &y, &scaled).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn plan_is_a_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let (mu, nu) = (
                random_measure(&mut rng, 40, 30),
                random_measure(&mut rng, 40, 30),
            );
            let plan = optimal_plan(&mu, &nu, &line).unwrap();
            assert!(plan.marginal_error(&weights(&mu), &weights(&nu)) < 1e-9);
            assert!(plan.flows.iter().all(|f| f.mass > 0.0));
            let cost: f64 = plan
                .flows
                .iter()
                .map(|f| f.mass * line(&mu.atoms()[f.source].0, &nu.atoms()[f.target].0))
                .sum();
            assert!((cost - plan.cost).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_closed_form() {
        // on the line W₁ is the L¹ distance between the CDFs
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (mu, nu) = (
                random_measure(&mut rng, 20, 12),
                random_measure(&mut rng, 20, 12),
            );
            let (mut fm, mut fn_, mut cdf_gap) = (0.0, 0.0, 0.0);
            for x in 0..20u32 {
                fm += mu.weight_of(&x);
                fn_ += nu.weight_of(&x);
                cdf_gap += (fm - fn_).abs();
            }
            assert!((wasserstein1(&mu, &nu, &line).unwrap() - cdf_gap).abs() < 1e-9);
        }
    }

    #[test]
    fn support_limits() {
        let big = ProbMeasure::uniform((0..65u32).collect()).unwrap();
        let small = ProbMeasure::dirac(0u32);
        assert!(matches!(
            wasserstein1(&big, &small, &line),
            Err(Error::SupportTooLarge {
                size: 65,
                limit: 64
            })
        ));
        let four = ProbMeasure::uniform((0..4u32).collect()).unwrap();
        assert!(matches!(
            w1_oracle(&four, &small, &line),
            Err(Error::SupportTooLarge { .. })
        ));
    }

    #[test]
    fn levy_prokhorov_contamination() {
        // μ vs (1 − ε)μ + ε δ(z) with z far away: the oracle over subsets A of
        // the support checks μ(A) ≤ ν(A^δ) + δ and ν(A) ≤ μ(A^δ) + δ
        let far = |a: &u32, b: &u32| {
            if a == b {
                0.0
            } else if *a == 9 || *b == 9 {
                2.0
            } else {
                0.5
            }
        };
        for eps in [0.05, 0.1, 0.3] {
            let mu = pm(&[(0, 0.5), (1, 0.5)]);
            let nu = pm(&[(0, 0.5 * (1.0 - eps)), (1, 0.5 * (1.0 - eps)), (9, eps)]);
            let lp = levy_prokhorov(&mu, &nu, &far).unwrap();
            assert!((lp - eps).abs() < 1e-12);
            assert!(subset_condition(&mu, &nu, &far, lp + 1e-12));
            assert!(!subset_condition(&mu, &nu, &far, lp - 1e-7));
        }
    }

    fn subset_condition(
        mu: &ProbMeasure<u32>,
        nu: &ProbMeasure<u32>,
        g: &impl Fn(&u32, &u32) -> f64,
        delta: f64,
    ) -> bool {
        let atoms: Vec<u32> = mu.support().chain(nu.support()).copied().collect();
        let check = |p: &ProbMeasure<u32>, q: &ProbMeasure<u32>| {
            (0u32..1 << atoms.len()).all(|mask| {
                let set: Vec<u32> = (0..atoms.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| atoms[b])
                    .collect();
                let p_set: f64 = p
                    .iter()
                    .filter(|(a, _)| set.contains(a))
                    .map(|(_, w)| w)
                    .sum();
                let q_blow: f64 = q
                    .iter()
                    .filter(|(b, _)| set.iter().any(|a| g(a, b) <= delta))
                    .map(|(_, w)| w)
                    .sum();
                p_set <= q_blow + delta + 1e-12
            })
        };
        check(mu, nu) && check(nu, mu)
    }

    #[test]
    fn levy_prokhorov_matches_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let scaled = |a: &u32, b: &u32| line(a, b) / 6.0;
        for _ in 0..200 {
            let (mu, nu) = (
                random_measure(&mut rng, 6, 3),
                random_measure(&mut rng, 6, 3),
            );
            let lp = levy_prokhorov(&mu, &nu, &scaled).unwrap();
            assert!(subset_condition(&mu, &nu, &scaled, lp + 1e-12));
            if lp > 1e-6 {
                assert!(!subset_condition(&mu, &nu, &scaled, lp - 1e-7));
            }
            let w = wasserstein1(&mu, &nu, &scaled).unwrap();
            assert!(lp <= w.sqrt() + 1e-9);
        }
    }

    #[test]
    fn path_measure_examples() {
        let s2 = Space::Sphere { dim: 2 };
        let x = Point::Vector(vec![1.0, 0.0, 0.0]);
        let y = Point::Vector(vec![0.0, 0.6, 0.8]);
        let gx = s2.constant_path(&x).unwrap();
        let gy = s2.constant_path(&y).unwrap();
        let d = path_measure_distance(
            &ProbMeasure::dirac(gx.clone()),
            &ProbMeasure::dirac(gy),
            PATH_GRID,
        )
        .unwrap();
        assert!((d - s2.distance(&x, &y)).abs() < 1e-12);
        let arc = s2.geodesics(&x, &y).unwrap().swap_remove(0).0;
        let same = arc.concat(&s2.constant_path(&y).unwrap()).unwrap();
        let mu = ProbMeasure::dirac(arc.clone());
        assert_eq!(path_measure_distance(&mu, &mu, PATH_GRID).unwrap(), 0.0);
        assert!(path_measure_distance(&mu, &ProbMeasure::dirac(same), PATH_GRID).unwrap() < 1e-12);
        assert!(path_measure_levy(&mu, &ProbMeasure::dirac(gx), PATH_GRID).unwrap() > 0.0);
    }
}
