use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AnalogPlanner, CriticalFn};
use crate::error::{Error, Result};
use crate::geometry::vector as vec;
use crate::geometry::{
    ArcSegment, CoveringMap, GeoPath, PathMeasure, Point, Space, PATH_GRID, POINT_TOL,
};
use crate::measure::ProbMeasure;
use crate::transport::path_measure_distance;

/// Deviation allowed by the equivariance certificate.
pub const EQUIVARIANCE_TOL: f64 = 1e-7;

fn require_total(cover: &CoveringMap, s: &AnalogPlanner) -> Result<()> {
    if s.space() != &cover.total() {
        return Err(Error::InvalidParameter(format!(
            "planner lives on {}, cover total space is {}",
            s.space(),
            cover.total()
        )));
    }
    Ok(())
}

fn projected(cover: &CoveringMap, m: &PathMeasure) -> PathMeasure {
    m.pushforward(|g| cover.project_path(g))
}

fn projected_critical(cover: &CoveringMap, s: &AnalogPlanner) -> Option<Arc<CriticalFn>> {
    let inner = s.critical_arc()?;
    let cover = cover.clone();
    Some(Arc::new(move |rng: &mut dyn rand::RngCore| {
        inner(rng).iter().map(|e| cover.project(e)).collect()
    }))
}

/// Transfer of a based planner along a degree-k cover:
/// `t(x) = κ((1/k) Σ_{x̃ ∈ p⁻¹(x)} δ(p∘s(x̃)))`, support bound `k(n+1)`.
///
/// The new basepoint is `p(e₀)`; passing a different `basepoint` is an error.
pub fn acat_cover_transfer(
    cover: &CoveringMap,
    s: &AnalogPlanner,
    basepoint: Option<&Point>,
) -> Result<AnalogPlanner> {
    require_total(cover, s)?;
    let e0 = match (s.arity(), s.basepoint()) {
        (1, Some(e0)) => e0.clone(),
        _ => {
            return Err(Error::InvalidParameter(
                "the transfer needs a based planner".into(),
            ))
        }
    };
    let base = cover.base();
    let x0 = cover.project(&e0);
    if let Some(want) = basepoint {
        let gap = base.distance(&x0, want);
        if gap > POINT_TOL {
            return Err(Error::BasepointMismatch { gap });
        }
    }
    let (c, inner) = (cover.clone(), s.clone());
    let bound = cover.degree() * s.bound();
    let planner = AnalogPlanner::new(
        format!("{}_transfer", s.name()),
        base,
        1,
        bound,
        Some(x0),
        move |x| {
            let lifts = ProbMeasure::cover_pullback(&c, &ProbMeasure::dirac(x[0].clone()))?;
            lifts.bind(|e| Ok(projected(&c, &inner.plan(std::slice::from_ref(e))?)))
        },
    )?;
    Ok(planner.with_critical_arc(projected_critical(cover, s)))
}

/// `(1/k) Σ_g p∘s(ũ₁, g·ũ₂)` for given lifts.
pub fn equivariant_sum(
    cover: &CoveringMap,
    s: &AnalogPlanner,
    lift1: &Point,
    lift2: &Point,
) -> Result<PathMeasure> {
    let terms = (0..cover.degree())
        .map(|g| {
            Ok(projected(
                cover,
                &s.plan(&[lift1.clone(), cover.deck(g, lift2)])?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbMeasure::flatten(&ProbMeasure::uniform(terms)?))
}

/// Checks `p∘s(g·ũ, g·ṽ) = p∘s(ũ, ṽ)` on `samples` seeded input pairs.
fn certify_equivariance(
    cover: &CoveringMap,
    s: &AnalogPlanner,
    samples: usize,
    seed: u64,
) -> Result<()> {
    for trial in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let x = if trial % 2 == 0 {
            s.sample_critical(&mut rng)
        } else {
            s.sample_inputs(&mut rng)
        };
        let reference = projected(cover, &s.plan(&x)?);
        for g in 1..cover.degree() {
            let moved: Vec<Point> = x.iter().map(|p| cover.deck(g, p)).collect();
            let other = projected(cover, &s.plan(&moved)?);
            let deviation = path_measure_distance(&reference, &other, PATH_GRID)?;
            if deviation > EQUIVARIANCE_TOL {
                return Err(Error::EquivarianceViolation {
                    element: g,
                    deviation,
                });
            }
        }
    }
    Ok(())
}

/// Transfer of a two-point planner along a regular cover, support bound `k(n+1)`.
///
/// Requires `s` to be diagonally equivariant up to projection; this is probed
/// on `probe_samples` inputs before the planner is built.
pub fn equivariant_tc_transfer(
    cover: &CoveringMap,
    s: &AnalogPlanner,
    probe_samples: usize,
    seed: u64,
) -> Result<AnalogPlanner> {
    require_total(cover, s)?;
    if s.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: s.arity(),
        });
    }
    certify_equivariance(cover, s, probe_samples, seed)?;
    let (c, inner) = (cover.clone(), s.clone());
    let bound = cover.degree() * s.bound();
    let planner = AnalogPlanner::new(
        format!("{}_equivariant", s.name()),
        cover.base(),
        2,
        bound,
        None,
        move |x| {
            let lift1 = c.fiber(&x[0])?.swap_remove(0);
            let lift2 = c.fiber(&x[1])?.swap_remove(0);
            equivariant_sum(&c, &inner, &lift1, &lift2)
        },
    )?;
    Ok(planner.with_critical_arc(projected_critical(cover, s)))
}

/// Coordinate-wise transfer: lift every input uniformly, plan, project.
/// Support bound `k^r (n+1)`.
pub fn generic_tc_transfer(cover: &CoveringMap, s: &AnalogPlanner) -> Result<AnalogPlanner> {
    require_total(cover, s)?;
    if s.arity() < 2 {
        return Err(Error::InvalidParameter(
            "the generic transfer is for arity ≥ 2".into(),
        ));
    }
    let (c, inner) = (cover.clone(), s.clone());
    let bound = cover.degree().pow(s.arity() as u32) * s.bound();
    let planner = AnalogPlanner::new(
        format!("{}_generic", s.name()),
        cover.base(),
        s.arity(),
        bound,
        None,
        move |x| {
            let mut tuples: ProbMeasure<Vec<Point>> = ProbMeasure::dirac(Vec::new());
            for xi in x {
                let lifts = ProbMeasure::cover_pullback(&c, &ProbMeasure::dirac(xi.clone()))?;
                tuples = tuples.boxtimes(&lifts).pushforward(|(head, e)| {
                    let mut next = head.clone();
                    next.push(e.clone());
                    next
                });
            }
            tuples.bind(|lifted| Ok(projected(&c, &inner.plan(lifted)?)))
        },
    )?;
    Ok(planner.with_critical_arc(projected_critical(cover, s)))
}

/// Planner on a product space pairing the factor paths; weights multiply.
pub fn product_planner(
    name: &str,
    space: Space,
    factors: &[AnalogPlanner],
) -> Result<AnalogPlanner> {
    let arity = factors.first().map_or(0, AnalogPlanner::arity);
    if let Some(bad) = factors.iter().find(|f| f.arity() != arity) {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: bad.arity(),
        });
    }
    let bound = factors.iter().map(AnalogPlanner::bound).product();
    let basepoint = (arity == 1).then(|| {
        Point::Tuple(
            factors
                .iter()
                .map(|f| f.basepoint().cloned().expect("based factor"))
                .collect(),
        )
    });
    let parts = factors.to_vec();
    let planner = AnalogPlanner::new(name, space, arity, bound, basepoint, move |x| {
        let mut acc: ProbMeasure<Vec<GeoPath>> = ProbMeasure::dirac(Vec::new());
        for (j, factor) in parts.iter().enumerate() {
            let inputs: Vec<Point> = x
                .iter()
                .map(|p| p.as_tuple().and_then(|t| t.get(j)).cloned())
                .collect::<Option<_>>()
                .ok_or(Error::ArityMismatch {
                    expected: parts.len(),
                    found: 0,
                })?;
            acc = acc
                .boxtimes(&factor.plan(&inputs)?)
                .pushforward(|(head, g)| {
                    let mut next = head.clone();
                    next.push(g.clone());
                    next
                });
        }
        Ok(acc.pushforward(|legs| GeoPath::Product(legs.clone())))
    })?;
    let samplers: Vec<Arc<CriticalFn>> = factors
        .iter()
        .filter_map(AnalogPlanner::critical_arc)
        .collect();
    if samplers.len() != factors.len() {
        return Ok(planner);
    }
    Ok(planner.with_critical(move |rng| {
        let per_factor: Vec<Vec<Point>> = samplers.iter().map(|f| f(rng)).collect();
        (0..arity)
            .map(|i| Point::Tuple(per_factor.iter().map(|f| f[i].clone()).collect()))
            .collect()
    }))
}

/// r-point planner from a two-point planner: leg `i` joins `xᵢ` to `xᵢ₊₁` on
/// `[i/(r−1), (i+1)/(r−1)]`. Support bound `(n+1)^(r−1)`.
pub fn sequential_planner(s: &AnalogPlanner, arity: usize) -> Result<AnalogPlanner> {
    if s.arity() != 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: s.arity(),
        });
    }
    if arity < 2 {
        return Err(Error::InvalidParameter(
            "sequential planners need arity ≥ 2".into(),
        ));
    }
    let inner = s.clone();
    let bound = s.bound().pow(arity as u32 - 1);
    let planner = AnalogPlanner::new(
        format!("{}{arity}", s.name()),
        s.space().clone(),
        arity,
        bound,
        None,
        move |x| {
            let mut legs: ProbMeasure<Vec<GeoPath>> = ProbMeasure::dirac(Vec::new());
            for pair in x.windows(2) {
                legs = legs.boxtimes(&inner.plan(pair)?).pushforward(|(head, g)| {
                    let mut next = head.clone();
                    next.push(g.clone());
                    next
                });
            }
            legs.try_pushforward(|chain| GeoPath::chain_uniform(chain))
        },
    )?;
    let Some(sampler) = s.critical_arc() else {
        return Ok(planner);
    };
    Ok(planner.with_critical(move |rng| {
        let mut points = sampler(rng);
        while points.len() < arity {
            let next = sampler(rng);
            points.push(next[1].clone());
        }
        points
    }))
}

/// The same planner with a different declared support bound.
pub fn misdeclared(s: &AnalogPlanner, bound: usize) -> Result<AnalogPlanner> {
    let inner = s.clone();
    let planner = AnalogPlanner::new(
        format!("{}_bound{bound}", s.name()),
        s.space().clone(),
        s.arity(),
        bound,
        s.basepoint().cloned(),
        move |x| inner.plan(x),
    )?;
    Ok(planner.with_critical_arc(s.critical_arc()))
}

/// A point at distance `offset` from `p`, in a fixed direction.
fn nudge(p: &Point, offset: f64) -> Point {
    match p {
        Point::Vector(u) => {
            let t = ArcSegment::antipodal_tangent(u);
            Point::Vector(vec::combine(u, offset.cos(), &t, offset.sin()))
        }
        Point::Angle(a) => Point::Angle(a + offset),
        Point::Tuple(parts) => {
            let mut parts = parts.clone();
            if let Some(first) = parts.first_mut() {
                *first = nudge(first, offset);
            }
            Point::Tuple(parts)
        }
        Point::Label(_) => p.clone(),
    }
}

/// Fault injection: every path overshoots its final point by `offset`.
pub fn shifted_endpoint(s: &AnalogPlanner, offset: f64) -> Result<AnalogPlanner> {
    let inner = s.clone();
    let space = s.space().clone();
    let planner = AnalogPlanner::new(
        format!("{}_shifted", s.name()),
        s.space().clone(),
        s.arity(),
        s.bound(),
        s.basepoint().cloned(),
        move |x| {
            inner.plan(x)?.try_pushforward(|g| {
                let end = g.end();
                let target = space.canonicalize(&nudge(&end, offset));
                let tail = space.geodesics(&end, &target)?.swap_remove(0).0;
                g.concat(&tail)
            })
        },
    )?;
    Ok(planner.with_critical_arc(s.critical_arc()))
}
