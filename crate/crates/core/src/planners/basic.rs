use std::f64::consts::{PI, TAU};

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;

use super::{pou_section, single_arc, AnalogPlanner, PouRule};
use crate::error::{Error, Result};
use crate::geometry::vector::{self as vec, dot};
use crate::geometry::{
    canonical_line, ArcPath, ArcSegment, ArcSurface, GeoPath, PathMeasure, Point, Space,
};
use crate::measure::ProbMeasure;

/// Index of the axis `e` used by the even-dimensional sphere planner (the last coordinate).
pub(crate) fn even_axis(dim: usize) -> usize {
    dim
}

fn sphere_arc(seg: ArcSegment) -> GeoPath {
    GeoPath::Arc(ArcPath::single(ArcSurface::Sphere, seg))
}

fn projective_arc(seg: ArcSegment) -> GeoPath {
    GeoPath::Arc(ArcPath::single(ArcSurface::Projective, seg))
}

fn vector(p: &Point) -> &[f64] {
    p.as_vector()
        .expect("sphere planners receive vector points")
}

fn angle(p: &Point) -> f64 {
    p.as_angle().expect("circle planners receive angles")
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Skew-linear tangent field swapping consecutive coordinate pairs, skipping
/// coordinate `skip` if given: `(x₁, x₂, …) ↦ (−x₂, x₁, …)`.
///
/// `⟨v(x), x⟩ = 0` and `v(−x) = −v(x)`; `v` vanishes only on the skipped axis.
pub fn swap_field(x: &[f64], skip: Option<usize>) -> Vec<f64> {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| Some(i) != skip).collect();
    let mut out = vec![0.0; x.len()];
    for pair in idx.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        out[a] = -x[b];
        out[b] = x[a];
    }
    out
}

/// Half great circle from `x` to `−x` leaving along `tangent`, then the shortest arc to `y`.
fn half_turn_then_arc(x: &[f64], tangent: &[f64], y: &[f64]) -> Result<GeoPath> {
    let first = sphere_arc(ArcSegment::half_turn(x, tangent));
    let second = sphere_arc(ArcSegment::arc_or_half_turn(&vec::neg(x), y));
    first.concat(&second)
}

/// `½((1+θ)γ₁ + (1−θ)γ₂)` with `γ₁` the shorter and `γ₂` the longer projected arc.
pub fn rp_tc_measure(l1: &[f64], l2: &[f64]) -> Result<PathMeasure> {
    let u = l1;
    let v = if dot(u, l2) < 0.0 {
        vec::neg(l2)
    } else {
        l2.to_vec()
    };
    let theta = dot(u, &v).clamp(0.0, 1.0);
    let short = projective_arc(ArcSegment::arc_or_half_turn(u, &v));
    let long = projective_arc(ArcSegment::arc_or_half_turn(u, &vec::neg(&v)));
    ProbMeasure::normalize(vec![
        (short, (1.0 + theta) / 2.0),
        (long, (1.0 - theta) / 2.0),
    ])
}

/// The two-arc planner on `ℝPᵈ`.
pub fn rp_tc(dim: usize) -> Result<AnalogPlanner> {
    check_dim(dim)?;
    let planner = AnalogPlanner::new("rp_tc", Space::RealProjective { dim }, 2, 2, None, |x| {
        rp_tc_measure(vector(&x[0]), vector(&x[1]))
    })?;
    Ok(planner.with_critical(move |rng| rp_critical(dim, rng)))
}

/// Negative control: the first shortest geodesic with weight 1.
pub fn naive_rp(dim: usize) -> Result<AnalogPlanner> {
    check_dim(dim)?;
    let space = Space::RealProjective { dim };
    let inner = space.clone();
    let planner = AnalogPlanner::new("rp_tc_naive", space, 2, 1, None, move |x| {
        let mut geos = inner.geodesics(&x[0], &x[1])?;
        Ok(single_arc(geos.swap_remove(0).0))
    })?;
    Ok(planner.with_critical(move |rng| rp_critical(dim, rng)))
}

/// Counter-clockwise arc with weight `1 − δ/2π`, clockwise with `δ/2π`.
pub fn circle_tc_measure(a: f64, b: f64) -> Result<PathMeasure> {
    let gap = (b - a).rem_euclid(TAU);
    let gap = if gap >= TAU { 0.0 } else { gap };
    let ccw = GeoPath::Arc(ArcPath::single(
        ArcSurface::Circle,
        ArcSegment::circle_sweep(a, gap),
    ));
    let cw = GeoPath::Arc(ArcPath::single(
        ArcSurface::Circle,
        ArcSegment::circle_sweep(a, gap - TAU),
    ));
    ProbMeasure::normalize(vec![(ccw, 1.0 - gap / TAU), (cw, gap / TAU)])
}

pub fn circle_tc() -> AnalogPlanner {
    AnalogPlanner::new("circle_tc", Space::Circle, 2, 2, None, |x| {
        circle_tc_measure(angle(&x[0]), angle(&x[1]))
    })
    .expect("valid planner")
    .with_critical(circle_critical)
}

/// Based planner on `Sᵈ` at `x₀ = e₁` through the stored waypoint `w₀ = e₂`.
pub fn acat_sphere(dim: usize) -> Result<AnalogPlanner> {
    check_dim(dim)?;
    let x0 = vec::basis(dim + 1, 0);
    let w0 = vec::basis(dim + 1, 1);
    let (xa, xb) = (x0.clone(), x0.clone());
    let rules: Vec<PouRule<[f64], GeoPath>> = vec![
        PouRule::new(
            |y: &[f64]| y[0] > -1.0,
            move |y: &[f64]| Ok(sphere_arc(ArcSegment::arc_or_half_turn(&xa, y))),
            |y: &[f64]| (1.0 + y[0].clamp(-1.0, 1.0)) / 2.0,
        ),
        PouRule::new(
            |y: &[f64]| y[0] < 1.0,
            move |y: &[f64]| half_turn_then_arc(&xb, &w0, y),
            |y: &[f64]| (1.0 - y[0].clamp(-1.0, 1.0)) / 2.0,
        ),
    ];
    let space = Space::Sphere { dim };
    let planner = AnalogPlanner::new(
        "sphere_acat",
        space,
        1,
        2,
        Some(Point::Vector(x0.clone())),
        move |x| pou_section(&rules, vector(&x[0])),
    )?;
    Ok(planner.with_critical(move |rng| {
        let choice = rng.random_range(0..3);
        let y = match choice {
            0 => x0.clone(),
            1 => vec::neg(&x0),
            _ => with_inner(rng, &x0, 0.0),
        };
        vec![Point::Vector(y)]
    }))
}

/// Rules of the two-set planner on odd spheres, fed with `x ++ y`.
fn odd_rules(dim: usize) -> Vec<PouRule<[f64], GeoPath>> {
    let n = dim + 1;
    vec![
        PouRule::new(
            move |xy: &[f64]| dot(&xy[..n], &xy[n..]) > -1.0,
            move |xy: &[f64]| Ok(sphere_arc(ArcSegment::arc_or_half_turn(&xy[..n], &xy[n..]))),
            move |xy: &[f64]| (1.0 + dot(&xy[..n], &xy[n..]).clamp(-1.0, 1.0)) / 2.0,
        ),
        PouRule::new(
            move |xy: &[f64]| dot(&xy[..n], &xy[n..]) < 1.0,
            move |xy: &[f64]| half_turn_then_arc(&xy[..n], &swap_field(&xy[..n], None), &xy[n..]),
            move |xy: &[f64]| (1.0 - dot(&xy[..n], &xy[n..]).clamp(-1.0, 1.0)) / 2.0,
        ),
    ]
}

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Bumps `(φ_A, φ_B, φ_C)` of the even-sphere planner; they sum to 1.
fn even_bumps(s: f64, c: f64) -> (f64, f64, f64) {
    let a = clamp01((s + 0.5) * 4.0);
    let beta = clamp01((0.75 - c) * 4.0);
    (a, (1.0 - a) * beta, (1.0 - a) * (1.0 - beta))
}

/// Rules of the three-set planner on even spheres, fed with `x ++ y`.
///
/// (A) shortest arc on `⟨x,y⟩ > −½`; (B) half circle along the field
/// vanishing only at `±e` (the last axis), on `⟨x,y⟩ < −¼, |⟨x,e⟩| < ¾`;
/// (C) half circle along the field vanishing only at `±w₀ = ±e₁`, on
/// `⟨x,y⟩ < −¼, |⟨x,e⟩| > ½`. Both half circles continue by the shortest arc
/// from `−x` to `y`, which is never antipodal on these domains.
fn even_rules(dim: usize) -> Vec<PouRule<[f64], GeoPath>> {
    let n = dim + 1;
    let e = even_axis(dim);
    let inner = move |xy: &[f64]| dot(&xy[..n], &xy[n..]).clamp(-1.0, 1.0);
    let height = move |xy: &[f64]| xy[e].abs();
    vec![
        PouRule::new(
            move |xy: &[f64]| inner(xy) > -0.5,
            move |xy: &[f64]| Ok(sphere_arc(ArcSegment::arc_or_half_turn(&xy[..n], &xy[n..]))),
            move |xy: &[f64]| even_bumps(inner(xy), height(xy)).0,
        ),
        PouRule::new(
            move |xy: &[f64]| inner(xy) < -0.25 && height(xy) < 0.75,
            move |xy: &[f64]| {
                half_turn_then_arc(&xy[..n], &swap_field(&xy[..n], Some(e)), &xy[n..])
            },
            move |xy: &[f64]| even_bumps(inner(xy), height(xy)).1,
        ),
        PouRule::new(
            move |xy: &[f64]| inner(xy) < -0.25 && height(xy) > 0.5,
            move |xy: &[f64]| {
                half_turn_then_arc(&xy[..n], &swap_field(&xy[..n], Some(0)), &xy[n..])
            },
            move |xy: &[f64]| even_bumps(inner(xy), height(xy)).2,
        ),
    ]
}

/// Two-point planner on `Sᵈ`: two rules for odd `d`, three for even `d`.
///
/// Satisfies `s(−x, −y) = −s(x, y)`, which the equivariant transfer relies on.
pub fn sphere_tc(dim: usize) -> Result<AnalogPlanner> {
    check_dim(dim)?;
    let (rules, bound) = if dim % 2 == 1 {
        (odd_rules(dim), 2)
    } else {
        (even_rules(dim), 3)
    };
    let planner = AnalogPlanner::new(
        "sphere_tc",
        Space::Sphere { dim },
        2,
        bound,
        None,
        move |x| {
            let xy: Vec<f64> = vector(&x[0]).iter().chain(vector(&x[1])).copied().collect();
            pou_section(&rules, &xy)
        },
    )?;
    Ok(planner.with_critical(move |rng| sphere_tc_critical(dim, rng)))
}

pub(crate) fn random_unit(dim: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(v) = vec::normalized(&raw) {
            return v;
        }
    }
}

/// A random unit vector `y` with `⟨x, y⟩ = s`.
pub(crate) fn with_inner(rng: &mut dyn RngCore, x: &[f64], s: f64) -> Vec<f64> {
    let w = loop {
        let raw = random_unit(x.len() - 1, rng);
        if let Some(w) = vec::normalized(&vec::reject(&raw, x)) {
            break w;
        }
    };
    vec::combine(x, s, &w, (1.0 - s * s).max(0.0).sqrt())
}

/// Pairs of lines that are orthogonal (the tie locus) or equal.
pub(crate) fn rp_critical(dim: usize, rng: &mut dyn RngCore) -> Vec<Point> {
    let u = random_unit(dim, rng);
    let s = if rng.random_bool(0.75) { 0.0 } else { 1.0 };
    let v = with_inner(rng, &u, s);
    vec![
        Point::Vector(canonical_line(&u)),
        Point::Vector(canonical_line(&v)),
    ]
}

fn circle_critical(rng: &mut dyn RngCore) -> Vec<Point> {
    let a = rng.random_range(0.0..TAU);
    let gap = if rng.random_bool(0.5) { 0.0 } else { PI };
    vec![Point::Angle(a), Point::Angle((a + gap).rem_euclid(TAU))]
}

/// Pairs on the switching loci of [`sphere_tc`].
pub(crate) fn sphere_tc_critical(dim: usize, rng: &mut dyn RngCore) -> Vec<Point> {
    let levels: &[f64] = if dim % 2 == 1 {
        &[-1.0, 0.0, 1.0]
    } else {
        &[-1.0, -0.5, -0.25, 0.0, 1.0]
    };
    let x = if dim.is_multiple_of(2) && rng.random_bool(0.5) {
        // put x on one of the height thresholds of the B/C split
        let c = [0.5, 0.75][rng.random_range(0..2)] * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        with_inner(rng, &vec::basis(dim + 1, even_axis(dim)), c)
    } else {
        random_unit(dim, rng)
    };
    let s = levels[rng.random_range(0..levels.len())];
    let y = with_inner(rng, &x, s);
    vec![Point::Vector(x), Point::Vector(y)]
}
