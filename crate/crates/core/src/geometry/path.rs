use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use super::space::{
    canonical_line, circle_distance, projective_distance, sphere_distance, wrap_angle, Point,
};
use super::vector as vec;
use crate::error::{Error, Result};
use crate::measure::{Atom, ProbMeasure, ATOM_TOL};

/// Default evaluation grid (number of subintervals of `[0, 1]`) for path distances.
pub const PATH_GRID: usize = 64;

/// Coarser grid used for deciding whether two atoms are the same path.
const IDENTITY_GRID: usize = 16;

/// Where the arcs of an [`ArcPath`] live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArcSurface {
    /// Unit sphere, points are the arc points.
    Sphere,
    /// Arcs on the sphere read as paths of lines.
    Projective,
    /// Arcs on the unit circle in ℝ², read as angles.
    Circle,
}

impl ArcSurface {
    fn distance(self, u: &[f64], v: &[f64]) -> f64 {
        match self {
            ArcSurface::Sphere | ArcSurface::Circle => sphere_distance(u, v),
            ArcSurface::Projective => projective_distance(u, v),
        }
    }

    fn point(self, v: Vec<f64>) -> Point {
        match self {
            ArcSurface::Sphere => Point::Vector(v),
            ArcSurface::Projective => Point::Vector(canonical_line(&v)),
            ArcSurface::Circle => Point::Angle(wrap_angle(v[1].atan2(v[0]))),
        }
    }
}

/// `s ↦ cos(sα)·start + sin(sα)·tangent` on the parameter span `[t0, t1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSegment {
    pub start: Vec<f64>,
    pub tangent: Vec<f64>,
    pub angle: f64,
    pub t0: f64,
    pub t1: f64,
}

impl ArcSegment {
    pub fn new(start: Vec<f64>, tangent: Vec<f64>, angle: f64) -> Self {
        Self {
            start,
            tangent,
            angle,
            t0: 0.0,
            t1: 1.0,
        }
    }

    pub fn constant(at: Vec<f64>) -> Self {
        let tangent = vec![0.0; at.len()];
        Self::new(at, tangent, 0.0)
    }

    /// Shortest great arc `u → v`; `None` when `v = −u`.
    pub fn great_arc(u: &[f64], v: &[f64]) -> Option<Self> {
        let perp = vec::reject(v, u);
        let n = vec::norm(&perp);
        if n < 1e-12 {
            return (vec::dot(u, v) > 0.0).then(|| Self::constant(u.to_vec()));
        }
        Some(Self::new(
            u.to_vec(),
            vec::scale(&perp, 1.0 / n),
            n.atan2(vec::dot(u, v)),
        ))
    }

    /// Great arc `u → v`, with the deterministic half circle when `v = −u`.
    pub fn arc_or_half_turn(u: &[f64], v: &[f64]) -> Self {
        Self::great_arc(u, v)
            .unwrap_or_else(|| Self::new(u.to_vec(), Self::antipodal_tangent(u), PI))
    }

    /// Half circle from `u` to `−u` leaving in direction `tangent`.
    pub fn half_turn(u: &[f64], tangent: &[f64]) -> Self {
        let t =
            vec::normalized(&vec::reject(tangent, u)).unwrap_or_else(|| Self::antipodal_tangent(u));
        Self::new(u.to_vec(), t, PI)
    }

    /// Unit tangent at `u` towards the first standard basis vector not parallel to `u`.
    pub fn antipodal_tangent(u: &[f64]) -> Vec<f64> {
        (0..u.len())
            .find(|&i| u[i].abs() < 1.0 - 1e-9)
            .and_then(|i| vec::normalized(&vec::reject(&vec::basis(u.len(), i), u)))
            .expect("unit vector in dimension ≥ 2")
    }

    /// Arc of signed sweep on the unit circle starting at angle `a`.
    pub fn circle_sweep(a: f64, sweep: f64) -> Self {
        let sign = if sweep < 0.0 { -1.0 } else { 1.0 };
        Self::new(
            vec![a.cos(), a.sin()],
            vec![-sign * a.sin(), sign * a.cos()],
            sweep.abs(),
        )
    }

    pub fn point_at(&self, s: f64) -> Vec<f64> {
        if self.angle == 0.0 {
            return self.start.clone();
        }
        let phase = s * self.angle;
        vec::combine(&self.start, phase.cos(), &self.tangent, phase.sin())
    }

    pub fn end(&self) -> Vec<f64> {
        self.point_at(1.0)
    }

    fn span(&self) -> f64 {
        self.t1 - self.t0
    }

    fn negated(&self) -> Self {
        Self {
            start: vec::neg(&self.start),
            tangent: vec::neg(&self.tangent),
            ..self.clone()
        }
    }
}

/// A piecewise great-arc path with contiguous segments whose spans partition `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcPath {
    pub surface: ArcSurface,
    pub segments: Vec<ArcSegment>,
}

impl ArcPath {
    pub fn single(surface: ArcSurface, segment: ArcSegment) -> Self {
        Self {
            surface,
            segments: vec![segment],
        }
    }

    fn eval_vec(&self, t: f64) -> Vec<f64> {
        let seg = self
            .segments
            .iter()
            .find(|s| t <= s.t1 && s.span() > 0.0)
            .or_else(|| self.segments.iter().rev().find(|s| s.span() > 0.0))
            .unwrap_or(&self.segments[0]);
        let s = if seg.span() > 0.0 {
            ((t - seg.t0) / seg.span()).clamp(0.0, 1.0)
        } else {
            0.0
        };
        seg.point_at(s)
    }

    fn start_vec(&self) -> Vec<f64> {
        self.eval_vec(0.0)
    }

    fn end_vec(&self) -> Vec<f64> {
        self.eval_vec(1.0)
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.angle).sum()
    }

    fn reparametrized(&self, a: f64, b: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| ArcSegment {
                t0: a + s.t0 * (b - a),
                t1: a + s.t1 * (b - a),
                ..s.clone()
            })
            .collect();
        Self {
            surface: self.surface,
            segments,
        }
    }

    fn negated(&self) -> Self {
        Self {
            surface: self.surface,
            segments: self.segments.iter().map(ArcSegment::negated).collect(),
        }
    }
}

/// An exactly evaluable path on `[0, 1]`: a great-arc chain, or a tuple of
/// paths traversed simultaneously in a product space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GeoPath {
    Arc(ArcPath),
    Product(Vec<GeoPath>),
}

impl GeoPath {
    pub fn eval(&self, t: f64) -> Result<Point> {
        if !(-1e-12..=1.0 + 1e-12).contains(&t) || t.is_nan() {
            return Err(Error::OutOfDomain(t));
        }
        Ok(self.eval_unchecked(t.clamp(0.0, 1.0)))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> Point {
        match self {
            GeoPath::Arc(arc) => arc.surface.point(arc.eval_vec(t)),
            GeoPath::Product(parts) => {
                Point::Tuple(parts.iter().map(|p| p.eval_unchecked(t)).collect())
            }
        }
    }

    pub fn start(&self) -> Point {
        self.eval_unchecked(0.0)
    }

    pub fn end(&self) -> Point {
        self.eval_unchecked(1.0)
    }

    /// Arc length; for products the length in the product metric.
    pub fn length(&self) -> f64 {
        match self {
            GeoPath::Arc(arc) => arc.length(),
            GeoPath::Product(parts) => parts.iter().map(|p| p.length().powi(2)).sum::<f64>().sqrt(),
        }
    }

    /// Distance between two points of the space this path lives in.
    pub fn point_distance(&self, p: &Point, q: &Point) -> f64 {
        match (self, p, q) {
            (GeoPath::Arc(arc), Point::Vector(u), Point::Vector(v)) => arc.surface.distance(u, v),
            (GeoPath::Arc(_), Point::Angle(a), Point::Angle(b)) => circle_distance(*a, *b),
            (GeoPath::Product(parts), Point::Tuple(a), Point::Tuple(b))
                if parts.len() == a.len() =>
            {
                parts
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(g, (x, y))| g.point_distance(x, y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
            _ => f64::INFINITY,
        }
    }

    fn compatible(&self, other: &GeoPath) -> bool {
        match (self, other) {
            (GeoPath::Arc(a), GeoPath::Arc(b)) => a.surface == b.surface,
            (GeoPath::Product(a), GeoPath::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.compatible(y))
            }
            _ => false,
        }
    }

    /// Points at `t = i/grid` for `i = 0..=grid`.
    pub fn sample(&self, grid: usize) -> Vec<Point> {
        (0..=grid)
            .map(|i| self.eval_unchecked(i as f64 / grid as f64))
            .collect()
    }

    /// Uniform distance `maxᵢ d(γ(tᵢ), δ(tᵢ))` on the evaluation grid.
    pub fn sup_distance(&self, other: &GeoPath, grid: usize) -> f64 {
        if !self.compatible(other) {
            return f64::INFINITY;
        }
        (0..=grid)
            .map(|i| {
                let t = i as f64 / grid as f64;
                self.point_distance(&self.eval_unchecked(t), &other.eval_unchecked(t))
            })
            .fold(0.0, f64::max)
    }

    /// Joins two paths with the junction at parameter `split`.
    fn join_at(&self, other: &GeoPath, split: f64) -> Result<GeoPath> {
        match (self, other) {
            (GeoPath::Arc(a), GeoPath::Arc(b)) if a.surface == b.surface => {
                let mut second = b.clone();
                if a.surface == ArcSurface::Projective {
                    // pick the sphere lift of the second path that continues the first
                    let end = a.end_vec();
                    if vec::dist(&end, &vec::neg(&b.start_vec())) < vec::dist(&end, &b.start_vec())
                    {
                        second = b.negated();
                    }
                }
                let mut segments = a.reparametrized(0.0, split).segments;
                segments.extend(second.reparametrized(split, 1.0).segments);
                Ok(GeoPath::Arc(ArcPath {
                    surface: a.surface,
                    segments,
                }))
            }
            (GeoPath::Product(a), GeoPath::Product(b)) if a.len() == b.len() => {
                Ok(GeoPath::Product(
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| x.join_at(y, split))
                        .collect::<Result<_>>()?,
                ))
            }
            _ => Err(Error::EndpointMismatch { gap: f64::INFINITY }),
        }
    }

    fn check_junction(&self, other: &GeoPath) -> Result<()> {
        let gap = self.point_distance(&self.end(), &other.start());
        if gap > 1e-9 || gap.is_nan() {
            return Err(Error::EndpointMismatch { gap });
        }
        Ok(())
    }

    /// Concatenation with parameter spans proportional to arclength.
    pub fn concat(&self, other: &GeoPath) -> Result<GeoPath> {
        self.check_junction(other)?;
        let (l1, l2) = (self.length(), other.length());
        if l1 + l2 <= 1e-15 {
            return Ok(self.clone());
        }
        self.join_at(other, l1 / (l1 + l2))
    }

    /// Concatenates legs so that leg `i` occupies `[i/n, (i+1)/n]`.
    pub fn chain_uniform(legs: &[GeoPath]) -> Result<GeoPath> {
        let (first, rest) = legs
            .split_first()
            .ok_or(Error::EndpointMismatch { gap: f64::NAN })?;
        let n = legs.len() as f64;
        let mut acc = first.clone();
        for (i, leg) in rest.iter().enumerate() {
            acc.check_junction(leg)?;
            // acc covers [0, 1] for legs 0..=i; squeeze it into [0, (i+1)/(i+2)]
            let done = (i + 1) as f64;
            acc = acc.join_at(leg, done / (done + 1.0))?;
        }
        debug_assert!(n >= 1.0);
        Ok(acc)
    }

    /// CSV rows `t,coordinates…` on the evaluation grid.
    pub fn trace_csv(&self, grid: usize) -> String {
        let mut out = String::new();
        for i in 0..=grid {
            let t = i as f64 / grid as f64;
            let coords: Vec<String> = self
                .eval_unchecked(t)
                .coordinates()
                .iter()
                .map(|c| c.to_string())
                .collect();
            let _ = writeln!(out, "{t},{}", coords.join(","));
        }
        out
    }
}

impl Atom for GeoPath {
    fn same_atom(&self, other: &Self) -> bool {
        self.sup_distance(other, IDENTITY_GRID) <= ATOM_TOL
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        [0.5, 0.25, 0.75]
            .iter()
            .map(|&t| {
                self.eval_unchecked(t)
                    .canonical_cmp(&other.eval_unchecked(t))
            })
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

/// A probability measure on paths.
pub type PathMeasure = ProbMeasure<GeoPath>;
