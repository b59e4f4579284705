use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::path::{ArcPath, ArcSegment, ArcSurface, GeoPath};
use super::vector::{self as vec, dist};
use crate::error::{Error, Result};
use crate::measure::{Atom, ATOM_TOL};

/// Tolerance for point validity and equality checks.
pub const POINT_TOL: f64 = 1e-9;

/// Point encodings.
///
/// Spheres and projective spaces use unit vectors in ℝᵈ⁺¹ (projective points in
/// canonical form: first coordinate larger than the tolerance in absolute value
/// is positive), the circle uses an angle in `[0, 2π)`, discrete spaces use
/// integer labels and products/tori use tuples.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Point {
    Vector(Vec<f64>),
    Angle(f64),
    Label(u32),
    Tuple(Vec<Point>),
}

impl Point {
    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_angle(&self) -> Option<f64> {
        match self {
            Point::Angle(a) => Some(*a),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Point]> {
        match self {
            Point::Tuple(parts) => Some(parts),
            _ => None,
        }
    }

    /// Flattened numeric coordinates, used for CSV output.
    pub fn coordinates(&self) -> Vec<f64> {
        match self {
            Point::Vector(v) => v.clone(),
            Point::Angle(a) => vec![*a],
            Point::Label(l) => vec![*l as f64],
            Point::Tuple(parts) => parts.iter().flat_map(Point::coordinates).collect(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Point::Vector(_) => 0,
            Point::Angle(_) => 1,
            Point::Label(_) => 2,
            Point::Tuple(_) => 3,
        }
    }
}

impl Atom for Point {
    fn same_atom(&self, other: &Self) -> bool {
        match (self, other) {
            (Point::Vector(a), Point::Vector(b)) => a.len() == b.len() && dist(a, b) <= ATOM_TOL,
            (Point::Angle(a), Point::Angle(b)) => circle_distance(*a, *b) <= ATOM_TOL,
            (Point::Label(a), Point::Label(b)) => a == b,
            (Point::Tuple(a), Point::Tuple(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_atom(y))
            }
            _ => false,
        }
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Vector(a), Point::Vector(b)) => cmp_floats(a, b),
            (Point::Angle(a), Point::Angle(b)) => a.total_cmp(b),
            (Point::Label(a), Point::Label(b)) => a.cmp(b),
            (Point::Tuple(a), Point::Tuple(b)) => a.canonical_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

pub(crate) fn cmp_floats(a: &[f64], b: &[f64]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    })
}

pub fn sphere_distance(u: &[f64], v: &[f64]) -> f64 {
    2.0 * (dist(u, v) / 2.0).min(1.0).asin()
}

/// `d([u],[v]) = arccos |⟨u,v⟩|`, computed through chords for accuracy.
pub fn projective_distance(u: &[f64], v: &[f64]) -> f64 {
    let chord = dist(u, v).min(vec::norm(&vec::add(u, v)));
    2.0 * (chord / 2.0).min(1.0).asin()
}

pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d)
}

/// Canonical representative of the line through `v`.
pub fn canonical_line(v: &[f64]) -> Vec<f64> {
    let flip = v
        .iter()
        .find(|c| c.abs() > POINT_TOL)
        .is_some_and(|c| *c < 0.0);
    if flip {
        vec::neg(v)
    } else {
        v.to_vec()
    }
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub(crate) fn angle_to_vector(a: f64) -> Vec<f64> {
    vec![a.cos(), a.sin()]
}

/// Geodesic metric spaces with exact models.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Space {
    Sphere { dim: usize },
    RealProjective { dim: usize },
    Circle,
    Torus { n: usize },
    Discrete { labels: u32 },
    Product(Vec<Space>),
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Sphere { dim } => write!(f, "S^{dim}"),
            Space::RealProjective { dim } => write!(f, "RP^{dim}"),
            Space::Circle => write!(f, "S^1"),
            Space::Torus { n } => write!(f, "T^{n}"),
            Space::Discrete { labels } => write!(f, "D({labels})"),
            Space::Product(parts) => {
                let names: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", names.join(" x "))
            }
        }
    }
}

impl Space {
    fn components(&self) -> Option<Vec<Space>> {
        match self {
            Space::Torus { n } => Some(vec![Space::Circle; *n]),
            Space::Product(parts) => Some(parts.clone()),
            _ => None,
        }
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::InvalidPoint {
            space: self.to_string(),
            reason: reason.into(),
        }
    }

    /// Checks that `p` is a valid encoding of a point of this space.
    pub fn validate(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (Space::Sphere { dim } | Space::RealProjective { dim }, Point::Vector(v)) => {
                if v.len() != dim + 1 {
                    return Err(self.invalid(format!(
                        "expected {} coordinates, got {}",
                        dim + 1,
                        v.len()
                    )));
                }
                if (vec::norm(v) - 1.0).abs() > POINT_TOL {
                    return Err(self.invalid("not a unit vector"));
                }
                Ok(())
            }
            (Space::Circle, Point::Angle(a)) if a.is_finite() => Ok(()),
            (Space::Discrete { labels }, Point::Label(l)) if l < labels => Ok(()),
            (_, Point::Tuple(parts)) => match self.components() {
                Some(spaces) if spaces.len() == parts.len() => spaces
                    .iter()
                    .zip(parts)
                    .try_for_each(|(s, q)| s.validate(q)),
                _ => Err(self.invalid("tuple arity does not match")),
            },
            _ => Err(self.invalid(format!("unexpected encoding {p:?}"))),
        }
    }

    /// Canonical encoding: unit vectors, sign-fixed lines, wrapped angles.
    pub fn canonicalize(&self, p: &Point) -> Point {
        match (self, p) {
            (Space::Sphere { .. }, Point::Vector(v)) => {
                Point::Vector(vec::normalized(v).unwrap_or_else(|| v.clone()))
            }
            (Space::RealProjective { .. }, Point::Vector(v)) => Point::Vector(canonical_line(
                &vec::normalized(v).unwrap_or_else(|| v.clone()),
            )),
            (Space::Circle, Point::Angle(a)) => Point::Angle(wrap_angle(*a)),
            (_, Point::Tuple(parts)) => match self.components() {
                Some(spaces) => Point::Tuple(
                    spaces
                        .iter()
                        .zip(parts)
                        .map(|(s, q)| s.canonicalize(q))
                        .collect(),
                ),
                None => p.clone(),
            },
            _ => p.clone(),
        }
    }

    /// Intrinsic distance; products carry the Euclidean product metric.
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        match (self, p, q) {
            (Space::Sphere { .. }, Point::Vector(u), Point::Vector(v)) => sphere_distance(u, v),
            (Space::RealProjective { .. }, Point::Vector(u), Point::Vector(v)) => {
                projective_distance(u, v)
            }
            (Space::Circle, Point::Angle(a), Point::Angle(b)) => circle_distance(*a, *b),
            (Space::Discrete { .. }, Point::Label(a), Point::Label(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (_, Point::Tuple(a), Point::Tuple(b)) => match self.components() {
                Some(spaces) => spaces
                    .iter()
                    .zip(a.iter().zip(b))
                    .map(|(s, (x, y))| s.distance(x, y).powi(2))
                    .sum::<f64>()
                    .sqrt(),
                None => f64::INFINITY,
            },
            _ => f64::INFINITY,
        }
    }

    /// Upper bound on the distance between two points.
    pub fn diameter(&self) -> f64 {
        match self {
            Space::Sphere { .. } | Space::Circle => PI,
            Space::RealProjective { .. } => PI / 2.0,
            Space::Torus { n } => PI * (*n as f64).sqrt(),
            Space::Discrete { labels } => {
                if *labels > 1 {
                    1.0
                } else {
                    0.0
                }
            }
            Space::Product(parts) => parts
                .iter()
                .map(|s| s.diameter().powi(2))
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// A point drawn from the uniform (Haar) distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            Space::Sphere { dim } | Space::RealProjective { dim } => {
                let v = loop {
                    let raw: Vec<f64> = (0..=*dim).map(|_| rng.sample(StandardNormal)).collect();
                    if let Some(v) = vec::normalized(&raw) {
                        break v;
                    }
                };
                self.canonicalize(&Point::Vector(v))
            }
            Space::Circle => Point::Angle(rng.random_range(0.0..TAU)),
            Space::Discrete { labels } => Point::Label(rng.random_range(0..*labels)),
            Space::Torus { .. } | Space::Product(_) => Point::Tuple(
                self.components()
                    .unwrap_or_default()
                    .iter()
                    .map(|s| s.sample(rng))
                    .collect(),
            ),
        }
    }

    /// Number of flattened tangent coordinates at a point.
    pub fn tangent_len(&self) -> usize {
        match self {
            Space::Sphere { dim } | Space::RealProjective { dim } => dim + 1,
            Space::Circle => 1,
            Space::Torus { n } => *n,
            Space::Discrete { .. } => 0,
            Space::Product(parts) => parts.iter().map(Space::tangent_len).sum(),
        }
    }

    /// A Gaussian tangent vector at `p` (flattened; ambient for spheres).
    pub fn random_tangent<R: Rng + ?Sized>(&self, p: &Point, rng: &mut R) -> Vec<f64> {
        match (self, p) {
            (Space::Sphere { .. } | Space::RealProjective { .. }, Point::Vector(u)) => {
                let raw: Vec<f64> = (0..u.len()).map(|_| rng.sample(StandardNormal)).collect();
                vec::reject(&raw, u)
            }
            (Space::Circle, _) => vec![rng.sample(StandardNormal)],
            (_, Point::Tuple(parts)) => self
                .components()
                .unwrap_or_default()
                .iter()
                .zip(parts)
                .flat_map(|(s, q)| s.random_tangent(q, rng))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Length of a flattened tangent vector in the product metric.
    pub fn tangent_norm(&self, v: &[f64]) -> f64 {
        vec::norm(v)
    }

    /// Exponential map along the flattened tangent `v`.
    pub fn exp(&self, p: &Point, v: &[f64]) -> Point {
        match (self, p) {
            (Space::Sphere { .. } | Space::RealProjective { .. }, Point::Vector(u)) => {
                let len = vec::norm(v);
                let moved = if len == 0.0 {
                    u.clone()
                } else {
                    vec::combine(u, len.cos(), v, len.sin() / len)
                };
                self.canonicalize(&Point::Vector(moved))
            }
            (Space::Circle, Point::Angle(a)) => Point::Angle(wrap_angle(a + v[0])),
            (_, Point::Tuple(parts)) => {
                let spaces = self.components().unwrap_or_default();
                let mut offset = 0;
                let moved = spaces
                    .iter()
                    .zip(parts)
                    .map(|(s, q)| {
                        let n = s.tangent_len();
                        let out = s.exp(q, &v[offset..offset + n]);
                        offset += n;
                        out
                    })
                    .collect();
                Point::Tuple(moved)
            }
            _ => p.clone(),
        }
    }

    /// The constant path at `x`.
    pub fn constant_path(&self, x: &Point) -> Result<GeoPath> {
        match (self, x) {
            (Space::Sphere { .. }, Point::Vector(u)) => Ok(GeoPath::Arc(ArcPath::single(
                ArcSurface::Sphere,
                ArcSegment::constant(u.clone()),
            ))),
            (Space::RealProjective { .. }, Point::Vector(u)) => Ok(GeoPath::Arc(ArcPath::single(
                ArcSurface::Projective,
                ArcSegment::constant(u.clone()),
            ))),
            (Space::Circle, Point::Angle(a)) => Ok(GeoPath::Arc(ArcPath::single(
                ArcSurface::Circle,
                ArcSegment::constant(angle_to_vector(*a)),
            ))),
            (_, Point::Tuple(parts)) => {
                let spaces = self
                    .components()
                    .ok_or_else(|| self.invalid("not a product"))?;
                Ok(GeoPath::Product(
                    spaces
                        .iter()
                        .zip(parts)
                        .map(|(s, q)| s.constant_path(q))
                        .collect::<Result<_>>()?,
                ))
            }
            (Space::Discrete { .. }, _) => Err(Error::NoGeodesic(self.to_string())),
            _ => Err(self.invalid(format!("unexpected encoding {x:?}"))),
        }
    }

    /// Canonical candidate geodesics from `x` to `y`, shortest first.
    pub fn geodesics(&self, x: &Point, y: &Point) -> Result<Vec<(GeoPath, f64)>> {
        let mut out = match (self, x, y) {
            (Space::Sphere { .. }, Point::Vector(u), Point::Vector(v)) => {
                match ArcSegment::great_arc(u, v) {
                    Some(seg) => vec![GeoPath::Arc(ArcPath::single(ArcSurface::Sphere, seg))],
                    None => {
                        let w = ArcSegment::antipodal_tangent(u);
                        [w.clone(), vec::neg(&w)]
                            .into_iter()
                            .map(|t| {
                                GeoPath::Arc(ArcPath::single(
                                    ArcSurface::Sphere,
                                    ArcSegment::new(u.clone(), t, PI),
                                ))
                            })
                            .collect()
                    }
                }
            }
            (Space::RealProjective { .. }, Point::Vector(u), Point::Vector(v)) => {
                let v = if vec::dot(u, v) < 0.0 {
                    vec::neg(v)
                } else {
                    v.clone()
                };
                vec![
                    GeoPath::Arc(ArcPath::single(
                        ArcSurface::Projective,
                        ArcSegment::arc_or_half_turn(u, &v),
                    )),
                    GeoPath::Arc(ArcPath::single(
                        ArcSurface::Projective,
                        ArcSegment::arc_or_half_turn(u, &vec::neg(&v)),
                    )),
                ]
            }
            (Space::Circle, Point::Angle(a), Point::Angle(b)) => {
                let gap = (b - a).rem_euclid(TAU);
                vec![
                    GeoPath::Arc(ArcPath::single(
                        ArcSurface::Circle,
                        ArcSegment::circle_sweep(*a, gap),
                    )),
                    GeoPath::Arc(ArcPath::single(
                        ArcSurface::Circle,
                        ArcSegment::circle_sweep(*a, gap - TAU),
                    )),
                ]
            }
            (Space::Discrete { .. }, _, _) => return Err(Error::NoGeodesic(self.to_string())),
            (_, Point::Tuple(xs), Point::Tuple(ys)) => {
                let spaces = self
                    .components()
                    .ok_or_else(|| self.invalid("not a product"))?;
                let legs = spaces
                    .iter()
                    .zip(xs.iter().zip(ys))
                    .map(|(s, (p, q))| Ok(s.geodesics(p, q)?.swap_remove(0).0))
                    .collect::<Result<Vec<_>>>()?;
                vec![GeoPath::Product(legs)]
            }
            _ => return Err(self.invalid("point encodings do not match the space")),
        };
        let mut with_len: Vec<(GeoPath, f64)> = out
            .drain(..)
            .map(|g| {
                let len = g.length();
                (g, len)
            })
            .collect();
        with_len.sort_by(|a, b| a.1.total_cmp(&b.1));
        Ok(with_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(dim: usize, i: usize) -> Point {
        Point::Vector(vec::basis(dim + 1, i))
    }

    #[test]
    fn sphere_same_point_has_constant_geodesic() {
        let s2 = Space::Sphere { dim: 2 };
        let geos = s2.geodesics(&e(2, 0), &e(2, 0)).unwrap();
        assert_eq!(geos.len(), 1);
        assert_eq!(geos[0].1, 0.0);
    }

    #[test]
    fn projective_orthogonal_lines_have_two_equal_geodesics() {
        for d in [1, 2, 5] {
            let rp = Space::RealProjective { dim: d };
            let geos = rp.geodesics(&e(d, 0), &e(d, 1)).unwrap();
            assert_eq!(geos.len(), 2);
            for (g, len) in &geos {
                assert!((len - PI / 2.0).abs() < 1e-12);
                assert!(rp.distance(&g.eval(1.0).unwrap(), &e(d, 1)) < 1e-12);
            }
        }
    }

    #[test]
    fn circle_geodesic_lengths() {
        let geos = Space::Circle
            .geodesics(&Point::Angle(0.5), &Point::Angle(0.5 + PI / 3.0))
            .unwrap();
        assert!((geos[0].1 - PI / 3.0).abs() < 1e-12);
        assert!((geos[1].1 - 5.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_antipodes_give_two_half_circles() {
        let s3 = Space::Sphere { dim: 3 };
        let x = e(3, 0);
        let y = Point::Vector(vec![-1.0, 0.0, 0.0, 0.0]);
        let geos = s3.geodesics(&x, &y).unwrap();
        assert_eq!(geos.len(), 2);
        for (g, len) in geos {
            assert!((len - PI).abs() < 1e-15);
            assert!(s3.distance(&g.eval(1.0).unwrap(), &y) < 1e-12);
            // chosen circle passes through e₂, the first basis vector not parallel to x
            assert!(
                s3.distance(&g.eval(0.5).unwrap(), &e(3, 1)) < 1e-12
                    || s3.distance(
                        &g.eval(0.5).unwrap(),
                        &Point::Vector(vec![0.0, -1.0, 0.0, 0.0])
                    ) < 1e-12
            );
        }
    }

    #[test]
    fn discrete_has_no_geodesics() {
        let d = Space::Discrete { labels: 3 };
        assert!(matches!(
            d.geodesics(&Point::Label(0), &Point::Label(1)),
            Err(Error::NoGeodesic(_))
        ));
    }

    #[test]
    fn canonical_lines_fix_sign() {
        let rp = Space::RealProjective { dim: 2 };
        let p = rp.canonicalize(&Point::Vector(vec![0.0, -0.6, 0.8]));
        assert_eq!(p, Point::Vector(vec![0.0, 0.6, -0.8]));
        assert!(rp.distance(&p, &Point::Vector(vec![0.0, -0.6, 0.8])) < 1e-15);
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spaces = [
            Space::Sphere { dim: 2 },
            Space::RealProjective { dim: 3 },
            Space::Circle,
            Space::Torus { n: 2 },
            Space::Discrete { labels: 4 },
            Space::Product(vec![
                Space::Sphere { dim: 1 },
                Space::RealProjective { dim: 2 },
            ]),
        ];
        for space in &spaces {
            for _ in 0..1000 {
                let (a, b, c) = (
                    space.sample(&mut rng),
                    space.sample(&mut rng),
                    space.sample(&mut rng),
                );
                space.validate(&a).unwrap();
                let ab = space.distance(&a, &b);
                assert!(ab >= 0.0);
                assert_eq!(ab, space.distance(&b, &a), "{space}");
                assert!(
                    ab <= space.distance(&a, &c) + space.distance(&c, &b) + 1e-9,
                    "{space}"
                );
                assert!(ab <= space.diameter() + 1e-12);
                assert!(space.distance(&a, &a) < 1e-12);
            }
        }
    }

    #[test]
    fn exp_moves_by_tangent_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for space in [
            Space::Sphere { dim: 3 },
            Space::RealProjective { dim: 2 },
            Space::Torus { n: 3 },
        ] {
            for _ in 0..200 {
                let p = space.sample(&mut rng);
                let v = space.random_tangent(&p, &mut rng);
                let v = vec::scale(&v, 0.01 / vec::norm(&v));
                let q = space.exp(&p, &v);
                let r = space.exp(&p, &vec::neg(&v));
                assert!((space.distance(&q, &r) - 0.02).abs() < 1e-12, "{space}");
            }
        }
    }

    #[test]
    fn validation_rejects_bad_encodings() {
        let s2 = Space::Sphere { dim: 2 };
        assert!(s2.validate(&Point::Vector(vec![1.0, 0.0])).is_err());
        assert!(s2.validate(&Point::Vector(vec![1.0, 1.0, 0.0])).is_err());
        assert!(s2.validate(&Point::Angle(0.0)).is_err());
        assert!(Space::Discrete { labels: 2 }
            .validate(&Point::Label(2))
            .is_err());
        assert!(Space::Torus { n: 2 }
            .validate(&Point::Tuple(vec![Point::Angle(0.0)]))
            .is_err());
    }
}
