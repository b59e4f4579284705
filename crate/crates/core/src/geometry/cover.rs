use std::f64::consts::TAU;
use std::fmt;

use serde::Serialize;

use super::path::{ArcPath, ArcSegment, ArcSurface, GeoPath};
use super::space::{canonical_line, wrap_angle, Point, Space};
use super::vector as vec;
use crate::error::{Error, Result};
use crate::measure::Cover;

/// Finite covering maps with explicit fibers and deck groups.
///
/// Deck elements are indexed `0..degree`; index 0 is the identity. All
/// shipped covers are regular, and the deck group acts simply transitively on
/// each fiber.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CoveringMap {
    /// `Sᵈ → ℝPᵈ`, `u ↦ [u]`, deck group `{±1}`.
    Antipodal { dim: usize },
    /// `S¹ → S¹`, `θ ↦ kθ`, deck group `ℤ/k` acting by rotation through `2π/k`.
    Power { k: usize },
    /// `X → X`.
    Identity(Space),
    /// Coordinate-wise product of covers.
    Product(Vec<CoveringMap>),
}

impl fmt::Display for CoveringMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.total(), self.base())
    }
}

impl CoveringMap {
    pub fn total(&self) -> Space {
        match self {
            CoveringMap::Antipodal { dim } => Space::Sphere { dim: *dim },
            CoveringMap::Power { .. } => Space::Circle,
            CoveringMap::Identity(space) => space.clone(),
            CoveringMap::Product(parts) => {
                Space::Product(parts.iter().map(CoveringMap::total).collect())
            }
        }
    }

    pub fn base(&self) -> Space {
        match self {
            CoveringMap::Antipodal { dim } => Space::RealProjective { dim: *dim },
            CoveringMap::Power { .. } => Space::Circle,
            CoveringMap::Identity(space) => space.clone(),
            CoveringMap::Product(parts) => {
                Space::Product(parts.iter().map(CoveringMap::base).collect())
            }
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            CoveringMap::Antipodal { .. } => 2,
            CoveringMap::Power { k } => *k,
            CoveringMap::Identity(_) => 1,
            CoveringMap::Product(parts) => parts.iter().map(CoveringMap::degree).product(),
        }
    }

    pub fn project(&self, e: &Point) -> Point {
        match (self, e) {
            (CoveringMap::Antipodal { dim }, _) => {
                Space::RealProjective { dim: *dim }.canonicalize(e)
            }
            (CoveringMap::Power { k }, Point::Angle(a)) => Point::Angle(wrap_angle(*k as f64 * a)),
            (CoveringMap::Product(parts), Point::Tuple(xs)) => {
                Point::Tuple(parts.iter().zip(xs).map(|(p, x)| p.project(x)).collect())
            }
            _ => e.clone(),
        }
    }

    /// The `k` points over `x`, ordered by deck element: `fiber[g] = g · fiber[0]`.
    pub fn fiber(&self, x: &Point) -> Result<Vec<Point>> {
        let out = match (self, x) {
            (CoveringMap::Antipodal { .. }, Point::Vector(u)) => {
                let u = canonical_line(u);
                vec![Point::Vector(u.clone()), Point::Vector(vec::neg(&u))]
            }
            (CoveringMap::Power { k }, Point::Angle(a)) => {
                let root = wrap_angle(*a) / *k as f64;
                (0..*k)
                    .map(|j| Point::Angle(wrap_angle(root + TAU * j as f64 / *k as f64)))
                    .collect()
            }
            (CoveringMap::Identity(_), _) => vec![x.clone()],
            (CoveringMap::Product(parts), Point::Tuple(xs)) if parts.len() == xs.len() => {
                let fibers = parts
                    .iter()
                    .zip(xs)
                    .map(|(p, x)| p.fiber(x))
                    .collect::<Result<Vec<_>>>()?;
                (0..self.degree())
                    .map(|g| {
                        let digits = self.digits(g);
                        Point::Tuple(
                            fibers
                                .iter()
                                .zip(digits)
                                .map(|(f, i)| f[i].clone())
                                .collect(),
                        )
                    })
                    .collect()
            }
            _ => {
                return Err(Error::InvalidPoint {
                    space: self.base().to_string(),
                    reason: format!("unexpected encoding {x:?}"),
                })
            }
        };
        if out.len() != self.degree() {
            return Err(Error::FiberSizeMismatch {
                expected: self.degree(),
                found: out.len(),
            });
        }
        Ok(out)
    }

    /// Mixed-radix decomposition of a product deck element.
    fn digits(&self, mut g: usize) -> Vec<usize> {
        match self {
            CoveringMap::Product(parts) => parts
                .iter()
                .map(|p| {
                    let k = p.degree();
                    let d = g % k;
                    g /= k;
                    d
                })
                .collect(),
            _ => vec![g],
        }
    }

    /// Deck transformation `g · e`.
    pub fn deck(&self, g: usize, e: &Point) -> Point {
        match (self, e) {
            (CoveringMap::Antipodal { .. }, Point::Vector(u)) if g % 2 == 1 => {
                Point::Vector(vec::neg(u))
            }
            (CoveringMap::Power { k }, Point::Angle(a)) => {
                Point::Angle(wrap_angle(a + TAU * (g % k) as f64 / *k as f64))
            }
            (CoveringMap::Product(parts), Point::Tuple(xs)) => Point::Tuple(
                parts
                    .iter()
                    .zip(self.digits(g))
                    .zip(xs)
                    .map(|((p, d), x)| p.deck(d, x))
                    .collect(),
            ),
            _ => e.clone(),
        }
    }

    /// The image `p ∘ γ` of a path in the total space.
    pub fn project_path(&self, path: &GeoPath) -> GeoPath {
        match (self, path) {
            (CoveringMap::Antipodal { .. }, GeoPath::Arc(arc)) => GeoPath::Arc(ArcPath {
                surface: ArcSurface::Projective,
                segments: arc.segments.clone(),
            }),
            (CoveringMap::Power { k }, GeoPath::Arc(arc)) => {
                let k = *k as f64;
                let segments = arc
                    .segments
                    .iter()
                    .map(|s| {
                        let a = s.start[1].atan2(s.start[0]);
                        let orientation = s.start[0] * s.tangent[1] - s.start[1] * s.tangent[0];
                        let sign = if orientation < 0.0 { -1.0 } else { 1.0 };
                        ArcSegment {
                            t0: s.t0,
                            t1: s.t1,
                            ..ArcSegment::circle_sweep(k * a, sign * k * s.angle)
                        }
                    })
                    .collect();
                GeoPath::Arc(ArcPath {
                    surface: ArcSurface::Circle,
                    segments,
                })
            }
            (CoveringMap::Product(parts), GeoPath::Product(legs)) => GeoPath::Product(
                parts
                    .iter()
                    .zip(legs)
                    .map(|(p, g)| p.project_path(g))
                    .collect(),
            ),
            _ => path.clone(),
        }
    }
}

impl Cover for CoveringMap {
    type Total = Point;
    type Base = Point;

    fn degree(&self) -> usize {
        CoveringMap::degree(self)
    }

    fn fiber(&self, x: &Point) -> Result<Vec<Point>> {
        CoveringMap::fiber(self, x)
    }

    fn project(&self, e: &Point) -> Point {
        CoveringMap::project(self, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::path::PATH_GRID;
    use crate::measure::Atom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn covers() -> Vec<CoveringMap> {
        vec![
            CoveringMap::Antipodal { dim: 2 },
            CoveringMap::Antipodal { dim: 5 },
            CoveringMap::Power { k: 3 },
            CoveringMap::Identity(Space::Torus { n: 2 }),
            CoveringMap::Product(vec![
                CoveringMap::Antipodal { dim: 1 },
                CoveringMap::Power { k: 2 },
            ]),
        ]
    }

    #[test]
    fn antipodal_fiber() {
        let p = CoveringMap::Antipodal { dim: 2 };
        let f = p.fiber(&Point::Vector(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(
            f,
            vec![
                Point::Vector(vec![1.0, 0.0, 0.0]),
                Point::Vector(vec![-1.0, 0.0, 0.0])
            ]
        );
    }

    #[test]
    fn power_cover_fiber() {
        let p = CoveringMap::Power { k: 3 };
        let f = p.fiber(&Point::Angle(0.0)).unwrap();
        let expected = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (x, want) in f.iter().zip(expected) {
            assert!((x.as_angle().unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn product_fiber_is_cartesian_product() {
        let p = CoveringMap::Product(vec![
            CoveringMap::Antipodal { dim: 1 },
            CoveringMap::Power { k: 3 },
        ]);
        let x = Point::Tuple(vec![Point::Vector(vec![0.6, 0.8]), Point::Angle(1.0)]);
        let f = p.fiber(&x).unwrap();
        assert_eq!(f.len(), 6);
        let a = CoveringMap::Antipodal { dim: 1 }
            .fiber(&Point::Vector(vec![0.6, 0.8]))
            .unwrap();
        let b = CoveringMap::Power { k: 3 }
            .fiber(&Point::Angle(1.0))
            .unwrap();
        for u in &a {
            for v in &b {
                let pair = Point::Tuple(vec![u.clone(), v.clone()]);
                assert_eq!(f.iter().filter(|e| e.same_atom(&pair)).count(), 1);
            }
        }
    }

    #[test]
    fn covering_contract_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in covers() {
            let (base, total) = (p.base(), p.total());
            for _ in 0..300 {
                let x = base.sample(&mut rng);
                let fiber = p.fiber(&x).unwrap();
                assert_eq!(fiber.len(), p.degree());
                for (g, e) in fiber.iter().enumerate() {
                    total.validate(e).unwrap();
                    assert!(base.distance(&p.project(e), &x) < 1e-12, "{p}");
                    // fiber[g] = g · fiber[0]
                    assert!(total.distance(&p.deck(g, &fiber[0]), e) < 1e-12, "{p}");
                    for other in &fiber[..g] {
                        assert!(total.distance(e, other) > 1e-6);
                    }
                }
                // deck action commutes with projection
                let e = total.sample(&mut rng);
                for g in 0..p.degree() {
                    assert!(
                        base.distance(&p.project(&p.deck(g, &e)), &p.project(&e)) < 1e-12,
                        "{p}"
                    );
                }
            }
        }
    }

    #[test]
    fn projected_paths_agree_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in covers() {
            let (base, total) = (p.base(), p.total());
            for _ in 0..50 {
                let (u, v) = (total.sample(&mut rng), total.sample(&mut rng));
                let path = total.geodesics(&u, &v).unwrap().swap_remove(0).0;
                let down = p.project_path(&path);
                for i in 0..=PATH_GRID {
                    let t = i as f64 / PATH_GRID as f64;
                    let want = p.project(&path.eval(t).unwrap());
                    assert!(
                        base.distance(&down.eval(t).unwrap(), &want) < 1e-9,
                        "{p} at {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn full_great_circle_projects_to_a_loop() {
        let p = CoveringMap::Antipodal { dim: 2 };
        let u = vec![1.0, 0.0, 0.0];
        let half = GeoPath::Arc(ArcPath::single(
            ArcSurface::Sphere,
            ArcSegment::new(u.clone(), vec![0.0, 1.0, 0.0], PI),
        ));
        let down = p.project_path(&half);
        let rp = p.base();
        assert!(rp.distance(&down.start(), &down.end()) < 1e-15);
        assert!(
            rp.distance(
                &down.eval(0.5).unwrap(),
                &Point::Vector(vec![0.0, 1.0, 0.0])
            ) < 1e-15
        );
    }
}
