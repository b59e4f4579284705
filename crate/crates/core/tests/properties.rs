use num_rational::Rational64;
use proptest::prelude::*;

use analogmp::geometry::{circle_distance, CoveringMap, GeoPath, Point, Space, PATH_GRID};
use analogmp::group::{act, skeleton_index, FiniteGroup, SimplexPoint};
use analogmp::measure::ProbMeasure;
use analogmp::planners::{build, PlannerParams};
use analogmp::transport::{levy_prokhorov, w1_oracle, wasserstein1};

fn circle_ground(a: &Point, b: &Point) -> f64 {
    circle_distance(a.as_angle().unwrap(), b.as_angle().unwrap())
}

/// A probability measure on the circle from raw angles and positive weights.
fn circle_measure(raw: Vec<(f64, f64)>) -> ProbMeasure<Point> {
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    ProbMeasure::normalize(
        raw.into_iter()
            .map(|(a, w)| (Point::Angle(a), w / total))
            .collect(),
    )
    .unwrap()
}

fn circle_atoms(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..std::f64::consts::TAU, 0.05f64..1.0), 1..=max)
}

fn unit_vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim + 1)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        })
}

fn rational_measure(n: usize) -> impl Strategy<Value = ProbMeasure<usize, Rational64>> {
    prop::collection::vec(0i64..6, n)
        .prop_filter("some mass", |c| c.iter().sum::<i64>() > 0)
        .prop_map(|counts| {
            let total: i64 = counts.iter().sum();
            ProbMeasure::normalize(
                counts
                    .into_iter()
                    .enumerate()
                    .map(|(x, k)| (x, Rational64::new(k, total)))
                    .collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lowest_terms_is_idempotent(raw in circle_atoms(6)) {
        let m = circle_measure(raw);
        let again = ProbMeasure::normalize(m.atoms().to_vec()).unwrap();
        prop_assert!(again.approx_eq(&m, 1e-15));
        prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(m.iter().all(|(_, w)| *w > 0.0));
    }

    #[test]
    fn rational_pushforward_preserves_mass(mu in rational_measure(5), shift in 0usize..5) {
        let image = mu.pushforward(|x| (x + shift) % 3);
        prop_assert_eq!(image.total_mass(), Rational64::from_integer(1));
        prop_assert!(image.support_size() <= mu.support_size().min(3));
    }

    #[test]
    fn boxtimes_marginals_exact(mu in rational_measure(3), nu in rational_measure(4)) {
        let p = mu.boxtimes(&nu);
        prop_assert_eq!(p.support_size(), mu.support_size() * nu.support_size());
        let (a, b) = p.marginals();
        prop_assert_eq!(a, mu);
        prop_assert_eq!(b, nu);
    }

    #[test]
    fn w1_matches_oracle_on_small_supports(a in circle_atoms(3), b in circle_atoms(3)) {
        let (mu, nu) = (circle_measure(a), circle_measure(b));
        let fast = wasserstein1(&mu, &nu, &circle_ground).unwrap();
        let slow = w1_oracle(&mu, &nu, &circle_ground).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-9, "{} vs {}", fast, slow);
    }

    #[test]
    fn w1_is_symmetric_and_bounded(a in circle_atoms(5), b in circle_atoms(5)) {
        let (mu, nu) = (circle_measure(a), circle_measure(b));
        let ab = wasserstein1(&mu, &nu, &circle_ground).unwrap();
        let ba = wasserstein1(&nu, &mu, &circle_ground).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(ab <= std::f64::consts::PI + 1e-12);
        prop_assert!(wasserstein1(&mu, &mu, &circle_ground).unwrap() <= 1e-12);
    }

    #[test]
    fn diracs_recover_the_ground_metric(x in 0.0..std::f64::consts::TAU, y in 0.0..std::f64::consts::TAU) {
        let (mx, my) = (ProbMeasure::dirac(Point::Angle(x)), ProbMeasure::dirac(Point::Angle(y)));
        let d = circle_distance(x, y);
        prop_assert!((wasserstein1(&mx, &my, &circle_ground).unwrap() - d).abs() < 1e-12);
        prop_assert!((levy_prokhorov(&mx, &my, &circle_ground).unwrap() - d.min(1.0)).abs() < 1e-12);
    }

    #[test]
    fn levy_prokhorov_is_a_bounded_metric(a in circle_atoms(4), b in circle_atoms(4), c in circle_atoms(4)) {
        let (mu, nu, rho) = (circle_measure(a), circle_measure(b), circle_measure(c));
        let lp = |p: &ProbMeasure<Point>, q: &ProbMeasure<Point>| levy_prokhorov(p, q, &circle_ground).unwrap();
        let ab = lp(&mu, &nu);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - lp(&nu, &mu)).abs() < 1e-12);
        prop_assert!(lp(&mu, &rho) <= ab + lp(&nu, &rho) + 1e-12);
    }

    #[test]
    fn antipodal_transfer_is_a_section(points in prop::collection::vec((unit_vector(2), 0.05f64..1.0), 1..=4)) {
        let cover = CoveringMap::Antipodal { dim: 2 };
        let base = cover.base();
        let total: f64 = points.iter().map(|(_, w)| w).sum();
        let mu = ProbMeasure::normalize(
            points.into_iter().map(|(v, w)| (base.canonicalize(&Point::Vector(v)), w / total)).collect(),
        ).unwrap();
        let lifted = ProbMeasure::cover_pullback(&cover, &mu).unwrap();
        prop_assert!(lifted.support_size() <= 2 * mu.support_size());
        let back = lifted.pushforward(|e| cover.project(e));
        prop_assert!(back.approx_eq(&mu, 1e-12));
    }

    #[test]
    fn rp_tc_meets_its_endpoints(u in unit_vector(3), v in unit_vector(3)) {
        let p = build("rp_tc", &PlannerParams { dim: 3, ..Default::default() }).unwrap();
        let inputs = [Point::Vector(u), Point::Vector(v)];
        let m = p.plan(&inputs).unwrap();
        prop_assert!(m.support_size() <= 2);
        prop_assert!(p.section_error(&inputs, &m) <= 1e-7);
    }

    #[test]
    fn sphere_tc_meets_its_endpoints(u in unit_vector(2), v in unit_vector(2)) {
        let p = build("sphere_tc", &PlannerParams { dim: 2, ..Default::default() }).unwrap();
        let inputs = [Point::Vector(u), Point::Vector(v)];
        let m = p.plan(&inputs).unwrap();
        prop_assert!(m.support_size() <= 3);
        prop_assert!(p.section_error(&inputs, &m) <= 1e-7);
    }

    #[test]
    fn concatenation_joins_endpoints(a in 0.0..std::f64::consts::TAU, b in 0.0..std::f64::consts::TAU, c in 0.0..std::f64::consts::TAU) {
        let s = Space::Circle;
        let leg = |x: f64, y: f64| -> GeoPath { s.geodesics(&Point::Angle(x), &Point::Angle(y)).unwrap().remove(0).0 };
        let joined = leg(a, b).concat(&leg(b, c)).unwrap();
        prop_assert!(circle_distance(joined.start().as_angle().unwrap(), a) < 1e-9);
        prop_assert!(circle_distance(joined.end().as_angle().unwrap(), c) < 1e-9);
        prop_assert!(joined.sup_distance(&joined, PATH_GRID) == 0.0);
    }

    #[test]
    fn group_action_is_invertible(g in 0usize..8, counts in prop::collection::vec(0i64..4, 8)) {
        prop_assume!(counts.iter().sum::<i64>() > 0);
        let q8 = FiniteGroup::quaternion().unwrap();
        let total: i64 = counts.iter().sum();
        let xi = SimplexPoint::normalize(
            counts.iter().enumerate().map(|(x, &k)| (x, Rational64::new(k, total))).collect(),
        ).unwrap();
        let moved = act(&q8, g, &xi);
        prop_assert_eq!(skeleton_index(&moved), skeleton_index(&xi));
        prop_assert_eq!(act(&q8, q8.inverse(g), &moved), xi);
    }
}
