use serde::Serialize;

use super::{
    acat_cover_transfer, acat_sphere, circle_tc, equivariant_tc_transfer, generic_tc_transfer,
    misdeclared, naive_rp, product_planner, rp_tc, sequential_planner, shifted_endpoint, sphere_tc,
    AnalogPlanner,
};
use crate::error::{Error, Result};
use crate::geometry::{CoveringMap, Space};

/// Inputs probed by the equivariance certificate when building transfers.
const CERTIFICATE_SAMPLES: usize = 200;
const CERTIFICATE_SEED: u64 = 42;

/// Space parameters shared by the registered planners.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlannerParams {
    /// Dimension `d` of spheres and projective spaces.
    pub dim: usize,
    /// Number of circle factors of the torus.
    pub torus_n: usize,
    /// Arity of sequential planners.
    pub arity: usize,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            dim: 2,
            torus_n: 2,
            arity: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PlannerInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Negative controls and fault injections are expected to fail an audit.
    pub expected_to_fail: bool,
}

const CATALOG: &[PlannerInfo] = &[
    PlannerInfo {
        name: "rp_tc",
        summary: "two projected arcs on RP^d weighted (1±θ)/2",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "sphere_acat",
        summary: "based planner on S^d through a fixed half circle",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "sphere_tc",
        summary: "two-point planner on S^d (2 rules odd d, 3 rules even d)",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "circle_tc",
        summary: "ccw/cw arcs on S^1 weighted by the angular gap",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "circle_tc_seq",
        summary: "r-point planner on S^1 chaining circle_tc legs",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "torus_tc",
        summary: "product of circle planners on T^n",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "rp_acat_transfer",
        summary: "sphere_acat pushed along S^d -> RP^d",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "rp_tc2_equivariant",
        summary: "sphere_tc transferred along S^d -> RP^d with the deck sum",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "rp_tc2_generic",
        summary: "sphere_tc transferred by lifting each input separately",
        expected_to_fail: false,
    },
    PlannerInfo {
        name: "rp_tc_naive",
        summary: "control: one shortest geodesic on RP^d with weight 1",
        expected_to_fail: true,
    },
    PlannerInfo {
        name: "rp_tc_bound1",
        summary: "fault: rp_tc declared with support bound 1",
        expected_to_fail: true,
    },
    PlannerInfo {
        name: "sphere_acat_shifted",
        summary: "fault: sphere_acat paths overshoot the target by 1e-3",
        expected_to_fail: true,
    },
];

/// Registered planner names with a one-line summary.
pub fn catalog() -> &'static [PlannerInfo] {
    CATALOG
}

/// Builds a registered planner.
pub fn build(name: &str, params: &PlannerParams) -> Result<AnalogPlanner> {
    let d = params.dim;
    let antipodal = CoveringMap::Antipodal { dim: d };
    let planner = match name {
        "rp_tc" => rp_tc(d)?,
        "sphere_acat" => acat_sphere(d)?,
        "sphere_tc" => sphere_tc(d)?,
        "circle_tc" => circle_tc(),
        "circle_tc_seq" => sequential_planner(&circle_tc(), params.arity)?,
        "torus_tc" => {
            if params.torus_n == 0 {
                return Err(Error::InvalidParameter("torus needs n ≥ 1".into()));
            }
            let factors = vec![circle_tc(); params.torus_n];
            product_planner(name, Space::Torus { n: params.torus_n }, &factors)?
        }
        "rp_acat_transfer" => acat_cover_transfer(&antipodal, &acat_sphere(d)?, None)?,
        "rp_tc2_equivariant" => equivariant_tc_transfer(
            &antipodal,
            &sphere_tc(d)?,
            CERTIFICATE_SAMPLES,
            CERTIFICATE_SEED,
        )?,
        "rp_tc2_generic" => generic_tc_transfer(&antipodal, &sphere_tc(d)?)?,
        "rp_tc_naive" => naive_rp(d)?,
        "rp_tc_bound1" => misdeclared(&rp_tc(d)?, 1)?,
        "sphere_acat_shifted" => shifted_endpoint(&acat_sphere(d)?, 1e-3)?,
        other => return Err(Error::UnknownPlanner(other.to_string())),
    };
    Ok(planner.renamed(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_entry_builds() {
        for info in catalog() {
            for dim in [1, 2, 3] {
                let p = build(
                    info.name,
                    &PlannerParams {
                        dim,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(p.name(), info.name);
            }
        }
        assert!(matches!(
            build("nope", &PlannerParams::default()),
            Err(Error::UnknownPlanner(_))
        ));
    }

    #[test]
    fn declared_bounds() {
        let b = |name: &str, dim: usize| {
            build(
                name,
                &PlannerParams {
                    dim,
                    ..Default::default()
                },
            )
            .unwrap()
            .bound()
        };
        assert_eq!(b("rp_tc", 3), 2);
        assert_eq!(b("rp_acat_transfer", 3), 4);
        assert_eq!(b("rp_tc2_equivariant", 3), 4);
        assert_eq!(b("rp_tc2_equivariant", 2), 6);
        assert_eq!(b("rp_tc2_generic", 2), 12);
        assert_eq!(b("torus_tc", 2), 4);
        assert_eq!(b("circle_tc_seq", 2), 4);
    }
}
