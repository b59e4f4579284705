//! Analog motion planners: maps from r-tuples of points to probability
//! measures on paths whose every atom meets the prescribed points.

mod basic;
mod combinators;
mod registry;

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::geometry::{GeoPath, PathMeasure, Point, Space};
use crate::measure::{Atom, ProbMeasure};

pub use basic::{
    acat_sphere, circle_tc, circle_tc_measure, naive_rp, rp_tc, rp_tc_measure, sphere_tc,
    swap_field,
};
pub use combinators::{
    acat_cover_transfer, equivariant_sum, equivariant_tc_transfer, generic_tc_transfer,
    misdeclared, product_planner, sequential_planner, shifted_endpoint,
};
pub use registry::{build, catalog, PlannerInfo, PlannerParams};

/// Tolerance of the section property.
pub const SECTION_TOL: f64 = 1e-7;

pub(crate) type PlanFn = dyn Fn(&[Point]) -> Result<PathMeasure> + Send + Sync;
pub(crate) type CriticalFn = dyn Fn(&mut dyn RngCore) -> Vec<Point> + Send + Sync;

/// A measure-valued section of the r-point path evaluation fibration.
///
/// For `arity ≥ 2` every atom `γ` of `plan(x)` satisfies `γ(i/(r−1)) = xᵢ`;
/// for `arity = 1` the planner is based: `γ(0) = x₀` and `γ(1) = x`.
#[derive(Clone)]
pub struct AnalogPlanner {
    name: String,
    space: Space,
    arity: usize,
    bound: usize,
    basepoint: Option<Point>,
    plan_fn: Arc<PlanFn>,
    critical: Option<Arc<CriticalFn>>,
}

impl fmt::Debug for AnalogPlanner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalogPlanner")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("arity", &self.arity)
            .field("bound", &self.bound)
            .field("basepoint", &self.basepoint)
            .finish()
    }
}

impl AnalogPlanner {
    /// A planner from an arbitrary plan function. `basepoint` is required
    /// exactly when `arity == 1`.
    pub fn new(
        name: impl Into<String>,
        space: Space,
        arity: usize,
        bound: usize,
        basepoint: Option<Point>,
        plan: impl Fn(&[Point]) -> Result<PathMeasure> + Send + Sync + 'static,
    ) -> Result<Self> {
        if arity == 0 || bound == 0 {
            return Err(Error::InvalidParameter(
                "arity and bound must be positive".into(),
            ));
        }
        if (arity == 1) != basepoint.is_some() {
            return Err(Error::InvalidParameter(
                "a basepoint is needed exactly for arity 1".into(),
            ));
        }
        if let Some(x0) = &basepoint {
            space.validate(x0)?;
        }
        Ok(Self {
            name: name.into(),
            space,
            arity,
            bound,
            basepoint,
            plan_fn: Arc::new(plan),
            critical: None,
        })
    }

    /// Attaches a sampler of inputs near the planner's rule boundaries.
    pub fn with_critical(
        mut self,
        sampler: impl Fn(&mut dyn RngCore) -> Vec<Point> + Send + Sync + 'static,
    ) -> Self {
        self.critical = Some(Arc::new(sampler));
        self
    }

    pub(crate) fn with_critical_arc(mut self, sampler: Option<Arc<CriticalFn>>) -> Self {
        self.critical = sampler;
        self
    }

    pub(crate) fn critical_arc(&self) -> Option<Arc<CriticalFn>> {
        self.critical.clone()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Declared support bound `n + 1`.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn basepoint(&self) -> Option<&Point> {
        self.basepoint.as_ref()
    }

    pub fn plan(&self, inputs: &[Point]) -> Result<PathMeasure> {
        if inputs.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: inputs.len(),
            });
        }
        let canonical = inputs
            .iter()
            .map(|p| {
                self.space.validate(p)?;
                Ok(self.space.canonicalize(p))
            })
            .collect::<Result<Vec<_>>>()?;
        (self.plan_fn)(&canonical)
    }

    /// Parameter values at which paths are evaluated for the section property.
    pub fn evaluation_times(&self) -> Vec<f64> {
        match self.arity {
            1 => vec![0.0, 1.0],
            r => (0..r).map(|i| i as f64 / (r - 1) as f64).collect(),
        }
    }

    /// The points the paths must pass through at [`Self::evaluation_times`].
    pub fn prescribed_points(&self, inputs: &[Point]) -> Vec<Point> {
        match (&self.basepoint, self.arity) {
            (Some(x0), 1) => vec![x0.clone(), inputs[0].clone()],
            _ => inputs.to_vec(),
        }
    }

    /// Largest deviation `d(γ(tᵢ), xᵢ)` over all atoms.
    pub fn section_error(&self, inputs: &[Point], measure: &PathMeasure) -> f64 {
        let targets = self.prescribed_points(inputs);
        let times = self.evaluation_times();
        measure
            .support()
            .flat_map(|path| {
                times
                    .iter()
                    .zip(&targets)
                    .map(move |(&t, x)| match path.eval(t) {
                        Ok(p) => self.space.distance(&p, x),
                        Err(_) => f64::INFINITY,
                    })
            })
            .fold(0.0, f64::max)
    }

    /// Uniformly random inputs.
    pub fn sample_inputs(&self, rng: &mut dyn RngCore) -> Vec<Point> {
        (0..self.arity).map(|_| self.space.sample(rng)).collect()
    }

    /// Inputs on the planner's rule boundaries, or uniform inputs if none are known.
    pub fn sample_critical(&self, rng: &mut dyn RngCore) -> Vec<Point> {
        match &self.critical {
            Some(sampler) => sampler(rng),
            None => self.sample_inputs(rng),
        }
    }

    pub fn has_critical_sampler(&self) -> bool {
        self.critical.is_some()
    }
}

type MemberFn<X> = Box<dyn Fn(&X) -> bool + Send + Sync>;
type SectionFn<X, A> = Box<dyn Fn(&X) -> Result<A> + Send + Sync>;
type BumpFn<X> = Box<dyn Fn(&X) -> f64 + Send + Sync>;

/// A local section with its domain and bump function.
pub struct PouRule<X: ?Sized, A> {
    pub member: MemberFn<X>,
    pub section: SectionFn<X, A>,
    pub bump: BumpFn<X>,
}

impl<X: ?Sized, A> PouRule<X, A> {
    pub fn new(
        member: impl Fn(&X) -> bool + Send + Sync + 'static,
        section: impl Fn(&X) -> Result<A> + Send + Sync + 'static,
        bump: impl Fn(&X) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            member: Box::new(member),
            section: Box::new(section),
            bump: Box::new(bump),
        }
    }
}

/// `Σᵢ φᵢ(y) δ(sᵢ(y))` for a partition of unity subordinate to the rule domains.
pub fn pou_section<X: ?Sized, A: Atom>(rules: &[PouRule<X, A>], y: &X) -> Result<ProbMeasure<A>> {
    let bumps: Vec<f64> = rules.iter().map(|r| (r.bump)(y)).collect();
    let sum: f64 = bumps.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || bumps.iter().any(|b| *b < 0.0) {
        return Err(Error::PartitionNotUnity { sum });
    }
    let mut raw = Vec::with_capacity(rules.len());
    for (i, (rule, &phi)) in rules.iter().zip(&bumps).enumerate() {
        if phi <= 0.0 {
            continue;
        }
        if !(rule.member)(y) {
            return Err(Error::RuleOutsideDomain { rule: i, bump: phi });
        }
        raw.push(((rule.section)(y)?, phi));
    }
    ProbMeasure::normalize(raw)
}

pub(crate) fn single_arc(path: GeoPath) -> PathMeasure {
    ProbMeasure::dirac(path)
}
