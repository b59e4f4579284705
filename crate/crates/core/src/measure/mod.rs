//! Finitely supported measures.
//!
//! A [`ProbMeasure`] is a formal convex combination `Σ tᵢ δ(xᵢ)` kept in lowest
//! terms: weights are positive, atoms are pairwise distinct under the atom
//! equality, and atoms are stored in a canonical order so that equal measures
//! have equal representations. [`FiniteMeasure`] drops the unit-mass
//! requirement.
//!
//! The monad structure is [`ProbMeasure::dirac`] (unit) and
//! [`ProbMeasure::flatten`] (multiplication); [`ProbMeasure::boxtimes`] is the
//! external product, retracted by [`ProbMeasure::marginals`], and
//! [`ProbMeasure::cover_pullback`] averages over the fibers of a finite cover.

mod atom;
mod weight;

use std::cmp::Ordering;
use std::fmt;

use serde::ser::{Serialize, SerializeSeq, SerializeStruct, Serializer};

pub use atom::{Atom, ATOM_TOL};
pub use weight::{Weight, MASS_TOL, ZERO_WEIGHT};

use crate::error::{Error, Result};

/// A finite cover `E → X` viewed only through its fibers.
pub trait Cover {
    type Total: Atom;
    type Base: Atom;

    fn degree(&self) -> usize;

    /// The fiber over `x`, in a deterministic order.
    fn fiber(&self, x: &Self::Base) -> Result<Vec<Self::Total>>;

    fn project(&self, e: &Self::Total) -> Self::Base;
}

/// Sort, merge equal atoms by a left fold and drop negligible weights.
fn lowest_terms<A: Atom, W: Weight>(raw: Vec<(A, W)>) -> Result<Vec<(A, W)>> {
    if let Some((index, (_, w))) = raw
        .iter()
        .enumerate()
        .find(|(_, (_, w))| w.is_negative_weight())
    {
        return Err(Error::NegativeWeight {
            index,
            value: w.to_f64(),
        });
    }
    let mut sorted = raw;
    sorted.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let mut merged: Vec<(A, W)> = Vec::with_capacity(sorted.len());
    for (atom, w) in sorted {
        match merged.iter_mut().find(|(b, _)| b.same_atom(&atom)) {
            Some(slot) => slot.1 = slot.1.clone() + w,
            None => merged.push((atom, w)),
        }
    }
    merged.retain(|(_, w)| !w.is_negligible());
    Ok(merged)
}

fn total_of<A, W: Weight>(atoms: &[(A, W)]) -> W {
    atoms.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone())
}

/// A measure of finite support, not necessarily of unit mass.
#[derive(Clone, PartialEq)]
pub struct FiniteMeasure<A, W = f64> {
    atoms: Vec<(A, W)>,
}

impl<A: Atom, W: Weight> FiniteMeasure<A, W> {
    /// Brings a raw list of weighted atoms to lowest terms.
    pub fn new(raw: Vec<(A, W)>) -> Result<Self> {
        Ok(Self {
            atoms: lowest_terms(raw)?,
        })
    }

    pub fn zero() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn total_mass(&self) -> W {
        total_of(&self.atoms)
    }

    /// Atom-wise sum of two measures.
    pub fn add(&self, other: &Self) -> Self {
        let raw = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .cloned()
            .collect();
        Self {
            atoms: lowest_terms(raw).expect("sum of nonnegative measures"),
        }
    }

    pub fn pushforward<B: Atom>(&self, f: impl Fn(&A) -> B) -> FiniteMeasure<B, W> {
        let raw = self.atoms.iter().map(|(a, w)| (f(a), w.clone())).collect();
        FiniteMeasure {
            atoms: lowest_terms(raw).expect("weights already nonnegative"),
        }
    }

    /// Refines to a probability measure, failing if the mass is not 1.
    pub fn into_probability(self) -> Result<ProbMeasure<A, W>> {
        ProbMeasure::normalize(self.atoms)
    }
}

impl<A, W: Clone> FiniteMeasure<A, W> {
    pub fn atoms(&self) -> &[(A, W)] {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &W)> {
        self.atoms.iter().map(|(a, w)| (a, w))
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl<A: Atom, W: Weight> FiniteMeasure<A, W> {
    /// Weight of `x`, zero off the support.
    pub fn weight_of(&self, x: &A) -> W {
        self.atoms
            .iter()
            .find(|(a, _)| a.same_atom(x))
            .map(|(_, w)| w.clone())
            .unwrap_or_else(W::zero)
    }

    /// Support-matching comparison at the atom tolerance.
    pub fn approx_eq(&self, other: &Self, weight_tol: f64) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.atoms.iter().all(|(a, w)| {
                other
                    .atoms
                    .iter()
                    .any(|(b, v)| a.same_atom(b) && (w.to_f64() - v.to_f64()).abs() <= weight_tol)
            })
    }
}

/// A probability measure of finite support in lowest terms.
#[derive(Clone, PartialEq)]
pub struct ProbMeasure<A, W = f64> {
    inner: FiniteMeasure<A, W>,
}

impl<A: Atom, W: Weight> ProbMeasure<A, W> {
    /// Lowest-terms representative of a raw convex combination.
    pub fn normalize(raw: Vec<(A, W)>) -> Result<Self> {
        let total = total_of(&raw);
        if !total.is_unit_mass() {
            // a negative entry is reported before a wrong total
            lowest_terms(raw)?;
            return Err(Error::NotNormalized {
                total: total.to_f64(),
            });
        }
        Ok(Self::from_lowest_terms(lowest_terms(raw)?))
    }

    /// Builds from already-validated mass; used when the operation preserves mass.
    fn assemble(raw: Vec<(A, W)>) -> Self {
        debug_assert!(total_of(&raw).to_f64().is_finite());
        Self::from_lowest_terms(lowest_terms(raw).expect("mass-preserving construction"))
    }

    fn from_lowest_terms(mut atoms: Vec<(A, W)>) -> Self {
        let total = total_of(&atoms);
        if !total.is_one() {
            for (_, w) in atoms.iter_mut() {
                *w = w.clone() / total.clone();
            }
        }
        Self {
            inner: FiniteMeasure { atoms },
        }
    }

    /// The point mass at `x`.
    pub fn dirac(x: A) -> Self {
        Self {
            inner: FiniteMeasure {
                atoms: vec![(x, W::one())],
            },
        }
    }

    /// Uniform measure on the given atoms (merged if some coincide).
    pub fn uniform(points: Vec<A>) -> Result<Self> {
        let k = points.len() as u64;
        if k == 0 {
            return Err(Error::NotNormalized { total: 0.0 });
        }
        let w = W::from_fraction(1, k);
        Ok(Self::assemble(
            points.into_iter().map(|x| (x, w.clone())).collect(),
        ))
    }

    pub fn pushforward<B: Atom>(&self, f: impl Fn(&A) -> B) -> ProbMeasure<B, W> {
        ProbMeasure::assemble(self.iter().map(|(a, w)| (f(a), w.clone())).collect())
    }

    /// Pushforward along a fallible map.
    pub fn try_pushforward<B: Atom>(
        &self,
        f: impl Fn(&A) -> Result<B>,
    ) -> Result<ProbMeasure<B, W>> {
        let raw = self
            .iter()
            .map(|(a, w)| Ok((f(a)?, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbMeasure::assemble(raw))
    }

    /// Monad multiplication: `Σⱼ sⱼ δ(μⱼ) ↦ Σⱼ Σᵢ sⱼ tᵢⱼ δ(xᵢⱼ)`.
    pub fn flatten(nested: &ProbMeasure<ProbMeasure<A, W>, W>) -> Self {
        let raw = nested
            .iter()
            .flat_map(|(inner, s)| {
                inner
                    .iter()
                    .map(move |(x, t)| (x.clone(), s.clone() * t.clone()))
            })
            .collect();
        Self::assemble(raw)
    }

    /// Kleisli extension: push each atom to a measure and flatten.
    pub fn bind<B: Atom>(
        &self,
        f: impl Fn(&A) -> Result<ProbMeasure<B, W>>,
    ) -> Result<ProbMeasure<B, W>> {
        let mut raw = Vec::new();
        for (a, s) in self.iter() {
            let inner = f(a)?;
            raw.extend(
                inner
                    .iter()
                    .map(|(x, t)| (x.clone(), s.clone() * t.clone())),
            );
        }
        Ok(ProbMeasure::assemble(raw))
    }

    /// External product `Σᵢ Σⱼ tᵢ sⱼ δ(xᵢ, yⱼ)`.
    pub fn boxtimes<B: Atom>(&self, other: &ProbMeasure<B, W>) -> ProbMeasure<(A, B), W> {
        let raw = self
            .iter()
            .flat_map(|(x, t)| {
                other
                    .iter()
                    .map(move |(y, s)| ((x.clone(), y.clone()), t.clone() * s.clone()))
            })
            .collect();
        ProbMeasure::assemble(raw)
    }

    /// Transfer along a degree-k cover: each lift of `x` receives `μ(x)/k`.
    pub fn cover_pullback<C>(
        cover: &C,
        mu: &ProbMeasure<C::Base, W>,
    ) -> Result<ProbMeasure<C::Total, W>>
    where
        C: Cover<Base = A>,
    {
        let k = cover.degree();
        let share = W::from_fraction(1, k as u64);
        let mut raw = Vec::with_capacity(k * mu.support_size());
        for (x, w) in mu.iter() {
            let fiber = cover.fiber(x)?;
            if fiber.len() != k {
                return Err(Error::FiberSizeMismatch {
                    expected: k,
                    found: fiber.len(),
                });
            }
            raw.extend(fiber.into_iter().map(|e| (e, w.clone() * share.clone())));
        }
        Ok(ProbMeasure::assemble(raw))
    }

    /// Membership in the relative measure space: all atoms land on one target point.
    pub fn check_relative<B>(&self, constraint: &RelativeConstraint<'_, A, B>) -> bool {
        constraint.holds(self)
    }

    pub fn weight_of(&self, x: &A) -> W {
        self.inner.weight_of(x)
    }

    pub fn approx_eq(&self, other: &Self, weight_tol: f64) -> bool {
        self.inner.approx_eq(&other.inner, weight_tol)
    }
}

impl<A: Atom, B: Atom, W: Weight> ProbMeasure<(A, B), W> {
    /// Pushforwards along the two projections; a retraction of [`ProbMeasure::boxtimes`].
    pub fn marginals(&self) -> (ProbMeasure<A, W>, ProbMeasure<B, W>) {
        (
            self.pushforward(|(a, _)| a.clone()),
            self.pushforward(|(_, b)| b.clone()),
        )
    }
}

impl<A, W: Clone> ProbMeasure<A, W> {
    pub fn atoms(&self) -> &[(A, W)] {
        self.inner.atoms()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&A, &W)> {
        self.inner.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &A> {
        self.inner.atoms.iter().map(|(a, _)| a)
    }

    pub fn support_size(&self) -> usize {
        self.inner.support_size()
    }

    pub fn as_finite(&self) -> &FiniteMeasure<A, W> {
        &self.inner
    }

    pub fn into_finite(self) -> FiniteMeasure<A, W> {
        self.inner
    }
}

impl<A: Atom, W: Weight> ProbMeasure<A, W> {
    pub fn total_mass(&self) -> W {
        self.inner.total_mass()
    }
}

impl<A: Atom, W: Weight> Atom for ProbMeasure<A, W> {
    fn same_atom(&self, other: &Self) -> bool {
        self.support_size() == other.support_size()
            && self
                .iter()
                .all(|(a, w)| other.iter().any(|(b, v)| a.same_atom(b) && w.close_to(v)))
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.support_size()
            .cmp(&other.support_size())
            .then_with(|| {
                self.iter()
                    .zip(other.iter())
                    .map(|((a, w), (b, v))| {
                        a.canonical_cmp(b)
                            .then_with(|| w.partial_cmp(v).unwrap_or(Ordering::Equal))
                    })
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal)
            })
    }
}

type SameTarget<'a, B> = Box<dyn Fn(&B, &B) -> bool + 'a>;

/// The condition `|f(supp μ)| = 1` defining relative measures for a map `f`.
pub struct RelativeConstraint<'a, A, B> {
    map: Box<dyn Fn(&A) -> B + 'a>,
    same_target: SameTarget<'a, B>,
}

impl<'a, A, B> RelativeConstraint<'a, A, B> {
    pub fn new(map: impl Fn(&A) -> B + 'a, same_target: impl Fn(&B, &B) -> bool + 'a) -> Self {
        Self {
            map: Box::new(map),
            same_target: Box::new(same_target),
        }
    }

    pub fn holds<W: Clone>(&self, mu: &ProbMeasure<A, W>) -> bool {
        let mut images = mu.support().map(|a| (self.map)(a));
        match images.next() {
            Some(first) => images.all(|b| (self.same_target)(&first, &b)),
            None => false,
        }
    }
}

impl<A: fmt::Debug, W: fmt::Debug> fmt::Debug for FiniteMeasure<A, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.atoms.iter().map(|(a, w)| (a, w)))
            .finish()
    }
}

impl<A: fmt::Debug, W: fmt::Debug> fmt::Debug for ProbMeasure<A, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.fmt(f)
    }
}

struct AtomList<'a, A, W>(&'a [(A, W)]);

impl<A: Serialize, W: Serialize> Serialize for AtomList<'_, A, W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Entry<'b, A, W> {
            atom: &'b A,
            weight: &'b W,
        }
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (atom, weight) in self.0 {
            seq.serialize_element(&Entry { atom, weight })?;
        }
        seq.end()
    }
}

impl<A: Serialize, W: Serialize> Serialize for FiniteMeasure<A, W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Measure", 1)?;
        st.serialize_field("atoms", &AtomList(&self.atoms))?;
        st.end()
    }
}

impl<A: Serialize, W: Serialize> Serialize for ProbMeasure<A, W> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.inner.serialize(serializer)
    }
}
