use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use super::FiniteGroup;
use crate::error::{Error, Result};
use crate::measure::ProbMeasure;

/// A point of the simplex `Δᴳ`: a measure on group elements.
pub type SimplexPoint = ProbMeasure<usize, Rational64>;

/// A measure on integers, acted on by shifts.
pub type WindowPoint = ProbMeasure<i64, Rational64>;

/// Largest grid denominator accepted by [`free_action_probe`].
pub const MAX_DENOMINATOR: u32 = 6;
/// Largest window accepted by [`free_action_probe`].
pub const MAX_WINDOW: usize = 15;

/// Left translation of atoms: `x ↦ g·x`.
pub fn act(group: &FiniteGroup, g: usize, xi: &SimplexPoint) -> SimplexPoint {
    xi.pushforward(|&x| group.mul(g, x))
}

/// Translation of integer atoms by `s`.
pub fn shift(s: i64, xi: &WindowPoint) -> WindowPoint {
    xi.pushforward(|&x| x + s)
}

/// Dimension of the open face containing `ξ`.
pub fn skeleton_index<A, W: Clone>(xi: &ProbMeasure<A, W>) -> usize {
    xi.support_size() - 1
}

/// What acts on the simplex.
#[derive(Debug, Clone)]
pub enum ActionModel {
    Finite(FiniteGroup),
    /// ℤ acting by shifts on measures supported in `{0, …, window − 1}`.
    Shift {
        window: usize,
    },
}

/// Barycenter of the face spanned by the powers of `g`.
///
/// For the shift model `g` is the shift amount; every nonzero shift has
/// infinite order.
pub fn torsion_fixed_point_witness(model: &ActionModel, g: i64) -> Result<SimplexPoint> {
    match model {
        ActionModel::Shift { .. } if g == 0 => Err(Error::InvalidParameter(
            "identity has no torsion witness".into(),
        )),
        ActionModel::Shift { .. } => Err(Error::InfiniteOrder),
        ActionModel::Finite(group) => {
            let g = usize::try_from(g)
                .ok()
                .filter(|&g| g < group.order())
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("element {g} not in {}", group.name()))
                })?;
            if g == group.identity() {
                return Err(Error::InvalidParameter(
                    "identity has no torsion witness".into(),
                ));
            }
            let m = group.element_order(g);
            ProbMeasure::uniform((0..m).map(|k| group.pow(g, k)).collect())
        }
    }
}

/// All weight vectors `(k₁/q, …, kₙ/q)` with nonnegative integers summing to `q`.
pub fn grid_points(atoms: usize, q: u32) -> Vec<Vec<u32>> {
    fn fill(rest: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(rest);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=rest {
            prefix.push(k);
            fill(rest - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if atoms > 0 {
        fill(q, atoms, &mut Vec::with_capacity(atoms), &mut out);
    }
    out
}

fn grid_measure<A: crate::measure::Atom>(
    atoms: impl Iterator<Item = A>,
    counts: &[u32],
    q: u32,
) -> ProbMeasure<A, Rational64> {
    let raw = atoms
        .zip(counts)
        .map(|(a, &k)| (a, Rational64::new(k as i64, q as i64)))
        .collect();
    ProbMeasure::normalize(raw).expect("grid weights sum to one")
}

/// A fixed point found by the probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedExample {
    pub element: String,
    /// `(atom label, weight)` pairs.
    pub point: Vec<(String, String)>,
    /// False when the point is the torsion witness rather than a grid point.
    pub on_grid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeActionReport {
    pub model: String,
    pub grid_denominator: u32,
    pub window: Option<usize>,
    pub points_checked: usize,
    pub nontrivial_elements: usize,
    /// Grid pairs `(ξ, g)` with `g ≠ e` and `g·ξ = ξ`.
    pub fixed_pairs: usize,
    pub example: Option<FixedExample>,
    pub free: bool,
}

fn describe<A: ToString>(xi: &ProbMeasure<A, Rational64>) -> Vec<(String, String)> {
    xi.iter()
        .map(|(a, w)| (a.to_string(), w.to_string()))
        .collect()
}

/// Searches grid points of the simplex for points fixed by a nontrivial element.
pub fn free_action_probe(model: &ActionModel, q: u32) -> Result<FreeActionReport> {
    if q == 0 || q > MAX_DENOMINATOR {
        return Err(Error::InvalidParameter(format!(
            "grid denominator must be in 1..={MAX_DENOMINATOR}"
        )));
    }
    match model {
        ActionModel::Finite(group) => Ok(probe_finite(group, q)),
        ActionModel::Shift { window } => {
            if *window < 3 || *window > MAX_WINDOW {
                return Err(Error::InvalidParameter(format!(
                    "window must be in 3..={MAX_WINDOW}"
                )));
            }
            Ok(probe_shift(*window, q))
        }
    }
}

fn probe_finite(group: &FiniteGroup, q: u32) -> FreeActionReport {
    let n = group.order();
    let elements: Vec<usize> = (0..n).filter(|&g| g != group.identity()).collect();
    let grid = grid_points(n, q);
    let hits: Vec<(usize, usize)> = grid
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, counts)| {
            let xi = grid_measure(0..n, counts, q);
            elements
                .iter()
                .filter(move |&&g| act(group, g, &xi) == xi)
                .map(move |&g| (i, g))
                .collect::<Vec<_>>()
        })
        .collect();
    let example = match hits.first() {
        Some(&(i, g)) => Some(FixedExample {
            element: group.label(g).to_string(),
            point: labelled(group, &grid_measure(0..n, &grid[i], q)),
            on_grid: true,
        }),
        None => elements.first().map(|&g| {
            let w = torsion_fixed_point_witness(&ActionModel::Finite(group.clone()), g as i64)
                .expect("nontrivial element of a finite group");
            debug_assert_eq!(act(group, g, &w), w);
            FixedExample {
                element: group.label(g).to_string(),
                point: labelled(group, &w),
                on_grid: false,
            }
        }),
    };
    FreeActionReport {
        model: group.name().to_string(),
        grid_denominator: q,
        window: None,
        points_checked: grid.len(),
        nontrivial_elements: elements.len(),
        fixed_pairs: hits.len(),
        free: example.is_none(),
        example,
    }
}

fn labelled(group: &FiniteGroup, xi: &SimplexPoint) -> Vec<(String, String)> {
    xi.iter()
        .map(|(&a, w)| (group.label(a).to_string(), w.to_string()))
        .collect()
}

fn probe_shift(window: usize, q: u32) -> FreeActionReport {
    // atoms strictly inside the window: 1..=window-2
    let interior = window - 2;
    let grid = grid_points(interior, q);
    let shifts: Vec<i64> = (1..=window as i64).collect();
    let hits: Vec<(usize, i64)> = grid
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, counts)| {
            let xi = grid_measure(1..=interior as i64, counts, q);
            shifts
                .iter()
                .filter(move |&&s| shift(s, &xi) == xi)
                .map(move |&s| (i, s))
                .collect::<Vec<_>>()
        })
        .collect();
    let example = hits.first().map(|&(i, s)| FixedExample {
        element: s.to_string(),
        point: describe(&grid_measure(1..=interior as i64, &grid[i], q)),
        on_grid: true,
    });
    FreeActionReport {
        model: "Z-shift".to_string(),
        grid_denominator: q,
        window: Some(window),
        points_checked: grid.len(),
        nontrivial_elements: shifts.len(),
        fixed_pairs: hits.len(),
        free: example.is_none(),
        example,
    }
}
