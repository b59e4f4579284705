//! Lévy–Prokhorov distance through the Strassen coupling characterization.
//!
//! `LP(μ, ν) ≤ ε` iff some coupling puts mass at most `ε` on pairs farther
//! apart than `ε`, i.e. iff the maximum flow through pairs at distance `≤ ε` is
//! at least `1 − ε`. That flow is a step function of `ε` that only jumps at
//! pairwise distances, so the infimum is `min_k max(d_k, 1 − F(d_k))` over the
//! sorted distances `d_k` (with `d_0 = 0`).

use std::collections::VecDeque;

const FLOW_EPS: f64 = 1e-15;
/// Unrouted mass below this counts as fully routed.
const DEFICIT_TOL: f64 = 1e-12;

/// Maximum flow source → rows → columns → sink through the allowed cells.
pub(crate) fn max_flow(
    supply: &[f64],
    demand: &[f64],
    allowed: impl Fn(usize, usize) -> bool,
) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    let (source, sink) = (m + n, m + n + 1);
    let size = m + n + 2;
    let mut cap = vec![vec![0.0; size]; size];
    for (i, s) in supply.iter().enumerate() {
        cap[source][i] = *s;
        for j in 0..n {
            if allowed(i, j) {
                cap[i][m + j] = f64::INFINITY;
            }
        }
    }
    for (j, d) in demand.iter().enumerate() {
        cap[m + j][sink] = *d;
    }
    let mut total = 0.0;
    loop {
        let mut parent = vec![usize::MAX; size];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if parent[v] == usize::MAX && cap[u][v] > FLOW_EPS {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            return total;
        }
        let mut push = f64::INFINITY;
        let mut v = sink;
        while v != source {
            push = push.min(cap[parent[v]][v]);
            v = parent[v];
        }
        let mut v = sink;
        while v != source {
            let u = parent[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        total += push;
    }
}

pub(crate) fn levy_prokhorov(supply: &[f64], demand: &[f64], dist: &[Vec<f64>]) -> f64 {
    let mut levels: Vec<f64> = std::iter::once(0.0)
        .chain(dist.iter().flatten().copied())
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut best: f64 = 1.0;
    for eps in levels {
        if eps >= best {
            break;
        }
        let flow = max_flow(supply, demand, |i, j| dist[i][j] <= eps);
        let deficit = 1.0 - flow;
        let deficit = if deficit < DEFICIT_TOL { 0.0 } else { deficit };
        best = best.min(eps.max(deficit));
    }
    best.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flow_is_capped_by_marginals() {
        let f = max_flow(&[0.5, 0.5], &[0.3, 0.7], |_, _| true);
        assert!((f - 1.0).abs() < 1e-15);
        let f = max_flow(&[0.5, 0.5], &[0.3, 0.7], |i, j| i == j);
        assert!((f - 0.8).abs() < 1e-15);
    }

    #[test]
    fn two_diracs() {
        for g in [0.0, 0.2, 0.9, 1.0, 3.0] {
            assert_eq!(levy_prokhorov(&[1.0], &[1.0], &[vec![g]]), g.min(1.0));
        }
    }
}
