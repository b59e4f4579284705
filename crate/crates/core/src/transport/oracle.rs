//! Brute-force transport oracle: minimum cost over every spanning-tree basic
//! solution of the bipartite transport polytope.

/// Flows on a spanning tree, found by peeling leaves; `None` if the edge set
/// is not a spanning tree or the forced flows are infeasible.
fn tree_flows(supply: &[f64], demand: &[f64], edges: &[(usize, usize)]) -> Option<Vec<f64>> {
    let (m, n) = (supply.len(), demand.len());
    let mut residual: Vec<f64> = supply.iter().chain(demand).copied().collect();
    let mut alive = vec![true; edges.len()];
    let mut flow = vec![0.0; edges.len()];
    for _ in 0..edges.len() {
        let degree = |node: usize, alive: &[bool]| {
            edges
                .iter()
                .zip(alive)
                .filter(|((i, j), a)| **a && (*i == node || m + *j == node))
                .count()
        };
        let leaf = (0..m + n).find(|&node| degree(node, &alive) == 1)?;
        let k = (0..edges.len())
            .find(|&k| alive[k] && (edges[k].0 == leaf || m + edges[k].1 == leaf))?;
        let (i, j) = edges[k];
        let other = if leaf == i { m + j } else { i };
        let x = residual[leaf];
        if x < -1e-12 {
            return None;
        }
        flow[k] = x;
        residual[leaf] = 0.0;
        residual[other] -= x;
        alive[k] = false;
    }
    // every node must be saturated, otherwise the edges did not span the graph
    residual.iter().all(|r| r.abs() < 1e-9).then_some(flow)
}

pub(crate) fn min_over_trees(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    let all: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let size = m + n - 1;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << all.len()) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let edges: Vec<(usize, usize)> = (0..all.len())
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| all[b])
            .collect();
        if let Some(flow) = tree_flows(supply, demand, &edges) {
            let c: f64 = edges
                .iter()
                .zip(&flow)
                .map(|(&(i, j), x)| x * cost[i][j])
                .sum();
            best = best.min(c);
        }
    }
    best
}
