//! Transportation simplex on a dense `m × n` cost matrix.
//!
//! The basis is a spanning tree of the bipartite graph rows ∪ columns with
//! `m + n − 1` cells. Entering and leaving cells are chosen by Bland's rule on
//! the row-major cell index, which rules out cycling under degeneracy and makes
//! the returned plan deterministic.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-12;

/// Optimal basic solution: basic cells `(i, j, flow)` and the total cost.
pub(crate) struct BasicSolution {
    pub cells: Vec<(usize, usize, f64)>,
    pub cost: f64,
}

struct Basis {
    m: usize,
    n: usize,
    cells: Vec<(usize, usize)>,
    flow: Vec<f64>,
}

impl Basis {
    /// North-west corner rule; always yields a staircase spanning tree.
    fn north_west(supply: &[f64], demand: &[f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let (mut a, mut b) = (supply.to_vec(), demand.to_vec());
        let (mut i, mut j) = (0, 0);
        let mut cells = Vec::with_capacity(m + n - 1);
        let mut flow = Vec::with_capacity(m + n - 1);
        loop {
            let x = a[i].min(b[j]).max(0.0);
            cells.push((i, j));
            flow.push(x);
            a[i] -= x;
            b[j] -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && a[i] <= b[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { m, n, cells, flow }
    }

    /// Tree adjacency: node `i < m` is row `i`, node `m + j` is column `j`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push((self.m + j, k));
            adj[self.m + j].push((i, k));
        }
        adj
    }

    fn potentials(&self, cost: &[Vec<f64>], adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0]);
        while let Some(node) = queue.pop_front() {
            for &(next, k) in &adj[node] {
                if pot[next].is_nan() {
                    let (i, j) = self.cells[k];
                    pot[next] = cost[i][j] - pot[node];
                    queue.push_back(next);
                }
            }
        }
        let v = pot.split_off(self.m);
        (pot, v)
    }

    /// Basic cells on the tree path from row `i` to column `j`, in order.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let target = self.m + j;
        let mut via = vec![usize::MAX; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[i] = true;
        let mut queue = VecDeque::from([i]);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for &(next, k) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    via[next] = k;
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != i {
            let k = via[node];
            path.push(k);
            let (r, c) = self.cells[k];
            node = if node == self.m + c { r } else { self.m + c };
        }
        path.reverse();
        path
    }
}

pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<BasicSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::Solver("empty marginal".into()));
    }
    let mut basis = Basis::north_west(supply, demand);
    let max_iter = 50 * (m + n) * (m + n) + 100;
    for _ in 0..max_iter {
        let adj = basis.adjacency();
        let (u, v) = basis.potentials(cost, &adj);
        let entering = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| {
                cost[i][j] - u[i] - v[j] < -REDUCED_COST_TOL * (1.0 + cost[i][j].abs())
            });
        let Some((ei, ej)) = entering else {
            let cells: Vec<(usize, usize, f64)> = basis
                .cells
                .iter()
                .zip(&basis.flow)
                .map(|(&(i, j), &x)| (i, j, x))
                .collect();
            let cost = cells.iter().map(|&(i, j, x)| x * cost[i][j]).sum();
            return Ok(BasicSolution { cells, cost });
        };
        // the path from row ei to column ej alternates −, +, −, … starting at row ei
        let path = basis.tree_path(&adj, ei, ej);
        let donors: Vec<usize> = path.iter().copied().step_by(2).collect();
        let theta = donors
            .iter()
            .map(|&k| basis.flow[k])
            .fold(f64::INFINITY, f64::min);
        let leaving = donors
            .iter()
            .copied()
            .filter(|&k| basis.flow[k] <= theta)
            .min_by_key(|&k| basis.cells[k].0 * n + basis.cells[k].1)
            .ok_or_else(|| Error::Solver("no leaving cell".into()))?;
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis.flow[k] -= theta;
            } else {
                basis.flow[k] += theta;
            }
        }
        basis.cells[leaving] = (ei, ej);
        basis.flow[leaving] = theta;
    }
    Err(Error::Solver(format!(
        "transportation simplex did not converge in {max_iter} pivots"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_on_the_line() {
        let cost = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let sol = solve(&[0.3, 0.7], &[0.6, 0.4], &cost).unwrap();
        assert!((sol.cost - 0.3).abs() < 1e-15);
        assert_eq!(sol.cells.len(), 3);
    }

    #[test]
    fn degenerate_square_assignment() {
        // permutation-optimal instance with every row/column mass tied
        let n = 6;
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if (i + 2) % n == j {
                            0.0
                        } else {
                            1.0 + (i * j) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        let w = vec![1.0 / n as f64; n];
        let sol = solve(&w, &w, &cost).unwrap();
        assert!(sol.cost.abs() < 1e-15);
        assert_eq!(sol.cells.len(), 2 * n - 1);
    }

    #[test]
    fn marginals_are_respected() {
        let supply = [0.1, 0.2, 0.3, 0.4];
        let demand = [0.25, 0.25, 0.5];
        let cost: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..3).map(|j| ((i * 7 + j * 3) % 5) as f64).collect())
            .collect();
        let sol = solve(&supply, &demand, &cost).unwrap();
        for (i, s) in supply.iter().enumerate() {
            let row: f64 = sol.cells.iter().filter(|c| c.0 == i).map(|c| c.2).sum();
            assert!((row - s).abs() < 1e-12);
        }
        for (j, d) in demand.iter().enumerate() {
            let col: f64 = sol.cells.iter().filter(|c| c.1 == j).map(|c| c.2).sum();
            assert!((col - d).abs() < 1e-12);
        }
        assert!(sol.cells.iter().all(|c| c.2 >= -1e-15));
    }
}
