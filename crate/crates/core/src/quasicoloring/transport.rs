//! `‖D‖_{d_w}`: optimal transport of `D⁺` onto `D⁻` with ground cost `d_K`.
//!
//! On a finite metric space the supremum of `∫ f dD` over 1-Lipschitz `f`
//! equals this minimum cost, so we solve the primal transportation problem
//! with the transportation simplex (MODI potentials, stepping-stone pivots).

use std::collections::VecDeque;

use super::BidegreeMeasure;
use crate::interference::{Bidegree, DkMetric};
use crate::{Error, Result};

const BALANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WassersteinResult {
    pub value: f64,
    /// `(source atom, sink atom, mass)` with positive mass.
    pub plan: Vec<(Bidegree, Bidegree, f64)>,
}

pub fn wasserstein_norm(measure: &BidegreeMeasure, metric: &DkMetric) -> Result<WassersteinResult> {
    let total = measure.total_mass();
    let scale = measure.total_variation().max(1.0);
    if total.abs() > BALANCE_TOL * scale {
        return Err(Error::UnbalancedMeasure(total));
    }
    let sources: Vec<(Bidegree, f64)> = measure.atoms().filter(|&(_, m)| m > 0.0).collect();
    let sinks: Vec<(Bidegree, f64)> = measure
        .atoms()
        .filter(|&(_, m)| m < 0.0)
        .map(|(u, m)| (u, -m))
        .collect();
    if sources.is_empty() || sinks.is_empty() {
        return Ok(WassersteinResult {
            value: 0.0,
            plan: Vec::new(),
        });
    }
    let mut cost = vec![vec![0.0; sinks.len()]; sources.len()];
    for (i, &(u, _)) in sources.iter().enumerate() {
        for (j, &(w, _)) in sinks.iter().enumerate() {
            cost[i][j] = metric.distance(u, w)?;
        }
    }
    let supply: Vec<f64> = sources.iter().map(|s| s.1).collect();
    let mut demand: Vec<f64> = sinks.iter().map(|s| s.1).collect();
    // Absorb rounding so the problem is exactly balanced.
    let last = demand.len() - 1;
    demand[last] += supply.iter().sum::<f64>() - demand.iter().sum::<f64>();
    demand[last] = demand[last].max(0.0);

    let flows = solve(&cost, &supply, &demand)?;
    let mut value = crate::sum::KahanSum::default();
    let mut plan = Vec::new();
    for (i, j, f) in flows {
        if f > 0.0 {
            value.add(f * cost[i][j]);
            plan.push((sources[i].0, sinks[j].0, f));
        }
    }
    Ok(WassersteinResult {
        value: value.value(),
        plan,
    })
}

/// Basic cell of the transportation tableau.
#[derive(Debug, Clone, Copy)]
struct Cell {
    i: usize,
    j: usize,
    flow: f64,
}

/// Transportation simplex. Returns the basic cells `(i, j, flow)` of an
/// optimal basis.
fn solve(cost: &[Vec<f64>], supply: &[f64], demand: &[f64]) -> Result<Vec<(usize, usize, f64)>> {
    let (m, n) = (supply.len(), demand.len());
    let mut basis = northwest_corner(supply, demand);
    let cmax = cost
        .iter()
        .flatten()
        .copied()
        .fold(0.0f64, f64::max)
        .max(1.0);
    let tol = 1e-12 * cmax;
    let max_iter = 50 * (m + n) * (m + n) + 100;

    for _ in 0..max_iter {
        let (u, v) = potentials(&basis, m, n, cost);
        let mut entering = None;
        let mut best = -tol;
        for i in 0..m {
            for j in 0..n {
                let reduced = cost[i][j] - u[i] - v[j];
                if reduced < best {
                    best = reduced;
                    entering = Some((i, j));
                }
            }
        }
        let Some((ei, ej)) = entering else {
            return Ok(basis.iter().map(|c| (c.i, c.j, c.flow)).collect());
        };
        pivot(&mut basis, m, n, ei, ej);
    }
    Err(Error::TransportStalled(max_iter))
}

/// Initial basic feasible solution with exactly `m + n - 1` cells.
fn northwest_corner(supply: &[f64], demand: &[f64]) -> Vec<Cell> {
    let (m, n) = (supply.len(), demand.len());
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    let mut basis = Vec::with_capacity(m + n - 1);
    loop {
        let f = s[i].min(d[j]);
        basis.push(Cell { i, j, flow: f });
        s[i] -= f;
        d[j] -= f;
        if i == m - 1 && j == n - 1 {
            break;
        }
        // Advance exactly one index so the basis stays a spanning tree; a
        // tie leaves a zero-flow (degenerate) basic cell behind.
        if (s[i] <= d[j] && i < m - 1) || j == n - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    basis
}

/// Dual potentials with `u_0 = 0` and `u_i + v_j = c_ij` on basic cells.
fn potentials(basis: &[Cell], m: usize, n: usize, cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let adj = tree_adjacency(basis, m, n);
    let mut pot = vec![f64::NAN; m + n];
    pot[0] = 0.0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(node) = queue.pop_front() {
        for &(next, cell) in &adj[node] {
            if pot[next].is_nan() {
                let c = cost[basis[cell].i][basis[cell].j];
                pot[next] = c - pot[node];
                queue.push_back(next);
            }
        }
    }
    (pot[..m].to_vec(), pot[m..].to_vec())
}

/// Nodes `0..m` are rows, `m..m+n` columns; edges carry the basis index.
fn tree_adjacency(basis: &[Cell], m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); m + n];
    for (k, c) in basis.iter().enumerate() {
        adj[c.i].push((m + c.j, k));
        adj[m + c.j].push((c.i, k));
    }
    adj
}

/// Brings cell `(ei, ej)` into the basis along its stepping-stone cycle.
fn pivot(basis: &mut [Cell], m: usize, n: usize, ei: usize, ej: usize) {
    let n_nodes = m + n;
    let adj = tree_adjacency(basis, m, n);
    // Tree path from column ej back to row ei.
    let target = ei;
    let start = m + ej;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n_nodes];
    let mut seen = vec![false; n_nodes];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == target {
            break;
        }
        for &(next, cell) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, cell));
                queue.push_back(next);
            }
        }
    }
    // Walk back from the row to the column; cells alternate -, +, -, ...
    // starting from the one adjacent to the entering column.
    let mut path = Vec::new();
    let mut node = target;
    while node != start {
        let (prev, cell) = parent[node].expect("basis is a spanning tree");
        path.push(cell);
        node = prev;
    }
    path.reverse();
    let mut theta = f64::INFINITY;
    let mut leaving = usize::MAX;
    for (k, &cell) in path.iter().enumerate() {
        if k % 2 == 0 && basis[cell].flow < theta {
            theta = basis[cell].flow;
            leaving = cell;
        }
    }
    for (k, &cell) in path.iter().enumerate() {
        if k % 2 == 0 {
            basis[cell].flow -= theta;
        } else {
            basis[cell].flow += theta;
        }
    }
    basis[leaving] = Cell {
        i: ei,
        j: ej,
        flow: theta,
    };
}
