//! Independent oracles shared by the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use interdiction::graph::{Edge, Node, NodeIndex, SecurityGraph};
use interdiction::payoff::{MatrixKind, PayoffMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Bounds from alternating fictitious play on a game whose row player
/// minimizes. `lower <= value <= upper` holds at every iteration.
#[derive(Debug, Clone, Copy)]
pub struct FpBounds {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl FpBounds {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Runs alternating fictitious play until the running-best bounds are
/// within `target` or `max_iterations` is reached.
pub fn fictitious_play(m: &[Vec<f64>], target: f64, max_iterations: usize) -> FpBounds {
    let (h, n) = (m.len(), m[0].len());
    // row_totals[i] = sum over column plays of m[i][j]
    let mut row_totals = vec![0.0; h];
    // col_totals[j] = sum over row plays of m[i][j]
    let mut col_totals = vec![0.0; n];
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut t = 0;
    while t < max_iterations {
        t += 1;
        let i = argmin(&row_totals);
        for (c, v) in col_totals.iter_mut().zip(&m[i]) {
            *c += v;
        }
        let j = argmax(&col_totals);
        for (r, row) in row_totals.iter_mut().zip(m) {
            *r += row[j];
        }
        let tf = t as f64;
        upper = upper.min(col_totals[argmax(&col_totals)] / tf);
        lower = lower.max(row_totals[argmin(&row_totals)] / tf);
        if upper - lower <= target {
            break;
        }
    }
    FpBounds {
        lower,
        upper,
        iterations: t,
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Solves a square system by Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Equilibrium found by enumerating equal-size supports.
#[derive(Debug, Clone)]
pub struct SupportEquilibrium {
    pub value: f64,
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

/// Searches supports of size up to `max_support` for a saddle point of a
/// game whose row player minimizes. Returns `None` if no equilibrium with
/// such supports exists.
pub fn support_enumeration(m: &[Vec<f64>], max_support: usize) -> Option<SupportEquilibrium> {
    let (h, n) = (m.len(), m[0].len());
    let tol = 1e-10;
    for k in 1..=max_support.min(h).min(n) {
        for rows in subsets(h, k) {
            for cols in subsets(n, k) {
                // unknowns: y on rows, then v; columns in `cols` are indifferent
                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (r, &j) in cols.iter().enumerate() {
                    for (c, &i) in rows.iter().enumerate() {
                        a[r][c] = m[i][j];
                    }
                    a[r][k] = -1.0;
                }
                a[k][..k].fill(1.0);
                b[k] = 1.0;
                let Some(ys) = solve_linear(a, b) else { continue };

                let mut a = vec![vec![0.0; k + 1]; k + 1];
                let mut b = vec![0.0; k + 1];
                for (r, &i) in rows.iter().enumerate() {
                    for (c, &j) in cols.iter().enumerate() {
                        a[r][c] = m[i][j];
                    }
                    a[r][k] = -1.0;
                }
                a[k][..k].fill(1.0);
                b[k] = 1.0;
                let Some(xs) = solve_linear(a, b) else { continue };

                if ys[..k].iter().chain(&xs[..k]).any(|p| *p < -tol) {
                    continue;
                }
                let v = ys[k];
                if (v - xs[k]).abs() > 1e-9 {
                    continue;
                }
                let mut y = vec![0.0; h];
                for (c, &i) in rows.iter().enumerate() {
                    y[i] = ys[c].max(0.0);
                }
                let mut x = vec![0.0; n];
                for (c, &j) in cols.iter().enumerate() {
                    x[j] = xs[c].max(0.0);
                }
                let row_ok = (0..h).all(|i| (0..n).map(|j| m[i][j] * x[j]).sum::<f64>() >= v - tol);
                let col_ok = (0..n).all(|j| (0..h).map(|i| y[i] * m[i][j]).sum::<f64>() <= v + tol);
                if row_ok && col_ok {
                    return Some(SupportEquilibrium { value: v, y, x });
                }
            }
        }
    }
    None
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: f64) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect()
}

pub fn to_payoff(rows: &[Vec<f64>]) -> PayoffMatrix {
    PayoffMatrix::from_rows(MatrixKind::Generic, rows.to_vec()).unwrap()
}

/// Random DAG on `n` nodes with every edge `i -> j` satisfying `i < j`.
/// Node 0 is the origin and node `n - 1` the destination; every node has
/// an incoming and an outgoing edge so the graph validates.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, density: f64) -> SecurityGraph {
    assert!(n >= 2);
    let mut present = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            present[i][j] = rng.gen_bool(density);
        }
    }
    present[0][n - 1] |= n == 2;
    for v in 1..n - 1 {
        if !(0..v).any(|u| present[u][v]) {
            present[rng.gen_range(0..v)][v] = true;
        }
        if !(v + 1..n).any(|w| present[v][w]) {
            present[v][rng.gen_range(v + 1..n)] = true;
        }
    }
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("v{i}"),
            attack_probability: if i == 0 || i == n - 1 { 0.0 } else { rng.gen_range(0.0..=1.0) },
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if present[i][j] {
                edges.push(Edge {
                    from: NodeIndex(i),
                    to: NodeIndex(j),
                    time: rng.gen_range(1..=20) as f64,
                });
            }
        }
    }
    SecurityGraph::new(nodes, edges, NodeIndex(0), NodeIndex(n - 1)).unwrap()
}

/// Origin-to-destination paths of a DAG whose node indices are a
/// topological order, found by testing every subset of intermediate nodes.
pub fn brute_force_paths(graph: &SecurityGraph) -> BTreeSet<Vec<usize>> {
    let n = graph.node_count();
    let (o, d) = (graph.origin().index(), graph.destination().index());
    let inner: Vec<usize> = (0..n).filter(|&v| v != o && v != d).collect();
    let mut found = BTreeSet::new();
    for mask in 0u32..1 << inner.len() {
        let mut seq = vec![o];
        seq.extend(
            inner
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &v)| v),
        );
        seq.push(d);
        let connected = seq
            .windows(2)
            .all(|w| graph.edge_time(NodeIndex(w[0]), NodeIndex(w[1])).is_some());
        if connected {
            found.insert(seq);
        }
    }
    found
}

/// Arrival time at every node of a path by direct summation.
pub fn arrival_times(graph: &SecurityGraph, seq: &[usize]) -> Vec<f64> {
    let mut t = 0.0;
    let mut out = vec![0.0];
    for w in seq.windows(2) {
        t += graph.edge_time(NodeIndex(w[0]), NodeIndex(w[1])).unwrap();
        out.push(t);
    }
    out
}
