//! Payoff matrices over (path, node) pairs and mixed strategies.
//!
//! Rows are evader paths in canonical order, columns are nodes in document
//! order. The evader (row player) minimizes, the interdictor (column player)
//! maximizes.

mod prospect;

pub use prospect::{
    build_pt_matrix, prelec_weight, value_attacker, value_vendor, Player, ProspectParams,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{IncidenceMatrix, NodeIndex, Path, SecurityGraph};

/// Tolerance on the unit-sum constraint of a mixed strategy.
pub const SIMPLEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PayoffError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityDomain(f64),
    #[error("invalid prospect parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// Expected delivery time in minutes.
    Objective,
    VendorSubjective,
    AttackerSubjective,
    /// Any other user-supplied zero-sum game.
    Generic,
}

/// Dense row-major `H x N` payoff matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl PayoffMatrix {
    pub fn new(
        kind: MatrixKind,
        rows: usize,
        cols: usize,
        entries: Vec<f64>,
    ) -> Result<Self, PayoffError> {
        if rows == 0 || cols == 0 {
            return Err(PayoffError::DimensionMismatch(format!(
                "payoff matrix must be nonempty, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(PayoffError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(PayoffMatrix {
            kind,
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(kind: MatrixKind, rows: Vec<Vec<f64>>) -> Result<Self, PayoffError> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(PayoffError::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        let h = rows.len();
        Self::new(kind, h, cols, rows.into_iter().flatten().collect())
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> PayoffMatrix {
        PayoffMatrix {
            kind: self.kind,
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v + c).collect(),
        }
    }

    /// `M x`, one value per row.
    pub fn times_column(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|h| self.row(h).iter().zip(x).map(|(m, xi)| m * xi).sum())
            .collect()
    }

    /// `y^T M`, one value per column.
    pub fn row_times(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (h, &yh) in y.iter().enumerate() {
            for (o, m) in out.iter_mut().zip(self.row(h)) {
                *o += yh * m;
            }
        }
        out
    }
}

/// Probability vector over paths or nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, PayoffError> {
        if probabilities.is_empty() {
            return Err(PayoffError::InvalidStrategy("empty strategy".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(PayoffError::InvalidStrategy(format!(
                "entry {p} is not a nonnegative number"
            )));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(PayoffError::InvalidStrategy(format!(
                "entries sum to {sum}, expected 1"
            )));
        }
        Ok(MixedStrategy(probabilities))
    }

    /// Normalizes a nonnegative weight vector, zeroing round-off negatives.
    pub fn from_weights(weights: &[f64]) -> Result<Self, PayoffError> {
        let clean: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clean.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(PayoffError::InvalidStrategy(format!(
                "weights sum to {total}"
            )));
        }
        Self::new(clean.into_iter().map(|w| w / total).collect())
    }

    pub fn pure(len: usize, index: usize) -> Self {
        let mut v = vec![0.0; len];
        v[index] = 1.0;
        MixedStrategy(v)
    }

    pub fn uniform(len: usize) -> Self {
        MixedStrategy(vec![1.0 / len as f64; len])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        self.support_above(0.0)
    }

    pub fn support_above(&self, threshold: f64) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > threshold).collect()
    }

    /// Index of the largest entry (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }
}

fn check_inputs(
    graph: &SecurityGraph,
    paths: &[Path],
    incidence: &IncidenceMatrix,
) -> Result<(), PayoffError> {
    if paths.is_empty() {
        return Err(PayoffError::DimensionMismatch(
            "no origin-to-destination paths".into(),
        ));
    }
    if incidence.rows() != paths.len() || incidence.cols() != graph.node_count() {
        return Err(PayoffError::DimensionMismatch(format!(
            "incidence is {}x{}, expected {}x{}",
            incidence.rows(),
            incidence.cols(),
            paths.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// Builds the expected-delivery-time matrix
/// `m[h][n] = l[h][n] * p_n * f_h(n) + f_h(D)`.
///
/// A successful attack at `n` costs the time already flown to `n`, after
/// which a replacement flies the full path unmolested.
pub fn build_objective_matrix(
    graph: &SecurityGraph,
    paths: &[Path],
    incidence: &IncidenceMatrix,
) -> Result<PayoffMatrix, PayoffError> {
    check_inputs(graph, paths, incidence)?;
    let n = graph.node_count();
    let mut entries = Vec::with_capacity(paths.len() * n);
    for (h, path) in paths.iter().enumerate() {
        let total = path.total_time();
        for node in 0..n {
            let entry = if incidence.get(h, node) {
                let reached = path
                    .arrival_time(NodeIndex(node))
                    .map_err(|e| PayoffError::DimensionMismatch(e.to_string()))?;
                graph.attack_probability(NodeIndex(node)) * reached + total
            } else {
                total
            };
            entries.push(entry);
        }
    }
    PayoffMatrix::new(MatrixKind::Objective, paths.len(), n, entries)
}

/// Bilinear form `y^T M x`.
pub fn expected_delivery_time(
    y: &MixedStrategy,
    x: &MixedStrategy,
    m: &PayoffMatrix,
) -> Result<f64, PayoffError> {
    if y.len() != m.rows() || x.len() != m.cols() {
        return Err(PayoffError::DimensionMismatch(format!(
            "strategies of length {} and {} against a {}x{} matrix",
            y.len(),
            x.len(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m
        .row_times(y.probabilities())
        .iter()
        .zip(x.probabilities())
        .map(|(a, b)| a * b)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_paths, incidence, parse_graph};

    fn builtin() -> (SecurityGraph, Vec<Path>, IncidenceMatrix) {
        let g = parse_graph(include_str!("../../data/paper_instance.json")).unwrap();
        let paths = enumerate_paths(&g);
        let l = incidence(&g, &paths);
        (g, paths, l)
    }

    #[test]
    fn objective_entry_on_first_path() {
        let (g, paths, l) = builtin();
        let m = build_objective_matrix(&g, &paths, &l).unwrap();
        let five = g.index_of("5").unwrap().index();
        // attack at 5 succeeds w.p. 0.4 after 9 minutes; full path is 31
        let oracle = 0.4 * (9.0 + 31.0) + 0.6 * 31.0;
        assert!((m.get(0, five) - 34.6).abs() < 1e-12);
        assert!((m.get(0, five) - oracle).abs() < 1e-12);
    }

    #[test]
    fn off_path_and_origin_columns_are_path_length() {
        let (g, paths, l) = builtin();
        let m = build_objective_matrix(&g, &paths, &l).unwrap();
        for (h, path) in paths.iter().enumerate() {
            assert_eq!(m.get(h, g.origin().index()), path.total_time());
            for n in 0..g.node_count() {
                if !l.get(h, n) {
                    assert_eq!(m.get(h, n), path.total_time());
                }
                assert!(m.get(h, n) >= path.total_time());
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (g, paths, l) = builtin();
        assert!(matches!(
            build_objective_matrix(&g, &paths[..3], &l),
            Err(PayoffError::DimensionMismatch(_))
        ));
        let m = build_objective_matrix(&g, &paths, &l).unwrap();
        let err = expected_delivery_time(&MixedStrategy::uniform(3), &MixedStrategy::uniform(10), &m);
        assert!(matches!(err, Err(PayoffError::DimensionMismatch(_))));
    }

    #[test]
    fn pure_strategies_select_an_entry() {
        let (g, paths, l) = builtin();
        let m = build_objective_matrix(&g, &paths, &l).unwrap();
        let t = expected_delivery_time(&MixedStrategy::pure(18, 7), &MixedStrategy::pure(10, 7), &m)
            .unwrap();
        assert_eq!(t, m.get(7, 7));
    }

    #[test]
    fn one_by_one_game() {
        let m = PayoffMatrix::from_rows(MatrixKind::Generic, vec![vec![7.0]]).unwrap();
        let u = MixedStrategy::uniform(1);
        assert_eq!(expected_delivery_time(&u, &u, &m).unwrap(), 7.0);
    }

    #[test]
    fn uniform_strategies_on_builtin_instance() {
        let (g, paths, l) = builtin();
        let m = build_objective_matrix(&g, &paths, &l).unwrap();
        let t = expected_delivery_time(&MixedStrategy::uniform(18), &MixedStrategy::uniform(10), &m)
            .unwrap();
        // independent double loop over the two-outcome form
        let mut oracle = 0.0;
        for path in &paths {
            let total: f64 = path.edge_times().iter().sum();
            for (i, node) in g.nodes().iter().enumerate() {
                let cell = match path.nodes().iter().position(|n| n.index() == i) {
                    Some(k) => {
                        let reached: f64 = path.edge_times()[..k].iter().sum();
                        let p = node.attack_probability;
                        p * (reached + total) + (1.0 - p) * total
                    }
                    None => total,
                };
                oracle += cell / 180.0;
            }
        }
        assert!((t - oracle).abs() < 1e-10);
        assert!((t - 31.943_333_333_333_33).abs() < 1e-9);
    }

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        let s = MixedStrategy::from_weights(&[2.0, -1e-15, 6.0]).unwrap();
        assert_eq!(s.probabilities(), &[0.25, 0.0, 0.75]);
        assert_eq!(s.support(), vec![0, 2]);
        assert_eq!(s.argmax(), 2);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(PayoffMatrix::from_rows(MatrixKind::Generic, vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PayoffMatrix::from_rows(MatrixKind::Generic, vec![]).is_err());
    }
}
