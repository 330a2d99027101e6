//! Zero-sum matrix games solved through their linear-programming reduction.
//!
//! For a strictly positive matrix `M` (rows minimize, columns maximize):
//!
//! * the evader side maximizes `sum(y_hat)` s.t. `M^T y_hat <= 1`, and
//! * the interdictor side minimizes `sum(x_hat)` s.t. `M x_hat >= 1`.
//!
//! Both optima equal `mu = 1 / v` where `v` is the game value, and the
//! mixed strategies are the normalized LP solutions `y = y_hat / mu`,
//! `x = x_hat / mu`. Matrices with nonpositive entries are shifted by a
//! constant first; the value is shifted back afterwards.

pub mod simplex;

use thiserror::Error;

use crate::payoff::{MixedStrategy, PayoffError, PayoffMatrix};
pub use simplex::{
    solve_lp, solve_lp_with, Constraint, Direction, LpError, LpProblem, LpSolution, Sense,
    SimplexOptions,
};

/// Bound on exploitability and on the primal/dual value gap (relative to
/// `max(1, |value|)`) for a solution to count as certified.
pub const CERTIFICATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("{side} linear program failed: {source}")]
    Lp {
        side: &'static str,
        #[source]
        source: LpError,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("solution failed certification: {0}")]
    Certification(String),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
}

/// Adds `c = 1 - min(M)` to every entry when `min(M) <= 0`, so that all
/// entries are at least 1; returns the matrix unchanged with `c = 0` otherwise.
pub fn shift_positive(m: &PayoffMatrix) -> (PayoffMatrix, f64) {
    let min = m.min_entry();
    if min > 0.0 {
        (m.clone(), 0.0)
    } else {
        let c = 1.0 - min;
        (m.shifted(c), c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// `y^T M x`.
    pub payoff: f64,
    /// How much the row player gains by the best pure deviation.
    pub evader_gap: f64,
    /// How much the column player gains by the best pure deviation.
    pub interdictor_gap: f64,
    pub exploitability: f64,
    pub certified: bool,
}

/// Measures how far `(y, x)` is from a saddle point of `M`.
pub fn verify_equilibrium(
    m: &PayoffMatrix,
    y: &MixedStrategy,
    x: &MixedStrategy,
    eps: f64,
) -> Result<EquilibriumReport, SolveError> {
    if y.len() != m.rows() || x.len() != m.cols() {
        return Err(SolveError::DimensionMismatch(format!(
            "strategies of length {} and {} against a {}x{} matrix",
            y.len(),
            x.len(),
            m.rows(),
            m.cols()
        )));
    }
    let row_payoffs = m.times_column(x.probabilities());
    let col_payoffs = m.row_times(y.probabilities());
    let payoff: f64 = row_payoffs
        .iter()
        .zip(y.probabilities())
        .map(|(r, p)| r * p)
        .sum();
    let best_row = row_payoffs.iter().copied().fold(f64::INFINITY, f64::min);
    let best_col = col_payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let evader_gap = (payoff - best_row).max(0.0);
    let interdictor_gap = (best_col - payoff).max(0.0);
    let exploitability = evader_gap.max(interdictor_gap);
    Ok(EquilibriumReport {
        payoff,
        evader_gap,
        interdictor_gap,
        exploitability,
        certified: exploitability <= eps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameSolution {
    /// Evader (row) strategy.
    pub y: MixedStrategy,
    /// Interdictor (column) strategy.
    pub x: MixedStrategy,
    pub value: f64,
    /// `1 / mu_primal - shift`.
    pub value_primal: f64,
    /// `1 / mu_dual - shift`.
    pub value_dual: f64,
    /// Optimum of the evader LP, `sum(y_hat)`.
    pub mu_primal: f64,
    /// Optimum of the interdictor LP, `sum(x_hat)`.
    pub mu_dual: f64,
    pub exploitability: f64,
    pub shift: f64,
    pub pivots_primal: usize,
    pub pivots_dual: usize,
}

/// Solves `min_y max_x y^T M x` and its max-min counterpart and certifies
/// the resulting pair as a saddle point.
pub fn solve_zero_sum(m: &PayoffMatrix) -> Result<GameSolution, SolveError> {
    let (shifted, shift) = shift_positive(m);
    let (h, n) = (m.rows(), m.cols());

    let mut evader = LpProblem::new(Direction::Maximize, vec![1.0; h]);
    for col in 0..n {
        let coeffs = (0..h).map(|row| shifted.get(row, col)).collect();
        evader.constrain(coeffs, Sense::Le, 1.0);
    }
    let primal = solve_lp(&evader).map_err(|source| SolveError::Lp {
        side: "evader",
        source,
    })?;

    let mut interdictor = LpProblem::new(Direction::Minimize, vec![1.0; n]);
    for row in 0..h {
        interdictor.constrain(shifted.row(row).to_vec(), Sense::Ge, 1.0);
    }
    let dual = solve_lp(&interdictor).map_err(|source| SolveError::Lp {
        side: "interdictor",
        source,
    })?;

    let mu_primal: f64 = primal.x.iter().sum();
    let mu_dual: f64 = dual.x.iter().sum();
    let y = MixedStrategy::from_weights(&primal.x)?;
    let x = MixedStrategy::from_weights(&dual.x)?;
    let value_primal = 1.0 / mu_primal - shift;
    let value_dual = 1.0 / mu_dual - shift;
    let value = value_primal;

    let scale = value.abs().max(1.0);
    if (value_primal - value_dual).abs() > CERTIFICATION_TOLERANCE * scale {
        return Err(SolveError::Certification(format!(
            "primal value {value_primal} and dual value {value_dual} disagree"
        )));
    }
    let report = verify_equilibrium(m, &y, &x, CERTIFICATION_TOLERANCE)?;
    if !report.certified {
        return Err(SolveError::Certification(format!(
            "exploitability {:e} exceeds {:e}",
            report.exploitability, CERTIFICATION_TOLERANCE
        )));
    }

    Ok(GameSolution {
        y,
        x,
        value,
        value_primal,
        value_dual,
        mu_primal,
        mu_dual,
        exploitability: report.exploitability,
        shift,
        pivots_primal: primal.pivots,
        pivots_dual: dual.pivots,
    })
}

/// Security strategies of two players who each evaluate the game through
/// their own matrix. No saddle-point relation holds between the two.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityStrategies {
    /// Min-max solution of the vendor's matrix.
    pub vendor: GameSolution,
    /// Max-min solution of the attacker's matrix.
    pub attacker: GameSolution,
}

impl SecurityStrategies {
    pub fn vendor_strategy(&self) -> &MixedStrategy {
        &self.vendor.y
    }

    pub fn attacker_strategy(&self) -> &MixedStrategy {
        &self.attacker.x
    }
}

pub fn solve_pt_security(
    m_vendor: &PayoffMatrix,
    m_attacker: &PayoffMatrix,
) -> Result<SecurityStrategies, SolveError> {
    if m_vendor.rows() != m_attacker.rows() || m_vendor.cols() != m_attacker.cols() {
        return Err(SolveError::DimensionMismatch(format!(
            "vendor matrix is {}x{}, attacker matrix is {}x{}",
            m_vendor.rows(),
            m_vendor.cols(),
            m_attacker.rows(),
            m_attacker.cols()
        )));
    }
    Ok(SecurityStrategies {
        vendor: solve_zero_sum(m_vendor)?,
        attacker: solve_zero_sum(m_attacker)?,
    })
}
