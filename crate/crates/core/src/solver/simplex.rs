//! Dense two-phase primal simplex over nonnegative variables.
//!
//! Entering variables are chosen by Dantzig's rule (most negative reduced
//! cost, lowest index on ties). After a run of consecutive degenerate pivots
//! the phase switches to Bland's rule for the rest of that phase, which
//! rules out cycling. Ratio-test ties always go to the lowest basic
//! variable index, so a given problem always follows the same pivot path.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible (phase-one residual {0:e})")]
    Infeasible(f64),
    #[error("linear program is unbounded (entering column {0})")]
    Unbounded(usize),
    #[error("simplex exceeded the {0}-pivot limit")]
    IterationLimit(usize),
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `optimize c^T x` subject to row constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        LpProblem {
            direction,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coefficients: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coefficients,
            sense,
            rhs,
        });
        self
    }

    fn check(&self) -> Result<(), LpError> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.num_vars() {
                return Err(LpError::Dimension {
                    row,
                    got: c.coefficients.len(),
                    expected: self.num_vars(),
                });
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite("constraints"));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or sign bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = x.iter().map(|v| (-v).max(0.0));
        let rows = self.constraints.iter().map(|c| {
            let lhs: f64 = c.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.sense {
                Sense::Le => (lhs - c.rhs).max(0.0),
                Sense::Ge => (c.rhs - lhs).max(0.0),
                Sense::Eq => (lhs - c.rhs).abs(),
            }
        });
        bounds.chain(rows).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Smallest magnitude accepted as a pivot element.
    pub pivot_tolerance: f64,
    /// Feasibility and optimality tolerance.
    pub tolerance: f64,
    pub max_pivots: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_tolerance: 1e-10,
            tolerance: 1e-9,
            max_pivots: 10_000,
            degenerate_limit: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Whether Bland's rule was engaged at any point.
    pub used_bland: bool,
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    solve_lp_with(problem, &SimplexOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, options: &SimplexOptions) -> Result<LpSolution, LpError> {
    problem.check()?;
    let mut tableau = Tableau::build(problem);
    let mut stats = PivotStats::default();

    if tableau.num_artificial > 0 {
        let phase_one: Vec<f64> = (0..tableau.num_cols)
            .map(|j| if tableau.is_artificial(j) { 1.0 } else { 0.0 })
            .collect();
        tableau.optimize(&phase_one, false, options, &mut stats)?;
        let residual: f64 = tableau
            .basis
            .iter()
            .enumerate()
            .filter(|&(_, &j)| tableau.is_artificial(j))
            .map(|(i, _)| tableau.rhs(i))
            .sum();
        let scale = 1.0 + problem.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
        if residual > options.tolerance * scale {
            return Err(LpError::Infeasible(residual));
        }
        tableau.expel_artificials(options);
    }

    let sign = match problem.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut cost = vec![0.0; tableau.num_cols];
    for (c, &o) in cost.iter_mut().zip(&problem.objective) {
        *c = sign * o;
    }
    tableau.optimize(&cost, true, options, &mut stats)?;

    let mut x = vec![0.0; problem.num_vars()];
    for (i, &j) in tableau.basis.iter().enumerate() {
        if j < x.len() {
            x[j] = tableau.rhs(i).max(0.0);
        }
    }
    let objective = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots: stats.pivots,
        used_bland: stats.used_bland,
    })
}

#[derive(Debug, Default)]
struct PivotStats {
    pivots: usize,
    used_bland: bool,
}

/// Row-major tableau `[A | b]` in the current basis. Columns are laid out
/// as structural variables, then slack/surplus, then artificials.
struct Tableau {
    data: Vec<f64>,
    num_rows: usize,
    num_cols: usize,
    first_artificial: usize,
    num_artificial: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Tableau {
        let n = problem.num_vars();
        let m = problem.constraints.len();
        let num_slack = problem
            .constraints
            .iter()
            .filter(|c| c.sense != Sense::Eq)
            .count();
        // rows are flipped so every rhs is nonnegative; a row needs an
        // artificial unless it is a `<=` row after flipping
        let flipped: Vec<bool> = problem.constraints.iter().map(|c| c.rhs < 0.0).collect();
        let effective = |i: usize| {
            let s = problem.constraints[i].sense;
            match (s, flipped[i]) {
                (Sense::Le, true) => Sense::Ge,
                (Sense::Ge, true) => Sense::Le,
                _ => s,
            }
        };
        let num_artificial = (0..m).filter(|&i| effective(i) != Sense::Le).count();
        let num_cols = n + num_slack + num_artificial;
        let width = num_cols + 1;
        let mut data = vec![0.0; m * width];
        let mut basis = vec![0; m];

        let mut slack = n;
        let mut artificial = n + num_slack;
        for (i, c) in problem.constraints.iter().enumerate() {
            let sign = if flipped[i] { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for (r, a) in row.iter_mut().zip(&c.coefficients) {
                *r = sign * a;
            }
            row[num_cols] = sign * c.rhs;
            if c.sense != Sense::Eq {
                // slack for `<=`, surplus for `>=`, in the original orientation
                row[slack] = sign * if c.sense == Sense::Le { 1.0 } else { -1.0 };
                if effective(i) == Sense::Le {
                    basis[i] = slack;
                }
                slack += 1;
            }
            if effective(i) != Sense::Le {
                row[artificial] = 1.0;
                basis[i] = artificial;
                artificial += 1;
            }
        }

        Tableau {
            data,
            num_rows: m,
            num_cols,
            first_artificial: n + num_slack,
            num_artificial,
            basis,
        }
    }

    fn width(&self) -> usize {
        self.num_cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.num_cols)
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.first_artificial
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, j) in d.iter_mut().zip(0..self.num_cols) {
                    *dj -= cb * self.at(i, j);
                }
            }
        }
        d
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.data[row * w + col];
        for v in &mut self.data[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for i in (0..self.num_rows).filter(|&i| i != row) {
            let factor = self.data[i * w + col];
            if factor != 0.0 {
                for (v, pr) in self.data[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= factor * pr;
                }
                self.data[i * w + col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Minimizes `cost` from the current basic feasible solution.
    fn optimize(
        &mut self,
        cost: &[f64],
        exclude_artificial: bool,
        options: &SimplexOptions,
        stats: &mut PivotStats,
    ) -> Result<(), LpError> {
        let mut bland = false;
        let mut degenerate_run = 0;
        loop {
            let d = self.reduced_costs(cost);
            let candidates = (0..self.num_cols).filter(|&j| {
                !(exclude_artificial && self.is_artificial(j))
                    && !self.basis.contains(&j)
                    && d[j] < -options.tolerance
            });
            let entering = if bland {
                candidates.min()
            } else {
                candidates.fold(None, |best: Option<usize>, j| match best {
                    Some(b) if d[b] <= d[j] => Some(b),
                    _ => Some(j),
                })
            };
            let Some(col) = entering else {
                return Ok(());
            };

            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.num_rows {
                let a = self.at(i, col);
                if a > options.pivot_tolerance {
                    let ratio = self.rhs(i) / a;
                    leaving = match leaving {
                        Some((r, best))
                            if best < ratio
                                || (best == ratio && self.basis[r] < self.basis[i]) =>
                        {
                            Some((r, best))
                        }
                        _ => Some((i, ratio)),
                    };
                }
            }
            let Some((row, step)) = leaving else {
                return Err(LpError::Unbounded(col));
            };

            if stats.pivots >= options.max_pivots {
                return Err(LpError::IterationLimit(options.max_pivots));
            }
            self.pivot(row, col);
            stats.pivots += 1;

            if step <= options.tolerance {
                degenerate_run += 1;
                if degenerate_run >= options.degenerate_limit && !bland {
                    bland = true;
                    stats.used_bland = true;
                }
            } else {
                degenerate_run = 0;
            }
        }
    }

    /// Pivots zero-valued artificials out of the basis where a structural
    /// or slack column can replace them. Rows where none can are redundant
    /// and keep their artificial at zero.
    fn expel_artificials(&mut self, options: &SimplexOptions) {
        for i in 0..self.num_rows {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.at(i, j).abs() > options.pivot_tolerance);
            if let Some(j) = replacement {
                self.pivot(i, j);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn box_constrained_maximum() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 0.0], Sense::Le, 1.0)
            .constrain(vec![0.0, 1.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.x[0], 1.0) && close(s.x[1], 1.0));
        assert!(close(s.objective, 2.0));
    }

    #[test]
    fn lower_bound_minimum() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![1.0]);
        lp.constrain(vec![1.0], Sense::Ge, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 3.0));
    }

    #[test]
    fn single_cell_game_primal() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0]);
        lp.constrain(vec![5.0], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.x[0], 0.2) && close(s.objective, 0.2));
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + 2y  s.t. x + y = 4, x - y <= -2  -> x = 1, y = 3
        let mut lp = LpProblem::new(Direction::Minimize, vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 4.0)
            .constrain(vec![1.0, -1.0], Sense::Le, -2.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.x[0], 1.0) && close(s.x[1], 3.0), "{:?}", s.x);
        assert!(close(s.objective, 7.0));
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 2.0)
            .constrain(vec![2.0, 2.0], Sense::Eq, 4.0)
            .constrain(vec![1.0, 0.0], Sense::Le, 0.5);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 2.0));
        assert!(lp.max_violation(&s.x) < 1e-9);
    }

    #[test]
    fn infeasible_is_distinguished() {
        let mut lp = LpProblem::new(Direction::Minimize, vec![1.0]);
        lp.constrain(vec![1.0], Sense::Le, 1.0)
            .constrain(vec![1.0], Sense::Ge, 2.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Infeasible(_))));
    }

    #[test]
    fn unbounded_is_distinguished() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 0.0]);
        lp.constrain(vec![-1.0, 1.0], Sense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Unbounded(_))));
    }

    #[test]
    fn iteration_limit_is_distinguished() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 0.0], Sense::Le, 1.0)
            .constrain(vec![0.0, 1.0], Sense::Le, 1.0);
        let opts = SimplexOptions {
            max_pivots: 1,
            ..Default::default()
        };
        assert_eq!(solve_lp_with(&lp, &opts), Err(LpError::IterationLimit(1)));
    }

    #[test]
    fn dimension_errors() {
        let mut lp = LpProblem::new(Direction::Maximize, vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Sense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::Dimension { row: 0, .. })));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule
        let mut lp = LpProblem::new(Direction::Maximize, vec![0.75, -150.0, 0.02, -6.0]);
        lp.constrain(vec![0.25, -60.0, -0.04, 9.0], Sense::Le, 0.0)
            .constrain(vec![0.5, -90.0, -0.02, 3.0], Sense::Le, 0.0)
            .constrain(vec![0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0);
        let opts = SimplexOptions {
            degenerate_limit: 3,
            ..Default::default()
        };
        let s = solve_lp_with(&lp, &opts).unwrap();
        assert!(close(s.objective, 0.05), "{}", s.objective);
    }
}
