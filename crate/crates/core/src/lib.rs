//! Network interdiction games between a path-choosing evader and a
//! node-choosing interdictor on a directed danger-point graph.
//!
//! The evader (a delivery vendor) picks a mixed strategy over simple
//! origin-to-destination paths to minimize expected delivery time; the
//! interdictor picks a mixed strategy over nodes to maximize it. A
//! successful attack at node `n` of path `h` wastes the time already flown
//! to `n`, after which a replacement flies the whole path again.
//!
//! The crate provides:
//!
//! * [`graph`]: graph parsing, simple path enumeration, arrival times and
//!   the path-node incidence matrix;
//! * [`payoff`]: the objective payoff matrix and prospect-theoretic
//!   subjective matrices (Prelec weighting plus reference-dependent value
//!   functions);
//! * [`solver`]: a dense simplex LP kernel, the LP reduction of zero-sum
//!   matrix games, equilibrium certification and security strategies;
//! * [`experiments`]: a configurable harness for sweeps and CSV output.
//!
//! ```
//! use interdiction::experiments::builtin_paper_instance;
//! use interdiction::graph::incidence;
//! use interdiction::payoff::build_objective_matrix;
//! use interdiction::solver::solve_zero_sum;
//!
//! let (graph, paths) = builtin_paper_instance();
//! let l = incidence(&graph, &paths);
//! let m = build_objective_matrix(&graph, &paths, &l).unwrap();
//! let solution = solve_zero_sum(&m).unwrap();
//! assert!(solution.exploitability <= 1e-6);
//! assert!((solution.value - 1.0 / solution.mu_primal).abs() < 1e-9);
//! ```

pub mod experiments;
pub mod graph;
pub mod payoff;
pub mod solver;
