//! Solver for two-player zero-sum concurrent stochastic games with reachability objectives.
//!
//! Values are bracketed from below by Bellman iteration and from above by Bellman iteration
//! combined with deflation of bloated end components, all in exact rational arithmetic.

pub mod bec;
pub mod bvi;
pub mod cli;
pub mod graph;
pub mod lp;
pub mod matrix_game;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod valuation;

pub use bec::{best_exit, classify_state, compute_hazard, compute_trap, deflate, exit_value, find_mbecs, BecError, DeflationEvent, StateClassification};
pub use bvi::{bvi, bvi_with, pre, run_lower, run_naive_upper, Arithmetic, BviResult, IterationRecord, Mode, RunConfig, Termination};
pub use graph::{find_mecs, is_ec};
pub use matrix_game::{GameSolution, MatrixGame};
pub use model::{compute_winning_region, normalize, parse_csg, Csg, ModelError, NormalizedCsg, StateRef};
pub use oracle::{oracle_value, OracleError};
pub use rational::{parse_rational, Rational};
pub use valuation::{parse_valuation, Provenance, Valuation, ValuationError};
