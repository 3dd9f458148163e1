//! Budget-optimal anonymous reward schemes for heterogeneous producers.
//!
//! A designer with budget `B` posts one reward function over observable
//! quality; producers of privately known types best-respond, and the
//! designer wants to maximize total quality. This crate computes the
//! optimal step scheme exactly ([`solver::solve_airs`]), evaluates the
//! simpler linear and output-proportional schemes for comparison
//! ([`schemes`]), provides small brute-force oracles for cross-checking
//! ([`oracles`]), and carries the subset-sum reduction showing that
//! general per-type cost functions make the design problem NP-hard
//! ([`hardness`]).

pub mod hardness;
pub mod model;
pub mod oracles;
pub mod report;
pub mod schemes;
pub mod solver;

pub use model::{CostFunction, Instance, InstanceSpec, StepRewardScheme};
pub use solver::{solve_airs, AirsSolution, SolveOptions, SolverError};
