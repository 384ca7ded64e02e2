//! Dense semidefinite feasibility and optimization.

mod ipm;
pub mod problem;
pub mod complex;
mod solve;

pub use problem::{BlockSpec, Constraint, Coord, Objective, SdpProblem, SdpSolution, Sense, SolveStatus, SolverOptions};
pub use solve::solve;
