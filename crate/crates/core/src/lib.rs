//! Inverse filtering of graph signals on spatially distributed networks.
//!
//! The crate provides graphs with hop-bounded neighborhoods, sparse graph
//! filters that track their geodesic-width, locally computable diagonal
//! preconditioners, centralized iterative inverse-filtering solvers and a
//! bulk-synchronous simulator that runs the same iterations at vertex level
//! under a communication-range constraint.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod design;
pub mod error;
pub mod filter;
pub mod graph;
pub mod instances;
pub mod io;
pub mod laplacian;
pub mod precond;
pub mod sdn;
pub mod seed;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use filter::{GraphFilter, Signal};
pub use graph::{Graph, HopNeighborhood, Point};
pub use laplacian::Laplacians;
pub use precond::{
    build_pgda_preconditioner, build_spgda_preconditioner, check_dominance, normalized_filter, DiagonalPreconditioner,
    DominanceMode, DominanceReport, PreconditionerKind,
};
pub use sdn::{AgentState, Network, RoundLog};
pub use solver::{
    direct_solve_oracle, iteration_matrix, solve, IterationParams, Method, Solution, SolveStatus, SolveTrace,
    SolverConfig,
};
pub use spectral::{extreme_singular_values, power_spectral_radius, LinearOperator, PowerConfig};
