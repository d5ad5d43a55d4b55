//! Smooth gauge dual of `minimize κ(x) + α‖x‖ subject to ρ(b − Ax) ≤ σ`,
//! solved by projected gradient with primal recovery, and the Lagrange-dual
//! Moreau-smoothing baseline.

mod instance;
mod problem;
mod solver;

pub use instance::{generate_sparse_instance, MatrixData, ProblemInstance, SparseInstance};
pub use problem::{dual_objective, DualEvaluation, GaugeDualProblem, ResidualGauge};
pub use solver::{
    solve_gauge_dual, solve_lagrange_baseline, SolveMethod, SolveReport, SolverOptions,
};
