//! Finite-difference solver for the stationary two-density spatial
//! segregation problem: minimize `sum_i integral |grad u_i|^2 / 2 + f_i u_i`
//! over nonnegative `u1, u2` with `u1 * u2 = 0` and Dirichlet data
//! `phi1, phi2`. Setting `v = u1 - u2` turns this into the two-phase membrane
//! problem `Laplace v = f1 [v > 0] - f2 [v < 0]`.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod error;
pub mod functional;
pub mod grid;
pub mod membrane;
pub mod oracle;
pub mod problem;
pub mod scalar;
pub mod solver;
pub mod study;

pub use error::{Error, Result};
pub use functional::{
    continuous_energy, discrete_energy, jp_sequence, EnergyBreakdown, JpSequence, JpTerm,
};
pub use grid::{apply_laplacian, discrete_laplacian, neighbor_average, Dim, IndexSet};
pub use membrane::{
    complementarity, error_vs_reference, free_boundary, ComplementarityReport, NodeClass,
};
pub use oracle::{analytic_1d_constant, minimize_discrete_energy};
pub use problem::{modified_dynamics, Density, Preset, PresetOptions, ProblemFile};
pub use scalar::Real;
pub use solver::{initialize, solve, solve_observed, sweep};

pub type Grid = grid::GridSpec<f64>;
pub type Field = grid::ScalarField<f64>;
pub type Problem = problem::ProblemSpec<f64>;
pub type BoundaryTrace = problem::BoundaryTrace<f64>;
pub type DynamicsField = problem::DynamicsField<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolverState = solver::SolverState<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type FreeBoundarySet = membrane::FreeBoundarySet<f64>;
pub type OracleSolution = oracle::OracleSolution<f64>;
pub type AnalyticSolution = oracle::AnalyticSolution<f64>;
pub type RateTable = study::RateTable<f64>;
