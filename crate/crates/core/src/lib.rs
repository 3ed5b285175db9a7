//! Distribution functions of continuous piecewise-deterministic Markov processes.
//!
//! A process follows `dx/dt = A_s(x)` while in state `s`, leaves that state after an
//! exponential holding time with rate `μ_s`, and picks its next state from column `s`
//! of a stochastic jump matrix. This crate provides:
//!
//! - [`expr`]: the drift expression language,
//! - [`model`]: model definition, validation and the generator `Q`,
//! - [`grid`] and [`solver`]: the upwind scheme for the per-state distribution
//!   functions, with its CFL bound,
//! - [`mc`]: reproducible Monte Carlo ensembles of the same process,
//! - [`analysis`]: monotonicity, conservation, norm, KS and convergence checks,
//! - [`export`]: CSV output.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below are the usual entry points.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod export;
pub mod expr;
pub mod grid;
pub mod mc;
pub mod model;
pub mod scalar;
pub mod solver;

pub use analysis::{
    check_conservation, check_monotone, convergence_order, error_growth, ks_distance, stochastic_norm_check,
    CheckReport, ConvergenceReport, ConvergenceStudy,
};
pub use expr::{DriftExpr, Expr};
pub use grid::{build_grid, Grid, Resolution};
pub use mc::{run_ensemble, run_ensemble_with_threads, PathConfig, SampleEnsemble};
pub use model::{equilibrium_domain, generator_matrix, validate_model, Domain, GeneratorMatrix, JumpMatrix, ModelSpec};
pub use scalar::Real;
pub use solver::{
    cfl_max_dt, density, init_cauchy, marginal_step, solve, total_cdf, CflBound, CflPolicy, FieldState,
    InitialCondition, MarginalState, SolveOptions, Stepper, Trajectory,
};

pub type ModelSpec64 = ModelSpec<f64>;
pub type JumpMatrix64 = JumpMatrix<f64>;
pub type GeneratorMatrix64 = GeneratorMatrix<f64>;
pub type Grid64 = Grid<f64>;
pub type FieldState64 = FieldState<f64>;
pub type MarginalState64 = MarginalState<f64>;
pub type InitialCondition64 = InitialCondition<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type SampleEnsemble64 = SampleEnsemble<f64>;

pub type ModelSpec32 = ModelSpec<f32>;
pub type Grid32 = Grid<f32>;
pub type FieldState32 = FieldState<f32>;
pub type InitialCondition32 = InitialCondition<f32>;
pub type SampleEnsemble32 = SampleEnsemble<f32>;
