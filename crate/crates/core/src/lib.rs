//! Spectral Galerkin solvers for steady vortex states of rotating
//! Gross-Pitaevskii condensates coupled to a self-generated magnetic field.
//!
//! The crate is generic over the scalar type; [`GpProblem64`] and friends fix
//! it to `f64`, which every reference value is calibrated for.

pub mod brent;
pub mod error;
pub mod flow;
pub mod poisson;
pub mod ppncg;
pub mod problem;
pub mod result;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use flow::{
    asgf1_step, asgf2_step, gflm_step, run_flow, stabilization_shift, FlowConfig, FlowState,
    Inertia, Scheme,
};
pub use poisson::{solve_field, MagneticField, PoissonWorkspace};
pub use ppncg::{
    apply_preconditioner, cg_iterate, line_search_theta, momentum_beta, run_ppncg, saddle_escape,
    CgConfig, CgState, LineSearchConfig, Momentum, PerturbConfig,
};
pub use problem::{
    potential_lattice, Diagnostics, Evaluation, GpProblem, Model, ModelParams, Potential,
    WaveFunction,
};
pub use result::{HistoryRecord, InvariantReport, SolveStatus, SteadyStateResult};
pub use scalar::Real;

pub type GpProblem64 = GpProblem<f64>;
pub type ModelParams64 = ModelParams<f64>;
pub type WaveFunction64 = WaveFunction<f64>;
pub type FlowConfig64 = FlowConfig<f64>;
pub type CgConfig64 = CgConfig<f64>;
pub type SteadyStateResult64 = SteadyStateResult<f64>;

pub type GpProblem32 = GpProblem<f32>;
pub type ModelParams32 = ModelParams<f32>;
pub type WaveFunction32 = WaveFunction<f32>;
pub type FlowConfig32 = FlowConfig<f32>;
pub type CgConfig32 = CgConfig<f32>;
pub type SteadyStateResult32 = SteadyStateResult<f32>;
