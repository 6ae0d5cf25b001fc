//! Command-line front end for the `gpvortex` solvers: run specifications,
//! single solves, parameter sweeps and the reference benchmark tables.

pub mod bench;
pub mod cli;
pub mod error;
pub mod run;
pub mod runspec;
pub mod sweep;

pub use error::{CliError, Result};
pub use runspec::{RunSpec, Solver};
