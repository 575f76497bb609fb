//! Command-line front end: file formats, instance generation and dispatch.

mod app;
pub mod files;
pub mod generate;

pub use app::{
    run, EXIT_GUARD, EXIT_INFEASIBLE, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_VERIFY_FAILED, INEXACT_TOLERANCE,
};
