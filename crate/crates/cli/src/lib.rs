//! Library half of the `fedcoalitions` command-line harness: instance
//! documents and random generation, end-to-end run reports, competition
//! sweeps, and DOT export. The binary in `main.rs` is a thin argument-parsing
//! shell over this crate so everything here is testable in-process.

pub mod dot;
pub mod error;
pub mod instance;
pub mod report;

pub use error::{CliError, EXIT_IO, EXIT_LIMIT, EXIT_VALIDATION};
pub use instance::{Instance, InstanceSpec, WeightDist};
pub use report::{
    partition_utility, run_instance, sweep, EngineOptions, RunReport, SweepConfig, SweepReport,
    VerifyPolicy,
};
