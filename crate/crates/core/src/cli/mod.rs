//! Batch front end: configuration, parameter sweeps and result tables.

pub mod config;
pub mod range;
pub mod report;
pub mod sweep;

pub use config::KvConfig;
pub use report::{emit_report, Format, Row, Table, Validity};
pub use sweep::{run_sweep, Command, SweepConfig};

use crate::Error;

/// Process exit status for a failure.
///
/// | code | failure |
/// |------|---------|
/// | 1 | I/O |
/// | 2 | configuration or parameter error |
/// | 3 | capacity solve infeasible or ill-posed |
/// | 4 | Monte Carlo budget exhausted |
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => 1,
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::InvalidGeometry(_)
        | Error::InvalidVariances(_) => 2,
        Error::Infeasible { .. } | Error::NotBracketed { .. } | Error::NonMonotone { .. } => 3,
        Error::McBudgetExceeded { .. } => 4,
    }
}
