//! Batch front end: JSON instance specifications in, JSON reports and CSV
//! series out.

pub mod instance;
pub mod output;
pub mod pipeline;
pub mod sweep;

pub use instance::{Analysis, Instance, InstanceSpec, SpecError};
pub use pipeline::{run_instance, RunOutput, RunReport};

/// All requested verifications held.
pub const EXIT_OK: i32 = 0;
/// A verification failed; witnesses are in the report.
pub const EXIT_FAILED: i32 = 1;
/// The specification or command line was invalid.
pub const EXIT_SPEC: i32 = 2;
