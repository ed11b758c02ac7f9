//! Configuration, run loop, output files and overhead timing for the
//! `cvples` LES solver.

pub mod config;
pub mod error;
pub mod overhead;
pub mod run;
pub mod snapshot;

pub use config::{parse_config, parse_with_overrides, Case, RawConfig, RunConfig, OUTPUT_DIR_ENV};
pub use error::{Error, Result};
pub use overhead::{measure_overhead, OverheadRow};
pub use run::{run, RunOutcome, EXIT_BLOW_UP, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
