//! Configuration, verification suites and sweeps driven by the `podles` CLI.

pub mod config;
pub mod sweep;
pub mod verify;

pub use config::SweepConfig;
pub use sweep::{run_sweep, write_csv, CSV_HEADER};
pub use verify::{run_verify, VerificationOutcome};
