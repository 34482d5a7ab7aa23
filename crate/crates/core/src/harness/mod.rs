//! Sweep configuration, deterministic parallel execution and CSV output.

pub mod config;
pub mod csv;
pub mod selftest;
pub mod sweep;
pub mod validate;

pub use config::{parse_count, parse_k_db, Scheme, SweepConfig, XKind};
pub use csv::{parse_csv, to_csv_string, write_csv, HEADER};
pub use selftest::selftest_determinism;
pub use sweep::{resolve_workers, run_sweep, SweepRow};
pub use validate::{run_validation, Check};
