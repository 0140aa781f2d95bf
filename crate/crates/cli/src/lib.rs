//! Driver for the `cylspec` command: configuration, field files, slice
//! export and the benchmark harness.

pub mod bench;
pub mod config;
pub mod error;
pub mod export;
pub mod field;
pub mod run;

pub use config::{Overrides, Problem, RunConfig};
pub use error::{Error, Result};
pub use field::{read_field, write_field, FieldData};
pub use run::{run, Manifest};
