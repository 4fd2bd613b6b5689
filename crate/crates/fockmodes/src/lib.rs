//! Std companion to `fockmodes-core`: ket expressions, unitary files,
//! reports, the reference-value suite and the `fockmodes` command line.

pub mod cli;
pub mod ket;
pub mod partition_arg;
pub mod report;
pub mod suite;
pub mod unitary_file;

pub use fockmodes_core as engine;
pub use ket::{format_state, parse_state, parse_state_raw, ParseError};
