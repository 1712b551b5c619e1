//! File formats, reports, diagrams and the command-line front end for
//! `tnkit-core`.
//!
//! Networks are stored as `tns-v1` JSON, mappings as `map-v1` JSON, scans as
//! CSV and diagrams as SVG 1.1. Every output names the generator version.

pub mod cli;
pub mod format;
pub mod render;
pub mod report;

pub const GENERATOR_VERSION: &str = concat!("tnkit ", env!("CARGO_PKG_VERSION"));

/// Overrides the dense-amplitude guard.
pub const MAX_AMPLITUDES_VAR: &str = "TNKIT_MAX_AMPLITUDES";

pub use cli::{exit_code, run, Cli, Failure};
