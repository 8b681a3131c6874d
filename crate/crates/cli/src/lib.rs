//! Scenario ingestion, command dispatch, and report emission for the
//! redukit toolkit. The binary in this crate is a thin argument parser over
//! [`commands::run_command`]; tests drive the same entry point.

pub mod commands;
pub mod context;
pub mod report;
pub mod scenario;
