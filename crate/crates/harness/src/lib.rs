//! Runs, sweeps, fits, traces and space-time diagrams on top of `bhs-core`.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod fit;
pub mod runner;
pub mod schedule;
pub mod sweep;
pub mod trace;

pub use error::{HarnessError, Result};
