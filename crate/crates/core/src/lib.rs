//! Simulation and verification core for black hole search by three mobile
//! agents on dynamic rings (at most one edge missing per round).
//!
//! `no_std` with `alloc`; the companion harness crate adds the CLI and file
//! formats.
#![no_std]

extern crate alloc;

pub mod adversary;
pub mod algo;
pub mod checker;
pub mod comm;
pub mod error;
pub mod kernel;
pub mod ring;
pub mod sim;
pub mod world;

pub use error::Error;
