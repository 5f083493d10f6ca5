//! Command-line front end, JSON formats and acceptance suites for
//! `fibrum-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod verify;

pub use fibrum_core;
