//! Configuration, file formats and the command-line runner for `varexp`.

pub mod config;
pub mod csvio;
pub mod manifest;
pub mod plot;
pub mod runner;
pub mod suites;
