//! Experiment harness for random ReLU-feature regression: configuration
//! parsing, seeded deterministic execution, parallel sweeps, diagnostics,
//! and the acceptance suite behind the `relulab` command-line tool.

pub mod acceptance;
pub mod config;
pub mod diagnose;
pub mod experiment;
pub mod stream;
pub mod sweep;
