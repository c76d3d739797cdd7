//! Command-line front-end for `gaugeforge-core`: TOML configuration, deterministic
//! JSON/text reports and the acceptance suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod suite;
