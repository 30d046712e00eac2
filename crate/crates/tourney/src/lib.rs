//! Command-line front end for `tourney-core`: scenario files, text
//! tables, JSON/CSV output and a Rayon-backed executor.

pub mod cli;
pub mod error;
pub mod output;
pub mod parallel;
pub mod replicate;
pub mod scenario;

pub use crate::error::CliError;
pub use crate::parallel::Rayon;
pub use crate::scenario::{parse_scenario, parse_scenario_str, Scenario};
