//! Experiment runner: JSON configs in, CSV data, estimates, SVG overlays
//! and JSON reports out.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod suite;
pub mod verify;

pub use config::{ExperimentConfig, MethodName};
pub use error::{CliError, Result};
pub use pipeline::Experiment;
pub use suite::BuiltinProfile;
