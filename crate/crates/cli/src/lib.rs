//! Declarative experiment runner over the `swipt_core` models.
//!
//! A spec file names an experiment kind, a sweep axis, fixed parameters,
//! and the engines to run (closed-form, Monte Carlo, or both); the runner
//! writes one CSV per spec plus a standalone gnuplot script. Binary entry
//! point: `expcli`.

// Validation uses negated comparisons (`!(x > 0.0)`) so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvout;
pub mod errors;
pub mod plot;
pub mod runner;
pub mod selftest;
pub mod spec;

pub use errors::CliError;
pub use runner::{run_experiment, RunOutcome};
pub use spec::{unit_convert, Engine, ExperimentKind, ExperimentSpec};
