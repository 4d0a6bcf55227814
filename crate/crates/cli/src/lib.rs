//! Config-driven front end for the `qcx` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod families;

pub use commands::{run_command, Command, CommandError, Options, Outcome, Status};
