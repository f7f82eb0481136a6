//! Checks and CLI.

pub mod checks;
pub mod cli;
pub mod io;
