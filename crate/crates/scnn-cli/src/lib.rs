//! Command-line front end: training, encoding, and the experiment runners.
//! Commands live here as library functions so integration tests can drive
//! them in-process.

pub mod commands;
pub mod csvout;
pub mod grid;
