//! Command-line front end: JSON problems, crossword puzzles, benchmarks
//! and instance generation.

pub mod args;
pub mod commands;
pub mod report;

pub use args::{Cli, Command, SearchArgs};
pub use report::{BenchEntry, Rendering, RunReport};

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const NO_SOLUTION: i32 = 2;
    pub const BUDGET: i32 = 3;
}
