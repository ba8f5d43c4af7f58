//! Parameter sweeps, figure grids and oracle checks on top of `quench-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod spec;
pub mod table;

pub use commands::{run, Outcome};
pub use error::{Result, SweepError};
pub use spec::{Command, SweepSpec};
pub use table::{Cell, Table};
