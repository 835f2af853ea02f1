//! Text front end for `ffq-core`: expression parsing and binding, subspace
//! files, experiment configs, a threaded chunk runner and the `ffq` command.

pub mod bind;
pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod runner;
pub mod subspace_io;

pub use bind::{parse_field, parse_ring_poly, Env};
pub use cli::run;
pub use error::{CliError, CliResult};
