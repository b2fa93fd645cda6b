//! Command-line front end, file formats and certificates for `gpi-core`.

pub mod certificate;
pub mod cli;
pub mod descriptor;
pub mod error;
pub mod triplet;

pub use cli::{run, Outcome};
pub use error::CliError;
