//! Command-line front end for the password-keyed cipher and QR codec.

pub mod app;
pub mod render;

pub use app::{run, Cli, CliError};
pub use render::{parse_matrix, render, ParseError, RenderFormat};
