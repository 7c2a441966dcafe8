//! The `tubal` command-line tool: generation, recovery, completion, phase
//! grids, table reruns and image/frame inpainting. Every command that
//! writes files also writes a `manifest.json` from which `tubal replay`
//! reproduces the outputs byte for byte.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod pnm;
pub mod report;

pub use args::{Cli, Command, Settings};
pub use commands::{run, RunOutput};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
