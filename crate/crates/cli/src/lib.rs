//! Library side of the `scatlen` command: configuration, execution and
//! output encoding.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, RunOutput};
pub use config::{parse_config, Command, Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[from] scatlen_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 2,
        }
    }
}
