//! Configuration, command dispatch and export for the `minsurf4` binary.

pub mod config;
pub mod export;
pub mod run;

pub use config::RunConfig;
pub use run::{run, RunOptions, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
