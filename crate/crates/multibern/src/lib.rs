//! File formats, reports and the command-line front end for
//! [`multibern_core`].

pub mod cli;
pub mod model_io;
pub mod report;

pub use multibern_core as core;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] multibern_core::Error),
}
