//! Named experiment recipes, their configuration, artifact writing and the
//! built-in invariant suite.

mod artifacts;
mod config;
mod recipes;
mod verify;

pub use artifacts::{write_atomic, Artifact};
pub use config::{ExperimentConfig, FigureId, FilterChoice, HardwareConfig, Resolved, DWT_EXAMPLE, EXAMPLE_VECTOR};
pub use recipes::{run_experiment, Check, RunOutput};
pub use verify::{verify, VerifyReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant violated: {name}: {detail}")]
    Invariant { name: String, detail: String },
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

macro_rules! compute_from {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::Compute(e.to_string())
            }
        }
    )*};
}

compute_from!(
    crate::pipeline::PipelineError,
    crate::wavelet::WaveletError,
    crate::state::StateError,
    crate::channels::ChannelError,
    crate::policies::PolicyError
);

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}
