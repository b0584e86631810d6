//! End-to-end experiments: test signals, noise, shrinkage in three
//! realization modes, shot sampling, ancilla experiments, hardware
//! surrogates and error metrics.

mod ancilla;
mod denoise;
mod hardware;
mod metrics;
mod rng;
mod sampling;
mod shrink;
mod signal;

pub use ancilla::{ancilla_flag_experiment, smooth_ancilla_experiment, FlagResult, SmoothAncillaResult};
pub use denoise::{denoise_classical, denoise_quantum, DenoiseReport, Denoised};
pub use hardware::{gamma_from_idle, idle_time_for_retention, randomized_z_shrink, HardwareModel};
pub use metrics::{metrics, mse, Metrics};
pub use rng::{stream_rng, substream_seed};
pub use sampling::{measure_expectation_x, measure_x, ShotResult};
pub use shrink::{scope_mask, shrink_coefficients, ShrinkOutcome, ShrinkMode};
pub use signal::{add_noise, doppler, sample_sd, NoisySignal, NoisySignalSpec, SignalName};

use thiserror::Error;

use crate::channels::ChannelError;
use crate::policies::{PolicyError, PolicyKind};
use crate::state::StateError;
use crate::wavelet::WaveletError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("signal length {got} below minimum {min}")]
    TooShort { min: usize, got: usize },
    #[error("parameter `{name}` = {value} invalid: {reason}")]
    BadParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("shot budget must be at least 1")]
    ZeroShots,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("policy {0:?} has no damping parameter and cannot drive a channel")]
    NotRealizable(PolicyKind),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

pub(crate) fn check_shots(shots: u64) -> Result<(), PipelineError> {
    if shots == 0 {
        return Err(PipelineError::ZeroShots);
    }
    Ok(())
}
