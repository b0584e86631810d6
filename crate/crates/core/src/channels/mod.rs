//! CPTP maps as Kraus sets, their ancilla dilations, and the shrinkage
//! channels built from them.

mod dilation;
mod hybrid;
mod kraus;

pub use dilation::{
    ancilla_dilation, ancilla_shrink_dilation, dilate_apply_trace, kraus_from_dilation,
    DilationUnitary, RetentionVector,
};
pub use hybrid::{
    feedback_map, mixing_effective_coefficients, mixing_first_order, mixing_unitary,
    WeakMeasurement, WeakOutcome,
};
pub use kraus::{
    amplitude_damping, ancilla_shrink_channel, apply_channel, phase_damping, phase_flip,
    retention_for_multiplier, ChannelJson, KrausChannel, KRAUS_TOL,
};

use thiserror::Error;

use crate::state::StateError;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("Kraus completeness violated: ||sum K^dag K - I||_F = {0:e}")]
    Incomplete(f64),
    #[error("measurement set incomplete: ||sum M^dag M - I||_F = {0:e}")]
    IncompleteMeasurement(f64),
    #[error("operator is not unitary: ||U^dag U - I||_F = {0:e}")]
    NonUnitary(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is not trace preserving on this input (trace {0}); enable renormalization")]
    TraceNotPreserved(f64),
    #[error("empty operator list")]
    Empty,
    #[error("mixing needs at least two qubits, got {0}")]
    TooFewQubits(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    State(#[from] StateError),
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(ChannelError::OutOfRange { name, value });
    }
    Ok(())
}
