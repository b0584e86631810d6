//! Wavelet shrinkage realized with quantum operations.
//!
//! Orthogonal wavelet transforms become exact unitaries on amplitude-encoded
//! data; coefficient shrinkage becomes a CPTP channel (phase damping,
//! ancilla dilation, phase flips, weak measurement, feedback). A classical
//! pyramid transform with soft thresholding serves as the reference.

pub mod channels;
pub mod fmt;
pub mod pipeline;
pub mod policies;
pub mod runner;
pub mod state;
pub mod wavelet;
