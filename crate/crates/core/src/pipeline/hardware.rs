use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_shots, stream_rng, PipelineError};
use crate::state::{gates, StateError, StateVector};

/// Idle-qubit surrogate with dephasing time `t2` (microseconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareModel {
    pub t2: f64,
    pub shots: u64,
    pub seed: u64,
}

impl HardwareModel {
    pub fn new(t2: f64, shots: u64, seed: u64) -> Result<Self, PipelineError> {
        let model = Self { t2, shots, seed };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.t2 > 0.0 && self.t2.is_finite()) {
            return Err(PipelineError::BadParameter { name: "T2", value: self.t2, reason: "must be finite and > 0" });
        }
        Ok(())
    }
}

/// Idle time `t = −T₂ ln s` that leaves coherence retention `s`.
pub fn idle_time_for_retention(s: f64, model: &HardwareModel) -> Result<f64, PipelineError> {
    model.validate()?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(PipelineError::BadParameter { name: "s", value: s, reason: "must lie in (0, 1]" });
    }
    // -0.0 for s = 1 would print as "-0".
    Ok((-model.t2 * s.ln()).max(0.0))
}

/// `γ = 1 − exp(−2t/T₂)`.
pub fn gamma_from_idle(t: f64, model: &HardwareModel) -> Result<f64, PipelineError> {
    model.validate()?;
    if t.is_nan() || t < 0.0 {
        return Err(PipelineError::BadParameter { name: "t", value: t, reason: "must be >= 0" });
    }
    Ok(-(-2.0 * t / model.t2).exp_m1())
}

/// Per shot: apply `Z` with probability `γ`, then measure `X`. Returns the
/// mean of the ±1 outcomes.
pub fn randomized_z_shrink(psi: &StateVector, gamma: f64, shots: u64, seed: u64) -> Result<f64, PipelineError> {
    check_shots(shots)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(PipelineError::BadParameter { name: "gamma", value: gamma, reason: "must lie in [0, 1]" });
    }
    if psi.qubits() != 1 {
        return Err(StateError::NotSingleQubit(psi.qubits()).into());
    }
    let p_minus = |state: &StateVector| -> Result<f64, PipelineError> {
        let rotated = state.apply_unitary(&gates::hadamard(), &[0])?;
        Ok(rotated.amps()[1].norm_sqr())
    };
    let plain = p_minus(psi)?;
    let flipped = p_minus(&psi.apply_unitary(&gates::z(), &[0])?)?;
    let mut rng = stream_rng(seed, 0);
    let mut total: i64 = 0;
    for _ in 0..shots {
        let p1 = if rng.random_bool(gamma) { flipped } else { plain };
        total += if rng.random::<f64>() < p1 { -1 } else { 1 };
    }
    Ok(total as f64 / shots as f64)
}
