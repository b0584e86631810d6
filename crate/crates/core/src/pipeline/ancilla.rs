use serde::{Deserialize, Serialize};

use super::sampling::measure_z;
use super::{check_shots, PipelineError, ShotResult};
use crate::policies::smooth_ancilla_probability;
use crate::state::{expectation_encode, gates, DensityMatrix, StateError, StateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagResult {
    /// Estimated `P(flag = 1)` per coefficient.
    pub probabilities: Vec<f64>,
    /// `|d_i| > λ`.
    pub indicator: Vec<bool>,
    pub shots: Vec<ShotResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothAncillaResult {
    /// Estimated excitation probability `p̂_i` of the ancilla.
    pub probabilities: Vec<f64>,
    /// `sin²(π|d_i|/2)`.
    pub exact: Vec<f64>,
    /// `⟨Z⟩` of the ancilla, `1 − 2p̂_i`.
    pub z_ancilla: Vec<f64>,
    /// `p̂_i · d_i`.
    pub shrunk: Vec<f64>,
    pub shots: Vec<ShotResult>,
}

fn check_unit(d: &[f64]) -> Result<(), PipelineError> {
    match d.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
        Some(v) => Err(StateError::OutOfRange(*v).into()),
        None => Ok(()),
    }
}

/// Data qubit 0 holds `d`, ancilla qubit 1 starts in `|0⟩`; `rotate` acts
/// on the ancilla, which is then measured.
fn run_ancilla(
    d: f64,
    rotate: Option<nalgebra::DMatrix<crate::state::C64>>,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<ShotResult, PipelineError> {
    let joint = StateVector::basis(1, 0)?.tensor(&expectation_encode(d)?)?;
    let joint = match rotate {
        Some(u) => joint.apply_unitary(&u, &[1])?,
        None => joint,
    };
    let ancilla: DensityMatrix = joint.to_density().partial_trace(&[1])?;
    measure_z(&ancilla, shots, seed, stream)
}

/// Flips the ancilla whenever `|d_i| > λ` and samples it.
pub fn ancilla_flag_experiment(d: &[f64], lambda: f64, shots: u64, seed: u64) -> Result<FlagResult, PipelineError> {
    check_shots(shots)?;
    check_unit(d)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(PipelineError::BadParameter { name: "lambda", value: lambda, reason: "must lie in (0, 1)" });
    }
    let mut out = FlagResult { probabilities: vec![], indicator: vec![], shots: vec![] };
    for (i, &v) in d.iter().enumerate() {
        let flag = v.abs() > lambda;
        let r = run_ancilla(v, flag.then(gates::x), shots, seed, i as u64)?;
        out.probabilities.push(r.frequency_one());
        out.indicator.push(flag);
        out.shots.push(r);
    }
    Ok(out)
}

/// Rotates the ancilla by `θ_i = π|d_i|` about X and samples its excitation.
pub fn smooth_ancilla_experiment(d: &[f64], shots: u64, seed: u64) -> Result<SmoothAncillaResult, PipelineError> {
    check_shots(shots)?;
    check_unit(d)?;
    let mut out = SmoothAncillaResult { probabilities: vec![], exact: vec![], z_ancilla: vec![], shrunk: vec![], shots: vec![] };
    for (i, &v) in d.iter().enumerate() {
        let theta = std::f64::consts::PI * v.abs();
        let r = run_ancilla(v, Some(gates::exp_x(theta / 2.0)), shots, seed, i as u64)?;
        let p = r.frequency_one();
        out.probabilities.push(p);
        out.exact.push(smooth_ancilla_probability(v)?);
        out.z_ancilla.push(r.expectation_z());
        out.shrunk.push(p * v);
        out.shots.push(r);
    }
    Ok(out)
}
