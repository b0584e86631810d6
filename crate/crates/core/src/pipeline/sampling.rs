use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{check_shots, stream_rng, PipelineError};
use crate::state::{gates, DensityMatrix, StateError, StateVector};

/// Probabilities this close to 0 or 1 are rounding noise and are snapped.
const SNAP: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotResult {
    /// Outcome bitstring to count.
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
}

impl ShotResult {
    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    /// `(n₀ − n₁)/shots`.
    pub fn expectation_z(&self) -> f64 {
        (self.count("0") as f64 - self.count("1") as f64) / self.shots as f64
    }

    /// `n₁/shots`.
    pub fn frequency_one(&self) -> f64 {
        self.count("1") as f64 / self.shots as f64
    }
}

fn snap(p: f64) -> f64 {
    if p < SNAP {
        0.0
    } else if p > 1.0 - SNAP {
        1.0
    } else {
        p
    }
}

/// Number of `1` outcomes in `shots` draws with `P(1) = p1`.
pub(crate) fn draw_ones<R: Rng + ?Sized>(p1: f64, shots: u64, rng: &mut R) -> u64 {
    let p = snap(p1.clamp(0.0, 1.0));
    // p is in [0, 1], which is all Binomial::new checks.
    Binomial::new(shots, p).expect("probability in range").sample(rng)
}

pub(crate) fn single_qubit_counts(p1: f64, shots: u64, seed: u64, stream: u64) -> ShotResult {
    let mut rng = stream_rng(seed, stream);
    let ones = draw_ones(p1, shots, &mut rng);
    let counts = BTreeMap::from([("0".to_string(), shots - ones), ("1".to_string(), ones)]);
    ShotResult { counts, shots, seed, stream }
}

/// Z-basis counts of a single qubit.
pub(crate) fn measure_z(rho: &DensityMatrix, shots: u64, seed: u64, stream: u64) -> Result<ShotResult, PipelineError> {
    check_shots(shots)?;
    if rho.qubits() != 1 {
        return Err(StateError::NotSingleQubit(rho.qubits()).into());
    }
    Ok(single_qubit_counts(rho.populations()[1], shots, seed, stream))
}

/// Hadamard then Z-basis sampling of a single qubit.
pub fn measure_x(rho: &DensityMatrix, shots: u64, seed: u64, stream: u64) -> Result<ShotResult, PipelineError> {
    check_shots(shots)?;
    if rho.qubits() != 1 {
        return Err(StateError::NotSingleQubit(rho.qubits()).into());
    }
    let rotated = rho.apply_unitary(&gates::hadamard(), &[0])?;
    measure_z(&rotated, shots, seed, stream)
}

/// Shot estimate `(n₀ − n₁)/shots` of `⟨X⟩`.
pub fn measure_expectation_x(psi: &StateVector, shots: u64, seed: u64) -> Result<f64, PipelineError> {
    Ok(measure_x(&psi.to_density(), shots, seed, 0)?.expectation_z())
}
