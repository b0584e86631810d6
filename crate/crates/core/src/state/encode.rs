use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{gates, StateError, StateVector, C64};

/// Amplitude-encoded vector plus what is needed to undo the encoding.
#[derive(Debug, Clone)]
pub struct AmplitudeEncoding {
    pub state: StateVector,
    /// `‖x‖` of the unpadded input.
    pub norm: f64,
    /// Input length before zero padding.
    pub original_len: usize,
}

impl AmplitudeEncoding {
    /// `‖x‖ · Re(amps)`, truncated to the original length.
    pub fn decode(&self) -> Vec<f64> {
        self.state.amps().iter().take(self.original_len).map(|a| a.re * self.norm).collect()
    }
}

fn padded_len(len: usize) -> usize {
    len.next_power_of_two()
}

fn norm_of(x: &[f64]) -> Result<f64, StateError> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(StateError::ZeroInput);
    }
    Ok(norm)
}

/// `|x⟩ = Σ x_j |j⟩ / ‖x‖`, zero-padded to a power-of-two length.
pub fn amplitude_encode(x: &[f64]) -> Result<AmplitudeEncoding, StateError> {
    let norm = norm_of(x)?;
    let dim = padded_len(x.len());
    let amps = DVector::from_fn(dim, |j, _| C64::new(x.get(j).copied().unwrap_or(0.0) / norm, 0.0));
    Ok(AmplitudeEncoding { state: StateVector::new(amps)?, norm, original_len: x.len() })
}

/// One qubit with `⟨X⟩ = v`: `R_z(arccos v)|+⟩`.
pub fn expectation_encode(v: f64) -> Result<StateVector, StateError> {
    if !(-1.0..=1.0).contains(&v) {
        return Err(StateError::OutOfRange(v));
    }
    let plus = StateVector::uniform(1)?;
    let amps = gates::rz(v.acos()) * plus.amps();
    StateVector::new(amps)
}

/// Uniform superposition followed by the diagonal phases `e^{iα d_j}`.
pub fn phase_encode(d: &[f64], alpha: f64) -> Result<StateVector, StateError> {
    if d.is_empty() || !d.len().is_power_of_two() {
        return Err(StateError::NotPowerOfTwo(d.len()));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(StateError::BadParameter { name: "alpha", value: alpha, reason: "must be finite and non-negative" });
    }
    let a = (d.len() as f64).sqrt().recip();
    let amps = DVector::from_iterator(d.len(), d.iter().map(|dj| C64::from_polar(a, alpha * dj)));
    StateVector::new(amps)
}

/// Magnitude/sign encoding with one extra sign qubit placed above the index
/// register (basis index `j + sign·N`).
#[derive(Debug, Clone)]
pub struct HybridEncoding {
    pub state: StateVector,
    pub norm: f64,
    pub original_len: usize,
}

/// `(1/(√2‖x‖)) Σ_j |x_j| (|0⟩ + e^{iπ·[x_j<0]} |1⟩) |j⟩`.
///
/// Negative entries carry a relative phase of −1 on the sign qubit.
pub fn hybrid_encode(x: &[f64]) -> Result<HybridEncoding, StateError> {
    let norm = norm_of(x)?;
    let n = padded_len(x.len());
    let scale = std::f64::consts::FRAC_1_SQRT_2 / norm;
    let mut amps = DVector::zeros(2 * n);
    for (j, &v) in x.iter().enumerate() {
        let mag = v.abs() * scale;
        amps[j] = C64::new(mag, 0.0);
        amps[n + j] = if v < 0.0 { C64::new(-mag, 0.0) } else { C64::new(mag, 0.0) };
    }
    Ok(HybridEncoding { state: StateVector::new(amps)?, norm, original_len: x.len() })
}

/// Reads magnitudes from the `|0⟩` branch and signs from the relative phase
/// of the `|1⟩` branch.
pub fn decode_hybrid(enc: &HybridEncoding) -> Vec<f64> {
    let n = enc.state.dim() / 2;
    let amps = enc.state.amps();
    (0..enc.original_len)
        .map(|j| {
            let (a0, a1) = (amps[j], amps[n + j]);
            let mag = a0.norm() * std::f64::consts::SQRT_2 * enc.norm;
            if (a1 * a0.conj()).re < 0.0 { -mag } else { mag }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RescaleMode {
    /// `d = y / max|y|`; zero stays zero.
    #[default]
    MaxAbs,
    /// Affine map of `[min, max]` onto `[-1, 1]`.
    MinMax,
}

/// Enough to invert a rescaling: `y = d · scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub mode: RescaleMode,
    pub scale: f64,
    pub offset: f64,
}

impl ScaleRecord {
    pub fn undo(&self, d: &[f64]) -> Vec<f64> {
        d.iter().map(|v| v * self.scale + self.offset).collect()
    }
}

pub fn rescale_to_unit(y: &[f64]) -> Result<(Vec<f64>, ScaleRecord), StateError> {
    rescale_with(y, RescaleMode::MaxAbs)
}

pub fn rescale_with(y: &[f64], mode: RescaleMode) -> Result<(Vec<f64>, ScaleRecord), StateError> {
    if y.iter().all(|v| *v == 0.0) {
        return Err(StateError::ZeroInput);
    }
    match mode {
        RescaleMode::MaxAbs => {
            let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let d = y.iter().map(|v| v / scale).collect();
            Ok((d, ScaleRecord { mode, scale, offset: 0.0 }))
        }
        RescaleMode::MinMax => {
            let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi == lo {
                return Err(StateError::Invalid("min-max rescaling of a constant vector".into()));
            }
            let scale = (hi - lo) / 2.0;
            let offset = (hi + lo) / 2.0;
            let d = y.iter().map(|v| ((v - offset) / scale).clamp(-1.0, 1.0)).collect();
            Ok((d, ScaleRecord { mode, scale, offset }))
        }
    }
}
