use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse_estimate: f64,
    pub mse_noisy: f64,
    /// `10 log₁₀(mse_noisy / mse_estimate)`; `+∞` when the estimate is exact.
    pub snr_gain_db: f64,
    pub gain_infinite: bool,
}

pub fn mse(a: &[f64], b: &[f64]) -> Result<f64, PipelineError> {
    if a.len() != b.len() {
        return Err(PipelineError::LengthMismatch { expected: a.len(), got: b.len() });
    }
    if a.is_empty() {
        return Err(PipelineError::TooShort { min: 1, got: 0 });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64)
}

pub fn metrics(clean: &[f64], estimate: &[f64], noisy: &[f64]) -> Result<Metrics, PipelineError> {
    let mse_estimate = mse(clean, estimate)?;
    let mse_noisy = mse(clean, noisy)?;
    let gain_infinite = mse_estimate == 0.0;
    let snr_gain_db = if gain_infinite { f64::INFINITY } else { 10.0 * (mse_noisy / mse_estimate).log10() };
    Ok(Metrics { mse_estimate, mse_noisy, snr_gain_db, gain_infinite })
}
