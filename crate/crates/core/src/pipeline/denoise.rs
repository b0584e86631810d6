use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::shrink::shrink_classical;
use super::{metrics, scope_mask, shrink_coefficients, PipelineError, ShrinkMode, ShrinkOutcome};
use crate::policies::ShrinkagePolicy;
use crate::wavelet::{mallat_forward, mallat_inverse, CoefficientVector, WaveletFilter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenoiseReport {
    /// `classical_soft` or a [`ShrinkMode`] name.
    pub mode: String,
    pub multipliers: Vec<f64>,
    pub wall_time: f64,
    /// Filled in by [`DenoiseReport::score`] once the clean signal is known.
    pub mse_noisy: Option<f64>,
    pub mse_estimate: Option<f64>,
    pub snr_gain_db: Option<f64>,
}

impl DenoiseReport {
    pub fn score(&mut self, clean: &[f64], noisy: &[f64], estimate: &[f64]) -> Result<(), PipelineError> {
        let m = metrics(clean, estimate, noisy)?;
        self.mse_noisy = Some(m.mse_noisy);
        self.mse_estimate = Some(m.mse_estimate);
        self.snr_gain_db = Some(m.snr_gain_db);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Denoised {
    pub estimate: Vec<f64>,
    pub before: CoefficientVector,
    pub after: CoefficientVector,
    pub shrink: ShrinkOutcome,
    pub report: DenoiseReport,
}

fn assemble(
    started: Instant,
    mode: String,
    before: CoefficientVector,
    shrink: ShrinkOutcome,
    filter: &WaveletFilter,
) -> Result<Denoised, PipelineError> {
    let after = CoefficientVector { values: shrink.values.clone(), layout: before.layout.clone() };
    let estimate = mallat_inverse(&after, filter)?;
    let report = DenoiseReport {
        mode,
        multipliers: shrink.multipliers.clone(),
        wall_time: started.elapsed().as_secs_f64(),
        mse_noisy: None,
        mse_estimate: None,
        snr_gain_db: None,
    };
    Ok(Denoised { estimate, before, after, shrink, report })
}

/// Forward transform, soft thresholding of the detail blocks at `λ` on the
/// rescaled axis, inverse transform.
pub fn denoise_classical(
    noisy: &[f64],
    filter: &WaveletFilter,
    levels: usize,
    lambda: f64,
) -> Result<Denoised, PipelineError> {
    let started = Instant::now();
    let before = mallat_forward(noisy, filter, levels)?;
    let policy = ShrinkagePolicy::soft(lambda);
    let mask = scope_mask(&before.layout, policy.scope);
    let shrink = shrink_classical(&before.values, &mask, &policy)?;
    assemble(started, "classical_soft".into(), before, shrink, filter)
}

/// Forward transform, per-coefficient channel shrinkage over the policy's
/// scope, inverse transform.
pub fn denoise_quantum(
    noisy: &[f64],
    filter: &WaveletFilter,
    levels: usize,
    policy: &ShrinkagePolicy,
    mode: ShrinkMode,
    shots: Option<u64>,
    seed: u64,
) -> Result<Denoised, PipelineError> {
    let started = Instant::now();
    let before = mallat_forward(noisy, filter, levels)?;
    let mask = scope_mask(&before.layout, policy.scope);
    let shrink = shrink_coefficients(&before.values, &mask, policy, mode, shots, seed)?;
    let label = serde_json::to_value(mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    assemble(started, label, before, shrink, filter)
}
