use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{stream_rng, substream_seed, PipelineError};

pub const MIN_DOPPLER_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalName {
    Doppler,
    /// User-supplied samples.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisySignalSpec {
    pub signal_name: SignalName,
    pub n: usize,
    pub snr: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisySignal {
    pub clean: Vec<f64>,
    pub noisy: Vec<f64>,
    /// Noise standard deviation actually used.
    pub sigma: f64,
}

impl NoisySignalSpec {
    /// Builds the clean signal (or takes `custom`) and adds noise drawn from
    /// the `noise` substream of the seed.
    pub fn realize(&self, custom: Option<&[f64]>) -> Result<NoisySignal, PipelineError> {
        let clean = match (self.signal_name, custom) {
            (SignalName::Doppler, _) => doppler(self.n)?,
            (SignalName::Custom, Some(x)) => {
                if x.len() != self.n {
                    return Err(PipelineError::LengthMismatch { expected: self.n, got: x.len() });
                }
                x.to_vec()
            }
            (SignalName::Custom, None) => return Err(PipelineError::Invalid("custom signal requires samples".into())),
        };
        let (noisy, sigma) = noisy_with_sigma(&clean, self.snr, substream_seed(self.seed, "noise"))?;
        Ok(NoisySignal { clean, noisy, sigma })
    }
}

/// `f(t) = √(t(1−t)) · sin(2π·1.05 / (t + 0.05))` at `t = (i + ½)/N`.
pub fn doppler(n: usize) -> Result<Vec<f64>, PipelineError> {
    if n < MIN_DOPPLER_LEN {
        return Err(PipelineError::TooShort { min: MIN_DOPPLER_LEN, got: n });
    }
    Ok((0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            (t * (1.0 - t)).sqrt() * (2.0 * std::f64::consts::PI * 1.05 / (t + 0.05)).sin()
        })
        .collect())
}

/// Population standard deviation (divides by `n`).
pub fn sample_sd(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `clean + σ z` with `σ = sd(clean)/snr`. The draw `z` is rescaled to unit
/// sample sd, so the realized noise sd equals `σ`.
pub fn add_noise(clean: &[f64], snr: f64, seed: u64) -> Result<Vec<f64>, PipelineError> {
    noisy_with_sigma(clean, snr, seed).map(|(x, _)| x)
}

fn noisy_with_sigma(clean: &[f64], snr: f64, seed: u64) -> Result<(Vec<f64>, f64), PipelineError> {
    if snr.is_nan() || snr <= 0.0 {
        return Err(PipelineError::BadParameter { name: "snr", value: snr, reason: "must be > 0" });
    }
    if clean.len() < 2 {
        return Err(PipelineError::TooShort { min: 2, got: clean.len() });
    }
    let sigma = sample_sd(clean) / snr;
    if sigma == 0.0 {
        return Ok((clean.to_vec(), 0.0));
    }
    let mut rng = stream_rng(seed, 0);
    let z: Vec<f64> = (0..clean.len()).map(|_| rng.sample(StandardNormal)).collect();
    let unit = sample_sd(&z);
    Ok((clean.iter().zip(&z).map(|(c, z)| c + sigma * z / unit).collect(), sigma))
}
