use serde::{Deserialize, Serialize};

use super::{check_shots, measure_x, PipelineError};
use crate::channels::{ancilla_shrink_dilation, apply_channel, dilate_apply_trace, phase_damping, retention_for_multiplier};
use crate::policies::{gamma_of, multiplier_of, Scope, ShrinkagePolicy};
use crate::state::{expectation_encode, rescale_to_unit, DensityMatrix, RescaleMode, ScaleRecord};
use crate::wavelet::Layout;

/// How a damping policy is turned into an attenuated `⟨X⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkMode {
    /// Prepare `m·x` directly; the noiseless reference.
    IdealMultiplier,
    /// Encode `x`, phase damping with `γ(x)`.
    ExpectationDamping,
    /// Encode `x`, couple an ancilla with retention `(1+m)/2`, trace it out.
    AncillaDilation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkOutcome {
    /// Inputs divided by the scale; in-scope entries lie in `[-1, 1]`.
    pub rescaled: Vec<f64>,
    /// Read-out values on the rescaled axis.
    pub shrunk_rescaled: Vec<f64>,
    /// `m·x`, what an infinite shot budget would read.
    pub exact_rescaled: Vec<f64>,
    pub multipliers: Vec<f64>,
    /// One standard error per entry; zero for exact read-out and out-of-scope entries.
    pub standard_errors: Vec<f64>,
    pub scale: ScaleRecord,
    /// Shrunk values back on the input axis.
    pub values: Vec<f64>,
}

/// `true` for coefficients a policy with this scope touches.
pub fn scope_mask(layout: &Layout, scope: Scope) -> Vec<bool> {
    (0..layout.len())
        .map(|k| match scope {
            Scope::All => true,
            Scope::Details => layout.is_detail(k),
        })
        .collect()
}

fn rescale_masked(values: &[f64], mask: &[bool]) -> Result<(Vec<f64>, ScaleRecord), PipelineError> {
    if values.len() != mask.len() {
        return Err(PipelineError::LengthMismatch { expected: values.len(), got: mask.len() });
    }
    let picked: Vec<f64> = values.iter().zip(mask).filter(|(_, m)| **m).map(|(v, _)| *v).collect();
    let scale = match rescale_to_unit(&picked) {
        Ok((_, record)) => record,
        // Nothing to shrink; any positive scale leaves zeros at zero.
        Err(_) => ScaleRecord { mode: RescaleMode::MaxAbs, scale: 1.0, offset: 0.0 },
    };
    let rescaled = values.iter().map(|v| v / scale.scale).collect();
    Ok((rescaled, scale))
}

impl ShrinkOutcome {
    fn restore(mut self, values: &[f64], mask: &[bool]) -> Self {
        let (scale, offset) = (self.scale.scale, self.scale.offset);
        self.values = values
            .iter()
            .zip(mask)
            .zip(&self.shrunk_rescaled)
            .map(|((v, m), s)| if *m { s * scale + offset } else { *v })
            .collect();
        self
    }
}

/// The single-qubit state whose `⟨X⟩` carries the shrunk coefficient.
fn shrunk_state(x: f64, policy: &ShrinkagePolicy, mode: ShrinkMode) -> Result<DensityMatrix, PipelineError> {
    let m = multiplier_of(policy, x)?;
    Ok(match mode {
        ShrinkMode::IdealMultiplier => expectation_encode(m * x)?.to_density(),
        ShrinkMode::ExpectationDamping => {
            let rho = expectation_encode(x)?.to_density();
            apply_channel(&rho, &phase_damping(gamma_of(policy, x)?)?, &[0])?
        }
        ShrinkMode::AncillaDilation => {
            let rho = expectation_encode(x)?.to_density();
            let u = ancilla_shrink_dilation(retention_for_multiplier(m)?)?;
            dilate_apply_trace(&rho, &u)?
        }
    })
}

/// Rescales the masked entries by their largest magnitude, shrinks each one
/// on its own qubit and maps the read-out back. With `shots`, entry `k` is
/// sampled from stream `k` of `seed`.
pub fn shrink_coefficients(
    values: &[f64],
    mask: &[bool],
    policy: &ShrinkagePolicy,
    mode: ShrinkMode,
    shots: Option<u64>,
    seed: u64,
) -> Result<ShrinkOutcome, PipelineError> {
    if !policy.is_gamma_valued() {
        return Err(PipelineError::NotRealizable(policy.kind));
    }
    policy.validate()?;
    if let Some(s) = shots {
        check_shots(s)?;
    }
    let (rescaled, scale) = rescale_masked(values, mask)?;
    let n = values.len();
    let mut shrunk = rescaled.clone();
    let mut exact = rescaled.clone();
    let mut multipliers = vec![1.0; n];
    let mut errors = vec![0.0; n];
    for k in (0..n).filter(|k| mask[*k]) {
        let x = rescaled[k].clamp(-1.0, 1.0);
        let m = multiplier_of(policy, x)?;
        multipliers[k] = m;
        exact[k] = m * x;
        let rho = shrunk_state(x, policy, mode)?;
        shrunk[k] = match shots {
            None => rho.bloch()?.x,
            Some(s) => {
                errors[k] = (1.0 - exact[k] * exact[k]).max(0.0).sqrt() / (s as f64).sqrt();
                measure_x(&rho, s, seed, k as u64)?.expectation_z()
            }
        };
    }
    let out = ShrinkOutcome {
        rescaled,
        shrunk_rescaled: shrunk,
        exact_rescaled: exact,
        multipliers,
        standard_errors: errors,
        scale,
        values: Vec::new(),
    };
    Ok(out.restore(values, mask))
}

/// Same rescaling and scope, with a classical rule applied value by value.
pub(crate) fn shrink_classical(
    values: &[f64],
    mask: &[bool],
    policy: &ShrinkagePolicy,
) -> Result<ShrinkOutcome, PipelineError> {
    policy.validate()?;
    let (rescaled, scale) = rescale_masked(values, mask)?;
    let n = values.len();
    let mut shrunk = rescaled.clone();
    let mut multipliers = vec![1.0; n];
    for k in (0..n).filter(|k| mask[*k]) {
        let x = rescaled[k].clamp(-1.0, 1.0);
        shrunk[k] = policy.shrink(x)?;
        multipliers[k] = if x == 0.0 { 1.0 } else { shrunk[k] / x };
    }
    let out = ShrinkOutcome {
        rescaled,
        exact_rescaled: shrunk.clone(),
        shrunk_rescaled: shrunk,
        multipliers,
        standard_errors: vec![0.0; n],
        scale,
        values: Vec::new(),
    };
    Ok(out.restore(values, mask))
}
