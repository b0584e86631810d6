use serde::{Deserialize, Serialize};

use super::WaveletError;

/// Tolerance applied to the normalization and even-shift orthogonality checks.
pub const FILTER_TOL: f64 = 1e-12;

/// Quadrature-mirror filter pair defining an orthogonal wavelet family.
///
/// `high` is always derived from `low` as `g_k = (-1)^k h_{L-1-k}`; it is
/// never supplied independently.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: String,
    low: Vec<f64>,
    high: Vec<f64>,
}

/// On-disk filter definition: `{"name": ..., "h": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub name: String,
    pub h: Vec<f64>,
}

impl WaveletFilter {
    /// Builds one of the built-in families: `haar` (alias `daub2`) or `daub4`.
    pub fn named(name: &str) -> Result<Self, WaveletError> {
        let low = match name.to_ascii_lowercase().as_str() {
            "haar" | "daub2" => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            "daub4" => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * 2f64.sqrt();
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
            _ => return Err(WaveletError::UnknownFilter(name.to_string())),
        };
        Self::custom(name, low)
    }

    /// Accepts a user-supplied low-pass filter after checking it is an
    /// orthonormal scaling filter.
    pub fn custom(name: &str, low: Vec<f64>) -> Result<Self, WaveletError> {
        check_low_pass(&low)?;
        let len = low.len();
        let high = (0..len)
            .map(|k| if k % 2 == 0 { low[len - 1 - k] } else { -low[len - 1 - k] })
            .collect();
        Ok(Self { name: name.to_string(), low, high })
    }

    pub fn from_spec(spec: &FilterSpec) -> Result<Self, WaveletError> {
        Self::custom(&spec.name, spec.h.clone())
    }

    /// Parses a JSON filter definition.
    pub fn from_json(text: &str) -> Result<Self, WaveletError> {
        let spec: FilterSpec =
            serde_json::from_str(text).map_err(|e| WaveletError::Parse(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> FilterSpec {
        FilterSpec { name: self.name.clone(), h: self.low.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }
}

fn check_low_pass(h: &[f64]) -> Result<(), WaveletError> {
    if h.len() < 2 || !h.len().is_multiple_of(2) {
        return Err(WaveletError::InvalidFilter {
            invariant: "even length >= 2",
            residual: h.len() as f64,
        });
    }
    let sum: f64 = h.iter().sum();
    let sum_res = (sum - std::f64::consts::SQRT_2).abs();
    if sum_res > FILTER_TOL {
        return Err(WaveletError::InvalidFilter { invariant: "sum(h) = sqrt(2)", residual: sum_res });
    }
    let energy: f64 = h.iter().map(|v| v * v).sum();
    let energy_res = (energy - 1.0).abs();
    if energy_res > FILTER_TOL {
        return Err(WaveletError::InvalidFilter { invariant: "sum(h^2) = 1", residual: energy_res });
    }
    for shift in (2..h.len()).step_by(2) {
        let dot: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
        if dot.abs() > FILTER_TOL {
            return Err(WaveletError::InvalidFilter {
                invariant: "even-shift orthogonality",
                residual: dot.abs(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn haar_pair() {
        let f = WaveletFilter::named("haar").unwrap();
        assert_eq!(f.low(), &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert_eq!(f.high(), &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        assert_eq!(WaveletFilter::named("daub2").unwrap().low(), f.low());
    }

    #[test]
    fn daub4_invariants_by_direct_evaluation() {
        let f = WaveletFilter::named("daub4").unwrap();
        let h = f.low();
        assert!((h.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12);
        assert!((h.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((h[0] * h[2] + h[1] * h[3]).abs() < 1e-12);
        // g_k = (-1)^k h_{3-k}
        assert_eq!(f.high(), &[h[3], -h[2], h[1], -h[0]]);
        // high-pass annihilates constants and is orthogonal to the low-pass
        assert!(f.high().iter().sum::<f64>().abs() < 1e-12);
        assert!(h.iter().zip(f.high()).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_custom_filters() {
        match WaveletFilter::custom("bad", vec![1.0, 0.0]) {
            Err(WaveletError::InvalidFilter { invariant, residual }) => {
                assert_eq!(invariant, "sum(h) = sqrt(2)");
                assert!((residual - (2f64.sqrt() - 1.0)).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            WaveletFilter::custom("odd", vec![1.0, 0.2, 0.2]),
            Err(WaveletError::InvalidFilter { invariant: "even length >= 2", .. })
        ));
        // Right sum, wrong energy.
        let s = std::f64::consts::SQRT_2;
        assert!(matches!(
            WaveletFilter::custom("e", vec![s, 0.0, 0.0, 0.0]),
            Err(WaveletError::InvalidFilter { invariant: "sum(h^2) = 1", .. })
        ));
        assert!(matches!(WaveletFilter::named("sym8"), Err(WaveletError::UnknownFilter(_))));
    }

    #[test]
    fn json_definition() {
        let f = WaveletFilter::from_json(r#"{"name":"h","h":[0.7071067811865476,0.7071067811865476]}"#)
            .unwrap();
        assert_eq!(f.name(), "h");
        assert!(WaveletFilter::from_json(r#"{"name":"h","h":[1,0],"x":1}"#).is_err());
    }
}
