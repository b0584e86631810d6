//! Shrinkage rules: damping-parameter policies `γ(x)` realized by phase
//! damping, and the classical thresholding rules they are compared with.
//!
//! Every input lives on the rescaled `[-1, 1]` axis, and `λ`, `α` are read
//! on that axis.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("policy {kind:?} is not {expected}")]
    WrongKind { kind: PolicyKind, expected: &'static str },
    #[error("input {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("policy {kind:?} requires parameter `{param}`")]
    MissingParam { kind: PolicyKind, param: &'static str },
    #[error("parameter `{name}` = {value} invalid: {reason}")]
    BadParam { name: &'static str, value: f64, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// `γ = 1(|x| ≤ λ)`
    HardGamma,
    /// `γ = 1 − exp(−α|x|)`
    ExpGamma,
    /// `γ = cos(π/2 · |x|^α)`
    CosGamma,
    /// `γ = cos⁴(π/2 · |x|)`
    Cos4Gamma,
    /// `sign(x)|x|^p`
    PowerLaw,
    /// `sign(x) max(|x| − λ, 0)`
    ClassicalSoft,
    /// `x · 1(|x| > λ)`
    ClassicalHard,
}

/// Which coefficient blocks a policy touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// Detail blocks only; approximation coefficients pass through.
    #[default]
    Details,
    All,
}

/// Exponent used by `cos_gamma` when none is given.
pub const DEFAULT_COS_ALPHA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkagePolicy {
    pub kind: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default)]
    pub scope: Scope,
}

impl ShrinkagePolicy {
    fn bare(kind: PolicyKind) -> Self {
        Self { kind, lambda: None, alpha: None, exponent: None, scope: Scope::Details }
    }

    pub fn hard(lambda: f64) -> Self {
        Self { lambda: Some(lambda), ..Self::bare(PolicyKind::HardGamma) }
    }

    pub fn exp(alpha: f64) -> Self {
        Self { alpha: Some(alpha), ..Self::bare(PolicyKind::ExpGamma) }
    }

    pub fn cos(alpha: f64) -> Self {
        Self { alpha: Some(alpha), ..Self::bare(PolicyKind::CosGamma) }
    }

    pub fn cos4() -> Self {
        Self::bare(PolicyKind::Cos4Gamma)
    }

    pub fn power_law(exponent: f64) -> Self {
        Self { exponent: Some(exponent), ..Self::bare(PolicyKind::PowerLaw) }
    }

    pub fn soft(lambda: f64) -> Self {
        Self { lambda: Some(lambda), ..Self::bare(PolicyKind::ClassicalSoft) }
    }

    pub fn classical_hard(lambda: f64) -> Self {
        Self { lambda: Some(lambda), ..Self::bare(PolicyKind::ClassicalHard) }
    }

    /// `γ ≡ 0`: the exponential rule at `α = 0`.
    pub fn identity() -> Self {
        Self::exp(0.0)
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn is_gamma_valued(&self) -> bool {
        matches!(self.kind, PolicyKind::HardGamma | PolicyKind::ExpGamma | PolicyKind::CosGamma | PolicyKind::Cos4Gamma)
    }

    /// Checks that every parameter the kind needs is present and in range.
    pub fn validate(&self) -> Result<(), PolicyError> {
        let need = |v: Option<f64>, param| v.ok_or(PolicyError::MissingParam { kind: self.kind, param });
        match self.kind {
            PolicyKind::HardGamma | PolicyKind::ClassicalSoft | PolicyKind::ClassicalHard => {
                let l = need(self.lambda, "lambda")?;
                if !(l >= 0.0 && l.is_finite()) {
                    return Err(PolicyError::BadParam { name: "lambda", value: l, reason: "must be finite and >= 0" });
                }
            }
            PolicyKind::ExpGamma => {
                let a = need(self.alpha, "alpha")?;
                if !(a >= 0.0 && a.is_finite()) {
                    return Err(PolicyError::BadParam { name: "alpha", value: a, reason: "must be finite and >= 0" });
                }
            }
            PolicyKind::CosGamma => {
                let a = self.alpha.unwrap_or(DEFAULT_COS_ALPHA);
                if !(a > 0.0 && a.is_finite()) {
                    return Err(PolicyError::BadParam { name: "alpha", value: a, reason: "must be finite and > 0" });
                }
            }
            PolicyKind::Cos4Gamma => {}
            PolicyKind::PowerLaw => {
                let p = need(self.exponent, "exponent")?;
                if !(p > 0.0 && p.is_finite()) {
                    return Err(PolicyError::BadParam { name: "exponent", value: p, reason: "must be finite and > 0" });
                }
            }
        }
        Ok(())
    }

    /// Shrunk value on the rescaled axis: `m·x` for damping policies, the
    /// classical rule otherwise.
    pub fn shrink(&self, x: f64) -> Result<f64, PolicyError> {
        if self.is_gamma_valued() {
            Ok(multiplier_of(self, x)? * x)
        } else {
            classical_apply(self, x)
        }
    }
}

fn check_unit(x: f64) -> Result<(), PolicyError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(PolicyError::OutOfRange(x));
    }
    Ok(())
}

/// Damping strength `γ ∈ [0,1]` assigned to a rescaled coefficient.
pub fn gamma_of(policy: &ShrinkagePolicy, x: f64) -> Result<f64, PolicyError> {
    if !policy.is_gamma_valued() {
        return Err(PolicyError::WrongKind { kind: policy.kind, expected: "damping-valued" });
    }
    policy.validate()?;
    check_unit(x)?;
    let ax = x.abs();
    let gamma = match policy.kind {
        PolicyKind::HardGamma => {
            if ax <= policy.lambda.unwrap_or_default() { 1.0 } else { 0.0 }
        }
        PolicyKind::ExpGamma => 1.0 - (-policy.alpha.unwrap_or_default() * ax).exp(),
        PolicyKind::CosGamma => (FRAC_PI_2 * ax.powf(policy.alpha.unwrap_or(DEFAULT_COS_ALPHA))).cos(),
        PolicyKind::Cos4Gamma => (FRAC_PI_2 * ax).cos().powi(4),
        _ => unreachable!("checked above"),
    };
    Ok(gamma.clamp(0.0, 1.0))
}

/// `√(1 − γ)`, the factor phase damping applies to `⟨X⟩`.
pub fn multiplier_of(policy: &ShrinkagePolicy, x: f64) -> Result<f64, PolicyError> {
    Ok((1.0 - gamma_of(policy, x)?).sqrt())
}

pub fn classical_apply(policy: &ShrinkagePolicy, x: f64) -> Result<f64, PolicyError> {
    policy.validate()?;
    match policy.kind {
        PolicyKind::ClassicalSoft => {
            let l = policy.lambda.unwrap_or_default();
            Ok(x.signum() * (x.abs() - l).max(0.0))
        }
        PolicyKind::ClassicalHard => {
            let l = policy.lambda.unwrap_or_default();
            Ok(if x.abs() > l { x } else { 0.0 })
        }
        PolicyKind::PowerLaw => {
            check_unit(x)?;
            Ok(x.signum() * x.abs().powf(policy.exponent.unwrap_or_default()))
        }
        kind => Err(PolicyError::WrongKind { kind, expected: "value-valued" }),
    }
}

/// Ancilla excitation probability `sin²(θ/2)` for a rotation `θ = π|x|`.
pub fn smooth_ancilla_probability(x: f64) -> Result<f64, PolicyError> {
    check_unit(x)?;
    Ok((FRAC_PI_2 * x.abs()).sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const RESCALED: [f64; 8] = [0.2, 0.1, 0.9, 0.0, 0.3, -1.0, 0.2, 0.4];

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |k| -1.0 + 2.0 * k as f64 / (n - 1) as f64)
    }

    fn builtins() -> Vec<ShrinkagePolicy> {
        vec![
            ShrinkagePolicy::hard(0.4),
            ShrinkagePolicy::exp(2.0),
            ShrinkagePolicy::cos(4.0),
            ShrinkagePolicy::cos4(),
        ]
    }

    #[test]
    fn gamma_examples() {
        let hard = ShrinkagePolicy::hard(0.4);
        assert_eq!(gamma_of(&hard, 0.9).unwrap(), 0.0);
        assert_eq!(gamma_of(&hard, 0.4).unwrap(), 1.0);
        assert_eq!(gamma_of(&ShrinkagePolicy::cos4(), 0.0).unwrap(), 1.0);
        assert!(gamma_of(&ShrinkagePolicy::cos4(), 1.0).unwrap() < 1e-30);
        assert_eq!(gamma_of(&ShrinkagePolicy::exp(2.0), 0.0).unwrap(), 0.0);
        assert_eq!(gamma_of(&hard, 1.2), Err(PolicyError::OutOfRange(1.2)));
        assert!(matches!(gamma_of(&ShrinkagePolicy::soft(0.1), 0.5), Err(PolicyError::WrongKind { .. })));
    }

    #[test]
    fn multiplier_examples() {
        let hard = ShrinkagePolicy::hard(0.4);
        let out: Vec<f64> = RESCALED.iter().map(|x| multiplier_of(&hard, *x).unwrap() * x).collect();
        assert_eq!(out, vec![0.0, 0.0, 0.9, 0.0, 0.0, -1.0, 0.0, 0.0]);
        assert_eq!(multiplier_of(&ShrinkagePolicy::identity(), 0.3).unwrap(), 1.0);
        let m = multiplier_of(&ShrinkagePolicy::cos4(), 0.5).unwrap();
        assert!((m - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn classical_examples() {
        assert!((classical_apply(&ShrinkagePolicy::soft(0.4), 0.9).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(classical_apply(&ShrinkagePolicy::classical_hard(0.4), 0.3).unwrap(), 0.0);
        let v = classical_apply(&ShrinkagePolicy::power_law(1.8), -0.5).unwrap();
        assert!((v + 0.5f64.powf(1.8)).abs() < 1e-15);
        assert!((v + 0.287_174_588_749_258_7).abs() < 1e-12);
        assert!(classical_apply(&ShrinkagePolicy::cos4(), 0.5).is_err());
    }

    #[test]
    fn smooth_ancilla_examples() {
        assert_eq!(smooth_ancilla_probability(0.0).unwrap(), 0.0);
        assert!((smooth_ancilla_probability(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((smooth_ancilla_probability(-1.0).unwrap() - 1.0).abs() < 1e-15);
        let p = smooth_ancilla_probability(0.5).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((p * 0.5 - 0.25).abs() < 1e-15);
        assert!(smooth_ancilla_probability(1.5).is_err());
    }

    #[test]
    fn damping_policies_stay_in_unit_interval_and_are_symmetric() {
        for p in builtins() {
            for x in grid(1001) {
                let g = gamma_of(&p, x).unwrap();
                assert!((0.0..=1.0).contains(&g));
                assert_eq!(g, gamma_of(&p, -x).unwrap());
                let m = multiplier_of(&p, x).unwrap();
                assert!((m * m + g - 1.0).abs() < 1e-12);
                assert!((m * x).abs() <= x.abs());
            }
        }
    }

    #[test]
    fn smooth_policies_monotone_in_magnitude() {
        for p in [ShrinkagePolicy::exp(2.0), ShrinkagePolicy::cos(4.0), ShrinkagePolicy::cos4()] {
            let xs: Vec<f64> = (0..=500).map(|k| k as f64 / 500.0).collect();
            let gs: Vec<f64> = xs.iter().map(|x| gamma_of(&p, *x).unwrap()).collect();
            // exp increases damping with |x|; the cosine rules decrease it.
            let inc = gs.windows(2).all(|w| w[1] >= w[0]);
            let dec = gs.windows(2).all(|w| w[1] <= w[0]);
            match p.kind {
                PolicyKind::ExpGamma => assert!(inc),
                _ => assert!(dec),
            }
        }
    }

    #[test]
    fn missing_parameters_are_named() {
        let p = ShrinkagePolicy { lambda: None, ..ShrinkagePolicy::hard(0.0) };
        assert_eq!(p.validate(), Err(PolicyError::MissingParam { kind: PolicyKind::HardGamma, param: "lambda" }));
        let json: ShrinkagePolicy = serde_json::from_str(r#"{"kind":"cos_gamma"}"#).unwrap();
        assert_eq!(gamma_of(&json, 0.0).unwrap(), 1.0);
        assert!(serde_json::from_str::<ShrinkagePolicy>(r#"{"kind":"cos4_gamma","lamda":1}"#).is_err());
        let s: ShrinkagePolicy = serde_json::from_str(r#"{"kind":"hard_gamma","lambda":0.4,"scope":"all"}"#).unwrap();
        assert_eq!(s.scope, Scope::All);
    }

    proptest! {
        #[test]
        fn value_rules_never_grow(x in -1.0f64..=1.0, l in 0.0f64..1.0, p in 0.1f64..4.0) {
            for pol in [ShrinkagePolicy::soft(l), ShrinkagePolicy::classical_hard(l), ShrinkagePolicy::power_law(p.max(1.0))] {
                let y = classical_apply(&pol, x).unwrap();
                prop_assert!(y.abs() <= x.abs());
                prop_assert!(y == 0.0 || y.signum() == x.signum());
            }
            let s = classical_apply(&ShrinkagePolicy::soft(l), x).unwrap();
            prop_assert_eq!(s == 0.0, x.abs() <= l);
        }
    }
}
