use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunError;
use crate::pipeline::{HardwareModel, ShrinkMode, SignalName};
use crate::policies::ShrinkagePolicy;
use crate::wavelet::{check_dims, FilterSpec, WaveletFilter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig1Dwt,
    Fig5Hard,
    Fig6Smooth,
    Fig3Doppler,
    Fig4Diag,
    Fig7Power,
    Fig8Flag,
    Fig9SmoothAncilla,
    Fig10PhaseEncode,
    HwIdle,
    HwRandz,
}

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        FigureId::Fig1Dwt,
        FigureId::Fig5Hard,
        FigureId::Fig6Smooth,
        FigureId::Fig3Doppler,
        FigureId::Fig4Diag,
        FigureId::Fig7Power,
        FigureId::Fig8Flag,
        FigureId::Fig9SmoothAncilla,
        FigureId::Fig10PhaseEncode,
        FigureId::HwIdle,
        FigureId::HwRandz,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1Dwt => "fig1_dwt",
            FigureId::Fig5Hard => "fig5_hard",
            FigureId::Fig6Smooth => "fig6_smooth",
            FigureId::Fig3Doppler => "fig3_doppler",
            FigureId::Fig4Diag => "fig4_diag",
            FigureId::Fig7Power => "fig7_power",
            FigureId::Fig8Flag => "fig8_flag",
            FigureId::Fig9SmoothAncilla => "fig9_smooth_ancilla",
            FigureId::Fig10PhaseEncode => "fig10_phase_encode",
            FigureId::HwIdle => "hw_idle",
            FigureId::HwRandz => "hw_randz",
        }
    }
}

/// A built-in filter name or explicit low-pass coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FilterChoice {
    Named(String),
    Custom(FilterSpec),
}

impl FilterChoice {
    pub fn build(&self) -> Result<WaveletFilter, RunError> {
        let f = match self {
            FilterChoice::Named(name) => WaveletFilter::named(name),
            FilterChoice::Custom(spec) => WaveletFilter::from_spec(spec),
        };
        f.map_err(|e| RunError::Config(format!("filter: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareConfig {
    #[serde(rename = "T2")]
    pub t2: f64,
}

/// One experiment. Only `figure` and `seed` are required; everything else
/// falls back to the figure's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub figure: FigureId,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalName>,
    /// Input samples; implies a custom signal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(rename = "N", alias = "n", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<ShrinkagePolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ShrinkMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardware: Option<HardwareConfig>,
    /// Phase scale for `fig10_phase_encode`: `φ_j = phase_alpha · d_j`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

pub const EXAMPLE_VECTOR: [f64; 8] = [2.0, 1.0, 9.0, 0.0, 3.0, -10.0, 2.0, 4.0];
pub const DWT_EXAMPLE: [f64; 8] = [1.0, 0.0, -3.0, 2.0, 1.0, 0.0, 1.0, 2.0];

/// Everything a recipe needs, with defaults filled in and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub figure: FigureId,
    pub seed: u64,
    pub signal: SignalName,
    pub values: Option<Vec<f64>>,
    pub n: usize,
    pub snr: f64,
    pub filter: WaveletFilter,
    pub levels: usize,
    pub policy: ShrinkagePolicy,
    pub mode: ShrinkMode,
    pub shots: Option<u64>,
    pub hardware: HardwareModel,
    pub phase_alpha: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("invalid config: {e}")))
    }

    pub fn minimal(figure: FigureId, seed: u64) -> Self {
        Self {
            figure,
            seed,
            signal: None,
            values: None,
            n: None,
            snr: None,
            filter: None,
            levels: None,
            policy: None,
            mode: None,
            shots: None,
            hardware: None,
            phase_alpha: None,
            output_dir: None,
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded. `output_dir` is
    /// left out so the same experiment hashes the same wherever it is written.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let text = serde_json::to_string(&canonical).unwrap_or_default();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn resolve(&self) -> Result<Resolved, RunError> {
        use FigureId::*;
        let cfg = |msg: String| RunError::Config(msg);
        let fig = self.figure;

        let default_values: Option<Vec<f64>> = match fig {
            Fig1Dwt => Some(DWT_EXAMPLE.to_vec()),
            Fig5Hard | Fig8Flag | Fig9SmoothAncilla | Fig10PhaseEncode => Some(EXAMPLE_VECTOR.to_vec()),
            Fig6Smooth => Some((0..17).map(|k| -1.0 + k as f64 / 8.0).collect()),
            _ => None,
        };
        let (signal, values) = match (self.signal, &self.values) {
            (Some(SignalName::Doppler), Some(_)) => {
                return Err(cfg("`values` cannot be combined with signal \"doppler\"".into()))
            }
            (Some(SignalName::Custom), None) => return Err(cfg("signal \"custom\" requires `values`".into())),
            (_, Some(v)) => (SignalName::Custom, Some(v.clone())),
            (Some(SignalName::Doppler), None) => (SignalName::Doppler, None),
            (None, None) => match default_values {
                Some(v) => (SignalName::Custom, Some(v)),
                None => (SignalName::Doppler, None),
            },
        };
        if let Some(v) = &values {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(cfg("`values` must be a non-empty list of finite numbers".into()));
            }
        }
        let default_n = match fig {
            Fig3Doppler => 1024,
            Fig4Diag | Fig7Power => 256,
            _ => 64,
        };
        let n = match (&values, self.n) {
            (Some(v), Some(n)) if n != v.len() => {
                return Err(cfg(format!("`N` = {n} does not match {} values", v.len())))
            }
            (Some(v), _) => v.len(),
            (None, n) => n.unwrap_or(default_n),
        };

        let snr = self.snr.unwrap_or(7.0);
        if snr.is_nan() || snr <= 0.0 {
            return Err(cfg(format!("`snr` must be > 0, got {snr}")));
        }
        let filter = self
            .filter
            .clone()
            .unwrap_or_else(|| FilterChoice::Named(if matches!(fig, Fig1Dwt | Fig10PhaseEncode) { "daub2" } else { "daub4" }.into()))
            .build()?;
        let default_levels = match fig {
            Fig1Dwt | Fig10PhaseEncode => n.max(2).ilog2() as usize,
            _ => 4,
        };
        let levels = self.levels.unwrap_or(default_levels);
        let transformed = matches!(fig, Fig1Dwt | Fig3Doppler | Fig4Diag | Fig10PhaseEncode);
        if transformed {
            check_dims(n, levels).map_err(|e| cfg(format!("transform size: {e}")))?;
        } else if signal == SignalName::Doppler && n < 8 {
            return Err(cfg(format!("`N` must be at least 8 for the doppler signal, got {n}")));
        }
        if fig == Fig4Diag && n > 1 << 11 {
            return Err(cfg(format!("`N` = {n} too large for the dilation diagnostic (max 2048)")));
        }

        let policy = self.policy.unwrap_or(match fig {
            Fig5Hard | Fig8Flag => ShrinkagePolicy::hard(0.4),
            Fig7Power => ShrinkagePolicy::power_law(1.8),
            _ => ShrinkagePolicy::cos4(),
        });
        policy.validate().map_err(|e| cfg(format!("policy: {e}")))?;
        let needs_damping = matches!(fig, Fig5Hard | Fig6Smooth | Fig3Doppler | Fig4Diag);
        if needs_damping && !policy.is_gamma_valued() {
            return Err(cfg(format!("figure {} needs a damping policy, got {:?}", fig.as_str(), policy.kind)));
        }
        if fig == Fig7Power && policy.is_gamma_valued() {
            return Err(cfg(format!("figure fig7_power needs a value rule, got {:?}", policy.kind)));
        }
        if fig == Fig8Flag {
            match policy.lambda {
                Some(l) if l > 0.0 && l < 1.0 => {}
                _ => return Err(cfg("figure fig8_flag needs a policy `lambda` in (0, 1)".into())),
            }
        }

        let default_shots = match fig {
            Fig6Smooth | HwRandz => Some(100_000),
            Fig8Flag | Fig9SmoothAncilla => Some(1024),
            _ => None,
        };
        let shots = self.shots.or(default_shots);
        if shots == Some(0) {
            return Err(cfg("`shots` must be at least 1".into()));
        }
        let t2 = self.hardware.map_or(100.0, |h| h.t2);
        let hardware = HardwareModel::new(t2, shots.unwrap_or(100_000), self.seed)
            .map_err(|e| cfg(format!("hardware: {e}")))?;
        let phase_alpha = self.phase_alpha.unwrap_or(std::f64::consts::PI);
        if !(phase_alpha.is_finite() && phase_alpha >= 0.0) {
            return Err(cfg(format!("`phase_alpha` must be finite and >= 0, got {phase_alpha}")));
        }
        if fig == Fig10PhaseEncode && !(n.is_power_of_two() && n <= 1 << 8) {
            return Err(cfg(format!("`N` = {n} must be a power of two up to 256 for phase encoding")));
        }

        Ok(Resolved {
            figure: fig,
            seed: self.seed,
            signal,
            values,
            n,
            snr,
            filter,
            levels,
            policy,
            mode: self.mode.unwrap_or(ShrinkMode::ExpectationDamping),
            shots,
            hardware,
            phase_alpha,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, RunError> {
        ExperimentConfig::from_json(text)
    }

    #[test]
    fn minimal_configs_resolve_for_every_figure() {
        for fig in FigureId::ALL {
            let r = ExperimentConfig::minimal(fig, 1).resolve().unwrap();
            assert_eq!(r.figure, fig);
            let text = format!(r#"{{"figure":"{}","seed":3}}"#, fig.as_str());
            assert_eq!(parse(&text).unwrap().figure, fig);
        }
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let e = parse(r#"{"figure":"fig5_hard","seed":1,"lamda":0.4}"#).unwrap_err().to_string();
        assert!(e.contains("lamda"), "{e}");
        let e = parse(r#"{"figure":"fig5_hard"}"#).unwrap_err().to_string();
        assert!(e.contains("seed"), "{e}");
        let e = parse(r#"{"figure":"fig99","seed":1}"#).unwrap_err().to_string();
        assert!(e.contains("fig99"), "{e}");
        let e = parse("{\"figure\":\n\"fig5_hard\",").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let bad = [
            r#"{"figure":"fig3_doppler","seed":1,"snr":0}"#,
            r#"{"figure":"fig3_doppler","seed":1,"N":1000}"#,
            r#"{"figure":"fig3_doppler","seed":1,"levels":11}"#,
            r#"{"figure":"fig3_doppler","seed":1,"filter":"sym8"}"#,
            r#"{"figure":"fig5_hard","seed":1,"policy":{"kind":"classical_soft","lambda":0.1}}"#,
            r#"{"figure":"fig5_hard","seed":1,"shots":0}"#,
            r#"{"figure":"hw_idle","seed":1,"hardware":{"T2":-1}}"#,
            r#"{"figure":"fig8_flag","seed":1,"policy":{"kind":"cos4_gamma"}}"#,
            r#"{"figure":"fig5_hard","seed":1,"values":[1,2],"N":3}"#,
        ];
        for text in bad {
            let err = parse(text).and_then(|c| c.resolve().map(|_| ()));
            assert!(matches!(err, Err(RunError::Config(_))), "{text}");
        }
    }

    #[test]
    fn custom_filter_and_overrides() {
        let c = parse(
            r#"{"figure":"fig1_dwt","seed":1,"filter":{"name":"mine","h":[0.7071067811865476,0.7071067811865476]},"signal":"doppler","N":16,"levels":2}"#,
        )
        .unwrap();
        let r = c.resolve().unwrap();
        assert_eq!((r.n, r.levels, r.signal), (16, 2, SignalName::Doppler));
        assert_eq!(r.filter.name(), "mine");
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = ExperimentConfig::minimal(FigureId::Fig5Hard, 1);
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
