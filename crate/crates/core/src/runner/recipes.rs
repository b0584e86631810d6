use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{Artifact, ExperimentConfig, FigureId, Resolved, RunError};
use crate::channels::{
    ancilla_dilation, ancilla_shrink_dilation, apply_channel, kraus_from_dilation, phase_damping,
    retention_for_multiplier, RetentionVector,
};
use crate::fmt::csv_table;
use crate::pipeline::{
    ancilla_flag_experiment, denoise_classical, denoise_quantum, doppler, gamma_from_idle, idle_time_for_retention,
    metrics, randomized_z_shrink, scope_mask, shrink_coefficients, smooth_ancilla_experiment, substream_seed,
    NoisySignalSpec, ShrinkMode, SignalName,
};
use crate::policies::{classical_apply, gamma_of, multiplier_of, ShrinkagePolicy};
use crate::state::{amplitude_encode, expectation_encode, phase_encode, rescale_to_unit, Pauli, PauliString, StateVector, C64};
use crate::wavelet::{mallat_forward, matrix_to_csv, Route, WaveletTransform};

/// One named numerical check and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), passed: value <= tolerance, value, tolerance }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<Artifact>,
    pub summary: Map<String, Value>,
    pub checks: Vec<Check>,
    pub report: Value,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn index_col(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(|i| i as f64)
}

fn series_csv(values: &[f64]) -> String {
    csv_table(&["index", "value"], index_col(values.len()).zip(values).map(|(i, v)| vec![i, *v]))
}

/// The clean input: explicit values or the Doppler signal.
fn clean_input(r: &Resolved) -> Result<Vec<f64>, RunError> {
    match (&r.values, r.signal) {
        (Some(v), _) => Ok(v.clone()),
        (None, SignalName::Doppler) => Ok(doppler(r.n)?),
        (None, SignalName::Custom) => Err(RunError::Config("custom signal requires `values`".into())),
    }
}

fn noisy_input(r: &Resolved) -> Result<(Vec<f64>, Vec<f64>), RunError> {
    let spec = NoisySignalSpec { signal_name: r.signal, n: r.n, snr: r.snr, seed: r.seed };
    let s = spec.realize(r.values.as_deref())?;
    Ok((s.clean, s.noisy))
}

fn shots_seed(r: &Resolved) -> u64 {
    substream_seed(r.seed, "shots")
}

/// Completeness of every channel a damping policy instantiates on `xs`.
fn cptp_certificate(policy: &ShrinkagePolicy, mode: ShrinkMode, xs: &[f64]) -> Result<Check, RunError> {
    let mut worst = 0.0f64;
    for &x in xs {
        let x = x.clamp(-1.0, 1.0);
        let residual = match mode {
            ShrinkMode::IdealMultiplier => 0.0,
            ShrinkMode::ExpectationDamping => phase_damping(gamma_of(policy, x)?)?.completeness_residual(),
            ShrinkMode::AncillaDilation => {
                let s = retention_for_multiplier(multiplier_of(policy, x)?)?;
                kraus_from_dilation(&ancilla_shrink_dilation(s)?)?.completeness_residual()
            }
        };
        worst = worst.max(residual);
    }
    Ok(Check::at_most("cptp_certificate", worst, 1e-12))
}

fn fig1(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let x = clean_input(r)?;
    let wt = WaveletTransform::new(&r.filter, r.n, r.levels)?;
    let matrix = wt.forward(&x, Route::Matrix)?.values;
    let mallat = wt.forward(&x, Route::Mallat)?.values;
    let givens = wt.forward(&x, Route::Givens)?.values;
    let route_gap = max_abs_diff(&matrix, &mallat).max(max_abs_diff(&matrix, &givens)).max(max_abs_diff(&mallat, &givens));
    c.push(Check::at_most("route_agreement", route_gap, 1e-9));
    c.push(Check::at_most("orthogonality", wt.dense().orthogonality_residual(), 1e-10));

    // The same matrix as a gate on the amplitude-encoded signal.
    let enc = amplitude_encode(&x)?;
    let w = wt.dense().matrix().map(|v| C64::new(v, 0.0));
    let targets: Vec<usize> = (0..enc.state.qubits()).collect();
    let out = enc.state.apply_unitary(&w, &targets)?;
    let quantum: Vec<f64> = out.amps().iter().map(|a| a.re * enc.norm).collect();
    let imag = out.amps().iter().fold(0.0f64, |m, a| m.max(a.im.abs()));
    c.push(Check::at_most("quantum_agreement", max_abs_diff(&quantum, &matrix).max(imag), 1e-9));
    let energy_in: f64 = x.iter().map(|v| v * v).sum();
    let energy_out: f64 = matrix.iter().map(|v| v * v).sum();
    c.push(Check::at_most("energy_preserved", (energy_in - energy_out).abs() / energy_in.max(1e-300), 1e-12));

    let back = wt.inverse(&wt.forward(&x, Route::Givens)?, Route::Givens)?;
    c.push(Check::at_most("givens_round_trip", max_abs_diff(&back, &x), 1e-9));

    let report = wt.plan().report();
    s.insert("rotation_count".into(), json!(report.count));
    s.insert("rotation_depth".into(), json!(report.depth));
    s.insert("route_max_difference".into(), json!(route_gap));

    let rows = (0..r.n).map(|i| vec![i as f64, x[i], matrix[i], mallat[i], givens[i], quantum[i]]);
    let mut files = vec![Artifact::new(
        "fig1_dwt.csv",
        csv_table(&["index", "signal", "matrix", "mallat", "givens", "quantum"], rows),
    )];
    if r.n <= 64 {
        files.push(Artifact::new("wavelet_matrix.csv", matrix_to_csv(wt.dense().matrix())));
    }
    Ok(files)
}

fn shrink_figure(
    name: &str,
    r: &Resolved,
    s: &mut Map<String, Value>,
    c: &mut Vec<Check>,
) -> Result<Vec<Artifact>, RunError> {
    let values = clean_input(r)?;
    let mask = vec![true; values.len()];
    let out = shrink_coefficients(&values, &mask, &r.policy, r.mode, r.shots, shots_seed(r))?;
    let ideal: Vec<f64> = out
        .rescaled
        .iter()
        .map(|x| Ok(multiplier_of(&r.policy, x.clamp(-1.0, 1.0))? * x))
        .collect::<Result<_, RunError>>()?;
    c.push(cptp_certificate(&r.policy, r.mode, &out.rescaled)?);
    match r.shots {
        None => c.push(Check::at_most("mode_agreement", max_abs_diff(&out.shrunk_rescaled, &ideal), 1e-10)),
        Some(shots) => {
            let worst = out
                .shrunk_rescaled
                .iter()
                .zip(&ideal)
                .zip(&out.standard_errors)
                .map(|((a, b), se)| if *se > 0.0 { (a - b).abs() / se } else { 0.0 })
                .fold(0.0f64, f64::max);
            s.insert("shots".into(), json!(shots));
            s.insert("max_standard_errors".into(), json!(worst));
        }
    }
    s.insert("scale".into(), json!(out.scale.scale));
    let rows = (0..values.len()).map(|i| {
        vec![i as f64, values[i], out.rescaled[i], out.multipliers[i], ideal[i], out.shrunk_rescaled[i], out.standard_errors[i]]
    });
    let header = ["index", "value", "original", "multiplier", "ideal", "shrunk", "standard_error"];
    Ok(vec![Artifact::new(format!("{name}.csv"), csv_table(&header, rows))])
}

fn fig3(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let (clean, noisy) = noisy_input(r)?;
    let seed = shots_seed(r);
    let mut cptp = denoise_quantum(&noisy, &r.filter, r.levels, &r.policy, r.mode, r.shots, seed)?;
    let ideal = denoise_quantum(&noisy, &r.filter, r.levels, &r.policy, ShrinkMode::IdealMultiplier, None, 0)?;
    let exact = match r.shots {
        None => cptp.clone(),
        Some(_) => denoise_quantum(&noisy, &r.filter, r.levels, &r.policy, r.mode, None, 0)?,
    };
    c.push(Check::at_most("mode_agreement", max_abs_diff(&exact.estimate, &ideal.estimate), 1e-10));
    let mask = scope_mask(&exact.before.layout, r.policy.scope);
    let in_scope: Vec<f64> = exact.shrink.rescaled.iter().zip(&mask).filter(|(_, m)| **m).map(|(x, _)| *x).collect();
    c.push(cptp_certificate(&r.policy, r.mode, &in_scope)?);

    let mut best = (f64::INFINITY, 0.0, Vec::new());
    for k in 0..=100 {
        let lambda = k as f64 / 100.0;
        let d = denoise_classical(&noisy, &r.filter, r.levels, lambda)?;
        let m = metrics(&clean, &d.estimate, &noisy)?.mse_estimate;
        if m < best.0 {
            best = (m, lambda, d.estimate);
        }
    }
    cptp.report.score(&clean, &noisy, &cptp.estimate)?;
    let mse_exact = metrics(&clean, &exact.estimate, &noisy)?.mse_estimate;
    s.insert("denoise".into(), serde_json::to_value(&cptp.report).unwrap_or(Value::Null));
    s.insert("mse_exact".into(), json!(mse_exact));
    s.insert("mse_classical_best".into(), json!(best.0));
    s.insert("lambda_classical_best".into(), json!(best.1));
    s.insert("exact_to_classical_ratio".into(), json!(mse_exact / best.0));
    s.insert("scale".into(), json!(cptp.shrink.scale.scale));

    let before = &cptp.before.values;
    let after = &cptp.after.values;
    let coeff_rows = (0..before.len()).map(|i| vec![i as f64, before[i], after[i], cptp.report.multipliers[i]]);
    Ok(vec![
        Artifact::new("clean.csv", series_csv(&clean)),
        Artifact::new("noisy.csv", series_csv(&noisy)),
        Artifact::new("estimate.csv", series_csv(&cptp.estimate)),
        Artifact::new("classical.csv", series_csv(&best.2)),
        Artifact::new("coefficients.csv", csv_table(&["index", "before", "after", "multiplier"], coeff_rows)),
    ])
}

fn fig4(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let (_, noisy) = noisy_input(r)?;
    let coeffs = mallat_forward(&noisy, &r.filter, r.levels)?;
    let mask = scope_mask(&coeffs.layout, r.policy.scope);
    let shrink = shrink_coefficients(&coeffs.values, &mask, &r.policy, ShrinkMode::IdealMultiplier, None, 0)?;
    let retention: Vec<f64> = shrink.multipliers.iter().map(|m| m * m).collect();
    let enc = amplitude_encode(&coeffs.values)?;
    let u = ancilla_dilation(&RetentionVector::new(retention.clone())?, enc.state.qubits())?;
    let out = u.apply_to_state(&enc.state)?;
    let pre: Vec<f64> = enc.state.amps().iter().map(|a| a.norm_sqr()).collect();
    let post: Vec<f64> = out.amps().iter().take(r.n).map(|a| a.norm_sqr()).collect();
    let predicted: Vec<f64> = pre.iter().zip(&retention).map(|(p, s)| p * s).collect();
    c.push(Check::at_most("diagonal_scaling", max_abs_diff(&post, &predicted), 1e-12));
    c.push(Check::at_most("cptp_certificate", kraus_from_dilation(&u)?.completeness_residual(), 1e-12));
    s.insert("ancilla_zero_probability".into(), json!(post.iter().sum::<f64>()));
    let rows = (0..r.n).map(|i| vec![i as f64, pre[i], post[i], retention[i]]);
    Ok(vec![Artifact::new("fig4_diag.csv", csv_table(&["index", "pre", "post", "retention"], rows))])
}

fn unit_input(r: &Resolved) -> Result<Vec<f64>, RunError> {
    Ok(rescale_to_unit(&clean_input(r)?)?.0)
}

fn fig7(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let grid: Vec<f64> = (0..201).map(|k| -1.0 + k as f64 / 100.0).collect();
    let rule: Vec<f64> = grid.iter().map(|x| classical_apply(&r.policy, *x)).collect::<Result<_, _>>()?;
    let growth = grid.iter().zip(&rule).map(|(x, y)| y.abs() - x.abs()).fold(f64::NEG_INFINITY, f64::max);
    c.push(Check::at_most("never_grows", growth, 0.0));
    let d = unit_input(r)?;
    let mapped: Vec<f64> = d.iter().map(|x| classical_apply(&r.policy, *x)).collect::<Result<_, _>>()?;
    s.insert("energy_ratio".into(), json!(mapped.iter().map(|v| v * v).sum::<f64>() / d.iter().map(|v| v * v).sum::<f64>()));
    Ok(vec![
        Artifact::new("fig7_rule.csv", csv_table(&["x", "f"], grid.iter().zip(&rule).map(|(x, y)| vec![*x, *y]))),
        Artifact::new(
            "fig7_signal.csv",
            csv_table(&["index", "original", "mapped"], (0..d.len()).map(|i| vec![i as f64, d[i], mapped[i]])),
        ),
    ])
}

fn fig8(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let d = unit_input(r)?;
    let lambda = r.policy.lambda.unwrap_or(0.4);
    let shots = r.shots.unwrap_or(1024);
    let out = ancilla_flag_experiment(&d, lambda, shots, shots_seed(r))?;
    let ind: Vec<f64> = out.indicator.iter().map(|f| f64::from(u8::from(*f))).collect();
    c.push(Check::at_most("flag_matches_indicator", max_abs_diff(&out.probabilities, &ind), 0.0));
    s.insert("lambda".into(), json!(lambda));
    s.insert("flagged".into(), json!(out.indicator.iter().filter(|f| **f).count()));
    let rows = (0..d.len()).map(|i| vec![i as f64, d[i], ind[i], out.probabilities[i]]);
    Ok(vec![Artifact::new("fig8_flag.csv", csv_table(&["index", "value", "indicator", "probability"], rows))])
}

fn fig9(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let d = unit_input(r)?;
    let shots = r.shots.unwrap_or(1024);
    let out = smooth_ancilla_experiment(&d, shots, shots_seed(r))?;
    let in_range = out.probabilities.iter().all(|p| (0.0..=1.0).contains(p));
    c.push(Check::at_most("probabilities_in_range", if in_range { 0.0 } else { 1.0 }, 0.0));
    let se = 0.5 / (shots as f64).sqrt();
    s.insert("max_standard_errors".into(), json!(max_abs_diff(&out.probabilities, &out.exact) / se));
    let rows = (0..d.len()).map(|i| vec![i as f64, d[i], out.probabilities[i], out.exact[i], out.z_ancilla[i], out.shrunk[i]]);
    let header = ["index", "value", "probability", "exact", "z_ancilla", "shrunk"];
    Ok(vec![Artifact::new("fig9_smooth_ancilla.csv", csv_table(&header, rows))])
}

fn fig10(r: &Resolved, s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let y = clean_input(r)?;
    let coeffs = mallat_forward(&y, &r.filter, r.levels)?;
    let (d, _) = rescale_to_unit(&coeffs.values)?;
    let psi = phase_encode(&d, r.phase_alpha)?;
    let rho = psi.to_density();
    let q = rho.qubits();
    let x0 = PauliString::single(q, 0, Pauli::X);
    let before = rho.expect(&x0)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for k in 0..=20 {
        let gamma = k as f64 / 20.0;
        let ch = phase_damping(gamma)?;
        let mut out = rho.clone();
        for t in 0..q {
            out = apply_channel(&out, &ch, &[t])?;
        }
        let after = out.expect(&x0)?;
        let predicted = (1.0 - gamma).sqrt() * before;
        worst = worst.max((after - predicted).abs());
        rows.push(vec![gamma, before, after, predicted]);
    }
    c.push(Check::at_most("coherence_factor", worst, 1e-12));
    s.insert("m_before".into(), json!(before));
    let coeff_rows = (0..d.len()).map(|i| vec![i as f64, y[i], coeffs.values[i], d[i], r.phase_alpha * d[i]]);
    Ok(vec![
        Artifact::new(
            "fig10_coefficients.csv",
            csv_table(&["index", "value", "coefficient", "normalized", "phase"], coeff_rows),
        ),
        Artifact::new("fig10_phase_damping.csv", csv_table(&["gamma", "m_before", "m_after", "predicted"], rows)),
    ])
}

fn hw_idle(r: &Resolved, _s: &mut Map<String, Value>, c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let hw = &r.hardware;
    let plus = StateVector::uniform(1)?.to_density();
    let mut rows = Vec::new();
    let (mut trip, mut coherence) = (0.0f64, 0.0f64);
    for k in 1..=100 {
        let s = k as f64 / 100.0;
        let t = idle_time_for_retention(s, hw)?;
        let gamma = gamma_from_idle(t, hw)?;
        let x = apply_channel(&plus, &phase_damping(gamma)?, &[0])?.bloch()?.x;
        trip = trip.max((gamma - (1.0 - s * s)).abs());
        coherence = coherence.max((x - s).abs());
        rows.push(vec![s, t, gamma, 1.0 - s * s, x]);
    }
    c.push(Check::at_most("idle_round_trip", trip, 1e-12));
    c.push(Check::at_most("idle_coherence", coherence, 1e-12));
    Ok(vec![Artifact::new(
        "hw_idle.csv",
        csv_table(&["retention", "idle_time", "gamma", "one_minus_s2", "coherence"], rows),
    )])
}

fn hw_randz(r: &Resolved, s: &mut Map<String, Value>, _c: &mut Vec<Check>) -> Result<Vec<Artifact>, RunError> {
    let shots = r.shots.unwrap_or(r.hardware.shots);
    let bound = 4.0 / (shots as f64).sqrt();
    let mut rows = Vec::new();
    let mut inside = 0usize;
    for (gi, gamma) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
        for (xi, x) in [-1.0, -0.5, 0.0, 0.5, 1.0].into_iter().enumerate() {
            let seed = substream_seed(r.seed, &format!("randz/{gi}/{xi}"));
            let est = randomized_z_shrink(&expectation_encode(x)?, gamma, shots, seed)?;
            let exact = (1.0 - 2.0 * gamma) * x;
            inside += usize::from((est - exact).abs() <= bound);
            rows.push(vec![gamma, x, est, exact, bound]);
        }
    }
    s.insert("shots".into(), json!(shots));
    s.insert("within_bound".into(), json!(inside));
    Ok(vec![Artifact::new("hw_randz.csv", csv_table(&["gamma", "x", "estimate", "exact", "bound"], rows))])
}

/// Runs one experiment in memory. Fails with [`RunError::Invariant`] when a
/// numerical check does not hold; nothing is written in that case.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let r = config.resolve()?;
    let mut summary = Map::new();
    let mut checks = Vec::new();
    let (s, c) = (&mut summary, &mut checks);
    let mut files = match r.figure {
        FigureId::Fig1Dwt => fig1(&r, s, c)?,
        FigureId::Fig5Hard => shrink_figure("fig5_hard", &r, s, c)?,
        FigureId::Fig6Smooth => shrink_figure("fig6_smooth", &r, s, c)?,
        FigureId::Fig3Doppler => fig3(&r, s, c)?,
        FigureId::Fig4Diag => fig4(&r, s, c)?,
        FigureId::Fig7Power => fig7(&r, s, c)?,
        FigureId::Fig8Flag => fig8(&r, s, c)?,
        FigureId::Fig9SmoothAncilla => fig9(&r, s, c)?,
        FigureId::Fig10PhaseEncode => fig10(&r, s, c)?,
        FigureId::HwIdle => hw_idle(&r, s, c)?,
        FigureId::HwRandz => hw_randz(&r, s, c)?,
    };
    if let Some(bad) = checks.iter().find(|c| !c.passed) {
        return Err(RunError::Invariant {
            name: bad.name.clone(),
            detail: format!("{:e} exceeds {:e}", bad.value, bad.tolerance),
        });
    }
    let mut effective = config.clone();
    effective.output_dir = None;
    let report = json!({
        "figure": r.figure.as_str(),
        "seed": r.seed,
        "config_hash": config.hash(),
        "config": effective,
        "filter": r.filter.to_spec(),
        "levels": r.levels,
        "policy": r.policy,
        "mode": r.mode,
        "shots": r.shots,
        "summary": summary,
        "checks": checks,
        "files": files.iter().map(|f| f.name.clone()).collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| RunError::Compute(e.to_string()))? + "\n";
    files.push(Artifact::new("report.json", text));
    Ok(RunOutput { files, summary, checks, report })
}
