use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::channels::{
    amplitude_damping, ancilla_dilation, ancilla_shrink_channel, dilate_apply_trace, kraus_from_dilation, phase_damping,
    phase_flip, KrausChannel, RetentionVector,
};
use crate::pipeline::{shrink_coefficients, ShrinkMode};
use crate::policies::ShrinkagePolicy;
use crate::state::{random, DensityMatrix, C64};
use crate::wavelet::{Route, WaveletFilter, WaveletTransform};

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = format!("{:<width$}  {:<6}  {:>12}  {:>9}\n", "invariant", "status", "value", "tolerance");
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out += &format!("{:<width$}  {:<6}  {:>12.3e}  {:>9.0e}\n", c.name, status, c.value, c.tolerance);
        }
        out
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn density_gap(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// Largest validity violation of `ch` over random inputs: trace drift,
/// negative eigenvalue beyond tolerance.
fn validity_residual(ch: &KrausChannel, inputs: &[DensityMatrix]) -> f64 {
    inputs
        .iter()
        .map(|rho| match ch.apply(rho) {
            Ok(out) => (out.trace().re - 1.0).abs().max((-out.min_eigenvalue() - 1e-10).max(0.0)),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn corrupt(ch: &KrausChannel) -> Vec<DMatrix<C64>> {
    let mut ops = ch.ops().to_vec();
    ops[0] *= C64::new(1.01, 0.0);
    ops
}

fn raw_completeness(ops: &[DMatrix<C64>]) -> f64 {
    let dim = ops[0].ncols();
    let sum = ops.iter().fold(DMatrix::<C64>::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
    (sum - DMatrix::<C64>::identity(dim, dim)).norm()
}

/// Runs the invariant suite. `inject_fault` scales one Kraus operator of the
/// phase-damping family so the completeness check must fail.
pub fn verify(inject_fault: bool) -> VerifyReport {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    // Transforms: orthogonality and route agreement.
    let mut ortho = 0.0f64;
    let mut routes = 0.0f64;
    for name in ["haar", "daub4"] {
        let f = WaveletFilter::named(name).expect("built-in filter");
        for n in [8, 64] {
            for levels in 1..=3 {
                let wt = WaveletTransform::new(&f, n, levels).expect("valid size");
                ortho = ortho.max(wt.dense().orthogonality_residual());
                let x: Vec<f64> = (0..n).map(|i| ((i * 7 + levels) % 11) as f64 - 5.0).collect();
                let a = wt.forward(&x, Route::Matrix).expect("matrix").values;
                let b = wt.forward(&x, Route::Mallat).expect("mallat").values;
                let c = wt.forward(&x, Route::Givens).expect("givens").values;
                routes = routes.max(max_abs_diff(&a, &b)).max(max_abs_diff(&a, &c));
            }
        }
    }
    checks.push(Check::at_most("orthogonality", ortho, 1e-10));
    checks.push(Check::at_most("route_agreement", routes, 1e-9));

    // Channels: completeness and validity on random states.
    let inputs: Vec<DensityMatrix> = (0..10).map(|_| random::density(1, &mut rng)).collect();
    let mut complete = 0.0f64;
    let mut valid = 0.0f64;
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        let family = [phase_damping(p), phase_flip(p), ancilla_shrink_channel(p), amplitude_damping(p)];
        for (i, ch) in family.into_iter().enumerate() {
            let ch = ch.expect("parameter in range");
            let residual = if inject_fault && i == 0 && k == 10 { raw_completeness(&corrupt(&ch)) } else { ch.completeness_residual() };
            complete = complete.max(residual);
            valid = valid.max(validity_residual(&ch, &inputs));
        }
    }
    checks.push(Check::at_most("kraus_completeness", complete, 1e-12));
    checks.push(Check::at_most("state_validity", valid, 1e-12));

    // Dilation against its own Kraus sum.
    let mut dilation = 0.0f64;
    for qubits in 1..=3usize {
        for _ in 0..3 {
            let s: Vec<f64> = (0..1usize << qubits).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let u = ancilla_dilation(&RetentionVector::new(s).expect("retention"), qubits).expect("dilation");
            let ch = kraus_from_dilation(&u).expect("kraus");
            let rho = random::density(qubits, &mut rng);
            let a = dilate_apply_trace(&rho, &u).expect("dilate");
            let b = ch.apply(&rho).expect("kraus sum");
            dilation = dilation.max(density_gap(&a, &b));
        }
    }
    checks.push(Check::at_most("dilation_equivalence", dilation, 1e-10));

    // Bloch attenuation laws.
    let mut laws = 0.0f64;
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        for rho in &inputs {
            let b = rho.bloch().expect("qubit");
            let pd = phase_damping(p).unwrap().apply(rho).unwrap().bloch().unwrap();
            let pf = phase_flip(p).unwrap().apply(rho).unwrap().bloch().unwrap();
            let an = ancilla_shrink_channel(p).unwrap().apply(rho).unwrap().bloch().unwrap();
            laws = laws
                .max((pd.x - (1.0 - p).sqrt() * b.x).abs())
                .max((pf.x - (1.0 - 2.0 * p) * b.x).abs())
                .max((an.x - (2.0 * p - 1.0) * b.x).abs())
                .max((an.z - b.z).abs());
        }
    }
    checks.push(Check::at_most("bloch_attenuation", laws, 1e-12));

    // Realization modes agree with the ideal multiplier.
    let xs: Vec<f64> = (0..21).map(|k| -1.0 + k as f64 / 10.0).collect();
    let mask = vec![true; xs.len()];
    let mut modes = 0.0f64;
    for p in [ShrinkagePolicy::hard(0.4), ShrinkagePolicy::exp(2.0), ShrinkagePolicy::cos(4.0), ShrinkagePolicy::cos4()] {
        let ideal = shrink_coefficients(&xs, &mask, &p, ShrinkMode::IdealMultiplier, None, 0).expect("ideal");
        for mode in [ShrinkMode::ExpectationDamping, ShrinkMode::AncillaDilation] {
            let got = shrink_coefficients(&xs, &mask, &p, mode, None, 0).expect("mode");
            modes = modes.max(max_abs_diff(&got.shrunk_rescaled, &ideal.shrunk_rescaled));
        }
    }
    checks.push(Check::at_most("mode_agreement", modes, 1e-10));

    VerifyReport { checks }
}
