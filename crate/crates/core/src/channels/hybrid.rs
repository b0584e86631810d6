//! Weak measurement, neighborhood mixing and measurement feedback.

use nalgebra::{DMatrix, DVector};

use super::{check_unit_interval, kraus::completeness_residual, ChannelError, KrausChannel, KRAUS_TOL};
use crate::state::{apply_local, check_unitary, DensityMatrix, StateVector, C64};

/// `ρ ↦ (1−η)ρ + η MρM†`.
///
/// When `M†M ≠ I` the map does not preserve trace; it is then only usable
/// with `renormalize`, which divides by the output trace and flags it.
#[derive(Debug, Clone)]
pub struct WeakMeasurement {
    eta: f64,
    m: DMatrix<C64>,
    renormalize: bool,
}

#[derive(Debug, Clone)]
pub struct WeakOutcome {
    pub state: DensityMatrix,
    /// Output trace before any renormalization.
    pub raw_trace: f64,
    pub renormalized: bool,
}

impl WeakMeasurement {
    pub fn new(eta: f64, m: DMatrix<C64>, renormalize: bool) -> Result<Self, ChannelError> {
        check_unit_interval("eta", eta)?;
        if !m.is_square() {
            return Err(ChannelError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        Ok(Self { eta, m, renormalize })
    }

    pub fn apply(&self, rho: &DensityMatrix, targets: &[usize]) -> Result<WeakOutcome, ChannelError> {
        let local = 1usize << targets.len();
        if self.m.nrows() != local {
            return Err(ChannelError::DimensionMismatch { expected: local, got: self.m.nrows() });
        }
        let kicked = rho.conjugate_by(&self.m, targets)?;
        let out = rho.matrix().scale(1.0 - self.eta) + kicked.scale(self.eta);
        let raw_trace = out.trace().re;
        let drift = (raw_trace - 1.0).abs();
        if drift <= KRAUS_TOL {
            return Ok(WeakOutcome { state: DensityMatrix::from_raw(rho.qubits(), out), raw_trace, renormalized: false });
        }
        if !self.renormalize {
            return Err(ChannelError::TraceNotPreserved(raw_trace));
        }
        if raw_trace <= 0.0 {
            return Err(ChannelError::TraceNotPreserved(raw_trace));
        }
        Ok(WeakOutcome {
            state: DensityMatrix::from_raw(rho.qubits(), out.unscale(raw_trace)),
            raw_trace,
            renormalized: true,
        })
    }

    /// Kraus form `{√(1−η) I, √η M}`, available when `M†M = I`.
    pub fn as_kraus(&self) -> Result<KrausChannel, ChannelError> {
        let d = self.m.nrows();
        let id = DMatrix::<C64>::identity(d, d);
        KrausChannel::new(vec![id.scale((1.0 - self.eta).sqrt()), self.m.scale(self.eta.sqrt())])
    }
}

/// Two-qubit factor `exp[−iα(XX + YY)]`: a rotation by `2α` inside the
/// single-excitation subspace `{|01⟩, |10⟩}`, identity on `|00⟩, |11⟩`.
fn hop_gate(alpha: f64) -> DMatrix<C64> {
    let (s, c) = (2.0 * alpha).sin_cos();
    let mut g = DMatrix::<C64>::identity(4, 4);
    g[(1, 1)] = C64::new(c, 0.0);
    g[(2, 2)] = C64::new(c, 0.0);
    g[(1, 2)] = C64::new(0.0, -s);
    g[(2, 1)] = C64::new(0.0, -s);
    g
}

/// `U_mix(α) = E_0 E_1 ⋯ E_{n−2}` with `E_j = exp[−iα(X_j X_{j+1} + Y_j Y_{j+1})]`
/// on an open chain.
pub fn mixing_unitary(alpha: f64, qubits: usize) -> Result<DMatrix<C64>, ChannelError> {
    if qubits < 2 {
        return Err(ChannelError::TooFewQubits(qubits));
    }
    if qubits > crate::state::MAX_QUBITS {
        return Err(crate::state::StateError::TooManyQubits(qubits).into());
    }
    let dim = 1usize << qubits;
    let mut u = DMatrix::<C64>::identity(dim, dim);
    let gate = hop_gate(alpha);
    // Rightmost factor acts first.
    for j in (0..qubits - 1).rev() {
        apply_local(&gate, &[j, j + 1], qubits, &mut u)?;
    }
    Ok(u)
}

/// Predicted first-order effect `d̃_j = d_j + α(d_{j−1} + d_{j+1})` (missing
/// neighbors count as zero).
pub fn mixing_first_order(d: &[f64], alpha: f64) -> Vec<f64> {
    (0..d.len())
        .map(|j| {
            let left = if j > 0 { d[j - 1] } else { 0.0 };
            let right = d.get(j + 1).copied().unwrap_or(0.0);
            d[j] + alpha * (left + right)
        })
        .collect()
}

/// Runs `U_mix(α)` on `Σ_j d_j |e_j⟩` (one excitation on qubit `j`) and
/// reads back effective coefficients.
///
/// The hop generator contributes `−2iα` per neighbor, so the readout is
/// `d̃_j = d_j − ½ Im(ψ'_j)` (rescaled by `‖d‖`), which agrees with
/// [`mixing_first_order`] up to `O(α²)`.
pub fn mixing_effective_coefficients(d: &[f64], alpha: f64) -> Result<Vec<f64>, ChannelError> {
    let n = d.len();
    let u = mixing_unitary(alpha, n)?;
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut amps = DVector::<C64>::zeros(1 << n);
    for (j, v) in d.iter().enumerate() {
        amps[1 << j] = C64::new(*v, 0.0);
    }
    let psi = StateVector::normalized(amps)?;
    let out = &u * psi.amps();
    Ok(d.iter().enumerate().map(|(j, v)| v - 0.5 * out[1 << j].im * norm).collect())
}

/// `ρ ↦ Σ_m R_m M_m ρ M_m† R_m†` as the Kraus set `{R_m M_m}`.
pub fn feedback_map(pairs: &[(DMatrix<C64>, DMatrix<C64>)]) -> Result<KrausChannel, ChannelError> {
    if pairs.is_empty() {
        return Err(ChannelError::Empty);
    }
    let measurements: Vec<DMatrix<C64>> = pairs.iter().map(|(m, _)| m.clone()).collect();
    for m in &measurements {
        if m.nrows() != measurements[0].nrows() || !m.is_square() {
            return Err(ChannelError::DimensionMismatch { expected: measurements[0].nrows(), got: m.nrows() });
        }
    }
    let residual = completeness_residual(&measurements);
    if residual > KRAUS_TOL {
        return Err(ChannelError::IncompleteMeasurement(residual));
    }
    let mut ops = Vec::with_capacity(pairs.len());
    for (m, r) in pairs {
        check_unitary(r).map_err(|e| match e {
            crate::state::StateError::NonUnitary(x) => ChannelError::NonUnitary(x),
            other => other.into(),
        })?;
        if r.nrows() != m.nrows() {
            return Err(ChannelError::DimensionMismatch { expected: m.nrows(), got: r.nrows() });
        }
        ops.push(r * m);
    }
    KrausChannel::new(ops)
}
