//! Stinespring dilations: a unitary on system ⊗ ancilla with the ancilla
//! prepared in `|0…0⟩` and traced out afterwards.
//!
//! The ancilla occupies the high qubits of the joint register, so joint
//! basis index = `system_index + ancilla_index · 2^{system_qubits}`.

use nalgebra::DMatrix;

use super::{check_unit_interval, kraus::completeness_residual, ChannelError, KrausChannel, KRAUS_TOL};
use crate::state::{check_unitary, partial_trace, DensityMatrix, StateVector, C64, MAX_QUBITS};

/// Per-index retention `s_j ∈ [0,1]` and its control angle `θ_j = arccos √s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetentionVector {
    s: Vec<f64>,
    theta: Vec<f64>,
}

impl RetentionVector {
    pub fn new(s: Vec<f64>) -> Result<Self, ChannelError> {
        for &v in &s {
            check_unit_interval("s", v)?;
        }
        let theta = s.iter().map(|v| v.sqrt().acos()).collect();
        Ok(Self { s, theta })
    }

    pub fn retention(&self) -> &[f64] {
        &self.s
    }

    pub fn angles(&self) -> &[f64] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct DilationUnitary {
    matrix: DMatrix<C64>,
    system_qubits: usize,
    ancilla_qubits: usize,
}

impl DilationUnitary {
    /// Wraps an arbitrary joint unitary.
    pub fn new(matrix: DMatrix<C64>, system_qubits: usize, ancilla_qubits: usize) -> Result<Self, ChannelError> {
        let total = system_qubits + ancilla_qubits;
        if total > MAX_QUBITS {
            return Err(crate::state::StateError::TooManyQubits(total).into());
        }
        let dim = 1usize << total;
        if matrix.nrows() != dim {
            return Err(ChannelError::DimensionMismatch { expected: dim, got: matrix.nrows() });
        }
        check_unitary(&matrix).map_err(|e| match e {
            crate::state::StateError::NonUnitary(r) => ChannelError::NonUnitary(r),
            other => other.into(),
        })?;
        Ok(Self { matrix, system_qubits, ancilla_qubits })
    }

    /// `exp[−i Σ_j θ_j |j⟩⟨j| ⊗ X]` for arbitrary (signed) angles, one per
    /// system basis state, with a single ancilla qubit.
    pub fn from_angles(angles: &[f64]) -> Result<Self, ChannelError> {
        let d = angles.len();
        if d == 0 || !d.is_power_of_two() {
            return Err(crate::state::StateError::NotPowerOfTwo(d).into());
        }
        let mut u = DMatrix::<C64>::zeros(2 * d, 2 * d);
        for (j, theta) in angles.iter().enumerate() {
            let (s, c) = theta.sin_cos();
            u[(j, j)] = C64::new(c, 0.0);
            u[(j + d, j + d)] = C64::new(c, 0.0);
            u[(j, j + d)] = C64::new(0.0, -s);
            u[(j + d, j)] = C64::new(0.0, -s);
        }
        Self::new(u, d.trailing_zeros() as usize, 1)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    /// `U (|ψ⟩ ⊗ |0…0⟩_E)` as a joint pure state.
    pub fn apply_to_state(&self, psi: &StateVector) -> Result<StateVector, ChannelError> {
        if psi.qubits() != self.system_qubits {
            return Err(ChannelError::DimensionMismatch { expected: self.system_qubits, got: psi.qubits() });
        }
        let ancilla = StateVector::basis(self.ancilla_qubits, 0)?;
        let joint = ancilla.tensor(psi)?;
        Ok(StateVector::normalized(&self.matrix * joint.amps())?)
    }
}

/// Block-diagonal dilation with `θ_j = arccos √s_j`: on system state `|j⟩`
/// the ancilla keeps amplitude `cos θ_j = √s_j` on `|0⟩`.
pub fn ancilla_dilation(s: &RetentionVector, system_qubits: usize) -> Result<DilationUnitary, ChannelError> {
    let dim = 1usize << system_qubits;
    if s.len() != dim {
        return Err(ChannelError::DimensionMismatch { expected: dim, got: s.len() });
    }
    DilationUnitary::from_angles(s.angles())
}

/// Single-qubit dilation of [`super::ancilla_shrink_channel`]: angles
/// `(θ, −θ)` on `|0⟩, |1⟩`, i.e. `exp(−iθ Z⊗X)`, whose Kraus pair is
/// `{cos θ · I, −i sin θ · Z}`.
pub fn ancilla_shrink_dilation(s: f64) -> Result<DilationUnitary, ChannelError> {
    check_unit_interval("s", s)?;
    let theta = s.sqrt().acos();
    DilationUnitary::from_angles(&[theta, -theta])
}

/// `K_e = ⟨e| U |0⟩_E` for every ancilla basis state `e`.
pub fn kraus_from_dilation(u: &DilationUnitary) -> Result<KrausChannel, ChannelError> {
    let ds = 1usize << u.system_qubits;
    let de = 1usize << u.ancilla_qubits;
    let ops: Vec<DMatrix<C64>> = (0..de)
        .map(|e| u.matrix.view((e * ds, 0), (ds, ds)).into_owned())
        .collect();
    let residual = completeness_residual(&ops);
    if residual > KRAUS_TOL {
        return Err(ChannelError::Incomplete(residual));
    }
    KrausChannel::new(ops)
}

/// `Tr_E[U (ρ ⊗ |0⟩⟨0|_E) U†]`.
pub fn dilate_apply_trace(rho: &DensityMatrix, u: &DilationUnitary) -> Result<DensityMatrix, ChannelError> {
    if rho.qubits() != u.system_qubits {
        return Err(ChannelError::DimensionMismatch { expected: u.system_qubits, got: rho.qubits() });
    }
    let ancilla = StateVector::basis(u.ancilla_qubits, 0)?.to_density();
    let joint = ancilla.tensor(rho)?;
    let all: Vec<usize> = (0..joint.qubits()).collect();
    let evolved = joint.apply_unitary(&u.matrix, &all)?;
    let keep: Vec<usize> = (0..u.system_qubits).collect();
    Ok(partial_trace(&evolved, &keep)?)
}
