use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_unit_interval, ChannelError};
use crate::state::{qubits_for_dim, DensityMatrix, C64};

/// Completeness tolerance `‖Σ K†K − I‖_F`.
pub const KRAUS_TOL: f64 = 1e-12;

/// Ordered Kraus operators of a CPTP map on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<DMatrix<C64>>,
    qubits: usize,
}

impl KrausChannel {
    pub fn new(ops: Vec<DMatrix<C64>>) -> Result<Self, ChannelError> {
        let dim = ops.first().ok_or(ChannelError::Empty)?.nrows();
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(ChannelError::DimensionMismatch { expected: dim, got: k.ncols().max(k.nrows()) });
            }
        }
        let qubits = qubits_for_dim(dim)?;
        let ch = Self { ops, qubits };
        let residual = ch.completeness_residual();
        if residual > KRAUS_TOL {
            return Err(ChannelError::Incomplete(residual));
        }
        Ok(ch)
    }

    pub fn identity(qubits: usize) -> Result<Self, ChannelError> {
        let dim = 1usize << qubits;
        Self::new(vec![DMatrix::identity(dim, dim)])
    }

    pub fn ops(&self) -> &[DMatrix<C64>] {
        &self.ops
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// `‖Σ_m K_m† K_m − I‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.ops)
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel, ChannelError> {
        if self.qubits != other.qubits {
            return Err(ChannelError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let ops = other.ops.iter().flat_map(|b| self.ops.iter().map(move |a| b * a)).collect();
        KrausChannel::new(ops)
    }

    /// Applies the channel to the whole of a register of matching size.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
        let targets: Vec<usize> = (0..self.qubits).collect();
        apply_channel(rho, self, &targets)
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            qubits: self.qubits,
            ops: self
                .ops
                .iter()
                .map(|k| (0..k.nrows()).map(|i| (0..k.ncols()).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect()).collect())
                .collect(),
        }
    }

    pub fn from_json(doc: &ChannelJson) -> Result<Self, ChannelError> {
        let ops = doc
            .ops
            .iter()
            .map(|rows| {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(ChannelError::Parse("Kraus operator rows must form a square matrix".into()));
                }
                Ok(DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ch = Self::new(ops)?;
        if ch.qubits != doc.qubits {
            return Err(ChannelError::DimensionMismatch { expected: doc.qubits, got: ch.qubits });
        }
        Ok(ch)
    }
}

pub(crate) fn completeness_residual(ops: &[DMatrix<C64>]) -> f64 {
    let dim = ops.first().map_or(0, |k| k.ncols());
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for k in ops {
        sum += k.adjoint() * k;
    }
    (sum - DMatrix::<C64>::identity(dim, dim)).norm()
}

/// JSON form: Kraus operators as row-major matrices of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub qubits: usize,
    pub ops: Vec<Vec<Vec<[f64; 2]>>>,
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0), C64::new(d, 0.0)])
}

/// `K₀ = diag(1, √(1−γ))`, `K₁ = [[0,0],[0,√γ]]`.
pub fn phase_damping(gamma: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("gamma", gamma)?;
    KrausChannel::new(vec![real2(1.0, 0.0, 0.0, (1.0 - gamma).sqrt()), real2(0.0, 0.0, 0.0, gamma.sqrt())])
}

/// `{√(1−γ) I, √γ Z}`.
pub fn phase_flip(gamma: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("gamma", gamma)?;
    let a = (1.0 - gamma).sqrt();
    let b = gamma.sqrt();
    KrausChannel::new(vec![real2(a, 0.0, 0.0, a), real2(b, 0.0, 0.0, -b)])
}

/// `ρ ↦ sρ + (1−s) ZρZ` with `{√s I, √(1−s) Z}`. Transverse Bloch components
/// scale by `2s − 1`; `⟨Z⟩` is untouched.
pub fn ancilla_shrink_channel(s: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("s", s)?;
    let a = s.sqrt();
    let b = (1.0 - s).sqrt();
    KrausChannel::new(vec![real2(a, 0.0, 0.0, a), real2(b, 0.0, 0.0, -b)])
}

/// Decay towards `|0⟩`: `K₀ = diag(1, √(1−γ))`, `K₁ = [[0, √γ],[0, 0]]`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel, ChannelError> {
    check_unit_interval("gamma", gamma)?;
    KrausChannel::new(vec![real2(1.0, 0.0, 0.0, (1.0 - gamma).sqrt()), real2(0.0, gamma.sqrt(), 0.0, 0.0)])
}

/// Retention `s` for which [`ancilla_shrink_channel`] multiplies `⟨X⟩` by `m`.
pub fn retention_for_multiplier(m: f64) -> Result<f64, ChannelError> {
    check_unit_interval("multiplier", m)?;
    Ok((1.0 + m) / 2.0)
}

/// `Σ_m K_m ρ K_m†` with the channel acting on `targets`.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    targets: &[usize],
) -> Result<DensityMatrix, ChannelError> {
    if targets.len() != ch.qubits() {
        return Err(ChannelError::DimensionMismatch { expected: ch.qubits(), got: targets.len() });
    }
    let residual = ch.completeness_residual();
    if residual > KRAUS_TOL {
        return Err(ChannelError::Incomplete(residual));
    }
    let dim = rho.dim();
    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for k in ch.ops() {
        out += rho.conjugate_by(k, targets)?;
    }
    Ok(DensityMatrix::from_raw(rho.qubits(), out))
}
