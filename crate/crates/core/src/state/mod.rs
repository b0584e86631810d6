//! Dense statevectors and density matrices on up to [`MAX_QUBITS`] qubits,
//! classical-data encodings, Pauli observables and local unitaries.
//!
//! Qubit 0 is the least-significant bit of a basis index. States are compared
//! up to global phase (via fidelity or density matrices), never amplitude by
//! amplitude across independent preparations.

mod encode;
mod ops;
mod pauli;

pub use encode::{
    amplitude_encode, decode_hybrid, expectation_encode, hybrid_encode, phase_encode,
    rescale_to_unit, rescale_with, AmplitudeEncoding, HybridEncoding, RescaleMode, ScaleRecord,
};
pub use ops::{apply_local, check_unitary, partial_trace};
pub use pauli::{Pauli, PauliString};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::fmt;

pub type C64 = Complex64;

/// Dense simulation ceiling: a 2^12 × 2^12 density matrix.
pub const MAX_QUBITS: usize = 12;

pub const NORM_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("input vector is all zeros")]
    ZeroInput,
    #[error("value {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{0} qubits exceeds the dense simulation limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("operator is not unitary: ||U^dag U - I||_F = {0:e}")]
    NonUnitary(f64),
    #[error("invalid targets {targets:?} for {qubits} qubits: {reason}")]
    BadTargets { targets: Vec<usize>, qubits: usize, reason: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a single qubit, state has {0}")]
    NotSingleQubit(usize),
    #[error("invalid state: {0}")]
    Invalid(String),
    #[error("parameter {name} = {value} invalid: {reason}")]
    BadParameter { name: &'static str, value: f64, reason: &'static str },
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize, StateError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(StateError::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(StateError::TooManyQubits(n));
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that already have unit norm (within 1e-12).
    pub fn new(amps: DVector<C64>) -> Result<Self, StateError> {
        let qubits = qubits_for_dim(amps.len())?;
        let norm = amps.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::Invalid(format!("norm {norm} != 1")));
        }
        Ok(Self { qubits, amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: DVector<C64>) -> Result<Self, StateError> {
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(StateError::ZeroInput);
        }
        Self::new(amps.unscale(norm))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(qubits: usize, index: usize) -> Result<Self, StateError> {
        if qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(qubits));
        }
        let mut amps = DVector::zeros(1 << qubits);
        if index >= amps.len() {
            return Err(StateError::DimensionMismatch { expected: amps.len(), got: index });
        }
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// `|+⟩^{⊗n}`.
    pub fn uniform(qubits: usize) -> Result<Self, StateError> {
        if qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(qubits));
        }
        let dim = 1usize << qubits;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(Self { qubits, amps: DVector::from_element(dim, a) })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { qubits: self.qubits, rho: &self.amps * self.amps.adjoint() }
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.amps.dotc(&other.amps).norm()
    }

    /// Tensor product `self ⊗ other`; `other` occupies the low qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, StateError> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(qubits));
        }
        Ok(StateVector { qubits, amps: self.amps.kronecker(&other.amps) })
    }

    pub fn apply_unitary(&self, u: &DMatrix<C64>, targets: &[usize]) -> Result<StateVector, StateError> {
        check_unitary(u)?;
        let mut m = DMatrix::from_column_slice(self.dim(), 1, self.amps.as_slice());
        apply_local(u, targets, self.qubits, &mut m)?;
        Ok(StateVector { qubits: self.qubits, amps: m.column(0).into_owned() })
    }

    /// Rows `index,re,im`.
    pub fn to_csv(&self) -> String {
        fmt::csv_table(
            &["index", "re", "im"],
            self.amps.iter().enumerate().map(|(k, a)| vec![k as f64, a.re, a.im]),
        )
    }
}

pub fn to_density(state: &StateVector) -> DensityMatrix {
    state.to_density()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    rho: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace (1e-12) and positivity (-1e-10).
    pub fn new(rho: DMatrix<C64>) -> Result<Self, StateError> {
        if !rho.is_square() {
            return Err(StateError::DimensionMismatch { expected: rho.nrows(), got: rho.ncols() });
        }
        let qubits = qubits_for_dim(rho.nrows())?;
        let dm = Self { qubits, rho };
        dm.validate()?;
        Ok(dm)
    }

    /// Wraps without validation; callers guarantee the invariants hold.
    pub(crate) fn from_raw(qubits: usize, rho: DMatrix<C64>) -> Self {
        Self { qubits, rho }
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self, StateError> {
        if qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(qubits));
        }
        let dim = 1 << qubits;
        Ok(Self { qubits, rho: DMatrix::identity(dim, dim).unscale(dim as f64) })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = &self.rho - self.rho.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.rho + self.rho.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks all density-matrix invariants, naming the first violated one.
    pub fn validate(&self) -> Result<(), StateError> {
        let herm = self.hermiticity_residual();
        if herm > NORM_TOL {
            return Err(StateError::Invalid(format!("not Hermitian (residual {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(StateError::Invalid(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(StateError::Invalid(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `self ⊗ other`; `other` occupies the low qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, StateError> {
        let qubits = self.qubits + other.qubits;
        if qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(qubits));
        }
        Ok(Self { qubits, rho: self.rho.kronecker(&other.rho) })
    }

    /// `U ρ U†` with `U` embedded on `targets`.
    pub fn apply_unitary(&self, u: &DMatrix<C64>, targets: &[usize]) -> Result<DensityMatrix, StateError> {
        check_unitary(u)?;
        Ok(Self { qubits: self.qubits, rho: self.conjugate_by(u, targets)? })
    }

    /// `K ρ K†` for an arbitrary local operator (no unitarity check).
    pub(crate) fn conjugate_by(&self, k: &DMatrix<C64>, targets: &[usize]) -> Result<DMatrix<C64>, StateError> {
        let mut m = self.rho.clone();
        apply_local(k, targets, self.qubits, &mut m)?;
        let mut m = m.adjoint();
        apply_local(k, targets, self.qubits, &mut m)?;
        Ok(m.adjoint())
    }

    pub fn expect(&self, p: &PauliString) -> Result<f64, StateError> {
        p.expect(self)
    }

    pub fn bloch(&self) -> Result<BlochVector, StateError> {
        if self.qubits != 1 {
            return Err(StateError::NotSingleQubit(self.qubits));
        }
        let r = &self.rho;
        Ok(BlochVector {
            x: 2.0 * r[(1, 0)].re,
            y: 2.0 * r[(1, 0)].im,
            z: (r[(0, 0)] - r[(1, 1)]).re,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        partial_trace(self, keep)
    }

    /// Real part of the diagonal: computational-basis populations.
    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|z| z.re).collect()
    }
}

/// Coordinates `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn bloch(rho: &DensityMatrix) -> Result<BlochVector, StateError> {
    rho.bloch()
}

pub fn expect(rho: &DensityMatrix, p: &PauliString) -> Result<f64, StateError> {
    p.expect(rho)
}

/// Single-qubit Pauli matrices and Hadamard.
pub mod gates {
    use super::C64;
    use nalgebra::DMatrix;

    fn m2(a: [C64; 4]) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &a)
    }

    const O: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);
    const I: C64 = C64::new(0.0, 1.0);

    pub fn identity() -> DMatrix<C64> {
        DMatrix::identity(2, 2)
    }
    pub fn x() -> DMatrix<C64> {
        m2([O, ONE, ONE, O])
    }
    pub fn y() -> DMatrix<C64> {
        m2([O, -I, I, O])
    }
    pub fn z() -> DMatrix<C64> {
        m2([ONE, O, O, -ONE])
    }
    pub fn hadamard() -> DMatrix<C64> {
        let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        m2([r, r, r, -r])
    }
    /// `exp(-i φ Z / 2)`.
    pub fn rz(phi: f64) -> DMatrix<C64> {
        m2([C64::from_polar(1.0, -phi / 2.0), O, O, C64::from_polar(1.0, phi / 2.0)])
    }
    /// `exp(-i θ X)`.
    pub fn exp_x(theta: f64) -> DMatrix<C64> {
        let (s, c) = theta.sin_cos();
        m2([C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)])
    }
}

/// Random states and unitaries for property checks.
pub mod random {
    use super::{DensityMatrix, StateVector, C64};
    use nalgebra::{DMatrix, DVector};
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    }

    /// Haar-random pure state.
    pub fn state<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> StateVector {
        let v = DVector::from_fn(1 << qubits, |_, _| gaussian(rng));
        StateVector::normalized(v).expect("nonzero gaussian vector")
    }

    /// Full-rank random density matrix `G G† / Tr`.
    pub fn density<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> DensityMatrix {
        let d = 1 << qubits;
        let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
        let mut rho = &g * g.adjoint();
        let tr = rho.trace();
        rho.unscale_mut(tr.re);
        let rho = (&rho + rho.adjoint()).scale(0.5);
        DensityMatrix::from_raw(qubits, rho)
    }

    /// Haar-random unitary via QR with phase correction.
    pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
        let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
        let qr = g.qr();
        let (q, r) = (qr.q(), qr.r());
        let mut q = q;
        for k in 0..dim {
            let d = r[(k, k)];
            let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            let mut col = q.column_mut(k);
            col *= phase;
        }
        q
    }
}
