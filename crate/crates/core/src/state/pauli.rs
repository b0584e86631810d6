use std::fmt;
use std::str::FromStr;

use super::{DensityMatrix, StateError, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Tensor product of single-qubit Paulis. Letter `k` acts on qubit `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    /// A single non-identity letter on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut v = vec![Pauli::I; n];
        v[qubit] = p;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Tr(ρ P)`; the imaginary part must vanish to 1e-10.
    pub fn expect(&self, rho: &DensityMatrix) -> Result<f64, StateError> {
        if self.len() != rho.qubits() {
            return Err(StateError::DimensionMismatch { expected: rho.qubits(), got: self.len() });
        }
        // P|j⟩ = c_j |j ⊕ flip⟩, so Tr(ρP) = Σ_j c_j ρ[j, j ⊕ flip].
        let flip: usize = self.0.iter().enumerate().filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y)).map(|(q, _)| 1 << q).sum();
        let m = rho.matrix();
        let mut total = C64::new(0.0, 0.0);
        for j in 0..rho.dim() {
            let mut c = C64::new(1.0, 0.0);
            for (q, p) in self.0.iter().enumerate() {
                let bit = j >> q & 1;
                match (p, bit) {
                    (Pauli::Z, 1) => c = -c,
                    (Pauli::Y, 0) => c *= C64::new(0.0, 1.0),
                    (Pauli::Y, _) => c *= C64::new(0.0, -1.0),
                    _ => {}
                }
            }
            total += c * m[(j, j ^ flip)];
        }
        if total.im.abs() > 1e-10 {
            return Err(StateError::Invalid(format!("non-real expectation {total}")));
        }
        Ok(total.re)
    }
}

impl FromStr for PauliString {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(StateError::Invalid(format!("bad Pauli letter {c:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PauliString)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}
