//! Factorization of an orthogonal matrix into plane rotations followed by a
//! ±1 sign diagonal, `W = G_1 G_2 ... G_k D`.
//!
//! `G(i, j, θ)` is the identity except for `cos θ` at `(i,i)` and `(j,j)`,
//! `-sin θ` at `(i,j)` and `sin θ` at `(j,i)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{matrix::orthogonality_residual, OrthogonalTransform, WaveletError};

/// Entries below this magnitude are treated as already eliminated.
const ELIMINATION_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GivensPlan {
    pub size: usize,
    pub rotations: Vec<Rotation>,
    /// Diagonal of ±1 applied after all rotations.
    pub signs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RotationReport {
    pub count: usize,
    pub depth: usize,
}

/// Column-major lower-triangular elimination (QR by Givens) of an
/// orthogonal matrix. The triangular factor of an orthogonal matrix is a
/// ±1 diagonal, which becomes the plan's sign vector.
pub fn givens_factorize(w: &OrthogonalTransform) -> Result<GivensPlan, WaveletError> {
    factorize_matrix(w.matrix())
}

pub fn factorize_matrix(m: &DMatrix<f64>) -> Result<GivensPlan, WaveletError> {
    if !m.is_square() {
        return Err(WaveletError::NotSquare(m.nrows(), m.ncols()));
    }
    let residual = orthogonality_residual(m);
    if residual >= 1e-10 {
        return Err(WaveletError::NotOrthogonal(residual));
    }
    let n = m.nrows();
    // Row-major working copy; rotations only touch two rows at a time.
    let mut a: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect();
    let mut rotations = Vec::new();

    for col in 0..n {
        for row in col + 1..n {
            let below = a[row * n + col];
            if below.abs() <= ELIMINATION_FLOOR {
                continue;
            }
            let pivot = a[col * n + col];
            let theta = below.atan2(pivot);
            let (s, c) = theta.sin_cos();
            // Gᵀ on rows (col, row); columns left of `col` are already zero.
            for k in col..n {
                let u = a[col * n + k];
                let v = a[row * n + k];
                a[col * n + k] = c * u + s * v;
                a[row * n + k] = -s * u + c * v;
            }
            a[row * n + col] = 0.0;
            rotations.push(Rotation { i: col, j: row, theta });
        }
    }

    let signs = (0..n).map(|k| if a[k * n + k] < 0.0 { -1.0 } else { 1.0 }).collect();
    Ok(GivensPlan { size: n, rotations, signs })
}

impl GivensPlan {
    fn check(&self) -> Result<(), WaveletError> {
        if self.signs.len() != self.size {
            return Err(WaveletError::LengthMismatch { expected: self.size, got: self.signs.len() });
        }
        for r in &self.rotations {
            if r.i >= self.size || r.j >= self.size || r.i == r.j {
                return Err(WaveletError::BadRotation { i: r.i, j: r.j, size: self.size });
            }
        }
        Ok(())
    }

    /// `y = G_1 ... G_k D x` without materializing the matrix.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, WaveletError> {
        self.check()?;
        if x.len() != self.size {
            return Err(WaveletError::LengthMismatch { expected: self.size, got: x.len() });
        }
        let mut v: Vec<f64> = x.iter().zip(&self.signs).map(|(a, s)| a * s).collect();
        for r in self.rotations.iter().rev() {
            let (s, c) = r.theta.sin_cos();
            let (p, q) = (v[r.i], v[r.j]);
            v[r.i] = c * p - s * q;
            v[r.j] = s * p + c * q;
        }
        Ok(v)
    }

    /// `x = D G_kᵀ ... G_1ᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>, WaveletError> {
        self.check()?;
        if y.len() != self.size {
            return Err(WaveletError::LengthMismatch { expected: self.size, got: y.len() });
        }
        let mut v = y.to_vec();
        for r in &self.rotations {
            let (s, c) = r.theta.sin_cos();
            let (p, q) = (v[r.i], v[r.j]);
            v[r.i] = c * p + s * q;
            v[r.j] = -s * p + c * q;
        }
        v.iter_mut().zip(&self.signs).for_each(|(a, s)| *a *= s);
        Ok(v)
    }

    pub fn report(&self) -> RotationReport {
        rotation_count_report(self)
    }
}

/// Product of the plan's rotations in order, then the sign diagonal.
pub fn givens_replay(plan: &GivensPlan, size: usize) -> Result<DMatrix<f64>, WaveletError> {
    if size != plan.size {
        return Err(WaveletError::LengthMismatch { expected: plan.size, got: size });
    }
    plan.check()?;
    let mut m = DMatrix::<f64>::identity(size, size);
    for r in &plan.rotations {
        let (s, c) = r.theta.sin_cos();
        for row in 0..size {
            let (p, q) = (m[(row, r.i)], m[(row, r.j)]);
            m[(row, r.i)] = c * p + s * q;
            m[(row, r.j)] = -s * p + c * q;
        }
    }
    for (k, s) in plan.signs.iter().enumerate() {
        if *s < 0.0 {
            m.column_mut(k).neg_mut();
        }
    }
    Ok(m)
}

/// Rotation count and circuit depth under as-soon-as-possible layering:
/// a rotation lands one layer after the latest earlier rotation sharing an
/// index with it.
pub fn rotation_count_report(plan: &GivensPlan) -> RotationReport {
    let mut layer_of = vec![0usize; plan.size];
    let mut depth = 0;
    for r in &plan.rotations {
        let layer = layer_of[r.i].max(layer_of[r.j]) + 1;
        layer_of[r.i] = layer;
        layer_of[r.j] = layer;
        depth = depth.max(layer);
    }
    RotationReport { count: plan.rotations.len(), depth }
}
