use nalgebra::DMatrix;

use super::{check_dims, CoefficientVector, Layout, WaveletError, WaveletFilter};
use crate::fmt;

/// Dense N×N orthogonal wavelet matrix for `levels` decomposition levels.
#[derive(Debug, Clone)]
pub struct OrthogonalTransform {
    matrix: DMatrix<f64>,
    levels: usize,
    filter: WaveletFilter,
}

/// Single-level analysis operator on `n` samples: the first `n/2` rows hold
/// shifted low-pass taps, the last `n/2` the high-pass taps, wrapped
/// periodically.
fn stage_matrix(filter: &WaveletFilter, n: usize) -> DMatrix<f64> {
    let half = n / 2;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..half {
        for (tap, (&h, &g)) in filter.low().iter().zip(filter.high()).enumerate() {
            let col = (2 * k + tap) % n;
            m[(k, col)] += h;
            m[(half + k, col)] += g;
        }
    }
    m
}

impl OrthogonalTransform {
    /// Composes the per-level stage matrices:
    /// `W = diag(A_J, I) ... diag(A_2, I) A_1`.
    pub fn build(filter: &WaveletFilter, n: usize, levels: usize) -> Result<Self, WaveletError> {
        check_dims(n, levels)?;
        let mut w = DMatrix::identity(n, n);
        let mut len = n;
        for _ in 0..levels {
            let mut stage = DMatrix::identity(n, n);
            stage.view_mut((0, 0), (len, len)).copy_from(&stage_matrix(filter, len));
            w = stage * w;
            len /= 2;
        }
        Ok(Self { matrix: w, levels, filter: filter.clone() })
    }

    /// Wraps an arbitrary matrix, e.g. one loaded from CSV. It must be
    /// orthogonal within 1e-10.
    pub fn from_matrix(
        matrix: DMatrix<f64>,
        filter: WaveletFilter,
        levels: usize,
    ) -> Result<Self, WaveletError> {
        if !matrix.is_square() {
            return Err(WaveletError::NotSquare(matrix.nrows(), matrix.ncols()));
        }
        check_dims(matrix.nrows(), levels)?;
        let residual = orthogonality_residual(&matrix);
        if residual >= 1e-10 {
            return Err(WaveletError::NotOrthogonal(residual));
        }
        Ok(Self { matrix, levels, filter })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn filter(&self) -> &WaveletFilter {
        &self.filter
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn forward(&self, signal: &[f64]) -> Result<CoefficientVector, WaveletError> {
        if signal.len() != self.size() {
            return Err(WaveletError::LengthMismatch { expected: self.size(), got: signal.len() });
        }
        let y = &self.matrix * nalgebra::DVector::from_column_slice(signal);
        Ok(CoefficientVector {
            values: y.as_slice().to_vec(),
            layout: Layout::new(self.size(), self.levels)?,
        })
    }

    /// `Wᵀ y`.
    pub fn inverse(&self, coeffs: &CoefficientVector) -> Result<Vec<f64>, WaveletError> {
        if coeffs.values.len() != self.size() {
            return Err(WaveletError::LengthMismatch {
                expected: self.size(),
                got: coeffs.values.len(),
            });
        }
        let x = self.matrix.tr_mul(&nalgebra::DVector::from_column_slice(&coeffs.values));
        Ok(x.as_slice().to_vec())
    }

    /// `‖W Wᵀ − I‖_F`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.matrix)
    }

    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.matrix)
    }
}

pub fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    (m * m.transpose() - DMatrix::<f64>::identity(n, n)).norm()
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    fmt::csv_matrix(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn matrix_from_csv(text: &str) -> Result<DMatrix<f64>, WaveletError> {
    let rows = fmt::parse_csv_rows(text).map_err(WaveletError::Parse)?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(WaveletError::Parse("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}
