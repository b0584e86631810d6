//! Orthogonal wavelet transforms built three independent ways: a dense
//! filterbank matrix, the pyramid algorithm, and a Givens-rotation cascade.
//!
//! Boundaries are periodic, so every transform is exactly orthogonal at any
//! power-of-two length. Coefficients are laid out as
//! `[approximation | detail J | ... | detail 1]`, coarsest details first.

mod filter;
mod givens;
mod mallat;
mod matrix;

pub use filter::{FilterSpec, WaveletFilter, FILTER_TOL};
pub use givens::{
    factorize_matrix, givens_factorize, givens_replay, rotation_count_report, GivensPlan,
    Rotation, RotationReport,
};
pub use mallat::{mallat_forward, mallat_inverse};
pub use matrix::{matrix_from_csv, matrix_to_csv, orthogonality_residual, OrthogonalTransform};

use std::ops::Range;

use thiserror::Error;

use crate::fmt;

#[derive(Debug, Error)]
pub enum WaveletError {
    #[error("unknown wavelet filter {0:?} (built in: haar, daub2, daub4)")]
    UnknownFilter(String),
    #[error("filter violates {invariant} (residual {residual:e})")]
    InvalidFilter { invariant: &'static str, residual: f64 },
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{levels} levels invalid for length {len} (need 1 <= J <= log2 N = {max})")]
    TooManyLevels { len: usize, levels: usize, max: usize },
    #[error("expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("coefficient values ({values}) inconsistent with layout length ({layout})")]
    LayoutMismatch { values: usize, layout: usize },
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not orthogonal: ||W W^T - I||_F = {0:e}")]
    NotOrthogonal(f64),
    #[error("rotation ({i}, {j}) invalid for size {size}")]
    BadRotation { i: usize, j: usize, size: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Valid when `n` is a power of two with `1 <= levels <= log2 n`. Periodic
/// wrapping lets a stage shorter than the filter remain orthogonal, so the
/// filter length imposes no further bound.
pub(crate) fn check_dims(n: usize, levels: usize) -> Result<(), WaveletError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(WaveletError::NotPowerOfTwo(n));
    }
    let max = n.trailing_zeros() as usize;
    if levels == 0 || levels > max {
        return Err(WaveletError::TooManyLevels { len: n, levels, max });
    }
    Ok(())
}

/// Block boundaries of a coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    len: usize,
    levels: usize,
}

impl Layout {
    pub fn new(len: usize, levels: usize) -> Result<Self, WaveletError> {
        check_dims(len, levels)?;
        Ok(Self { len, levels })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn approximation(&self) -> Range<usize> {
        0..self.len >> self.levels
    }

    /// Range of detail level `level` (1 = finest).
    pub fn detail(&self, level: usize) -> Option<Range<usize>> {
        (1..=self.levels).contains(&level).then(|| {
            let start = self.len >> level;
            start..2 * start
        })
    }

    /// Offsets `[0, a, d_J end, ..., N]` of every block in storage order.
    pub fn offsets(&self) -> Vec<usize> {
        let mut v = vec![0];
        v.extend((0..=self.levels).rev().map(|l| self.len >> l));
        v
    }

    /// Whether index `k` lies in a detail block.
    pub fn is_detail(&self, k: usize) -> bool {
        k >= self.len >> self.levels && k < self.len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    pub layout: Layout,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>, levels: usize) -> Result<Self, WaveletError> {
        let layout = Layout::new(values.len(), levels)?;
        Ok(Self { values, layout })
    }

    pub fn approximation(&self) -> &[f64] {
        &self.values[self.layout.approximation()]
    }

    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        self.layout.detail(level).map(|r| &self.values[r])
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Single-column CSV with header `coefficient`.
    pub fn to_csv(&self) -> String {
        fmt::csv_table(&["coefficient"], self.values.iter().map(|v| vec![*v]))
    }
}

/// Which of the three routes computes a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Matrix,
    Mallat,
    Givens,
}

/// A transform that can be evaluated through any route, caching the dense
/// matrix and Givens plan.
#[derive(Debug, Clone)]
pub struct WaveletTransform {
    dense: OrthogonalTransform,
    plan: GivensPlan,
}

impl WaveletTransform {
    pub fn new(filter: &WaveletFilter, n: usize, levels: usize) -> Result<Self, WaveletError> {
        let dense = OrthogonalTransform::build(filter, n, levels)?;
        let plan = givens_factorize(&dense)?;
        Ok(Self { dense, plan })
    }

    pub fn dense(&self) -> &OrthogonalTransform {
        &self.dense
    }

    pub fn plan(&self) -> &GivensPlan {
        &self.plan
    }

    pub fn forward(&self, x: &[f64], route: Route) -> Result<CoefficientVector, WaveletError> {
        match route {
            Route::Matrix => self.dense.forward(x),
            Route::Mallat => mallat_forward(x, self.dense.filter(), self.dense.levels()),
            Route::Givens => CoefficientVector::new(self.plan.apply(x)?, self.dense.levels()),
        }
    }

    pub fn inverse(&self, c: &CoefficientVector, route: Route) -> Result<Vec<f64>, WaveletError> {
        match route {
            Route::Matrix => self.dense.inverse(c),
            Route::Mallat => mallat_inverse(c, self.dense.filter()),
            Route::Givens => self.plan.apply_transpose(&c.values),
        }
    }
}
