//! Pyramid (filter-and-decimate) transform with periodic convolution.
//!
//! This is the linear-time route and the oracle that the matrix and Givens
//! routes are checked against.

use super::{check_dims, CoefficientVector, Layout, WaveletError, WaveletFilter};

/// One analysis stage on a periodic signal of even length.
fn analyze(x: &[f64], filter: &WaveletFilter, approx: &mut [f64], detail: &mut [f64]) {
    let n = x.len();
    let (h, g) = (filter.low(), filter.high());
    for k in 0..n / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for m in 0..h.len() {
            let v = x[(2 * k + m) % n];
            a += h[m] * v;
            d += g[m] * v;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

/// Adjoint of [`analyze`]; exact inverse because the stage is orthogonal.
fn synthesize(approx: &[f64], detail: &[f64], filter: &WaveletFilter, out: &mut [f64]) {
    let n = out.len();
    let (h, g) = (filter.low(), filter.high());
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..n / 2 {
        for m in 0..h.len() {
            out[(2 * k + m) % n] += h[m] * approx[k] + g[m] * detail[k];
        }
    }
}

/// Forward pyramid transform. Output layout is
/// `[approx | detail J | ... | detail 1]`.
pub fn mallat_forward(
    signal: &[f64],
    filter: &WaveletFilter,
    levels: usize,
) -> Result<CoefficientVector, WaveletError> {
    check_dims(signal.len(), levels)?;
    let n = signal.len();
    let mut out = vec![0.0; n];
    let mut current = signal.to_vec();
    let mut len = n;
    for _ in 0..levels {
        let half = len / 2;
        let mut approx = vec![0.0; half];
        analyze(&current, filter, &mut approx, &mut out[half..len]);
        current = approx;
        len = half;
    }
    out[..len].copy_from_slice(&current);
    Ok(CoefficientVector { values: out, layout: Layout::new(n, levels)? })
}

/// Inverse pyramid transform.
pub fn mallat_inverse(
    coeffs: &CoefficientVector,
    filter: &WaveletFilter,
) -> Result<Vec<f64>, WaveletError> {
    let layout = &coeffs.layout;
    if coeffs.values.len() != layout.len() {
        return Err(WaveletError::LayoutMismatch { values: coeffs.values.len(), layout: layout.len() });
    }
    let mut len = layout.len() >> layout.levels();
    let mut current = coeffs.values[..len].to_vec();
    for _ in 0..layout.levels() {
        let mut next = vec![0.0; 2 * len];
        synthesize(&current, &coeffs.values[len..2 * len], filter, &mut next);
        current = next;
        len *= 2;
    }
    Ok(current)
}
