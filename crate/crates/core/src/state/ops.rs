use nalgebra::DMatrix;

use super::{DensityMatrix, StateError, C64};

/// Unitarity residual `‖U†U − I‖_F` must stay below 1e-10.
pub fn check_unitary(u: &DMatrix<C64>) -> Result<(), StateError> {
    if !u.is_square() {
        return Err(StateError::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let n = u.nrows();
    let residual = (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm();
    if residual >= 1e-10 {
        return Err(StateError::NonUnitary(residual));
    }
    Ok(())
}

fn check_targets(targets: &[usize], qubits: usize) -> Result<(), StateError> {
    let bad = |reason| Err(StateError::BadTargets { targets: targets.to_vec(), qubits, reason });
    if targets.is_empty() {
        return bad("empty target list");
    }
    for (k, &t) in targets.iter().enumerate() {
        if t >= qubits {
            return bad("index out of range");
        }
        if targets[..k].contains(&t) {
            return bad("duplicate index");
        }
    }
    Ok(())
}

/// Left-multiplies every column of `m` by `op` embedded on `targets`
/// (identity elsewhere). `targets[k]` is the register qubit playing the role
/// of `op`'s qubit `k`.
pub fn apply_local(
    op: &DMatrix<C64>,
    targets: &[usize],
    qubits: usize,
    m: &mut DMatrix<C64>,
) -> Result<(), StateError> {
    check_targets(targets, qubits)?;
    let local = 1usize << targets.len();
    if op.nrows() != local || op.ncols() != local {
        return Err(StateError::DimensionMismatch { expected: local, got: op.nrows() });
    }
    let dim = 1usize << qubits;
    if m.nrows() != dim {
        return Err(StateError::DimensionMismatch { expected: dim, got: m.nrows() });
    }
    let target_mask: usize = targets.iter().map(|t| 1 << t).sum();
    // Register offset of each local basis index.
    let spread: Vec<usize> = (0..local)
        .map(|l| targets.iter().enumerate().filter(|(k, _)| l >> k & 1 == 1).map(|(_, t)| 1 << t).sum())
        .collect();

    let mut gathered = vec![C64::new(0.0, 0.0); local];
    for col in 0..m.ncols() {
        let mut column = m.column_mut(col);
        for base in (0..dim).filter(|b| b & target_mask == 0) {
            for (l, off) in spread.iter().enumerate() {
                gathered[l] = column[base | off];
            }
            for (r, off) in spread.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, g) in gathered.iter().enumerate() {
                    acc += op[(r, c)] * g;
                }
                column[base | off] = acc;
            }
        }
    }
    Ok(())
}

/// Reduced state on `keep`. Kept qubits are renumbered in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, StateError> {
    let qubits = rho.qubits();
    check_targets(keep, qubits)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    let traced: Vec<usize> = (0..qubits).filter(|q| !keep.contains(q)).collect();

    let place = |bits: usize, which: &[usize]| -> usize {
        which.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, q)| 1 << q).sum()
    };
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let m = rho.matrix();
    let out = DMatrix::from_fn(kd, kd, |i, j| {
        let (bi, bj) = (place(i, &keep), place(j, &keep));
        (0..td).map(|e| {
            let off = place(e, &traced);
            m[(bi | off, bj | off)]
        })
        .sum::<C64>()
    });
    Ok(DensityMatrix::from_raw(keep.len(), out))
}
