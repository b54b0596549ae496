//! Small dense helpers shared by the pairing maps, the simulator and the rate evaluators.

use nalgebra::DMatrix;

use crate::{CMatrix, Complex64, Error, Result};

/// Squared Euclidean norm of row `i`.
pub fn row_norm_sq(m: &CMatrix, i: usize) -> f64 {
    m.row(i).iter().map(|z| z.norm_sqr()).sum()
}

/// Largest squared row norm, zero for an empty matrix.
pub fn max_row_norm_sq(m: &CMatrix) -> f64 {
    (0..m.nrows()).map(|i| row_norm_sq(m, i)).fold(0.0, f64::max)
}

/// Frobenius norm of the off-diagonal part.
pub fn offdiag_norm(m: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `||a - b||_F / ||b||_F`, or the absolute difference when `b` is zero.
pub fn rel_frob_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = (a - b).norm();
    let scale = b.norm();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Checked inverse. Fails on exactly singular input and on non-finite results.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let inv = m.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::Singular)
    }
}

/// Rejects matrices with NaN or infinite entries.
pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Builds a complex matrix from row-major real parts (imaginary parts zero).
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    DMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// Diagonal complex matrix.
pub fn diag(values: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}
