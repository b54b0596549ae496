//! Ordered eigen-structure used by the three-hop pairing maps.

use nalgebra::linalg::Schur;

use crate::channel::{magnitudes_separated, DEFAULT_TOL};
use crate::{linalg, CMatrix, Complex64, Error, Result};

/// `H = S diag(values) S^-1` with eigenvalues in strictly decreasing magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    /// Unit-norm eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
    /// Eigenvalues sorted by strictly decreasing magnitude.
    pub values: Vec<Complex64>,
    /// `sign_bits[i]` is set when `re(values[i]) < 0`.
    pub sign_bits: Vec<bool>,
    /// Cumulative XOR of the sign bits taken from the smallest eigenvalue upwards:
    /// `flip_bits[0] = sign_bits[K-1]`, `flip_bits[i] = flip_bits[i-1] ^ sign_bits[K-1-i]`.
    pub flip_bits: Vec<bool>,
}

impl EigenStructure {
    /// Builds the structure from eigenvectors and eigenvalues already in order.
    pub fn from_parts(vectors: CMatrix, values: Vec<Complex64>) -> Self {
        let sign_bits: Vec<bool> = values.iter().map(|z| z.re < 0.0).collect();
        let flip_bits = cumulative_flips(&sign_bits);
        EigenStructure { vectors, values, sign_bits, flip_bits }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `S diag(values) S^-1`.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        similarity(&self.vectors, &self.values)
    }
}

pub(crate) fn cumulative_flips(sign_bits: &[bool]) -> Vec<bool> {
    let mut acc = false;
    sign_bits
        .iter()
        .rev()
        .map(|&v| {
            acc ^= v;
            acc
        })
        .collect()
}

/// `S diag(d) S^-1`.
pub fn similarity(s: &CMatrix, d: &[Complex64]) -> Result<CMatrix> {
    let s_inv = linalg::inverse(s)?;
    let mut sd = s.clone();
    for (j, &dj) in d.iter().enumerate() {
        for i in 0..sd.nrows() {
            sd[(i, j)] *= dj;
        }
    }
    Ok(sd * s_inv)
}

/// Eigen-decomposition with eigenvalues ordered by decreasing magnitude.
///
/// Eigenvalues come from the complex Schur form `H = Q T Q*`; each eigenvector is
/// obtained by back substitution on `T - lambda I` and mapped back through `Q`.
pub fn eig_ordered(h: &CMatrix) -> Result<EigenStructure> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
    }
    linalg::ensure_finite(h)?;
    let k = h.nrows();
    let (q, t) = Schur::try_new(h.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?.unpack();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| t[(b, b)].norm().total_cmp(&t[(a, a)].norm()));
    let mags: Vec<f64> = order.iter().map(|&i| t[(i, i)].norm()).collect();
    if !magnitudes_separated(&mags, DEFAULT_TOL) {
        return Err(Error::DegenerateSpectrum(format!("magnitudes {mags:?}")));
    }

    let mut vectors = CMatrix::zeros(k, k);
    let mut values = Vec::with_capacity(k);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = t[(idx, idx)];
        let mut y = vec![Complex64::new(0.0, 0.0); k];
        y[idx] = Complex64::new(1.0, 0.0);
        for row in (0..idx).rev() {
            let acc: Complex64 = (row + 1..=idx).map(|l| t[(row, l)] * y[l]).sum();
            let pivot = t[(row, row)] - lambda;
            if pivot.norm() == 0.0 {
                return Err(Error::DegenerateSpectrum("repeated eigenvalue".into()));
            }
            y[row] = -acc / pivot;
        }
        let x = &q * nalgebra::DVector::from_vec(y);
        let x = x.unscale(x.norm());
        vectors.set_column(col, &x);
        values.push(lambda);
    }
    Ok(EigenStructure::from_parts(vectors, values))
}
