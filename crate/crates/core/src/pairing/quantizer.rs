//! Uniform complex grid quantization of square channel matrices.
//!
//! A `k x k` matrix is viewed as a point in `2k^2` real coordinates (real and
//! imaginary part of every entry, row-major). Each coordinate is rounded to the
//! nearest multiple of `delta`, half away from zero. Cells are keyed lazily; the
//! `(2q+1)^(2k^2)` grid is never enumerated.

use serde::{Deserialize, Serialize};

use crate::{CMatrix, Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerSpec {
    /// Quantization interval.
    pub delta: f64,
    /// Grid half-extent in units of `delta`.
    pub q: u32,
    /// Matrix dimension.
    pub k: usize,
}

impl QuantizerSpec {
    pub fn new(delta: f64, q: u32, k: usize) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::config("delta", format!("must be a positive finite number, got {delta}")));
        }
        if q == 0 {
            return Err(Error::config("q", "must be at least 1"));
        }
        if k == 0 {
            return Err(Error::config("k", "must be at least 1"));
        }
        Ok(QuantizerSpec { delta, q, k })
    }

    /// Largest magnitude of a real or imaginary part that still falls in range.
    pub fn range_limit(&self) -> f64 {
        self.delta * self.q as f64 + self.delta / 2.0
    }

    /// Number of real coordinates per cell index.
    pub fn coords_len(&self) -> usize {
        2 * self.k * self.k
    }

    /// `log10` of the total number of cells, `2k^2 log10(2q+1)`.
    pub fn log10_cell_count(&self) -> f64 {
        self.coords_len() as f64 * (2.0 * self.q as f64 + 1.0).log10()
    }
}

/// Integer grid coordinates of a quantization cell, each in `[-q, q]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellIndex(Box<[i32]>);

impl std::borrow::Borrow<[i32]> for CellIndex {
    fn borrow(&self) -> &[i32] {
        &self.0
    }
}

impl CellIndex {
    pub fn from_coords(coords: Vec<i32>) -> Self {
        CellIndex(coords.into_boxed_slice())
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    /// Grid point `H_delta = delta * coords` at the centre of the cell.
    pub fn center(&self, spec: &QuantizerSpec) -> CMatrix {
        let k = spec.k;
        CMatrix::from_fn(k, k, |i, j| {
            let base = 2 * (i * k + j);
            Complex64::new(self.0[base] as f64 * spec.delta, self.0[base + 1] as f64 * spec.delta)
        })
    }
}

/// Reconstructs the grid point of `cell`.
pub fn cell_center(cell: &CellIndex, spec: &QuantizerSpec) -> CMatrix {
    cell.center(spec)
}

fn quantize_axis(x: f64, spec: &QuantizerSpec) -> Option<i32> {
    if x.is_nan() || x.abs() > spec.range_limit() {
        return None;
    }
    let q = spec.q as i32;
    // a part sitting exactly on the outer boundary rounds to q + 1; keep it in the last cell
    Some(((x / spec.delta).round() as i32).clamp(-q, q))
}

/// Cell containing `h`, or `None` when any real or imaginary part lies beyond
/// `delta * q + delta / 2`.
pub fn quantize(h: &CMatrix, spec: &QuantizerSpec) -> Option<CellIndex> {
    let mut coords = Vec::with_capacity(spec.coords_len());
    quantize_into(h, spec, &mut coords).then(|| CellIndex::from_coords(coords))
}

/// Allocation-free form of [`quantize`]: writes the coordinates into `coords` and
/// returns whether `h` is in range. `coords` is unspecified on `false`.
pub fn quantize_into(h: &CMatrix, spec: &QuantizerSpec, coords: &mut Vec<i32>) -> bool {
    coords.clear();
    if h.nrows() != spec.k || h.ncols() != spec.k {
        return false;
    }
    for i in 0..spec.k {
        for j in 0..spec.k {
            let z = h[(i, j)];
            match (quantize_axis(z.re, spec), quantize_axis(z.im, spec)) {
                (Some(re), Some(im)) => {
                    coords.push(re);
                    coords.push(im);
                }
                _ => return false,
            }
        }
    }
    true
}
