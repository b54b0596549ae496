use serde::{Deserialize, Serialize};

use crate::channel::{is_full_rank, ChannelDistribution};
use crate::linalg::{max_row_norm_sq, row_norm_sq};
use crate::pairing::{map_three_hop, map_two_hop, quantize, QuantizerSpec, RANK_TOL};
use crate::{CMatrix, Complex64, Error, Result};

/// `sqrt(P / (1 + max_i ||row_i(H1)||^2 P))`, the largest relay gain meeting the
/// per-node power constraint.
pub fn gamma_two_hop(h1: &CMatrix, p: f64) -> f64 {
    (p / (1.0 + max_row_norm_sq(h1) * p)).sqrt()
}

/// `(gamma_1, gamma_2)` for the two relay layers of a three-hop network.
pub fn gammas_three_hop(h1: &CMatrix, h2: &CMatrix, p: f64) -> (f64, f64) {
    let g1 = gamma_two_hop(h1, p);
    let h21 = h2 * h1;
    let worst = (0..h2.nrows())
        .map(|i| row_norm_sq(h2, i) + row_norm_sq(&h21, i) * p)
        .fold(0.0, f64::max);
    (g1, (p / (1.0 + g1 * g1 * worst)).sqrt())
}

/// Received power split at one destination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrTerms {
    pub signal: f64,
    pub interference: f64,
    /// Source noise forwarded by the relays plus unit receiver noise.
    pub noise: f64,
}

impl SinrTerms {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.interference + self.noise)
    }

    pub fn rate_bits(&self) -> f64 {
        self.sinr().ln_1p() / std::f64::consts::LN_2
    }
}

fn split(effective: &CMatrix, noise_rows: &[f64], p: f64) -> Vec<SinrTerms> {
    (0..effective.nrows())
        .map(|i| {
            let row = effective.row(i);
            let cross: f64 = row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, z)| z.norm_sqr()).sum();
            SinrTerms { signal: row[i].norm_sqr() * p, interference: cross * p, noise: noise_rows[i] }
        })
        .collect()
}

/// Per-destination terms of `y = g H2 (H1 x + z1) + z2` with `g = gamma_two_hop(H1)`.
pub fn link_terms_two_hop(h1: &CMatrix, h2: &CMatrix, p: f64) -> Vec<SinrTerms> {
    let g2 = gamma_two_hop(h1, p).powi(2);
    let effective = (h2 * h1) * Complex64::new(g2.sqrt(), 0.0);
    let noise: Vec<f64> = (0..h2.nrows()).map(|i| 1.0 + g2 * row_norm_sq(h2, i)).collect();
    split(&effective, &noise, p)
}

/// Per-destination terms of `y = g2 H3 (g1 H2 (H1 x + z1) + z2) + z3`.
pub fn link_terms_three_hop(h1: &CMatrix, h2: &CMatrix, h3: &CMatrix, p: f64) -> Vec<SinrTerms> {
    let (g1, g2) = gammas_three_hop(h1, h2, p);
    let h32 = h3 * h2;
    let effective = (&h32 * h1) * Complex64::new(g1 * g2, 0.0);
    let noise: Vec<f64> = (0..h3.nrows())
        .map(|i| 1.0 + g2 * g2 * row_norm_sq(h3, i) + g2 * g2 * g1 * g1 * row_norm_sq(&h32, i))
        .collect();
    split(&effective, &noise, p)
}

fn check_pair(i: usize, k: usize) -> Result<()> {
    if i < k {
        Ok(())
    } else {
        Err(Error::Precondition(format!("pair index {i} out of range for {k} pairs")))
    }
}

fn check_shape(delta: &CMatrix, h: &CMatrix) -> Result<()> {
    if delta.shape() == h.shape() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: h.nrows(), got: delta.nrows() })
    }
}

/// SINR of pair `i` (0-based) when the second hop is `F(H) + Delta`.
pub fn sinr_two_hop(dist: ChannelDistribution, h: &CMatrix, delta: &CMatrix, p: f64, i: usize) -> Result<f64> {
    check_shape(delta, h)?;
    check_pair(i, h.nrows())?;
    if !is_full_rank(h, RANK_TOL) {
        return Err(Error::Singular);
    }
    let h2 = map_two_hop(dist, h)?.targets.swap_remove(0) + delta;
    Ok(link_terms_two_hop(h, &h2, p)[i].sinr())
}

/// SINR of pair `i` (0-based) when the later hops are `F_1(H) + Delta1` and
/// `F_2(H) + Delta2`.
pub fn sinr_three_hop(
    dist: ChannelDistribution,
    h: &CMatrix,
    delta1: &CMatrix,
    delta2: &CMatrix,
    p: f64,
    i: usize,
) -> Result<f64> {
    check_shape(delta1, h)?;
    check_shape(delta2, h)?;
    check_pair(i, h.nrows())?;
    let map = map_three_hop(dist, h)?;
    let h2 = &map.targets[0] + delta1;
    let h3 = &map.targets[1] + delta2;
    Ok(link_terms_three_hop(h, &h2, &h3, p)[i].sinr())
}

/// Total off-diagonal interference power when the second hop is the exact image of
/// the centre of the `delta`-cell containing `H`, rather than of `H` itself.
///
/// The grid is unbounded here (only the cell size matters). Returns `None` when the
/// cell centre is not invertible.
pub fn quantized_pairing_leakage(dist: ChannelDistribution, h: &CMatrix, delta: f64, p: f64) -> Result<Option<f64>> {
    let reach = h.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    let q = (reach / delta).ceil() as u32 + 1;
    let spec = QuantizerSpec::new(delta, q, h.nrows())?;
    let centre = quantize(h, &spec).ok_or_else(|| Error::Precondition("matrix outside grid".into()))?.center(&spec);
    if !is_full_rank(&centre, RANK_TOL) {
        return Ok(None);
    }
    let h2 = map_two_hop(dist, &centre)?.targets.swap_remove(0);
    Ok(Some(link_terms_two_hop(h, &h2, p).iter().map(|t| t.interference).sum()))
}
