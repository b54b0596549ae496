//! Channel coefficient laws, hop-matrix sampling and regularity predicates.
//!
//! Only isotropic laws are admitted: the log-density of a coefficient depends on
//! its magnitude alone and is strictly decreasing in it. All density arithmetic is
//! carried out in the log domain.

use std::f64::consts::PI;

use nalgebra::linalg::Schur;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{linalg, CMatrix, Complex64, Error, Result};

/// Default relative tolerance for the rank and eigenvalue-separation predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Law of a single complex channel coefficient.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelDistribution {
    /// Unit-variance circularly-symmetric complex Gaussian (Rayleigh fading).
    #[default]
    Gaussian,
    /// Unit-power isotropic law whose magnitude density decays exponentially:
    /// `p(a) = exp(-|a|/s) / (2 pi s^2)` with `s = 1/sqrt(6)`.
    RadialExponential,
}

const RADIAL_EXP_SCALE: f64 = 0.408_248_290_463_863; // 1/sqrt(6)

impl ChannelDistribution {
    /// Natural log of the density as a function of the magnitude `r = |a|`.
    pub fn log_pdf_abs(&self, r: f64) -> f64 {
        match self {
            ChannelDistribution::Gaussian => -PI.ln() - r * r,
            ChannelDistribution::RadialExponential => {
                let s = RADIAL_EXP_SCALE;
                -(2.0 * PI * s * s).ln() - r / s
            }
        }
    }

    /// Natural log of the density at `a`.
    pub fn log_pdf(&self, a: Complex64) -> f64 {
        self.log_pdf_abs(a.norm())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match self {
            ChannelDistribution::Gaussian => {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            }
            ChannelDistribution::RadialExponential => {
                // magnitude ~ Gamma(2, s) as a sum of two exponentials
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                let r = RADIAL_EXP_SCALE * (e1 + e2);
                let phase = rng.random::<f64>() * 2.0 * PI;
                Complex64::from_polar(r, phase)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChannelDistribution::Gaussian => "gaussian",
            ChannelDistribution::RadialExponential => "radial-exponential",
        }
    }
}

/// Layered network description: `hops + 1` layers with `layer_sizes[m]` nodes each
/// and optional per-node antenna counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    layer_sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    antennas: Option<Vec<Vec<u32>>>,
}

impl Topology {
    /// Single-antenna topology from the layer sizes `K_1 .. K_{M+1}`.
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self> {
        if layer_sizes.len() < 3 {
            return Err(Error::config("layers", "at least three layers (two hops) are required"));
        }
        if let Some(pos) = layer_sizes.iter().position(|&k| k == 0) {
            return Err(Error::config(format!("layers[{pos}]"), "layer sizes must be at least 1"));
        }
        Ok(Topology { layer_sizes, antennas: None })
    }

    /// `hops` hops with `k` nodes in every layer.
    pub fn uniform(k: usize, hops: usize) -> Result<Self> {
        Topology::new(vec![k; hops + 1])
    }

    /// Attaches per-node antenna counts, one list per layer.
    pub fn with_antennas(mut self, antennas: Vec<Vec<u32>>) -> Result<Self> {
        if antennas.len() != self.layer_sizes.len() {
            return Err(Error::config(
                "antennas",
                format!("expected {} layers, got {}", self.layer_sizes.len(), antennas.len()),
            ));
        }
        for (m, (layer, &k)) in antennas.iter().zip(&self.layer_sizes).enumerate() {
            if layer.len() != k {
                return Err(Error::config(
                    format!("antennas[{m}]"),
                    format!("expected {k} nodes, got {}", layer.len()),
                ));
            }
            if layer.contains(&0) {
                return Err(Error::config(format!("antennas[{m}]"), "antenna counts must be at least 1"));
            }
        }
        self.antennas = Some(antennas);
        Ok(self)
    }

    /// Number of hops `M`.
    pub fn hops(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// Number of S-D pairs when source and destination layers match.
    pub fn pairs(&self) -> Option<usize> {
        let first = self.layer_sizes[0];
        (first == *self.layer_sizes.last().unwrap()).then_some(first)
    }

    /// True when every layer has the same size.
    pub fn is_uniform(&self) -> bool {
        self.layer_sizes.windows(2).all(|w| w[0] == w[1])
    }

    pub fn min_layer(&self) -> usize {
        *self.layer_sizes.iter().min().unwrap()
    }

    pub fn has_multi_antenna(&self) -> bool {
        self.antennas.as_ref().is_some_and(|a| a.iter().flatten().any(|&l| l > 1))
    }

    /// Antenna count of node `node` (0-based) in layer `layer` (0-based); 1 by default.
    pub fn antennas(&self, layer: usize, node: usize) -> u32 {
        self.antennas.as_ref().map_or(1, |a| a[layer][node])
    }

    /// Total antennas in layer `layer` (0-based).
    pub fn layer_antennas(&self, layer: usize) -> u32 {
        (0..self.layer_sizes[layer]).map(|i| self.antennas(layer, i)).sum()
    }
}

/// One realised hop matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HopRealization {
    /// 1-based hop index.
    pub hop: usize,
    /// 1-based time index.
    pub time: u64,
    /// `K_{m+1} x K_m` channel matrix.
    pub matrix: CMatrix,
}

/// Draws a `rows x cols` matrix with i.i.d. entries from `dist`, filled row by row.
pub fn sample_hop_matrix<R: Rng + ?Sized>(
    dist: ChannelDistribution,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> CMatrix {
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| dist.sample(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &entries)
}

/// `sum_ij log p([H]_ij)`.
pub fn log_pdf_matrix(dist: ChannelDistribution, h: &CMatrix) -> Result<f64> {
    linalg::ensure_finite(h)?;
    Ok(h.iter().map(|&z| dist.log_pdf(z)).sum())
}

/// True iff the smallest singular value exceeds `tol` times the largest.
pub fn is_full_rank(h: &CMatrix, tol: f64) -> bool {
    if !h.is_square() || h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return false;
    }
    let s = linalg::singular_values(h);
    match (s.first(), s.last()) {
        (Some(&max), Some(&min)) => min > tol * max,
        _ => false,
    }
}

/// Eigenvalues of a square complex matrix, from its complex Schur form.
pub fn eigenvalues(h: &CMatrix) -> Result<Vec<Complex64>> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: h.ncols() });
    }
    linalg::ensure_finite(h)?;
    let schur = Schur::try_new(h.clone(), f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// True iff all eigenvalue magnitudes are pairwise separated by more than
/// `tol * max|lambda|` and the smallest magnitude exceeds `tol * max|lambda|`.
pub fn has_distinct_eigs(h: &CMatrix, tol: f64) -> Result<bool> {
    let mags: Vec<f64> = eigenvalues(h)?.iter().map(|z| z.norm()).collect();
    Ok(magnitudes_separated(&mags, tol))
}

pub(crate) fn magnitudes_separated(mags: &[f64], tol: f64) -> bool {
    let max = mags.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return false;
    }
    let gap = tol * max;
    if mags.iter().any(|&m| m <= gap) {
        return false;
    }
    let mut sorted = mags.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    sorted.windows(2).all(|w| w[1] - w[0] > gap)
}

/// Rejection sampler for square `k x k` matrices satisfying `accept`.
/// Returns the matrix and the number of rejected draws.
pub fn sample_until<R, F>(
    dist: ChannelDistribution,
    k: usize,
    rng: &mut R,
    max_draws: usize,
    mut accept: F,
) -> Option<(CMatrix, usize)>
where
    R: Rng + ?Sized,
    F: FnMut(&CMatrix) -> bool,
{
    for rejected in 0..max_draws {
        let h = sample_hop_matrix(dist, k, k, rng);
        if accept(&h) {
            return Some((h, rejected));
        }
    }
    None
}
