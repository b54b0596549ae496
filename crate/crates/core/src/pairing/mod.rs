//! Channel-space pairing maps.
//!
//! The two-hop map sends a full-rank first-hop matrix `H` to `F(H) = c(H) H^-1`,
//! with the scale `c(H) > 0` chosen so that `F(H)` has the same channel density as
//! `H`. The three-hop maps diagonalise `H = S L S^-1` and build
//! `F_1(H) = c_1 S L_1 S^-1`, `F_2(H) = c_2 S L_2 S^-1` whose product with `H` is
//! `c_1 c_2 I`.

mod eigen;
mod quantizer;

pub use eigen::{eig_ordered, similarity, EigenStructure};
pub use quantizer::{cell_center, quantize, quantize_into, CellIndex, QuantizerSpec};

use crate::channel::{ChannelDistribution, DEFAULT_TOL};
use crate::{linalg, CMatrix, Complex64, Error, Result, Scheme};

const BRACKET_START: (f64, f64) = (1e-6, 1e6);
const BRACKET_LIMIT: (f64, f64) = (1e-30, 1e30);
const BRACKET_STEP: f64 = 1e3;

/// Positive `c` with `sum log p(c [shape]_ij) = sum log p([reference]_ij)`.
///
/// The unit Gaussian law has the closed form `||reference||_F / ||shape||_F`; every
/// other law goes through [`solve_c_bisection`].
pub fn solve_c(dist: ChannelDistribution, reference: &CMatrix, shape: &CMatrix) -> Result<f64> {
    match dist {
        ChannelDistribution::Gaussian => {
            linalg::ensure_finite(reference)?;
            linalg::ensure_finite(shape)?;
            let shape_sq = shape.norm_squared();
            if shape_sq == 0.0 {
                return Err(Error::Precondition("shape matrix is all zeros".into()));
            }
            let c = (reference.norm_squared() / shape_sq).sqrt();
            if c > BRACKET_LIMIT.0 && c < BRACKET_LIMIT.1 {
                Ok(c)
            } else {
                Err(Error::NoSolution)
            }
        }
        _ => solve_c_bisection(dist, reference, shape),
    }
}

/// Law-agnostic solver: bracketed bisection on `log c`.
///
/// `g(c) = sum log p(c |shape_ij|) - target` is strictly decreasing for isotropic
/// laws with a strictly decreasing density, so the root is unique. The bracket
/// starts at `[1e-6, 1e6]` and grows geometrically up to `[1e-30, 1e30]`.
pub fn solve_c_bisection(dist: ChannelDistribution, reference: &CMatrix, shape: &CMatrix) -> Result<f64> {
    let target: f64 = crate::channel::log_pdf_matrix(dist, reference)?;
    linalg::ensure_finite(shape)?;
    let mags: Vec<f64> = shape.iter().map(|z| z.norm()).collect();
    if mags.iter().all(|&m| m == 0.0) {
        return Err(Error::Precondition("shape matrix is all zeros".into()));
    }
    let g = |log_c: f64| -> f64 {
        let c = log_c.exp();
        mags.iter().map(|&m| dist.log_pdf_abs(c * m)).sum::<f64>() - target
    };

    let (mut lo, mut hi) = (BRACKET_START.0.ln(), BRACKET_START.1.ln());
    let step = BRACKET_STEP.ln();
    while g(lo) <= 0.0 {
        lo -= step;
        if lo < BRACKET_LIMIT.0.ln() {
            return Err(Error::NoSolution);
        }
    }
    while g(hi) >= 0.0 {
        hi += step;
        if hi > BRACKET_LIMIT.1.ln() {
            return Err(Error::NoSolution);
        }
    }
    // bisect down to the resolution of f64 in log c
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (glo, ghi) = (g(lo).abs(), g(hi).abs());
    Ok(if glo <= ghi { lo } else { hi }.exp())
}

/// Output of a pairing map together with its diagonalisation diagnostics.
#[derive(Debug, Clone)]
pub struct PairingMap {
    pub scheme: Scheme,
    /// `[F(H)]` or `[F_1(H), F_2(H)]`.
    pub targets: Vec<CMatrix>,
    /// `[c]` or `[c_1, c_2]`.
    pub scales: Vec<f64>,
    /// Diagonal of `F(H) H` or `F_2(H) F_1(H) H`.
    pub product_diag: Vec<Complex64>,
    /// Off-diagonal Frobenius mass of the same product.
    pub residual: f64,
    /// Eigen-structure of `H` (three-hop only).
    pub eigen: Option<EigenStructure>,
}

impl PairingMap {
    /// `F(H)`, or `F_1(H)` for the three-hop maps.
    pub fn target(&self) -> &CMatrix {
        &self.targets[0]
    }

    /// Product of the scales, the value every diagonal entry should take.
    pub fn scale_product(&self) -> f64 {
        self.scales.iter().product()
    }

    /// `||product - scale_product * I||_F`, covering diagonal and off-diagonal error.
    pub fn identity_error(&self) -> f64 {
        let c = self.scale_product();
        let diag: f64 = self.product_diag.iter().map(|z| (z - c).norm_sqr()).sum();
        (diag + self.residual * self.residual).sqrt()
    }
}

fn diagnostics(product: &CMatrix) -> (Vec<Complex64>, f64) {
    let diag = (0..product.nrows()).map(|i| product[(i, i)]).collect();
    (diag, linalg::offdiag_norm(product))
}

/// Two-hop map `F(H) = c(H) H^-1`.
pub fn map_two_hop(dist: ChannelDistribution, h: &CMatrix) -> Result<PairingMap> {
    let inv = linalg::inverse(h)?;
    let c = solve_c(dist, h, &inv)?;
    let target = inv * Complex64::new(c, 0.0);
    let (product_diag, residual) = diagnostics(&(&target * h));
    Ok(PairingMap {
        scheme: Scheme::TwoHop,
        targets: vec![target],
        scales: vec![c],
        product_diag,
        residual,
        eigen: None,
    })
}

/// `(S L_1 S^-1, S L_2 S^-1)` with `L_1 = diag((-1)^w_i l_i)` and
/// `L_2 = diag((-1)^w_i l_i^-2)`.
pub fn pairing_shapes(eig: &EigenStructure) -> Result<(CMatrix, CMatrix)> {
    let signed = |i: usize, z: Complex64| if eig.flip_bits[i] { -z } else { z };
    let first: Vec<Complex64> = eig.values.iter().enumerate().map(|(i, &l)| signed(i, l)).collect();
    let second: Vec<Complex64> =
        eig.values.iter().enumerate().map(|(i, &l)| signed(i, (l * l).inv())).collect();
    Ok((similarity(&eig.vectors, &first)?, similarity(&eig.vectors, &second)?))
}

/// Three-hop maps `F_1(H)` and `F_2(H)` for `H` with separated eigenvalue magnitudes.
pub fn map_three_hop(dist: ChannelDistribution, h: &CMatrix) -> Result<PairingMap> {
    let eig = eig_ordered(h)?;
    let (shape1, shape2) = pairing_shapes(&eig)?;
    let c1 = solve_c(dist, h, &shape1)?;
    let c2 = solve_c(dist, h, &shape2)?;
    let f1 = shape1 * Complex64::new(c1, 0.0);
    let f2 = shape2 * Complex64::new(c2, 0.0);
    let (product_diag, residual) = diagnostics(&(&f2 * (&f1 * h)));
    Ok(PairingMap {
        scheme: Scheme::ThreeHop,
        targets: vec![f1, f2],
        scales: vec![c1, c2],
        product_diag,
        residual,
        eigen: Some(eig),
    })
}

/// Pairing map for `scheme`.
pub fn map_for(scheme: Scheme, dist: ChannelDistribution, h: &CMatrix) -> Result<PairingMap> {
    match scheme {
        Scheme::TwoHop => map_two_hop(dist, h),
        Scheme::ThreeHop => map_three_hop(dist, h),
    }
}

/// Whether `g` lies in the second-hop cell paired with first-hop `cell`.
///
/// Uses the involution `F(F(H)) = H`: `g` is the image of some first-hop matrix in
/// `cell` exactly when `F(g)` quantizes to `cell`.
pub fn cell_matches_second_hop(
    dist: ChannelDistribution,
    g: &CMatrix,
    cell: &CellIndex,
    spec: &QuantizerSpec,
) -> Result<bool> {
    let map = map_two_hop(dist, g)?;
    Ok(quantize(map.target(), spec).as_ref() == Some(cell))
}

/// Rank tolerance used when a first-hop matrix must be inverted.
pub const RANK_TOL: f64 = DEFAULT_TOL;
