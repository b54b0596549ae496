//! Monte Carlo ergodic rates of the pairing schemes, the cut-set upper bound, SNR
//! sweeps and finite-SNR DoF slopes.
//!
//! Every evaluator draws trial `n` from stream `n` of the master seed, so curves
//! evaluated at several powers in one call see the same channel draws.

use serde::{Deserialize, Serialize};

use crate::channel::{has_distinct_eigs, is_full_rank, sample_hop_matrix, ChannelDistribution};
use crate::linalg::{max_row_norm_sq, row_norm_sq, singular_values};
use crate::mc::{run_trials, Estimate, Moments};
use crate::pairing::{map_three_hop, map_two_hop, RANK_TOL};
use crate::{CMatrix, Error, Result, Scheme};

/// Ergodic rate estimate at one power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    /// `two-hop`, `three-hop`, `<M>-hop` or `cutset`.
    pub label: String,
    pub k: usize,
    /// Linear per-node power.
    pub p: f64,
    pub samples: u64,
    pub rejected: u64,
    /// Per-pair rates in bits; empty for the cut-set bound.
    pub per_pair: Vec<Estimate>,
    pub sum: Estimate,
}

/// One SNR point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub k: usize,
    pub m: usize,
    pub scheme: Scheme,
    pub achievable_sum: f64,
    pub cutset_sum: f64,
    pub gap: f64,
    /// Standard error of the gap from per-draw differences.
    pub stderr: f64,
    pub achievable_stderr: f64,
    pub cutset_stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Power-independent parts of the two-hop rate integrand for one draw.
#[derive(Debug, Clone)]
pub struct TwoHopTerms {
    pub c: f64,
    /// `max_i ||row_i(H)||^2`, which sets the relay gain.
    pub max_row: f64,
    /// `||row_i(H^-1)||^2`.
    pub inv_rows: Vec<f64>,
}

impl TwoHopTerms {
    pub fn new(dist: ChannelDistribution, h: &CMatrix) -> Result<Self> {
        let map = map_two_hop(dist, h)?;
        let c = map.scales[0];
        let inv_rows = (0..h.nrows()).map(|i| row_norm_sq(map.target(), i) / (c * c)).collect();
        Ok(TwoHopTerms { c, max_row: max_row_norm_sq(h), inv_rows })
    }

    /// `log2(1 + g^2 c^2 P / (1 + g^2 c^2 ||row_i(H^-1)||^2))` for every pair.
    pub fn rates(&self, p: f64) -> Vec<f64> {
        let g2 = p / (1.0 + self.max_row * p);
        let gc = g2 * self.c * self.c;
        self.inv_rows.iter().map(|&r| log2_1p(gc * p / (1.0 + gc * r))).collect()
    }
}

/// Power-independent parts of the three-hop rate integrand for one draw.
#[derive(Debug, Clone)]
pub struct ThreeHopTerms {
    /// `c_1 c_2`.
    pub c: f64,
    pub max_row: f64,
    /// `(||row_i(F_1)||^2, ||row_i(F_1 H)||^2)`, which set the second relay gain.
    pub f1_rows: Vec<(f64, f64)>,
    /// `||row_i(F_2)||^2`.
    pub f2_rows: Vec<f64>,
    /// `||row_i(F_2 F_1)||^2`.
    pub f21_rows: Vec<f64>,
}

impl ThreeHopTerms {
    pub fn new(dist: ChannelDistribution, h: &CMatrix) -> Result<Self> {
        let map = map_three_hop(dist, h)?;
        let (f1, f2) = (&map.targets[0], &map.targets[1]);
        let f1h = f1 * h;
        let f21 = f2 * f1;
        let k = h.nrows();
        Ok(ThreeHopTerms {
            c: map.scale_product(),
            max_row: max_row_norm_sq(h),
            f1_rows: (0..k).map(|i| (row_norm_sq(f1, i), row_norm_sq(&f1h, i))).collect(),
            f2_rows: (0..k).map(|i| row_norm_sq(f2, i)).collect(),
            f21_rows: (0..k).map(|i| row_norm_sq(&f21, i)).collect(),
        })
    }

    pub fn gains_sq(&self, p: f64) -> (f64, f64) {
        let g1 = p / (1.0 + self.max_row * p);
        let worst = self.f1_rows.iter().map(|&(a, b)| a + b * p).fold(0.0, f64::max);
        (g1, p / (1.0 + g1 * worst))
    }

    /// `log2(1 + g2^2 g1^2 c^2 P / (1 + g2^2 ||row_i F_2||^2 + g2^2 g1^2 ||row_i F_2 F_1||^2))`.
    pub fn rates(&self, p: f64) -> Vec<f64> {
        let (g1, g2) = self.gains_sq(p);
        let s = g2 * g1 * self.c * self.c * p;
        self.f2_rows
            .iter()
            .zip(&self.f21_rows)
            .map(|(&a, &b)| log2_1p(s / (1.0 + g2 * a + g2 * g1 * b)))
            .collect()
    }
}

/// Per-pair integrand of `scheme` at every power in `ps`, or `None` when `h` fails
/// the scheme's regularity predicate.
pub fn integrand(scheme: Scheme, dist: ChannelDistribution, h: &CMatrix, ps: &[f64]) -> Result<Option<Vec<Vec<f64>>>> {
    match scheme {
        Scheme::TwoHop => {
            if !is_full_rank(h, RANK_TOL) {
                return Ok(None);
            }
            let t = TwoHopTerms::new(dist, h)?;
            Ok(Some(ps.iter().map(|&p| t.rates(p)).collect()))
        }
        Scheme::ThreeHop => {
            if !(is_full_rank(h, RANK_TOL) && has_distinct_eigs(h, RANK_TOL)?) {
                return Ok(None);
            }
            let t = ThreeHopTerms::new(dist, h)?;
            Ok(Some(ps.iter().map(|&p| t.rates(p)).collect()))
        }
    }
}

fn check_inputs(k: usize, ps: &[f64], samples: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::config("k", "must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    if let Some(p) = ps.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::config("snr", format!("power must be positive and finite, got {p}")));
    }
    Ok(())
}

/// Per-pair and sum rates of `scheme` at each power of `ps`, on common draws.
pub fn rate_curve(
    scheme: Scheme,
    dist: ChannelDistribution,
    k: usize,
    ps: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<RateResult>> {
    check_inputs(k, ps, samples)?;
    let width = k + 1;
    let summary = run_trials(samples, seed, width * ps.len(), |rng| {
        let h = sample_hop_matrix(dist, k, k, rng);
        Ok(integrand(scheme, dist, &h, ps)?.map(|per_p| {
            per_p
                .into_iter()
                .flat_map(|mut r| {
                    r.push(r.iter().sum());
                    r
                })
                .collect()
        }))
    })?;
    Ok(ps
        .iter()
        .enumerate()
        .map(|(n, &p)| RateResult {
            label: scheme.label().to_string(),
            k,
            p,
            samples: summary.moments.count,
            rejected: summary.rejected,
            per_pair: (0..k).map(|i| summary.moments.estimate(n * width + i)).collect(),
            sum: summary.moments.estimate(n * width + k),
        })
        .collect())
}

/// Two-hop ergodic rate `E[log2(1 + g^2 c^2 P / (1 + g^2 c^2 ||row_i(H^-1)||^2))]`.
pub fn rate_two_hop_mc(dist: ChannelDistribution, k: usize, p: f64, samples: usize, seed: u64) -> Result<RateResult> {
    Ok(rate_curve(Scheme::TwoHop, dist, k, &[p], samples, seed)?.remove(0))
}

/// Three-hop counterpart of [`rate_two_hop_mc`] built on `F_1`, `F_2`.
pub fn rate_three_hop_mc(dist: ChannelDistribution, k: usize, p: f64, samples: usize, seed: u64) -> Result<RateResult> {
    Ok(rate_curve(Scheme::ThreeHop, dist, k, &[p], samples, seed)?.remove(0))
}

/// Split of `M` hops into segments of 2 and 3: all 2s for even `M`, a trailing 3 for odd `M`.
pub fn hop_decompose(m: usize) -> Result<Vec<usize>> {
    if m < 2 {
        return Err(Error::config("m", format!("need at least 2 hops, got {m}")));
    }
    let mut segments = vec![2; m / 2];
    if m % 2 == 1 {
        *segments.last_mut().unwrap() = 3;
    }
    Ok(segments)
}

/// Per-pair rate of an `M`-hop network relayed segment by segment: the minimum over
/// the [`hop_decompose`] segments, each evaluated on its own independent draws.
pub fn rate_multi_hop_mc(
    dist: ChannelDistribution,
    k: usize,
    m: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<RateResult> {
    let segments = hop_decompose(m)?;
    let mut best: Option<RateResult> = None;
    for (n, &len) in segments.iter().enumerate() {
        let scheme = Scheme::from_hops(len).expect("segments have 2 or 3 hops");
        let r = rate_curve(scheme, dist, k, &[p], samples, segment_seed(seed, n))?.remove(0);
        best = Some(match best {
            None => r,
            Some(mut acc) => {
                for (a, b) in acc.per_pair.iter_mut().zip(&r.per_pair) {
                    if b.mean < a.mean {
                        *a = *b;
                    }
                }
                acc.rejected += r.rejected;
                acc
            }
        });
    }
    let mut out = best.expect("at least one segment");
    out.label = format!("{m}-hop");
    // the per-pair minima come from different segments; report their sum
    out.sum = Estimate {
        mean: out.per_pair.iter().map(|e| e.mean).sum(),
        stderr: out.per_pair.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt(),
    };
    Ok(out)
}

fn segment_seed(seed: u64, segment: usize) -> u64 {
    if segment == 0 {
        seed
    } else {
        seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(segment as u64))
    }
}

/// Power allocation maximising `sum log(1 + p_i s_i)` subject to `sum p_i = total`,
/// where `s_i` are squared singular values.
///
/// The water level comes from the sorted-prefix closed form. When every mode is
/// dead the power is spread uniformly (the objective is zero either way).
pub fn waterfill(sq_singular_values: &[f64], total_power: f64) -> Result<Vec<f64>> {
    if !(total_power.is_finite() && total_power >= 0.0) {
        return Err(Error::Precondition(format!("total power must be finite and non-negative, got {total_power}")));
    }
    if sq_singular_values.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::Precondition("squared singular values must be finite and non-negative".into()));
    }
    let n = sq_singular_values.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| sq_singular_values[i] > 0.0).collect();
    if order.is_empty() {
        return Ok(vec![total_power / n as f64; n]);
    }
    order.sort_by(|&a, &b| sq_singular_values[b].total_cmp(&sq_singular_values[a]));
    let mut level = 0.0;
    let mut inv_sum = 0.0;
    for (j, &i) in order.iter().enumerate() {
        let floor = 1.0 / sq_singular_values[i];
        if j > 0 && level <= floor {
            break;
        }
        inv_sum += floor;
        level = (total_power + inv_sum) / (j + 1) as f64;
    }
    Ok((0..n)
        .map(|i| {
            let s = sq_singular_values[i];
            if s > 0.0 {
                (level - 1.0 / s).max(0.0)
            } else {
                0.0
            }
        })
        .collect())
}

/// `sum log2(1 + p_i s_i)`.
pub fn waterfill_objective(sq_singular_values: &[f64], alloc: &[f64]) -> f64 {
    sq_singular_values.iter().zip(alloc).map(|(&s, &p)| log2_1p(p * s)).sum()
}

/// `max log2 det(I + P H S H^+)` over `S >= 0` with `tr S <= K_tx` for one draw.
pub fn cutset_sample(h: &CMatrix, p: f64) -> Result<f64> {
    let sq: Vec<f64> = singular_values(h).iter().map(|s| s * s).collect();
    let budget = h.ncols() as f64 * p;
    let alloc = waterfill(&sq, budget)?;
    Ok(waterfill_objective(&sq, &alloc))
}

/// Cut-set sum-rate bound `E[max log2 det(I + P H S H^+)]` with `tr S <= K_tx`
/// for i.i.d. `K_rx x K_tx` draws.
pub fn cutset_sum_upper(
    dist: ChannelDistribution,
    k_tx: usize,
    k_rx: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<RateResult> {
    check_inputs(k_tx.min(k_rx), &[p], samples)?;
    let summary = run_trials(samples, seed, 1, |rng| {
        let h = sample_hop_matrix(dist, k_rx, k_tx, rng);
        Ok(Some(vec![cutset_sample(&h, p)?]))
    })?;
    Ok(RateResult {
        label: "cutset".into(),
        k: k_tx,
        p,
        samples: summary.moments.count,
        rejected: summary.rejected,
        per_pair: Vec::new(),
        sum: summary.moments.estimate(0),
    })
}

/// Achievable sum rate of `scheme` next to the cut-set bound at each SNR, on common
/// draws; the cut-set term uses the first-hop matrix of the same draw.
pub fn gap_table(
    dist: ChannelDistribution,
    k: usize,
    m: usize,
    snr_db: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let scheme = Scheme::from_hops(m).ok_or_else(|| Error::config("m", format!("sweeps support 2 or 3 hops, got {m}")))?;
    let ps: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    check_inputs(k, &ps, samples)?;
    let summary = run_trials(samples, seed, 3 * ps.len(), |rng| {
        let h = sample_hop_matrix(dist, k, k, rng);
        let Some(per_p) = integrand(scheme, dist, &h, &ps)? else { return Ok(None) };
        let mut out = Vec::with_capacity(3 * ps.len());
        for (rates, &p) in per_p.iter().zip(&ps) {
            let ach: f64 = rates.iter().sum();
            let cut = cutset_sample(&h, p)?;
            out.extend([ach, cut, cut - ach]);
        }
        Ok(Some(out))
    })?;
    let mo = &summary.moments;
    Ok(snr_db
        .iter()
        .enumerate()
        .map(|(n, &db)| SweepRow {
            snr_db: db,
            k,
            m,
            scheme,
            achievable_sum: mo.mean(3 * n),
            cutset_sum: mo.mean(3 * n + 1),
            gap: mo.mean(3 * n + 2),
            stderr: mo.stderr(3 * n + 2),
            achievable_stderr: mo.stderr(3 * n),
            cutset_stderr: mo.stderr(3 * n + 1),
            samples: mo.count,
            seed,
        })
        .collect())
}

/// Finite-SNR slope `(R(P_hi) - R(P_lo)) / (log2 P_hi - log2 P_lo)`.
///
/// The two evaluations are treated as independent, so the reported standard error
/// is conservative under common random numbers.
pub fn dof_slope<F>(mut rate_fn: F, p_lo: f64, p_hi: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Estimate>,
{
    if !(p_lo > 0.0 && p_hi > p_lo && p_hi.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < P_lo < P_hi, got {p_lo}, {p_hi}")));
    }
    let (lo, hi) = (rate_fn(p_lo)?, rate_fn(p_hi)?);
    let span = p_hi.log2() - p_lo.log2();
    Ok(Estimate {
        mean: (hi.mean - lo.mean) / span,
        stderr: (hi.stderr * hi.stderr + lo.stderr * lo.stderr).sqrt() / span,
    })
}

/// Per-pair slopes of `scheme` on common draws, with standard errors from the
/// per-draw slope.
pub fn dof_slope_mc(
    scheme: Scheme,
    dist: ChannelDistribution,
    k: usize,
    p_lo: f64,
    p_hi: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if !(p_lo > 0.0 && p_hi > p_lo && p_hi.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < P_lo < P_hi, got {p_lo}, {p_hi}")));
    }
    check_inputs(k, &[p_lo, p_hi], samples)?;
    let span = p_hi.log2() - p_lo.log2();
    let summary = run_trials(samples, seed, k, |rng| {
        let h = sample_hop_matrix(dist, k, k, rng);
        Ok(integrand(scheme, dist, &h, &[p_lo, p_hi])?
            .map(|r| r[1].iter().zip(&r[0]).map(|(hi, lo)| (hi - lo) / span).collect()))
    })?;
    Ok((0..k).map(|i| summary.moments.estimate(i)).collect())
}

/// Moments of a scalar sequence; convenience for callers that reduce their own draws.
pub fn estimate_of(values: &[f64]) -> Estimate {
    let mut m = Moments::new(1);
    for &v in values {
        m.push(&[v]);
    }
    m.estimate(0)
}
