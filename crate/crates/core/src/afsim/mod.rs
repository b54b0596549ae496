//! Discrete-time simulator of sub-block amplify-and-forward relaying.
//!
//! A run draws `B` sub-blocks of `n_B` channel uses per hop, sorts every first-hop
//! slot into its quantization cell and pairs it with later-hop slots whose matrices
//! fall in the cell's image under the pairing maps. Relays forward one sub-block
//! later, so sub-blocks `1 ..= B - M + 1` are the effective ones. Rates are the
//! information rates `log2(1 + SINR)` of the realised end-to-end channels; noise is
//! only sampled when the empirical power check is switched on.

mod gains;
mod source;

use std::collections::BTreeMap;

use rand_distr::{Distribution, StandardNormal};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

pub use gains::{
    gamma_two_hop, gammas_three_hop, link_terms_three_hop, link_terms_two_hop, quantized_pairing_leakage,
    sinr_three_hop, sinr_two_hop, SinrTerms,
};
pub use source::{ChannelSource, IidSource, PeriodicSource};

use crate::channel::{has_distinct_eigs, is_full_rank, ChannelDistribution, Topology};
use crate::mc::stream_rng;
use crate::pairing::{map_three_hop, map_two_hop, quantize, quantize_into, CellIndex, QuantizerSpec, RANK_TOL};
use crate::{CMatrix, Complex64, Error, Result, Scheme};

const SIM_STREAM: u64 = 0;
const CALIBRATION_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

/// Quantizer and quota slack derived from the sub-block length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub delta: f64,
    pub q: u32,
    pub epsilon: f64,
}

/// `delta = n_B^(-1/(24k^2))`, `q = ceil(n_B^(1/(12k^2)))`, `epsilon = n_B^(-1/3)`.
pub fn default_scaling(n_b: u64, k: usize) -> Result<Scaling> {
    if n_b < 2 || k == 0 {
        return Err(Error::Precondition(format!("need n_B >= 2 and k >= 1, got n_B = {n_b}, k = {k}")));
    }
    let n = n_b as f64;
    let kk = (k * k) as f64;
    let reach = n.powf(1.0 / (12.0 * kk));
    // powers that are integers in exact arithmetic must not round up by one ulp
    let nearest = reach.round();
    let q = if (reach - nearest).abs() <= 1e-12 * nearest { nearest } else { reach.ceil() };
    Ok(Scaling { delta: n.powf(-1.0 / (24.0 * kk)), q: q as u32, epsilon: n.cbrt().recip() })
}

/// Parameters of one simulation replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub topology: Topology,
    #[serde(default)]
    pub dist: ChannelDistribution,
    /// Per-node transmit power `P`.
    pub power: f64,
    /// Sub-block length `n_B`.
    pub n_b: u64,
    /// Number of sub-blocks `B`.
    pub sub_blocks: u64,
    pub quantizer: QuantizerSpec,
    pub epsilon: f64,
    pub seed: u64,
    /// First-hop draws used to estimate cell probabilities; `max(10^6, 100 n_B)` when unset.
    #[serde(default)]
    pub calibration_samples: Option<u64>,
    /// Sample source and relay noise to measure transmit powers empirically.
    #[serde(default)]
    pub sample_noise: bool,
}

impl SimConfig {
    /// Uniform `k`-node topology with the quantizer and slack of [`default_scaling`].
    pub fn with_default_scaling(
        k: usize,
        hops: usize,
        dist: ChannelDistribution,
        power: f64,
        n_b: u64,
        sub_blocks: u64,
        seed: u64,
    ) -> Result<Self> {
        let s = default_scaling(n_b, k)?;
        let config = SimConfig {
            topology: Topology::uniform(k, hops)?,
            dist,
            power,
            n_b,
            sub_blocks,
            quantizer: QuantizerSpec::new(s.delta, s.q, k)?,
            epsilon: s.epsilon,
            seed,
            calibration_samples: None,
            sample_noise: false,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn scheme(&self) -> Result<Scheme> {
        Scheme::from_hops(self.topology.hops()).ok_or_else(|| {
            Error::config("topology", format!("the simulator supports 2 or 3 hops, got {}", self.topology.hops()))
        })
    }

    /// Number of S-D pairs.
    pub fn pairs(&self) -> usize {
        self.topology.layer_sizes()[0]
    }

    /// Sub-blocks whose messages reach the destinations, `B - M + 1`.
    pub fn effective_sub_blocks(&self) -> u64 {
        (self.sub_blocks + 1).saturating_sub(self.topology.hops() as u64)
    }

    pub fn calibration_len(&self) -> u64 {
        self.calibration_samples.unwrap_or_else(|| (100 * self.n_b).max(1_000_000))
    }

    pub fn validate(&self) -> Result<()> {
        let scheme = self.scheme()?;
        if !self.topology.is_uniform() {
            return Err(Error::config("layers", "the simulator needs the same number of nodes in every layer"));
        }
        if self.topology.has_multi_antenna() {
            return Err(Error::config("antennas", "the simulator handles single-antenna nodes only"));
        }
        let k = self.pairs();
        if self.quantizer.k != k {
            return Err(Error::config("quantizer.k", format!("must equal the layer size {k}, got {}", self.quantizer.k)));
        }
        QuantizerSpec::new(self.quantizer.delta, self.quantizer.q, self.quantizer.k)?;
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::config("power", format!("must be positive and finite, got {}", self.power)));
        }
        if self.n_b == 0 {
            return Err(Error::config("n_b", "must be at least 1"));
        }
        let hops = scheme.hops() as u64;
        if self.sub_blocks < hops {
            return Err(Error::config(
                "B",
                format!("B must be at least {hops} for {}-hop relaying, got {}", hops, self.sub_blocks),
            ));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::config("epsilon", format!("must lie in [0, 1), got {}", self.epsilon)));
        }
        if self.calibration_samples == Some(0) {
            return Err(Error::config("calibration_samples", "must be at least 1"));
        }
        Ok(())
    }
}

/// Time-index sets and quotas of one run.
#[derive(Debug, Clone, Default)]
pub struct ScheduleTables {
    /// `slots[b - 1][m - 1]` maps a cell to the increasing times `t` of sub-block `b`
    /// whose hop-`m` key falls in it. First-hop keys quantize `H`; two-hop second-hop
    /// keys quantize `F(G)`; three-hop later-hop keys quantize `G`.
    pub slots: Vec<Vec<FxHashMap<CellIndex, Vec<u64>>>>,
    /// Quota `N(H_delta)` of every cell with a positive quota.
    pub quotas: BTreeMap<CellIndex, u64>,
    /// Distinct first-hop cells seen while calibrating.
    pub observed_cells: u64,
    pub calibration_samples: u64,
}

impl ScheduleTables {
    pub fn times(&self, sub_block: u64, hop: usize, cell: &CellIndex) -> &[u64] {
        self.slots[(sub_block - 1) as usize][hop - 1].get(cell).map_or(&[], Vec::as_slice)
    }
}

/// Fate of the `n_B` slots of one hop in one sub-block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotCounts {
    pub sub_block: u64,
    pub hop: usize,
    pub transmitted: u64,
    /// In range, in a cell with a positive quota, but not transmitted because the
    /// cell or its partner could not fill the quota.
    pub unmet_quota: u64,
    /// In range but beyond the quota or never asked for.
    pub unused: u64,
    /// Outside the quantizer range or failing the regularity predicate.
    pub out_of_range: u64,
}

impl SlotCounts {
    pub fn total(&self) -> u64 {
        self.transmitted + self.unmet_quota + self.unused + self.out_of_range
    }
}

/// Outcome of one replica. Field order is the serialisation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub scheme: Scheme,
    pub pairs: usize,
    /// Per-pair rate in bits per channel use, averaged over effective sub-blocks.
    pub rate_bits: Vec<f64>,
    /// Per-pair SINR averaged over transmitted slots (0 when none).
    pub mean_sinr: Vec<f64>,
    /// Per-pair off-diagonal interference power averaged over transmitted slots.
    pub interference_power: Vec<f64>,
    /// Effective sub-blocks with an encoding error (some quota cell short of first-hop slots).
    pub e1: u64,
    /// Effective sub-blocks with a relaying error (a later hop short of paired slots).
    pub e2: u64,
    /// Cells short of first-hop slots, summed over effective sub-blocks.
    pub e1_cells: u64,
    /// Two-hop: cells short of second-hop slots. Three-hop: first-hop slots left unmatched.
    pub e2_cells: u64,
    pub effective_sub_blocks: u64,
    pub observed_cells: u64,
    pub quota_cells: u64,
    /// Transmitted first-hop slots over `n_B` times the effective sub-blocks.
    pub slot_utilization: f64,
    /// Out-of-range slots over all simulated slots of all hops.
    pub out_of_range_fraction: f64,
    /// Slots whose matrix failed the regularity predicate (counted as out of range).
    pub rejected_samples: u64,
    pub slot_counts: Vec<SlotCounts>,
    /// Empirical mean source transmit power per symbol, when noise sampling is on.
    pub source_power: Option<f64>,
    /// Empirical mean transmit power of every relay, indexed `[relay layer][node]`.
    pub relay_power: Option<Vec<Vec<f64>>>,
}

impl SimReport {
    pub fn mean_sinr_db(&self) -> Vec<f64> {
        self.mean_sinr.iter().map(|s| 10.0 * s.log10()).collect()
    }

    pub fn sum_rate_bits(&self) -> f64 {
        self.rate_bits.iter().sum()
    }
}

/// Times of one transmitted tuple, one entry per hop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduledSlot {
    pub sub_block: u64,
    pub cell: CellIndex,
    pub times: Vec<u64>,
}

/// Schedule and realised channels of a traced run.
#[derive(Debug, Clone)]
pub struct SimTrace {
    pub tables: ScheduleTables,
    pub scheduled: Vec<ScheduledSlot>,
    /// `matrices[m - 1][t - 1]` is the hop-`m` matrix at time `t`.
    pub matrices: Vec<Vec<CMatrix>>,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub report: SimReport,
    pub trace: Option<SimTrace>,
}

/// Runs one replica with i.i.d. channels drawn from `config.dist`.
pub fn run_block_sim(config: &SimConfig) -> Result<SimReport> {
    let source = IidSource { dist: config.dist, k: config.pairs() };
    Ok(run_block_sim_with(config, &source, false)?.report)
}

/// Runs replicas for `seeds` concurrently; reports come back in seed order.
pub fn run_seeds(config: &SimConfig, seeds: &[u64]) -> Result<Vec<SimReport>> {
    use rayon::prelude::*;
    seeds.par_iter().map(|&seed| run_block_sim(&SimConfig { seed, ..config.clone() })).collect()
}

/// Encoding and relaying error frequencies per effective sub-block, and the
/// concentration bound `observed_cells / (4 n_B epsilon^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEventStats {
    pub p_hat_e1: f64,
    pub p_hat_e2: f64,
    pub bound: f64,
}

pub fn error_event_stats(report: &SimReport, config: &SimConfig) -> ErrorEventStats {
    let eff = report.effective_sub_blocks.max(1) as f64;
    let bound = report.observed_cells as f64 / (4.0 * config.n_b as f64 * config.epsilon * config.epsilon);
    ErrorEventStats { p_hat_e1: report.e1 as f64 / eff, p_hat_e2: report.e2 as f64 / eff, bound }
}

/// Slot classification key: the cell a hop-`m` matrix is filed under.
enum Key {
    Cell,
    OutOfRange,
    Rejected,
}

struct Classifier<'a> {
    scheme: Scheme,
    dist: ChannelDistribution,
    spec: &'a QuantizerSpec,
}

impl Classifier<'_> {
    fn classify(&self, hop: usize, h: &CMatrix, coords: &mut Vec<i32>) -> Key {
        let in_range = |m: &CMatrix, coords: &mut Vec<i32>| {
            if quantize_into(m, self.spec, coords) {
                Key::Cell
            } else {
                Key::OutOfRange
            }
        };
        match (self.scheme, hop) {
            (Scheme::TwoHop, 1) => {
                if is_full_rank(h, RANK_TOL) {
                    in_range(h, coords)
                } else {
                    Key::Rejected
                }
            }
            (Scheme::TwoHop, _) => {
                if !is_full_rank(h, RANK_TOL) {
                    return Key::Rejected;
                }
                match map_two_hop(self.dist, h) {
                    Ok(map) => in_range(map.target(), coords),
                    Err(_) => Key::Rejected,
                }
            }
            (Scheme::ThreeHop, 1) => {
                if is_full_rank(h, RANK_TOL) && has_distinct_eigs(h, RANK_TOL).unwrap_or(false) {
                    in_range(h, coords)
                } else {
                    Key::Rejected
                }
            }
            (Scheme::ThreeHop, _) => in_range(h, coords),
        }
    }
}

/// Cell frequencies of first-hop draws and the resulting quotas
/// `floor(n_B (Pr - epsilon))`. The regularity predicates fail with probability zero
/// for continuous laws and are not applied here.
fn calibrate(config: &SimConfig, source: &dyn ChannelSource) -> (BTreeMap<CellIndex, u64>, u64) {
    let n_cal = config.calibration_len();
    let mut rng = stream_rng(config.seed, CALIBRATION_STREAM);
    let mut counts: FxHashMap<CellIndex, u64> = FxHashMap::default();
    let mut coords = Vec::with_capacity(config.quantizer.coords_len());
    for t in 1..=n_cal {
        let h = source.matrix(1, t, &mut rng);
        if !quantize_into(&h, &config.quantizer, &mut coords) {
            continue;
        }
        match counts.get_mut(coords.as_slice()) {
            Some(c) => *c += 1,
            None => {
                counts.insert(CellIndex::from_coords(coords.clone()), 1);
            }
        }
    }
    let observed = counts.len() as u64;
    let mut quotas = BTreeMap::new();
    for (cell, count) in counts {
        let pr = count as f64 / n_cal as f64;
        let n = (config.n_b as f64 * (pr - config.epsilon)).floor();
        if n >= 1.0 {
            quotas.insert(cell, n as u64);
        }
    }
    (quotas, observed)
}

struct Accumulator {
    rate: Vec<f64>,
    sinr: Vec<f64>,
    interference: Vec<f64>,
    tuples: u64,
}

impl Accumulator {
    fn new(k: usize) -> Self {
        Accumulator { rate: vec![0.0; k], sinr: vec![0.0; k], interference: vec![0.0; k], tuples: 0 }
    }

    fn push(&mut self, terms: &[SinrTerms]) {
        for (i, t) in terms.iter().enumerate() {
            self.rate[i] += t.rate_bits();
            self.sinr[i] += t.sinr();
            self.interference[i] += t.interference;
        }
        self.tuples += 1;
    }
}

/// Empirical transmit powers from sampled noise.
struct PowerMeter {
    rng: rand_chacha::ChaCha8Rng,
    source: f64,
    relays: Vec<Vec<f64>>,
    tuples: u64,
}

impl PowerMeter {
    fn new(seed: u64, relay_layers: usize, k: usize) -> Self {
        PowerMeter { rng: stream_rng(seed, NOISE_STREAM), source: 0.0, relays: vec![vec![0.0; k]; relay_layers], tuples: 0 }
    }

    fn cn(&mut self, k: usize, var: f64) -> CMatrix {
        let s = (var / 2.0).sqrt();
        CMatrix::from_fn(k, 1, |_, _| {
            let re: f64 = StandardNormal.sample(&mut self.rng);
            let im: f64 = StandardNormal.sample(&mut self.rng);
            Complex64::new(re * s, im * s)
        })
    }

    /// Pushes one symbol through `hops` with per-layer gains `gammas`.
    fn push(&mut self, hops: &[&CMatrix], gammas: &[f64], p: f64) {
        let k = hops[0].ncols();
        let x = self.cn(k, p);
        self.source += x.norm_squared() / k as f64;
        let mut signal = x;
        for (layer, gamma) in gammas.iter().enumerate() {
            let noise = self.cn(k, 1.0);
            signal = (hops[layer] * &signal + noise) * Complex64::new(*gamma, 0.0);
            for (node, z) in signal.iter().enumerate() {
                self.relays[layer][node] += z.norm_sqr();
            }
        }
        self.tuples += 1;
    }
}

/// Runs one replica against an arbitrary channel source; `trace` keeps the schedule
/// and every realised matrix.
pub fn run_block_sim_with(config: &SimConfig, source: &dyn ChannelSource, trace: bool) -> Result<SimOutcome> {
    config.validate()?;
    let scheme = config.scheme()?;
    let hops = scheme.hops();
    let k = config.pairs();
    let n_b = config.n_b;
    let blocks = config.sub_blocks;
    let total = (blocks * n_b) as usize;
    let spec = &config.quantizer;

    let (quotas, observed_cells) = calibrate(config, source);

    let mut rng = stream_rng(config.seed, SIM_STREAM);
    let mut matrices: Vec<Vec<CMatrix>> = (0..hops).map(|_| Vec::with_capacity(total)).collect();
    for t in 1..=total as u64 {
        for (m, list) in matrices.iter_mut().enumerate() {
            list.push(source.matrix(m + 1, t, &mut rng));
        }
    }

    let classifier = Classifier { scheme, dist: config.dist, spec };
    let mut slots: Vec<Vec<FxHashMap<CellIndex, Vec<u64>>>> =
        (0..blocks).map(|_| (0..hops).map(|_| FxHashMap::default()).collect()).collect();
    let mut counts: Vec<Vec<SlotCounts>> = (1..=blocks)
        .map(|b| (1..=hops).map(|m| SlotCounts { sub_block: b, hop: m, ..SlotCounts::default() }).collect())
        .collect();
    let mut in_range = vec![vec![0u64; hops]; blocks as usize];
    let mut rejected_samples = 0u64;
    let mut coords = Vec::with_capacity(spec.coords_len());
    for m in 1..=hops {
        for (idx, h) in matrices[m - 1].iter().enumerate() {
            let t = idx as u64 + 1;
            let b = ((t - 1) / n_b) as usize;
            match classifier.classify(m, h, &mut coords) {
                Key::Cell => {
                    in_range[b][m - 1] += 1;
                    let table = &mut slots[b][m - 1];
                    match table.get_mut(coords.as_slice()) {
                        Some(list) => list.push(t),
                        None => {
                            table.insert(CellIndex::from_coords(coords.clone()), vec![t]);
                        }
                    }
                }
                Key::OutOfRange => counts[b][m - 1].out_of_range += 1,
                Key::Rejected => {
                    rejected_samples += 1;
                    counts[b][m - 1].out_of_range += 1;
                }
            }
        }
    }
    let tables = ScheduleTables {
        slots,
        quotas,
        observed_cells,
        calibration_samples: config.calibration_len(),
    };

    let effective = config.effective_sub_blocks();
    let mut acc = Accumulator::new(k);
    let mut meter = config.sample_noise.then(|| PowerMeter::new(config.seed, hops - 1, k));
    let mut scheduled = Vec::new();
    let (mut e1, mut e2, mut e1_cells, mut e2_cells) = (0u64, 0u64, 0u64, 0u64);
    let mat = |m: usize, t: u64| &matrices[m - 1][(t - 1) as usize];
    let p = config.power;

    for b in 1..=effective {
        let bi = (b - 1) as usize;
        let (mut err1, mut err2) = (false, false);
        match scheme {
            Scheme::TwoHop => {
                for (cell, &n) in &tables.quotas {
                    let first = tables.times(b, 1, cell);
                    let second = tables.times(b + 1, 2, cell);
                    let n = n as usize;
                    if first.len() < n {
                        e1_cells += 1;
                        err1 = true;
                    }
                    if second.len() < n {
                        e2_cells += 1;
                        err2 = true;
                    }
                    if first.len() < n || second.len() < n {
                        counts[bi][0].unmet_quota += first.len() as u64;
                        counts[bi + 1][1].unmet_quota += second.len() as u64;
                        continue;
                    }
                    for (&t1, &t2) in first[..n].iter().zip(&second[..n]) {
                        let (h1, h2) = (mat(1, t1), mat(2, t2));
                        acc.push(&link_terms_two_hop(h1, h2, p));
                        if let Some(meter) = meter.as_mut() {
                            meter.push(&[h1, h2], &[gamma_two_hop(h1, p)], p);
                        }
                        if trace {
                            scheduled.push(ScheduledSlot { sub_block: b, cell: cell.clone(), times: vec![t1, t2] });
                        }
                    }
                    counts[bi][0].transmitted += n as u64;
                    counts[bi + 1][1].transmitted += n as u64;
                }
            }
            Scheme::ThreeHop => {
                let mut taken: [FxHashMap<CellIndex, usize>; 2] = Default::default();
                for (cell, &n) in &tables.quotas {
                    let first = tables.times(b, 1, cell);
                    let n = n as usize;
                    if first.len() < n {
                        e1_cells += 1;
                        err1 = true;
                        counts[bi][0].unmet_quota += first.len() as u64;
                        continue;
                    }
                    for &t1 in &first[..n] {
                        let h1 = mat(1, t1);
                        let partners = map_three_hop(config.dist, h1).ok().and_then(|map| {
                            let c2 = quantize(&map.targets[0], spec)?;
                            let c3 = quantize(&map.targets[1], spec)?;
                            let l2 = tables.times(b + 1, 2, &c2);
                            let l3 = tables.times(b + 2, 3, &c3);
                            let i2 = *taken[0].get(&c2).unwrap_or(&0);
                            let i3 = *taken[1].get(&c3).unwrap_or(&0);
                            (i2 < l2.len() && i3 < l3.len()).then(|| (c2, c3, l2[i2], l3[i3]))
                        });
                        let Some((c2, c3, t2, t3)) = partners else {
                            e2_cells += 1;
                            err2 = true;
                            counts[bi][0].unmet_quota += 1;
                            continue;
                        };
                        *taken[0].entry(c2).or_insert(0) += 1;
                        *taken[1].entry(c3).or_insert(0) += 1;
                        let (h2, h3) = (mat(2, t2), mat(3, t3));
                        acc.push(&link_terms_three_hop(h1, h2, h3, p));
                        if let Some(meter) = meter.as_mut() {
                            let (g1, g2) = gammas_three_hop(h1, h2, p);
                            meter.push(&[h1, h2, h3], &[g1, g2], p);
                        }
                        if trace {
                            scheduled.push(ScheduledSlot { sub_block: b, cell: cell.clone(), times: vec![t1, t2, t3] });
                        }
                        counts[bi][0].transmitted += 1;
                        counts[bi + 1][1].transmitted += 1;
                        counts[bi + 2][2].transmitted += 1;
                    }
                }
            }
        }
        e1 += err1 as u64;
        e2 += err2 as u64;
    }

    for (bi, row) in counts.iter_mut().enumerate() {
        for (mi, c) in row.iter_mut().enumerate() {
            c.unused = in_range[bi][mi] - c.transmitted - c.unmet_quota;
        }
    }
    let slot_counts: Vec<SlotCounts> = counts.into_iter().flatten().collect();
    let out_of_range: u64 = slot_counts.iter().map(|c| c.out_of_range).sum();
    let transmitted_first: u64 = slot_counts.iter().filter(|c| c.hop == 1).map(|c| c.transmitted).sum();
    let per_slot = |x: f64| if acc.tuples > 0 { x / acc.tuples as f64 } else { 0.0 };
    let denom = (n_b * effective) as f64;

    let report = SimReport {
        seed: config.seed,
        scheme,
        pairs: k,
        rate_bits: acc.rate.iter().map(|r| r / denom).collect(),
        mean_sinr: acc.sinr.iter().map(|&s| per_slot(s)).collect(),
        interference_power: acc.interference.iter().map(|&s| per_slot(s)).collect(),
        e1,
        e2,
        e1_cells,
        e2_cells,
        effective_sub_blocks: effective,
        observed_cells,
        quota_cells: tables.quotas.len() as u64,
        slot_utilization: transmitted_first as f64 / denom,
        out_of_range_fraction: out_of_range as f64 / (total * hops) as f64,
        rejected_samples,
        slot_counts,
        source_power: meter.as_ref().map(|m| m.source / m.tuples.max(1) as f64),
        relay_power: meter
            .as_ref()
            .map(|m| m.relays.iter().map(|l| l.iter().map(|x| x / m.tuples.max(1) as f64).collect()).collect()),
    };
    let trace = trace.then_some(SimTrace { tables, scheduled, matrices });
    Ok(SimOutcome { report, trace })
}

#[cfg(test)]
mod tests;
