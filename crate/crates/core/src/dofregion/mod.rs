//! DoF polytopes of layered relay networks, their corner points and the antenna
//! assignments that realise integral corners.
//!
//! Coordinates are 1-based: pair `i` in the single-antenna family, message
//! `W_ji` (destination `j`, source `i`) in the multi-antenna family. Every
//! constraint has 0/1 coefficients and an integer right-hand side.

mod slice;

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::channel::Topology;
use crate::{Error, Result};

pub use slice::slice_2d;

/// Tolerance for float membership when no exact rational form is at hand.
pub const FLOAT_TOL: f64 = 1e-9;

/// Largest message set whose corners are enumerated over all orders.
pub const MAX_CORNER_MESSAGES: usize = 8;

/// Message `W_ji` from source `i` to destination `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Message {
    pub dest: usize,
    pub source: usize,
}

impl Message {
    pub fn new(dest: usize, source: usize) -> Self {
        Message { dest, source }
    }
}

impl std::fmt::Display for Message {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d({},{})", self.dest, self.source)
    }
}

/// Set of messages, kept sorted by `(dest, source)`; that order fixes the coordinates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MessageSet(Vec<Message>);

impl MessageSet {
    pub fn new(messages: impl IntoIterator<Item = Message>) -> Self {
        let set: BTreeSet<Message> = messages.into_iter().collect();
        MessageSet(set.into_iter().collect())
    }

    /// `W_11, ..., W_kk`.
    pub fn diagonal(k: usize) -> Self {
        MessageSet::new((1..=k).map(|i| Message::new(i, i)))
    }

    pub fn messages(&self) -> &[Message] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, m: &Message) -> Option<usize> {
        self.0.binary_search(m).ok()
    }

    fn validate(&self, topology: &Topology) -> Result<()> {
        let k_src = topology.layer_sizes()[0];
        let k_dst = *topology.layer_sizes().last().unwrap();
        for m in &self.0 {
            if m.dest == 0 || m.dest > k_dst || m.source == 0 || m.source > k_src {
                return Err(Error::config(
                    "messages",
                    format!("{m} needs destination in 1..={k_dst} and source in 1..={k_src}"),
                ));
            }
        }
        Ok(())
    }
}

/// `coeffs . d <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl Inequality {
    fn indicator(dim: usize, members: impl IntoIterator<Item = usize>, rhs: i64) -> Self {
        let mut coeffs = vec![0; dim];
        for i in members {
            coeffs[i] = 1;
        }
        Inequality { coeffs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Single-antenna nodes, one message per pair.
    Basic,
    /// Multi-antenna nodes and an arbitrary message set.
    General(MessageSet),
}

/// `{d >= 0 : coeffs . d <= rhs for every inequality}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofPolytope {
    pub labels: Vec<String>,
    pub inequalities: Vec<Inequality>,
    pub family: Family,
}

impl DofPolytope {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got })
        }
    }

    /// Membership with every constraint relaxed by `tol`.
    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(point.len())?;
        if point.iter().any(|&x| x.is_nan() || x < -tol) {
            return Ok(false);
        }
        Ok(self.inequalities.iter().all(|q| {
            let lhs: f64 = q.coeffs.iter().zip(point).map(|(&a, &x)| a as f64 * x).sum();
            lhs <= q.rhs as f64 + tol
        }))
    }

    /// Exact membership of a rational point.
    pub fn contains_exact(&self, point: &[Ratio<i64>]) -> Result<bool> {
        self.check_dim(point.len())?;
        let zero = Ratio::from_integer(0);
        if point.iter().any(|x| *x < zero) {
            return Ok(false);
        }
        Ok(self.inequalities.iter().all(|q| {
            let lhs = q.coeffs.iter().zip(point).fold(zero, |acc, (&a, x)| acc + x * a);
            lhs <= Ratio::from_integer(q.rhs)
        }))
    }

    /// Exact membership of an integer point.
    pub fn contains_int(&self, point: &[i64]) -> Result<bool> {
        let r: Vec<Ratio<i64>> = point.iter().map(|&x| Ratio::from_integer(x)).collect();
        self.contains_exact(&r)
    }
}

/// Region of the single-antenna network: `d_i <= 1` and `sum d_i <= min_m K_m`.
pub fn region_basic(topology: &Topology) -> Result<DofPolytope> {
    if topology.has_multi_antenna() {
        return Err(Error::WrongVariant("multi-antenna nodes need region_general".into()));
    }
    let k = topology.pairs().ok_or_else(|| {
        Error::config("layers", "source and destination layers must have the same size")
    })?;
    let mut inequalities: Vec<Inequality> = (0..k).map(|i| Inequality::indicator(k, [i], 1)).collect();
    inequalities.push(Inequality::indicator(k, 0..k, topology.min_layer() as i64));
    Ok(DofPolytope {
        labels: (1..=k).map(|i| format!("d{i}")).collect(),
        inequalities,
        family: Family::Basic,
    })
}

fn layer_capacity(topology: &Topology) -> i64 {
    (0..topology.layer_sizes().len()).map(|m| topology.layer_antennas(m) as i64).min().unwrap()
}

/// Region of the multi-antenna network for the messages `msgs`: per-destination
/// antenna caps, per-source antenna caps and the smallest layer antenna total.
pub fn region_general(topology: &Topology, msgs: &MessageSet) -> Result<DofPolytope> {
    msgs.validate(topology)?;
    let dim = msgs.len();
    let last = topology.layer_sizes().len() - 1;
    let dests: BTreeSet<usize> = msgs.messages().iter().map(|m| m.dest).collect();
    let sources: BTreeSet<usize> = msgs.messages().iter().map(|m| m.source).collect();
    let mut inequalities = Vec::new();
    for &j in &dests {
        let members = (0..dim).filter(|&n| msgs.0[n].dest == j);
        inequalities.push(Inequality::indicator(dim, members, topology.antennas(last, j - 1) as i64));
    }
    for &i in &sources {
        let members = (0..dim).filter(|&n| msgs.0[n].source == i);
        inequalities.push(Inequality::indicator(dim, members, topology.antennas(0, i - 1) as i64));
    }
    inequalities.push(Inequality::indicator(dim, 0..dim, layer_capacity(topology)));
    Ok(DofPolytope {
        labels: msgs.messages().iter().map(Message::to_string).collect(),
        inequalities,
        family: Family::General(msgs.clone()),
    })
}

/// Processes `order` front to back, giving each message the largest integer value
/// that keeps every constraint satisfied. Output follows the coordinates of `msgs`.
pub fn greedy_allocate(topology: &Topology, msgs: &MessageSet, order: &[Message]) -> Result<Vec<i64>> {
    msgs.validate(topology)?;
    let mut sorted = order.to_vec();
    sorted.sort();
    if sorted != msgs.0 {
        return Err(Error::Precondition("order must be a permutation of the message set".into()));
    }
    let last = topology.layer_sizes().len() - 1;
    let mut dest_left: Vec<i64> =
        (0..topology.layer_sizes()[last]).map(|j| topology.antennas(last, j) as i64).collect();
    let mut source_left: Vec<i64> = (0..topology.layer_sizes()[0]).map(|i| topology.antennas(0, i) as i64).collect();
    let mut total_left = layer_capacity(topology);
    let mut out = vec![0; msgs.len()];
    for m in order {
        let d = dest_left[m.dest - 1].min(source_left[m.source - 1]).min(total_left);
        dest_left[m.dest - 1] -= d;
        source_left[m.source - 1] -= d;
        total_left -= d;
        out[msgs.position(m).unwrap()] = d;
    }
    Ok(out)
}

fn permutations(items: &[Message]) -> Vec<Vec<Message>> {
    // Heap's algorithm
    let mut a = items.to_vec();
    let n = a.len();
    let mut out = vec![a.clone()];
    let mut c = vec![0; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Integral corner points.
///
/// Single-antenna family: every 0/1 vector with `min(min_m K_m, K)` ones. General
/// family: the distinct greedy allocations over all message orders, for at most
/// [`MAX_CORNER_MESSAGES`] messages.
pub fn corner_points(poly: &DofPolytope, topology: &Topology) -> Result<Vec<Vec<i64>>> {
    match &poly.family {
        Family::Basic => {
            let k = poly.dim();
            let ones = topology.min_layer().min(k);
            let mut out = Vec::new();
            for mask in 0u64..1 << k {
                if mask.count_ones() as usize == ones {
                    out.push((0..k).map(|i| ((mask >> i) & 1) as i64).collect());
                }
            }
            out.sort_by(|a: &Vec<i64>, b| b.cmp(a));
            Ok(out)
        }
        Family::General(msgs) => {
            if msgs.len() > MAX_CORNER_MESSAGES {
                return Err(Error::Precondition(format!(
                    "corner enumeration is limited to {MAX_CORNER_MESSAGES} messages, got {}",
                    msgs.len()
                )));
            }
            let mut corners = BTreeSet::new();
            for order in permutations(msgs.messages()) {
                corners.insert(greedy_allocate(topology, msgs, &order)?);
            }
            Ok(corners.into_iter().rev().collect())
        }
    }
}

/// One physical antenna: 1-based node and antenna indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AntennaRef {
    pub node: usize,
    pub antenna: u32,
}

/// Antennas that act as one virtual pair family for a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualPair {
    pub message: Message,
    /// Antenna indices at source `message.source`.
    pub source_antennas: Vec<u32>,
    /// Antenna indices at destination `message.dest`, matched one to one with the source ones.
    pub dest_antennas: Vec<u32>,
}

/// Antenna certificate for an integral allocation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirtualPairing {
    pub pairs: Vec<VirtualPair>,
    /// Selected antennas of relay layers `2 ..= M`, in layer order.
    pub relays: Vec<Vec<AntennaRef>>,
}

impl VirtualPairing {
    /// Checks that no antenna is used twice, that source and destination counts match,
    /// and that each relay layer selects exactly the total allocation.
    pub fn verify(&self, topology: &Topology) -> Result<()> {
        let fail = |what: String| Err(Error::Precondition(format!("invalid virtual pairing: {what}")));
        let last = topology.layer_sizes().len() - 1;
        let mut used_src = BTreeSet::new();
        let mut used_dst = BTreeSet::new();
        let mut total = 0;
        for p in &self.pairs {
            if p.source_antennas.len() != p.dest_antennas.len() {
                return fail(format!("{} has unequal antenna counts", p.message));
            }
            total += p.source_antennas.len();
            for &a in &p.source_antennas {
                if a == 0 || a > topology.antennas(0, p.message.source - 1) || !used_src.insert((p.message.source, a)) {
                    return fail(format!("source antenna {a} of node {}", p.message.source));
                }
            }
            for &a in &p.dest_antennas {
                if a == 0 || a > topology.antennas(last, p.message.dest - 1) || !used_dst.insert((p.message.dest, a)) {
                    return fail(format!("destination antenna {a} of node {}", p.message.dest));
                }
            }
        }
        if self.relays.len() + 2 != topology.layer_sizes().len() {
            return fail("wrong number of relay layers".into());
        }
        for (n, layer) in self.relays.iter().enumerate() {
            let set: BTreeSet<&AntennaRef> = layer.iter().collect();
            if set.len() != layer.len() || layer.len() != total {
                return fail(format!("relay layer {}", n + 2));
            }
            for a in layer {
                if a.node == 0 || a.node > topology.layer_sizes()[n + 1] || a.antenna == 0 || a.antenna > topology.antennas(n + 1, a.node - 1) {
                    return fail(format!("relay antenna {a:?} in layer {}", n + 2));
                }
            }
        }
        Ok(())
    }
}

/// First-fit antenna assignment for an integral allocation inside the general region.
pub fn build_virtual_pairs(topology: &Topology, msgs: &MessageSet, allocation: &[f64]) -> Result<VirtualPairing> {
    let poly = region_general(topology, msgs)?;
    poly.check_dim(allocation.len())?;
    let ints: Vec<i64> = allocation
        .iter()
        .map(|&x| {
            if x.is_finite() && x.fract() == 0.0 && x >= 0.0 {
                Ok(x as i64)
            } else {
                Err(Error::Precondition(format!("allocation must be non-negative integers, got {x}")))
            }
        })
        .collect::<Result<_>>()?;
    if !poly.contains_int(&ints)? {
        return Err(Error::Precondition("allocation lies outside the DoF region".into()));
    }
    let layers = topology.layer_sizes().len();
    let mut next_src = vec![0u32; topology.layer_sizes()[0]];
    let mut next_dst = vec![0u32; topology.layer_sizes()[layers - 1]];
    let mut pairs = Vec::new();
    for (m, &d) in msgs.messages().iter().zip(&ints) {
        if d == 0 {
            continue;
        }
        let d = d as u32;
        let s = &mut next_src[m.source - 1];
        let t = &mut next_dst[m.dest - 1];
        pairs.push(VirtualPair {
            message: *m,
            source_antennas: (*s + 1..=*s + d).collect(),
            dest_antennas: (*t + 1..=*t + d).collect(),
        });
        *s += d;
        *t += d;
    }
    let total: i64 = ints.iter().sum();
    let relays = (1..layers - 1)
        .map(|layer| {
            (0..topology.layer_sizes()[layer])
                .flat_map(|node| (1..=topology.antennas(layer, node)).map(move |a| AntennaRef { node: node + 1, antenna: a }))
                .take(total as usize)
                .collect()
        })
        .collect();
    let pairing = VirtualPairing { pairs, relays };
    pairing.verify(topology)?;
    Ok(pairing)
}

#[cfg(test)]
mod tests;
