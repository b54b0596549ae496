use rand::RngCore;

use crate::channel::{sample_hop_matrix, ChannelDistribution};
use crate::{CMatrix, Error, Result};

/// Supplies the hop matrices seen by the simulator.
///
/// `hop` and `t` are 1-based. The simulator queries times in increasing order and,
/// for each time, hops in increasing order; random sources draw from `rng` in that
/// order.
pub trait ChannelSource: Sync {
    fn matrix(&self, hop: usize, t: u64, rng: &mut dyn RngCore) -> CMatrix;
}

/// i.i.d. `k x k` matrices across hops and time.
#[derive(Debug, Clone, Copy)]
pub struct IidSource {
    pub dist: ChannelDistribution,
    pub k: usize,
}

impl ChannelSource for IidSource {
    fn matrix(&self, _hop: usize, _t: u64, rng: &mut dyn RngCore) -> CMatrix {
        sample_hop_matrix(self.dist, self.k, self.k, rng)
    }
}

/// Deterministic channel cycling through a fixed list of per-hop matrices.
///
/// Time `t` uses `phases[(t - 1) % phases.len()]`, whose entry `hop - 1` is the
/// matrix of that hop.
#[derive(Debug, Clone)]
pub struct PeriodicSource {
    phases: Vec<Vec<CMatrix>>,
}

impl PeriodicSource {
    pub fn new(phases: Vec<Vec<CMatrix>>) -> Result<Self> {
        let hops = phases.first().map_or(0, Vec::len);
        if hops == 0 || phases.iter().any(|p| p.len() != hops) {
            return Err(Error::Precondition("every phase needs the same non-zero number of hops".into()));
        }
        Ok(PeriodicSource { phases })
    }

    /// The alternating two-user channel in which `H_2[t+1] H_1[t] = I`:
    /// odd `t` has `H_1 = [[1, 1], [-1, 0]]`, `H_2 = diag(1, -1)`, even `t` has
    /// `H_1 = diag(1, -1)`, `H_2 = [[0, -1], [1, 1]]`.
    pub fn alternating_pair() -> Self {
        use crate::linalg::real_matrix;
        let a = real_matrix(2, 2, &[1.0, 1.0, -1.0, 0.0]);
        let b = real_matrix(2, 2, &[0.0, -1.0, 1.0, 1.0]);
        let d = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        PeriodicSource { phases: vec![vec![a, d.clone()], vec![d, b]] }
    }

    pub fn period(&self) -> usize {
        self.phases.len()
    }

    pub fn hops(&self) -> usize {
        self.phases[0].len()
    }
}

impl ChannelSource for PeriodicSource {
    fn matrix(&self, hop: usize, t: u64, _rng: &mut dyn RngCore) -> CMatrix {
        let phase = ((t - 1) % self.phases.len() as u64) as usize;
        self.phases[phase][hop - 1].clone()
    }
}
