//! Block Markov amplify-and-forward relaying for layered multi-source Gaussian
//! relay networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`]: scalar fading laws, hop-matrix sampling and the regularity
//!   predicates (full rank, separated eigenvalues) the pairing maps need.
//! * [`pairing`]: the density-matching scale solver, the two-hop map
//!   `F(H) = c(H) H^-1`, the three-hop eigen-based maps and the matrix quantizer.
//! * [`afsim`]: a discrete-time simulator of the sub-block relaying scheme.
//! * [`rates`]: Monte Carlo ergodic rates, cut-set bounds, SNR sweeps and DoF slopes.
//! * [`dofregion`]: DoF polytopes, greedy corner allocation and virtual pairings.
//! * [`cli`]: configuration parsing and subcommand dispatch for the `afrelay` binary.

pub mod afsim;
pub mod channel;
pub mod cli;
pub mod dofregion;
mod error;
pub mod linalg;
pub mod mc;
pub mod pairing;
pub mod rates;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Dense complex matrix used for every channel and pairing quantity.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;

pub use num_complex::Complex64;

/// Relaying scheme, identified by the number of hops it spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    TwoHop,
    ThreeHop,
}

impl Scheme {
    pub fn hops(self) -> usize {
        match self {
            Scheme::TwoHop => 2,
            Scheme::ThreeHop => 3,
        }
    }

    pub fn from_hops(hops: usize) -> Option<Self> {
        match hops {
            2 => Some(Scheme::TwoHop),
            3 => Some(Scheme::ThreeHop),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scheme::TwoHop => "two-hop",
            Scheme::ThreeHop => "three-hop",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
