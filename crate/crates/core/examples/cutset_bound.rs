// Water-filling over the singular values of a hop matrix and the resulting cut-set
// bound, first on the identity channel and then averaged over fading.

use afrelay::channel::ChannelDistribution;
use afrelay::linalg::{real_matrix, singular_values};
use afrelay::rates::{cutset_sample, cutset_sum_upper, waterfill, waterfill_objective};

#[derive(Debug)]
pub struct CutsetSummary {
    pub identity_bits: f64,
    pub allocation: Vec<f64>,
    pub allocation_bits: f64,
    pub ergodic_bits: f64,
}

pub fn run_example() -> CutsetSummary {
    let identity_bits = cutset_sample(&real_matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]), 3.0).unwrap();

    let h = real_matrix(2, 2, &[2.0, 0.5, 0.0, 0.3]);
    let gains: Vec<f64> = singular_values(&h).iter().map(|s| s * s).collect();
    let allocation = waterfill(&gains, 2.0).unwrap();
    let allocation_bits = waterfill_objective(&gains, &allocation);

    let ergodic = cutset_sum_upper(ChannelDistribution::Gaussian, 2, 2, 100.0, 5000, 0).unwrap();
    CutsetSummary { identity_bits, allocation, allocation_bits, ergodic_bits: ergodic.sum.mean }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("H = I, P = 3: {} bits", s.identity_bits);
    println!("allocation {:?} -> {:.4} bits", s.allocation, s.allocation_bits);
    println!("ergodic cut-set bound at 20 dB: {:.3} bits", s.ergodic_bits);
}
