// High-SNR slope of the per-pair rates: each pair gets one degree of freedom.

use afrelay::channel::ChannelDistribution;
use afrelay::mc::Estimate;
use afrelay::rates::{db_to_linear, dof_slope_mc};
use afrelay::Scheme;

pub fn run_example() -> Vec<(Scheme, Vec<Estimate>)> {
    let (lo, hi) = (db_to_linear(30.0), db_to_linear(50.0));
    [Scheme::TwoHop, Scheme::ThreeHop]
        .into_iter()
        .map(|s| (s, dof_slope_mc(s, ChannelDistribution::Gaussian, 2, lo, hi, 4000, 2).unwrap()))
        .collect()
}

#[allow(dead_code)]
fn main() {
    for (scheme, slopes) in run_example() {
        let text: Vec<String> = slopes.iter().map(|e| format!("{:.3} +- {:.3}", e.mean, e.stderr)).collect();
        println!("{:>9}: {}", scheme.label(), text.join(", "));
    }
}
