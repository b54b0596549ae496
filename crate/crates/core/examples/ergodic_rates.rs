// Ergodic per-pair rates of the two-hop and three-hop schemes over SNR, plus a
// five-hop network relayed as a two-hop segment followed by a three-hop one.

use afrelay::channel::ChannelDistribution;
use afrelay::rates::{db_to_linear, rate_curve, rate_multi_hop_mc, RateResult};
use afrelay::Scheme;

pub struct RateTable {
    pub snr_db: Vec<f64>,
    pub two_hop: Vec<RateResult>,
    pub three_hop: Vec<RateResult>,
    pub five_hop: RateResult,
}

pub fn run_example() -> RateTable {
    let dist = ChannelDistribution::Gaussian;
    let snr_db = vec![0.0, 10.0, 20.0, 30.0];
    let ps: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    let two_hop = rate_curve(Scheme::TwoHop, dist, 2, &ps, 4000, 1).unwrap();
    let three_hop = rate_curve(Scheme::ThreeHop, dist, 2, &ps, 4000, 1).unwrap();
    let five_hop = rate_multi_hop_mc(dist, 2, 5, ps[2], 4000, 1).unwrap();
    RateTable { snr_db, two_hop, three_hop, five_hop }
}

#[allow(dead_code)]
fn main() {
    let t = run_example();
    println!("{:>6} {:>10} {:>10}", "dB", "two-hop", "three-hop");
    for ((db, a), b) in t.snr_db.iter().zip(&t.two_hop).zip(&t.three_hop) {
        println!("{db:>6} {:>10.3} {:>10.3}", a.sum.mean, b.sum.mean);
    }
    println!("five-hop sum rate at 20 dB: {:.3}", t.five_hop.sum.mean);
}
