// Two pairs over two alternating channel states. Pairing each state with the other
// makes the end-to-end channel the identity, so both pairs transmit every slot and
// see no interference.

use afrelay::afsim::{run_block_sim_with, PeriodicSource, SimConfig, SimReport};
use afrelay::channel::{ChannelDistribution, Topology};
use afrelay::pairing::QuantizerSpec;

pub fn run_example() -> SimReport {
    let config = SimConfig {
        topology: Topology::uniform(2, 2).unwrap(),
        dist: ChannelDistribution::Gaussian,
        power: 10.0,
        n_b: 16,
        sub_blocks: 4,
        quantizer: QuantizerSpec::new(0.5, 4, 2).unwrap(),
        epsilon: 0.0,
        seed: 3,
        calibration_samples: None,
        sample_noise: false,
    };
    run_block_sim_with(&config, &PeriodicSource::alternating_pair(), false).unwrap().report
}

#[allow(dead_code)]
fn main() {
    let r = run_example();
    println!("interference power per pair: {:?}", r.interference_power);
    println!("slot utilization: {}", r.slot_utilization);
    println!("rate per pair (bits): {:?}", r.rate_bits);
}
