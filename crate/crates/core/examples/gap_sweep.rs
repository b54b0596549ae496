// Achievable sum rate against the cut-set bound on common draws. The gap levels
// off at high SNR.

use afrelay::channel::ChannelDistribution;
use afrelay::rates::{gap_table, SweepRow};

pub fn run_example() -> Vec<SweepRow> {
    let snr_db = [0.0, 10.0, 20.0, 30.0, 40.0];
    let mut rows = gap_table(ChannelDistribution::Gaussian, 2, 2, &snr_db, 5000, 7).unwrap();
    rows.extend(gap_table(ChannelDistribution::Gaussian, 2, 3, &snr_db, 5000, 7).unwrap());
    rows
}

#[allow(dead_code)]
fn main() {
    println!("{:>4} {:>10} {:>10} {:>10} {:>8}", "dB", "achieved", "cut-set", "gap", "stderr");
    for r in run_example() {
        println!(
            "{:>4} {:>10.3} {:>10.3} {:>10.3} {:>8.3}  {}",
            r.snr_db,
            r.achievable_sum,
            r.cutset_sum,
            r.gap,
            r.stderr,
            r.scheme.label()
        );
    }
}
