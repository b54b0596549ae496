// Quantizing channel matrices and checking which second-hop draws land in the
// cell paired with a first-hop cell.

use afrelay::channel::{sample_hop_matrix, ChannelDistribution};
use afrelay::mc::stream_rng;
use afrelay::pairing::{cell_center, cell_matches_second_hop, map_two_hop, quantize, QuantizerSpec};

#[derive(Debug)]
pub struct CellSummary {
    pub log10_cells: f64,
    pub center_error: f64,
    pub in_range: usize,
    pub matched: usize,
    pub draws: usize,
}

pub fn run_example() -> CellSummary {
    let dist = ChannelDistribution::Gaussian;
    let spec = QuantizerSpec::new(0.5, 6, 2).unwrap();
    let mut rng = stream_rng(5, 0);

    let h = sample_hop_matrix(dist, 2, 2, &mut rng);
    let cell = quantize(&h, &spec).expect("inside the range");
    // the centre is within half a step of h in every real coordinate
    let center_error = (cell_center(&cell, &spec) - &h).iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);

    // images of draws from the same cell always land in the paired cell
    let draws = 2000;
    let (mut in_range, mut matched) = (0, 0);
    for _ in 0..draws {
        let g = sample_hop_matrix(dist, 2, 2, &mut rng);
        if quantize(&g, &spec).is_none() {
            continue;
        }
        in_range += 1;
        let Ok(image) = map_two_hop(dist, &g) else { continue };
        let c = quantize(&g, &spec).unwrap();
        if cell_matches_second_hop(dist, image.target(), &c, &spec).unwrap() {
            matched += 1;
        }
    }
    CellSummary { log10_cells: spec.log10_cell_count(), center_error, in_range, matched, draws }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("cells: 10^{:.1}", s.log10_cells);
    println!("max coordinate error of the cell centre: {:.3}", s.center_error);
    println!("{} of {} draws in range, {} images matched back", s.in_range, s.draws, s.matched);
}
