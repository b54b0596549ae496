// Two-hop and three-hop pairing maps on one random draw.
//
// Prints the scale factors, how far the end-to-end product is from a scaled
// identity, and the log-density gap between `H` and its image.

use afrelay::channel::{log_pdf_matrix, sample_hop_matrix, ChannelDistribution};
use afrelay::mc::stream_rng;
use afrelay::pairing::{map_three_hop, map_two_hop, solve_c_bisection};

#[derive(Debug)]
pub struct PairingSummary {
    pub c: f64,
    pub c_bisection: f64,
    pub two_hop_residual: f64,
    pub three_hop_residual: f64,
    pub involution_error: f64,
    pub logpdf_gap: f64,
}

pub fn run_example() -> PairingSummary {
    let dist = ChannelDistribution::Gaussian;
    let h = sample_hop_matrix(dist, 3, 3, &mut stream_rng(11, 0));

    let two = map_two_hop(dist, &h).expect("draw is invertible");
    let c = two.scale_product();
    let inv = afrelay::linalg::inverse(&h).unwrap();
    let c_bisection = solve_c_bisection(dist, &h, &inv).unwrap();

    // F is an involution
    let back = map_two_hop(dist, two.target()).unwrap();
    let involution_error = (back.target() - &h).norm() / h.norm();

    let three = map_three_hop(dist, &h).expect("eigenvalues are distinct");
    let base = log_pdf_matrix(dist, &h).unwrap();
    let logpdf_gap = three
        .targets
        .iter()
        .chain(two.targets.iter())
        .map(|t| (log_pdf_matrix(dist, t).unwrap() - base).abs())
        .fold(0.0, f64::max);

    PairingSummary {
        c,
        c_bisection,
        two_hop_residual: two.identity_error() / c,
        three_hop_residual: three.identity_error() / three.scale_product(),
        involution_error,
        logpdf_gap,
    }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("c (closed form)   {:.12}", s.c);
    println!("c (bisection)     {:.12}", s.c_bisection);
    println!("|F(H)H - cI|/c    {:.3e}", s.two_hop_residual);
    println!("|F2F1H - cI|/c    {:.3e}", s.three_hop_residual);
    println!("|F(F(H)) - H|/|H| {:.3e}", s.involution_error);
    println!("max log-pdf gap   {:.3e}", s.logpdf_gap);
}
