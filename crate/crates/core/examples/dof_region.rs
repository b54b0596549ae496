// DoF regions: the single-antenna region, a multi-antenna region with a custom
// message set, its corner points, an antenna-level pairing for one corner and a
// two-dimensional cross-section.

use afrelay::channel::Topology;
use afrelay::dofregion::{
    build_virtual_pairs, corner_points, region_basic, region_general, slice_2d, DofPolytope, Message, MessageSet,
    VirtualPairing,
};

pub struct RegionSummary {
    pub basic: DofPolytope,
    pub basic_corners: Vec<Vec<i64>>,
    pub general: DofPolytope,
    pub general_corners: Vec<Vec<i64>>,
    pub pairing: VirtualPairing,
    pub section: Vec<(f64, f64)>,
}

pub fn run_example() -> RegionSummary {
    let single = Topology::new(vec![3, 2, 3]).unwrap();
    let basic = region_basic(&single).unwrap();
    let basic_corners = corner_points(&basic, &single).unwrap();

    let arrays = Topology::new(vec![2, 2, 2]).unwrap().with_antennas(vec![vec![2, 2], vec![1, 3], vec![2, 2]]).unwrap();
    let msgs = MessageSet::new([Message::new(1, 1), Message::new(2, 1), Message::new(2, 2)]);
    let general = region_general(&arrays, &msgs).unwrap();
    let general_corners = corner_points(&general, &arrays).unwrap();

    let corner: Vec<f64> = general_corners[0].iter().map(|&x| x as f64).collect();
    let pairing = build_virtual_pairs(&arrays, &msgs, &corner).unwrap();
    pairing.verify(&arrays).unwrap();

    let section = slice_2d(&general, 0, 2, &[0.0, 0.0, 0.0]).unwrap();
    RegionSummary { basic, basic_corners, general, general_corners, pairing, section }
}

fn show(p: &DofPolytope) {
    for q in &p.inequalities {
        let terms: Vec<String> =
            q.coeffs.iter().zip(&p.labels).filter(|(c, _)| **c != 0).map(|(_, l)| l.clone()).collect();
        println!("  {} <= {}", terms.join(" + "), q.rhs);
    }
}

#[allow(dead_code)]
fn main() {
    let s = run_example();
    println!("single-antenna region, layers 3,2,3:");
    show(&s.basic);
    println!("  corners: {:?}", s.basic_corners);
    println!("antenna arrays, messages {:?}:", s.general.labels);
    show(&s.general);
    println!("  corners: {:?}", s.general_corners);
    for vp in &s.pairing.pairs {
        println!("  {}: source antennas {:?} -> destination antennas {:?}", vp.message, vp.source_antennas, vp.dest_antennas);
    }
    println!("section in ({}, {}): {:?}", s.general.labels[0], s.general.labels[2], s.section);
}
