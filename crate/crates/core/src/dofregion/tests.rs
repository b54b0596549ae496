use super::*;
use crate::mc::stream_rng;
use rand::Rng;

fn antennas(topology: Topology, a: Vec<Vec<u32>>) -> Topology {
    topology.with_antennas(a).unwrap()
}

fn two_by_two_by_two() -> Topology {
    // three S-D pairs with two antennas each, relay layers totalling 4 antennas
    antennas(
        Topology::new(vec![3, 2, 2, 3]).unwrap(),
        vec![vec![2, 2, 2], vec![2, 2], vec![1, 3], vec![2, 2, 2]],
    )
}

#[test]
fn basic_region_examples() {
    let t = Topology::uniform(3, 2).unwrap();
    let r = region_basic(&t).unwrap();
    assert_eq!(r.inequalities.len(), 4);
    assert_eq!(r.inequalities[3], Inequality { coeffs: vec![1, 1, 1], rhs: 3 });
    assert!(r.contains(&[1.0, 1.0, 1.0], 0.0).unwrap());
    assert!(r.contains_int(&[1, 1, 1]).unwrap());
    assert!(r.contains(&[0.0; 3], 0.0).unwrap());
    assert!(!r.contains(&[1.0 + 2.0 * FLOAT_TOL, 0.0, 0.0], FLOAT_TOL).unwrap());
    assert!(r.contains(&[1.0, 0.0], 0.0).is_err());

    let t = Topology::new(vec![3, 2, 3]).unwrap();
    let r = region_basic(&t).unwrap();
    assert_eq!(r.inequalities[3].rhs, 2);
    assert!(r.contains(&[1.0, 1.0, 0.0], 0.0).unwrap());
    assert!(!r.contains(&[1.0, 1.0, 0.5], 0.0).unwrap());

    let r = region_basic(&Topology::uniform(1, 3).unwrap()).unwrap();
    assert!(r.contains(&[1.0], 0.0).unwrap() && !r.contains(&[1.5], 0.0).unwrap());
    assert!(!r.contains(&[-0.1], 0.0).unwrap());
}

#[test]
fn basic_region_rejects_antenna_arrays() {
    let t = antennas(Topology::uniform(2, 2).unwrap(), vec![vec![2, 1], vec![1, 1], vec![1, 1]]);
    assert!(matches!(region_basic(&t), Err(Error::WrongVariant(_))));
    assert!(region_basic(&Topology::new(vec![2, 3, 3]).unwrap()).is_err());
}

#[test]
fn basic_corners() {
    let t = Topology::new(vec![3, 2, 3]).unwrap();
    let r = region_basic(&t).unwrap();
    assert_eq!(corner_points(&r, &t).unwrap(), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
    let t = Topology::uniform(2, 2).unwrap();
    assert_eq!(corner_points(&region_basic(&t).unwrap(), &t).unwrap(), vec![vec![1, 1]]);
    let t = Topology::uniform(3, 2).unwrap();
    assert_eq!(corner_points(&region_basic(&t).unwrap(), &t).unwrap(), vec![vec![1, 1, 1]]);
}

#[test]
fn general_region_examples() {
    let t = two_by_two_by_two();
    let msgs = MessageSet::diagonal(3);
    let r = region_general(&t, &msgs).unwrap();
    assert_eq!(r.inequalities.len(), 3 + 3 + 1);
    assert_eq!(r.inequalities.last().unwrap().rhs, 4);
    assert!(r.contains_int(&[2, 2, 0]).unwrap());
    assert!(!r.contains_int(&[2, 2, 1]).unwrap());
    assert!(!r.contains_int(&[3, 0, 0]).unwrap());

    // relays with plenty of antennas leave only the per-node caps
    let wide = antennas(Topology::new(vec![3, 3, 3]).unwrap(), vec![vec![2; 3], vec![3; 3], vec![2; 3]]);
    let r = region_general(&wide, &msgs).unwrap();
    assert_eq!(r.inequalities.last().unwrap().rhs, 6);
    assert!(r.contains_int(&[2, 2, 2]).unwrap());

    let single = Topology::uniform(2, 2).unwrap();
    let one = MessageSet::new([Message::new(1, 1)]);
    let r = region_general(&single, &one).unwrap();
    assert!(r.contains_int(&[1]).unwrap() && !r.contains_int(&[2]).unwrap());

    let r = region_general(&single, &MessageSet::default()).unwrap();
    assert_eq!(r.dim(), 0);
    assert!(r.contains(&[], 0.0).unwrap());

    let bad = MessageSet::new([Message::new(3, 1)]);
    assert!(matches!(region_general(&single, &bad), Err(Error::Config { .. })));
}

#[test]
fn greedy_examples() {
    let t = Topology::uniform(2, 2).unwrap();
    let msgs = MessageSet::new([Message::new(1, 1), Message::new(2, 1)]);
    let w11 = Message::new(1, 1);
    let w21 = Message::new(2, 1);
    assert_eq!(greedy_allocate(&t, &msgs, &[w11, w21]).unwrap(), vec![1, 0]);
    assert_eq!(greedy_allocate(&t, &msgs, &[w21, w11]).unwrap(), vec![0, 1]);
    assert!(greedy_allocate(&t, &msgs, &[w11]).is_err());

    let big = antennas(Topology::uniform(1, 2).unwrap(), vec![vec![3], vec![2], vec![4]]);
    let one = MessageSet::new([w11]);
    assert_eq!(greedy_allocate(&big, &one, &[w11]).unwrap(), vec![2]);
    assert_eq!(corner_points(&region_general(&big, &one).unwrap(), &big).unwrap(), vec![vec![2]]);
}

fn assert_vertex(poly: &DofPolytope, p: &[i64]) {
    let x: Vec<f64> = p.iter().map(|&v| v as f64).collect();
    assert!(poly.contains(&x, 0.0).unwrap());
    for i in 0..x.len() {
        let mut y = x.clone();
        y[i] += 1e-6;
        assert!(!poly.contains(&y, 0.0).unwrap(), "{p:?} can grow along {i}");
    }
}

#[test]
fn greedy_outputs_are_vertices() {
    let t = two_by_two_by_two();
    let msgs = MessageSet::new([
        Message::new(1, 1),
        Message::new(1, 2),
        Message::new(2, 2),
        Message::new(3, 1),
        Message::new(3, 3),
    ]);
    let r = region_general(&t, &msgs).unwrap();
    let corners = corner_points(&r, &t).unwrap();
    assert!(corners.len() > 1);
    for c in &corners {
        assert!(r.contains_int(c).unwrap());
        assert_vertex(&r, c);
    }
}

#[test]
fn time_sharing_closure() {
    let t = two_by_two_by_two();
    let msgs = MessageSet::new([Message::new(1, 1), Message::new(2, 2), Message::new(3, 3), Message::new(2, 1)]);
    let r = region_general(&t, &msgs).unwrap();
    let corners = corner_points(&r, &t).unwrap();
    let mut rng = stream_rng(10, 0);
    for _ in 0..1000 {
        let a = &corners[rng.random_range(0..corners.len())];
        let b = &corners[rng.random_range(0..corners.len())];
        let lam = Ratio::new(rng.random_range(0..=1000), 1000);
        let one = Ratio::from_integer(1);
        let mix: Vec<Ratio<i64>> =
            a.iter().zip(b).map(|(&x, &y)| lam * x + (one - lam) * y).collect();
        assert!(r.contains_exact(&mix).unwrap());
    }
}

#[test]
fn basic_region_is_general_region_with_single_antennas() {
    for sizes in [vec![3, 3, 3], vec![3, 2, 3], vec![4, 3, 2, 4], vec![2, 5, 2]] {
        let t = Topology::new(sizes).unwrap();
        let k = t.pairs().unwrap();
        let basic = region_basic(&t).unwrap();
        let general = region_general(&t, &MessageSet::diagonal(k)).unwrap();
        let cb = corner_points(&basic, &t).unwrap();
        let cg = corner_points(&general, &t).unwrap();
        for c in &cb {
            assert!(general.contains_int(c).unwrap());
        }
        for c in &cg {
            assert!(basic.contains_int(c).unwrap());
        }
        let sb: BTreeSet<_> = cb.into_iter().collect();
        let sg: BTreeSet<_> = cg.into_iter().collect();
        assert_eq!(sb, sg);
    }
}

#[test]
fn corner_enumeration_is_capped() {
    let t = Topology::uniform(9, 2).unwrap();
    let r = region_general(&t, &MessageSet::diagonal(9)).unwrap();
    assert!(corner_points(&r, &t).is_err());
}

#[test]
fn virtual_pairs_first_fit() {
    let t = antennas(Topology::uniform(1, 2).unwrap(), vec![vec![2], vec![3], vec![2]]);
    let msgs = MessageSet::new([Message::new(1, 1)]);
    let v = build_virtual_pairs(&t, &msgs, &[2.0]).unwrap();
    assert_eq!(v.pairs[0].source_antennas, vec![1, 2]);
    assert_eq!(v.pairs[0].dest_antennas, vec![1, 2]);
    assert_eq!(v.relays[0].len(), 2);
    assert!(build_virtual_pairs(&t, &msgs, &[1.5]).is_err());
    assert!(build_virtual_pairs(&t, &msgs, &[3.0]).is_err());
}

#[test]
fn virtual_pairs_fill_the_bottleneck_layer() {
    let t = two_by_two_by_two();
    let msgs = MessageSet::diagonal(3);
    let v = build_virtual_pairs(&t, &msgs, &[2.0, 2.0, 0.0]).unwrap();
    v.verify(&t).unwrap();
    for (n, layer) in v.relays.iter().enumerate() {
        assert_eq!(layer.len() as u32, t.layer_antennas(n + 1));
    }
    assert_eq!(v.pairs.len(), 2);
}

#[test]
fn greedy_results_certify() {
    let t = two_by_two_by_two();
    let msgs = MessageSet::new([Message::new(1, 1), Message::new(2, 1), Message::new(3, 2)]);
    let r = region_general(&t, &msgs).unwrap();
    for c in corner_points(&r, &t).unwrap() {
        let alloc: Vec<f64> = c.iter().map(|&x| x as f64).collect();
        let v = build_virtual_pairs(&t, &msgs, &alloc).unwrap();
        v.verify(&t).unwrap();
        let total: usize = v.pairs.iter().map(|p| p.source_antennas.len()).sum();
        assert_eq!(total as i64, c.iter().sum::<i64>());
    }
}

#[test]
fn slices_trace_the_section() {
    let t = Topology::uniform(3, 2).unwrap();
    let r = region_basic(&t).unwrap();
    let pts = slice_2d(&r, 0, 1, &[0.0, 0.0, 0.0]).unwrap();
    assert_eq!(pts.len(), 4);
    for corner in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
        assert!(pts.contains(&corner), "{pts:?}");
    }
    let t = Topology::new(vec![3, 1, 3]).unwrap();
    let r = region_basic(&t).unwrap();
    let pts = slice_2d(&r, 0, 2, &[0.0; 3]).unwrap();
    assert_eq!(pts.len(), 3);
    assert!(slice_2d(&r, 0, 0, &[0.0; 3]).is_err());
}
