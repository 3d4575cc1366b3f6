mod common;

use common::*;
use graphreg::edits::EditSet;
use graphreg::io;
use graphreg::lower_bounds::half_graph;
use graphreg::partition::{
    common_refinement, equitable_rebalance, mean_square_density, partition_closeness, refinement_distance,
    VertexPartition,
};
use graphreg::{DenseGraph, Error};

fn vp(n: usize, blocks: &[&[usize]]) -> VertexPartition {
    VertexPartition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
}

#[test]
fn density_examples() {
    let g = half_graph(4).unwrap();
    let a: Vec<usize> = (0..4).collect();
    let b: Vec<usize> = (4..8).collect();
    assert_eq!(g.density(&a, &b).unwrap(), 0.625);
    assert_eq!(g.edge_count(), 10);

    let kb = DenseGraph::from_fn(6, |u, v| u < 3 && v >= 3).unwrap();
    assert_eq!(kb.density(&[0, 1, 2], &[3, 4, 5]).unwrap(), 1.0);
    let empty = DenseGraph::empty(6).unwrap();
    assert_eq!(empty.density(&[0, 1], &[2, 3, 4]).unwrap(), 0.0);
    assert!(matches!(g.density(&[], &b), Err(Error::Domain(_))));
    assert!(matches!(g.density(&[9], &b), Err(Error::Domain(_))));
}

#[test]
fn density_matches_naive_count() {
    for seed in 0..20 {
        let g = random_graph(20, 0.4, seed);
        let mut r = rng(seed);
        let blocks = random_blocks(20, 3, &mut r);
        for x in &blocks {
            for y in &blocks {
                assert_eq!(g.e(x, y), naive_e(&g, x, y));
            }
        }
        let all: Vec<usize> = (0..20).collect();
        assert_eq!(g.e(&all, &all), 2 * g.edge_count());
    }
}

#[test]
fn empty_graph_is_rejected() {
    assert!(matches!(DenseGraph::empty(0), Err(Error::Domain(_))));
    assert!(DenseGraph::from_edges(3, &[(0, 3)]).is_err());
    assert!(DenseGraph::from_edges(3, &[(1, 1)]).is_err());
}

#[test]
fn mean_square_density_examples() {
    let k4 = DenseGraph::complete(4).unwrap();
    assert!((mean_square_density(&k4, &VertexPartition::trivial(4)) - 0.5625).abs() < TOL);
    let p3 = path3();
    assert!((mean_square_density(&p3, &VertexPartition::singletons(3)) - 4.0 / 9.0).abs() < TOL);
    let e = DenseGraph::empty(7).unwrap();
    assert_eq!(mean_square_density(&e, &VertexPartition::equitable(7, 3).unwrap()), 0.0);
}

#[test]
fn mean_square_density_matches_oracle() {
    for seed in 0..30 {
        let n = 8 + seed as usize % 17;
        let g = random_graph(n, 0.5, seed);
        let mut r = rng(seed + 100);
        let blocks = random_blocks(n, 1 + seed as usize % 5, &mut r);
        let p = VertexPartition::new(n, blocks.clone()).unwrap();
        assert!((mean_square_density(&g, &p) - naive_q(&g, &blocks)).abs() < 1e-12);
    }
}

#[test]
fn common_refinement_examples() {
    let p = vp(4, &[&[0, 1], &[2, 3]]);
    let q = vp(4, &[&[0, 2], &[1, 3]]);
    let r = common_refinement(&p, &q).unwrap();
    assert_eq!(r.k(), 4);
    assert!(r.sizes().iter().all(|&s| s == 1));
    assert_eq!(common_refinement(&p, &p).unwrap(), p);
    assert_eq!(common_refinement(&VertexPartition::trivial(4), &q).unwrap().canonical(), q.canonical());
    assert!(common_refinement(&p, &VertexPartition::trivial(5)).is_err());
}

#[test]
fn rebalance_examples() {
    let p = VertexPartition::equitable(12, 4).unwrap();
    let r = equitable_rebalance(&p, 4).unwrap();
    assert_eq!(r.canonical(), p.canonical());

    let g = random_graph(16, 0.5, 7);
    let p = VertexPartition::equitable(16, 2).unwrap();
    let r = equitable_rebalance(&p, 8).unwrap();
    assert_eq!(r.k(), 8);
    assert!(r.is_equitable());
    assert!(mean_square_density(&g, &r) >= mean_square_density(&g, &p) - 0.5);
    assert!(equitable_rebalance(&p, 17).is_err());
    assert!(equitable_rebalance(&VertexPartition::singletons(5), 3).is_err());
}

#[test]
fn refinement_distance_examples() {
    let halves = VertexPartition::equitable(20, 2).unwrap();
    let z = VertexPartition::equitable(20, 4).unwrap();
    assert_eq!(refinement_distance(&z, &halves, 0.3).unwrap().upsilon, 0.0);

    let r = refinement_distance(&VertexPartition::trivial(20), &halves, 0.1).unwrap();
    assert_eq!(r.upsilon, 1.0);

    let mut a: Vec<usize> = (0..10).collect();
    let mut b: Vec<usize> = (10..20).collect();
    a[0] = 10;
    b[0] = 0;
    let swapped = VertexPartition::new(20, vec![a, b]).unwrap();
    let r = refinement_distance(&swapped, &halves, 0.2).unwrap();
    assert_eq!(r.upsilon, 0.0);
    assert!(r.is_refinement(0.0));
    assert!(refinement_distance(&swapped, &halves, 1.0).is_err());
    assert!(refinement_distance(&swapped, &halves, 0.0).is_err());
}

#[test]
fn closeness_examples() {
    let g = DenseGraph::from_fn(16, |u, v| u < 8 && v >= 8).unwrap();
    let a = VertexPartition::equitable(16, 2).unwrap();
    let b = VertexPartition::equitable(16, 4).unwrap();
    let c = partition_closeness(&g, &a, &b, 0.1).unwrap();
    assert!(c.close);
    assert_eq!(c.max_deviation, 0.0);
    assert!(partition_closeness(&g, &a, &a, 1e-6).unwrap().close);
    let e = DenseGraph::empty(16).unwrap();
    assert!(partition_closeness(&e, &a, &b, 0.01).unwrap().close);
    assert!(partition_closeness(&g, &b, &a, 0.1).is_err());
}

#[test]
fn closeness_detects_planted_deviation() {
    // Inside the coarse pair (V_0, V_1) only the first quarters are joined.
    let g = DenseGraph::from_fn(16, |u, v| u < 4 && (8..12).contains(&v)).unwrap();
    let a = VertexPartition::equitable(16, 2).unwrap();
    let b = VertexPartition::equitable(16, 4).unwrap();
    let c = partition_closeness(&g, &a, &b, 0.1).unwrap();
    assert!(!c.close);
    assert!((c.max_deviation - 0.75).abs() < TOL);
}

#[test]
fn partition_validation() {
    assert!(VertexPartition::new(3, vec![vec![0, 1]]).is_err());
    assert!(VertexPartition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
    assert!(VertexPartition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
    assert!(VertexPartition::equitable(3, 4).is_err());
    let p = VertexPartition::equitable(10, 3).unwrap();
    assert_eq!(p.sizes(), vec![4, 3, 3]);
    assert!(p.is_equitable());
    assert!(VertexPartition::singletons(10).refines(&p));
    assert!(!p.refines(&VertexPartition::singletons(10)));
}

#[test]
fn text_formats_round_trip() {
    let g = random_graph(30, 0.3, 4);
    let text = io::write_graph(&g);
    assert_eq!(io::read_graph(&text).unwrap(), g);
    let h = half_graph(4).unwrap();
    assert!(io::write_graph(&h).starts_with("8 10\n"));

    let p = VertexPartition::equitable(30, 4).unwrap();
    assert_eq!(io::read_partition(&io::write_partition(&p), 30).unwrap(), p);

    let mut e = EditSet::new();
    e.record("x", &[(3, 1)], &[(0, 2)]);
    let e = e.finish().unwrap();
    let back = io::read_edits(&io::write_edits(&e)).unwrap();
    assert_eq!(back.additions, e.additions);
    assert_eq!(back.deletions, e.deletions);
}

#[test]
fn text_format_errors_carry_lines() {
    match io::read_graph("3 1\n0 5\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(io::read_graph("3 2\n0 1\n"), Err(Error::Parse { .. })));
    assert!(matches!(io::read_graph("3 2\n1 2\n0 1\n"), Err(Error::Parse { .. })));
    assert!(matches!(io::read_edits("* 0 1\n"), Err(Error::Parse { .. })));
    assert!(io::read_partition("0 1\n1 2\n", 3).is_err());
}

#[test]
fn edits_apply_and_diff() {
    let g = random_graph(12, 0.5, 2);
    let h = random_graph(12, 0.5, 3);
    let d = EditSet::diff(&g, &h).unwrap();
    assert_eq!(d.apply(&g).unwrap(), h);
    let mut bad = EditSet::new();
    bad.record("x", &[(0, 1)], &[(0, 1)]);
    assert!(bad.finish().is_err());
    let e = g.edges()[0];
    let mut again = EditSet::new();
    again.record("x", &[e], &[]);
    assert!(again.finish().unwrap().apply(&g).is_err());
}

#[test]
fn graph_basics() {
    let g = DenseGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
    assert_eq!(g.degree(1), 3);
    assert_eq!(g.codegree(1, 2), 1);
    assert_eq!(g.edges(), vec![(0, 1), (1, 2), (1, 3), (2, 3)]);
    assert_eq!(g.complement().edge_count(), 10 - 4);
    let s = g.induced(&[3, 1, 2]).unwrap();
    assert_eq!(s.edge_count(), 3);
    assert!(g.induced(&[1, 1]).is_err());
}
