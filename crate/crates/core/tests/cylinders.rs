mod common;

use common::*;
use graphreg::certify::CheckMode;
use graphreg::cylinder::{
    cylinder_verdict, degraded_regularity, dlr_partition, induced_removal, induces, ramsey_uniform_cylinder,
    reduced_partition, regular_cylinder, sampling_tester, select_representatives, self_regular_partition,
    self_regular_subset, strong_cylinder_partition, CylinderPartition, DlrConfig, RamseyConfig, RemovalConfig,
    RemovalOutcome, StrongConfig,
};
use graphreg::partition::mean_square_density;
use graphreg::{DenseGraph, Error};

const AUTO: CheckMode = CheckMode::Auto { trials: 512, seed: 1 };

fn range(a: usize, b: usize) -> Vec<usize> {
    (a..b).collect()
}

#[test]
fn cylinder_partition_validation() {
    let ground = vec![range(0, 3), range(3, 5)];
    let k = CylinderPartition::whole(ground.clone()).unwrap();
    assert!(k.mass_is_one());
    assert_eq!(k.density(0), 1.0);
    let split = CylinderPartition::new(ground.clone(), vec![vec![vec![0], range(3, 5)], vec![vec![1, 2], range(3, 5)]])
        .unwrap();
    assert!((split.density(0) - 1.0 / 3.0).abs() < 1e-12);
    // Overlap and gaps are both rejected.
    assert!(CylinderPartition::new(
        ground.clone(),
        vec![vec![range(0, 2), range(3, 5)], vec![range(1, 3), range(3, 5)]]
    )
    .is_err());
    assert!(CylinderPartition::new(ground.clone(), vec![vec![range(0, 2), range(3, 5)]]).is_err());
    assert!(CylinderPartition::new(ground, vec![vec![vec![7], range(3, 5)]]).is_err());
}

#[test]
fn dlr_regular_ground_needs_no_split() {
    let g = DenseGraph::complete(24).unwrap();
    let r = dlr_partition(&g, vec![range(0, 12), range(12, 24)], &DlrConfig::new(0.4, CheckMode::Exact)).unwrap();
    assert!(r.certified);
    assert_eq!(r.partition.len(), 1);
    assert_eq!(r.rounds, 0);
}

#[test]
fn dlr_random_pair_is_certified() {
    let g = random_graph(24, 0.5, 3);
    let r = dlr_partition(&g, vec![range(0, 12), range(12, 24)], &DlrConfig::new(0.4, CheckMode::Exact)).unwrap();
    assert!(r.certified);
    assert!(r.partition.mass_is_one());
    assert!(r.irregular_mass() <= 0.4 + 1e-12);
    // Recheck every cylinder flagged regular with the brute-force oracle.
    for (c, parts) in r.partition.cylinders().iter().enumerate() {
        if r.verdict.flags[c] && parts[0].len() <= 12 && parts[1].len() <= 12 {
            assert!(naive_deviation_regular(&g, &parts[0], &parts[1], 0.4));
        }
    }
    let again = cylinder_verdict(&g, &r.partition, 0.4, false, CheckMode::Exact).unwrap();
    assert_eq!(again.flags, r.verdict.flags);
}

#[test]
fn dlr_planted_blocks_are_found() {
    // Complete bipartite between {0..6} and {12..18}, and {6..12} and {18..24}.
    let g = DenseGraph::from_fn(24, |u, v| u < 12 && v >= 12 && (u < 6) == (v < 18)).unwrap();
    let r = dlr_partition(&g, vec![range(0, 12), range(12, 24)], &DlrConfig::new(0.2, CheckMode::Exact)).unwrap();
    assert!(r.certified);
    // Almost all of the mass sits on cylinders inside a single planted block.
    let mut pure = 0.0;
    for (c, parts) in r.partition.cylinders().iter().enumerate() {
        let d = g.density(&parts[0], &parts[1]).unwrap();
        if d == 0.0 || d == 1.0 {
            pure += r.partition.density(c);
        }
    }
    assert!(pure >= 0.8, "{pure}");
    assert!(dlr_partition(&g, vec![range(0, 20), range(20, 24)], &DlrConfig::new(0.2, CheckMode::Exact)).is_err());
}

#[test]
fn regular_cylinder_examples() {
    let g = random_graph(48, 0.5, 5);
    let set = range(0, 48);
    let parts = regular_cylinder(&g, &set, 3, 0.35, AUTO).unwrap();
    assert_eq!(parts.len(), 3);
    let m = parts[0].len();
    assert!(parts.iter().all(|p| p.len() == m));
    for (i, p) in parts.iter().enumerate() {
        assert!(p.iter().all(|&v| v >= 16 * i && v < 16 * (i + 1)));
    }
    if m <= 12 {
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(naive_deviation_regular(&g, &parts[i], &parts[j], 0.35));
            }
        }
    }
    assert!(regular_cylinder(&g, &set, 0, 0.35, AUTO).is_err());
    assert_eq!(regular_cylinder(&g, &range(0, 3), 3, 0.35, AUTO).unwrap(), vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn ramsey_cylinder_densities_share_a_bucket() {
    let g = random_graph(81, 0.5, 6);
    let r = ramsey_uniform_cylinder(&g, &range(0, 81), 3, 3, 0.4, &RamseyConfig::new(AUTO)).unwrap();
    assert_eq!(r.parts.len(), 3);
    let mut ds = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let d = naive_e(&g, &r.parts[i], &r.parts[j]) as f64 / (r.parts[i].len() * r.parts[j].len()) as f64;
            ds.push(d);
            assert_eq!(((d * 3.0).floor() as usize).min(2), r.bucket);
        }
    }
    let spread = ds.iter().cloned().fold(f64::MIN, f64::max) - ds.iter().cloned().fold(f64::MAX, f64::min);
    assert!((spread - r.spread).abs() < 1e-12);
    assert!(r.spread <= 1.0 / 3.0);
}

#[test]
fn self_regular_subset_examples() {
    let cfg = RamseyConfig::new(AUTO);
    let k = DenseGraph::complete(30).unwrap();
    assert_eq!(self_regular_subset(&k, &range(0, 30), 0.3, &cfg).unwrap(), range(0, 30));
    assert_eq!(self_regular_subset(&k, &[7], 0.3, &cfg).unwrap(), vec![7]);
    assert!(self_regular_subset(&k, &range(0, 30), 0.6, &cfg).is_err());
    assert!(self_regular_subset(&k, &[], 0.3, &cfg).is_err());

    let g = random_graph(40, 0.5, 7);
    let u = self_regular_subset(&g, &range(0, 40), 0.45, &RamseyConfig::new(CheckMode::Exact)).unwrap();
    assert!(!u.is_empty() && u.iter().all(|&v| v < 40));
    if u.len() > 1 && u.len() <= 12 {
        assert!(naive_deviation_regular(&g, &u, &u, 0.45));
    }
}

#[test]
fn self_regular_partition_covers_the_set() {
    let g = random_graph(60, 0.5, 8);
    let set = range(0, 60);
    let r = self_regular_partition(&g, &set, 0.45, &RamseyConfig::new(AUTO)).unwrap();
    let mut all: Vec<usize> = r.blocks.concat();
    all.sort_unstable();
    assert_eq!(all, set);
    assert!((r.extracted_eps - 0.3375).abs() < 1e-12);
    let once = degraded_regularity(r.extracted_eps, r.beta).unwrap();
    assert!((r.claimed_eps - degraded_regularity(once.min(0.999), r.beta).unwrap()).abs() < 1e-9 || once >= 0.999);
    assert!(r.leftover as f64 <= 0.45 * 0.45 / 100.0 * 60.0);
}

#[test]
fn degraded_regularity_examples() {
    assert!((degraded_regularity(0.1, 0.04).unwrap() - 0.34).abs() < 1e-12);
    assert!((degraded_regularity(0.2, 0.25).unwrap() - 0.95).abs() < 1e-12);
    assert_eq!(degraded_regularity(0.3, 0.0).unwrap(), 0.3);
    assert!(degraded_regularity(0.0, 0.1).is_err());
    assert!(degraded_regularity(0.3, 1.0).is_err());
}

#[test]
fn reduced_partition_examples() {
    let ground = vec![range(0, 4), range(4, 8)];
    let k = CylinderPartition::whole(ground.clone()).unwrap();
    assert_eq!(reduced_partition(&k).unwrap().blocks(), &[range(0, 4), range(4, 8)]);
    let k = CylinderPartition::new(
        ground,
        vec![vec![range(0, 2), range(4, 8)], vec![range(2, 4), range(4, 6)], vec![range(2, 4), range(6, 8)]],
    )
    .unwrap();
    let q = reduced_partition(&k).unwrap();
    assert_eq!(q.blocks(), &[range(0, 2), range(2, 4), range(4, 6), range(6, 8)]);
}

#[test]
fn strong_cylinder_invariants() {
    let g = random_graph(64, 0.5, 11);
    let cfg = StrongConfig::new(0.3, 2, AUTO);
    let f = |k: usize| (1.0 / k as f64).min(0.3);
    let r = strong_cylinder_partition(&g, &cfg, &f).unwrap();
    assert!(!r.escaped);
    assert!(r.p.is_equitable());
    assert!(r.k.mass_is_one());
    assert_eq!(r.k.ground(), r.p.blocks());
    assert!(r.q.refines(&r.p));
    assert_eq!(r.q, reduced_partition(&r.k).unwrap());
    let (qp, qq) = (mean_square_density(&g, &r.p), mean_square_density(&g, &r.q));
    assert!((qp - naive_q(&g, r.p.blocks())).abs() < 1e-12);
    assert!(qq <= qp + 0.3 + 1e-12);
    assert!(qq >= qp - 1e-12);
    assert_eq!(r.f_k, f(r.p.k()));
    let last = r.history.last().unwrap();
    assert_eq!(last.cylinders, r.k.len());

    let rep = select_representatives(&g, &r.k, 0.3, r.f_k, CheckMode::Auto { trials: 512, seed: 2 }).unwrap();
    assert_eq!(rep.parts.len(), r.p.k());
    let s = r.q.k() as f64;
    for (w, v) in rep.parts.iter().zip(r.p.blocks()) {
        assert!(w.len() as f64 >= v.len() as f64 / (4.0 * s) - 1e-9);
        assert!(w.iter().all(|x| v.contains(x)));
    }
    assert!(rep.far_pairs as f64 <= 0.3 * (r.p.k() * r.p.k()) as f64);

    assert!(strong_cylinder_partition(&g, &StrongConfig::new(0.4, 2, AUTO), &f).is_err());
    assert!(strong_cylinder_partition(&g, &cfg, &|_| 0.5).is_err());
}

#[test]
fn removal_on_free_graphs() {
    let cfg = RemovalConfig::desk(0.3, AUTO);
    let e = DenseGraph::empty(20).unwrap();
    assert_eq!(induced_removal(&e, &path3(), 0.3, &cfg).unwrap(), RemovalOutcome::Free);
    let k = DenseGraph::complete(20).unwrap();
    let indep = DenseGraph::empty(3).unwrap();
    assert_eq!(induced_removal(&k, &indep, 0.3, &cfg).unwrap(), RemovalOutcome::Free);
    assert!(matches!(induced_removal(&k, &DenseGraph::empty(7).unwrap(), 0.3, &cfg), Err(Error::Refused(_))));
}

#[test]
fn removal_repairs_two_cliques() {
    let g = two_cliques(24, &[(0, 30), (5, 40), (17, 24)]);
    let h = path3();
    assert!(naive_induced_all(&g, &h) > 0);
    let r = induced_removal(&g, &h, 0.3, &RemovalConfig::desk(0.3, AUTO)).unwrap();
    match &r {
        RemovalOutcome::Edited { edits, bound, copies_before, .. } => {
            let edited = edits.apply(&g).unwrap();
            assert_eq!(naive_induced_all(&edited, &h), 0);
            assert!(edits.count() as f64 <= *bound);
            assert!((edits.count() as f64) <= 0.3 * 48.0 * 48.0);
            assert!(*copies_before > 0);
        }
        RemovalOutcome::Certificate { count, threshold, .. } => assert!(*count as f64 >= *threshold),
        RemovalOutcome::Free => panic!("graph has copies"),
    }
}

#[test]
fn induces_checks_isomorphism() {
    let g = DenseGraph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
    assert!(induces(&g, &path3(), &[0, 1, 2]));
    assert!(induces(&g, &path3(), &[2, 0, 1]));
    assert!(!induces(&g, &path3(), &[0, 1, 3]));
    assert!(!induces(&g, &triangle(), &[0, 1, 2]));
    assert!(!induces(&g, &path3(), &[0, 1]));
}

#[test]
fn tester_examples() {
    let k = DenseGraph::complete(30).unwrap();
    let t = sampling_tester(&k, &DenseGraph::empty(3).unwrap(), 0.1, 1).unwrap();
    assert!(t.accept);
    assert_eq!(t.samples, 20);
    let t = sampling_tester(&k, &triangle(), 0.1, 1).unwrap();
    assert!(!t.accept);
    let w = t.witness.unwrap();
    assert!(induces(&k, &triangle(), &w));
    assert!(sampling_tester(&k, &triangle(), 0.0, 1).is_err());
    assert!(sampling_tester(&DenseGraph::complete(2).unwrap(), &triangle(), 0.5, 1).unwrap().accept);
}

#[test]
fn tester_rejects_far_graphs_often() {
    // Two disjoint cliques plus a perfect matching between them: every
    // matched pair with a third vertex forms an induced path.
    let mut extra = Vec::new();
    for i in 0..20 {
        extra.push((i, 20 + i));
    }
    let g = two_cliques(20, &extra);
    let mut rejected = 0;
    for seed in 0..300 {
        rejected += usize::from(!sampling_tester(&g, &path3(), 0.05, seed).unwrap().accept);
    }
    assert!(rejected as f64 >= 2.0 / 3.0 * 300.0, "{rejected}/300");
}
