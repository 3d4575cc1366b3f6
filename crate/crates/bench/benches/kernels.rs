use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use graphreg::certify::{check_pair, count_induced, cut_norm_exact, cut_norm_heuristic, defect_matrix, PairSpec};
use graphreg::concentration::gnp;
use graphreg::{fk_partition, CheckMode, CutMode, DenseGraph, VertexPartition};

fn cut_norm(c: &mut Criterion) {
    let g = gnp(20, 0.5, 1).unwrap();
    let d = defect_matrix(&g, &VertexPartition::equitable(20, 4).unwrap());
    c.bench_function("cut_norm_exact_20", |b| b.iter(|| cut_norm_exact(black_box(&d)).unwrap()));
    let g = gnp(128, 0.5, 1).unwrap();
    let d = defect_matrix(&g, &VertexPartition::equitable(128, 8).unwrap());
    c.bench_function("cut_norm_heuristic_128", |b| b.iter(|| cut_norm_heuristic(black_box(&d), 7)));
}

fn pair_checks(c: &mut Criterion) {
    let g = gnp(64, 0.5, 2).unwrap();
    let x: Vec<usize> = (0..16).collect();
    let y: Vec<usize> = (16..64).collect();
    c.bench_function("pair_exact_16x48", |b| {
        b.iter(|| check_pair(&g, black_box(&x), &y, PairSpec::band(0.3, 0.3), CheckMode::Exact).unwrap())
    });
    let x: Vec<usize> = (0..32).collect();
    let y: Vec<usize> = (32..64).collect();
    c.bench_function("pair_sampled_32x32", |b| {
        b.iter(|| {
            check_pair(&g, black_box(&x), &y, PairSpec::band(0.3, 0.3), CheckMode::Sampled { trials: 1024, seed: 3 })
                .unwrap()
        })
    });
}

fn partitions(c: &mut Criterion) {
    let g = gnp(96, 0.5, 4).unwrap();
    c.bench_function("fk_heuristic_96", |b| {
        b.iter(|| fk_partition(black_box(&g), 0.3, CutMode::Heuristic { seed: 5 }).unwrap())
    });
}

fn counting(c: &mut Criterion) {
    let g = gnp(64, 0.5, 6).unwrap();
    let h = DenseGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let all: Vec<Vec<usize>> = vec![(0..64).collect(); 4];
    c.bench_function("count_induced_p4_64", |b| b.iter(|| count_induced(black_box(&g), &h, &all).unwrap()));
    c.bench_function("gnp_512", |b| b.iter(|| gnp(black_box(512), 0.5, 8).unwrap()));
}

criterion_group!(benches, cut_norm, pair_checks, partitions, counting);
criterion_main!(benches);
