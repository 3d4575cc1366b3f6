//! Brute-force oracles shared by the integration tests. None of these call
//! into the library beyond graph construction and adjacency lookups.
#![allow(dead_code)]

use graphreg::DenseGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f7e57)
}

/// Random graph drawn with the test's own generator.
pub fn random_graph(n: usize, p: f64, seed: u64) -> DenseGraph {
    let mut r = rng(seed);
    DenseGraph::from_fn(n, |_, _| r.gen_bool(p)).unwrap()
}

pub fn random_blocks(n: usize, k: usize, r: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, r.gen_range(0..=i));
    }
    let mut cuts: Vec<usize> = Vec::new();
    while cuts.len() + 1 < k {
        let c = r.gen_range(1..n);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let mut blocks = Vec::new();
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        blocks.push(perm[start..c].to_vec());
        start = c;
    }
    blocks
}

/// Ordered pair count with both orientations on overlaps.
pub fn naive_e(g: &DenseGraph, x: &[usize], y: &[usize]) -> usize {
    let mut c = 0;
    for &u in x {
        for &v in y {
            if u != v && g.has_edge(u, v) {
                c += 1;
            }
        }
    }
    c
}

/// Mean square density from the definition.
pub fn naive_q(g: &DenseGraph, blocks: &[Vec<usize>]) -> f64 {
    let n = g.n() as f64;
    let mut q = 0.0;
    for a in blocks {
        for b in blocks {
            let d = naive_e(g, a, b) as f64 / (a.len() * b.len()) as f64;
            q += d * d * (a.len() * b.len()) as f64 / (n * n);
        }
    }
    q
}

/// Cut norm by enumerating every row and column subset.
pub fn brute_cut_norm(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    assert!(rows <= 10 && cols <= 10);
    let mut best: f64 = 0.0;
    for a in 0u32..(1 << rows) {
        for b in 0u32..(1 << cols) {
            let mut s = 0.0;
            for (i, row) in m.iter().enumerate() {
                if a >> i & 1 == 1 {
                    for (j, x) in row.iter().enumerate() {
                        if b >> j & 1 == 1 {
                            s += x;
                        }
                    }
                }
            }
            best = best.max(f64::abs(s));
        }
    }
    best
}

fn floor_of(frac: f64, size: usize) -> usize {
    let mut f = 1;
    while (f as f64) < frac * size as f64 - 1e-9 {
        f += 1;
    }
    f.min(size)
}

fn subset(set: &[usize], mask: u32) -> Vec<usize> {
    set.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect()
}

/// Density over ordered distinct pairs.
pub fn distinct_density(g: &DenseGraph, x: &[usize], y: &[usize]) -> Option<f64> {
    let mut pairs = 0;
    let mut e = 0;
    for &u in x {
        for &v in y {
            if u != v {
                pairs += 1;
                e += usize::from(g.has_edge(u, v));
            }
        }
    }
    (pairs > 0).then(|| e as f64 / pairs as f64)
}

/// Extreme sub-pair densities over all `X' ⊆ X`, `Y' ⊆ Y` with sizes at least
/// `⌈δ|X|⌉` and `⌈δ|Y|⌉`. Returns `(max, min)`.
pub fn naive_extremes(g: &DenseGraph, x: &[usize], y: &[usize], delta: f64) -> (f64, f64) {
    assert!(x.len() <= 12 && y.len() <= 12);
    let (fx, fy) = (floor_of(delta, x.len()), floor_of(delta, y.len()));
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for mx in 1u32..(1 << x.len()) {
        if (mx.count_ones() as usize) < fx {
            continue;
        }
        let xs = subset(x, mx);
        for my in 1u32..(1 << y.len()) {
            if (my.count_ones() as usize) < fy {
                continue;
            }
            if let Some(d) = distinct_density(g, &xs, &subset(y, my)) {
                hi = hi.max(d);
                lo = lo.min(d);
            }
        }
    }
    (hi, lo)
}

/// Band criterion: spread of sub-pair densities at most `eps`.
pub fn naive_band_regular(g: &DenseGraph, x: &[usize], y: &[usize], eps: f64, delta: f64) -> bool {
    let (hi, lo) = naive_extremes(g, x, y, delta);
    hi - lo <= eps + 1e-12
}

/// Deviation criterion with floor `eps`.
pub fn naive_deviation_regular(g: &DenseGraph, x: &[usize], y: &[usize], eps: f64) -> bool {
    let d = distinct_density(g, x, y).unwrap_or(0.0);
    let (hi, lo) = naive_extremes(g, x, y, eps);
    (hi - d).max(d - lo) <= eps + 1e-12
}

/// Tuples of distinct vertices, one from each set, inducing `h` in order.
pub fn naive_induced(g: &DenseGraph, h: &DenseGraph, w: &[Vec<usize>]) -> u64 {
    fn go(g: &DenseGraph, h: &DenseGraph, w: &[Vec<usize>], chosen: &mut Vec<usize>) -> u64 {
        let i = chosen.len();
        if i == w.len() {
            return 1;
        }
        let mut total = 0;
        for &v in &w[i] {
            if chosen.contains(&v) {
                continue;
            }
            if chosen.iter().enumerate().all(|(j, &u)| g.has_edge(u, v) == h.has_edge(i, j)) {
                chosen.push(v);
                total += go(g, h, w, chosen);
                chosen.pop();
            }
        }
        total
    }
    go(g, h, w, &mut Vec::new())
}

/// Induced copies of `h` counted over unordered vertex sets (all labelled
/// embeddings, divided by nothing: any embedding counts).
pub fn naive_induced_all(g: &DenseGraph, h: &DenseGraph) -> u64 {
    let all: Vec<usize> = (0..g.n()).collect();
    naive_induced(g, h, &vec![all; h.n()])
}

/// Maximum of `|f_P(A,B)|` over all vertex subsets, for `n ≤ 10`.
pub fn naive_weak_defect(g: &DenseGraph, blocks: &[Vec<usize>]) -> f64 {
    let n = g.n();
    assert!(n <= 10);
    let k = blocks.len();
    let mut of = vec![0; n];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            of[v] = i;
        }
    }
    let dens: Vec<Vec<f64>> = blocks
        .iter()
        .map(|a| blocks.iter().map(|b| naive_e(g, a, b) as f64 / (a.len() * b.len()) as f64).collect())
        .collect();
    let mut best: f64 = 0.0;
    for ma in 0u32..(1 << n) {
        let a: Vec<usize> = (0..n).filter(|v| ma >> v & 1 == 1).collect();
        for mb in 0u32..(1 << n) {
            let b: Vec<usize> = (0..n).filter(|v| mb >> v & 1 == 1).collect();
            let (mut ca, mut cb) = (vec![0.0; k], vec![0.0; k]);
            for &u in &a {
                ca[of[u]] += 1.0;
            }
            for &v in &b {
                cb[of[v]] += 1.0;
            }
            let mut model = 0.0;
            for i in 0..k {
                for j in 0..k {
                    model += dens[i][j] * ca[i] * cb[j];
                }
            }
            best = best.max((naive_e(g, &a, &b) as f64 - model).abs());
        }
    }
    best
}

/// Two cliques on `0..half` and `half..2half` plus the given cross edges.
pub fn two_cliques(half: usize, extra: &[(usize, usize)]) -> DenseGraph {
    let mut e = Vec::new();
    for u in 0..2 * half {
        for v in u + 1..2 * half {
            if (u < half) == (v < half) {
                e.push((u, v));
            }
        }
    }
    e.extend_from_slice(extra);
    DenseGraph::from_edges(2 * half, &e).unwrap()
}

pub fn path3() -> DenseGraph {
    DenseGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
}

pub fn triangle() -> DenseGraph {
    DenseGraph::complete(3).unwrap()
}

/// Adds each pair of `x × y` to `edges` with probability `p`. The sets must be
/// disjoint.
pub fn random_pairs(x: &[usize], y: &[usize], p: f64, r: &mut ChaCha8Rng, edges: &mut Vec<(usize, usize)>) {
    for &u in x {
        for &v in y {
            if r.gen_bool(p) {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
}

/// Parts for the union property: `s` parts of size 2 on `0..2s`, every cross
/// pair complete or every cross pair empty, edges inside parts random.
pub struct UnionInstance {
    pub g: DenseGraph,
    pub parts: Vec<Vec<usize>>,
    pub alpha: f64,
}

pub fn union_instance(s: usize, alpha: f64, seed: u64) -> UnionInstance {
    let mut r = rng(seed);
    let full = r.gen_bool(0.5);
    let parts: Vec<Vec<usize>> = (0..s).map(|i| vec![2 * i, 2 * i + 1]).collect();
    let g = DenseGraph::from_fn(2 * s, |u, v| if u / 2 == v / 2 { r.gen_bool(0.5) } else { full }).unwrap();
    UnionInstance { g, parts, alpha }
}

/// `A = 0..a`, `B = a..a+b`, `C` the next `c` vertices; `(A, B)` random at a
/// density drawn from `{0.2, 0.5, 0.8}` and `(A, C)` random at 1/2.
pub struct DegradeInstance {
    pub g: DenseGraph,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

pub fn degrade_instance(a: usize, b: usize, c: usize, seed: u64) -> DegradeInstance {
    let mut r = rng(seed);
    let p = [0.2, 0.5, 0.8][r.gen_range(0..3)];
    let av: Vec<usize> = (0..a).collect();
    let bv: Vec<usize> = (a..a + b).collect();
    let cv: Vec<usize> = (a + b..a + b + c).collect();
    let mut edges = Vec::new();
    random_pairs(&av, &bv, p, &mut r, &mut edges);
    random_pairs(&av, &cv, 0.5, &mut r, &mut edges);
    let g = DenseGraph::from_edges(a + b + c, &edges).unwrap();
    DegradeInstance { g, a: av, b: bv, c: cv }
}

/// `A = 0..a` against `r` blocks of size `b`, all nearly complete or all
/// nearly empty (each pair flipped with probability `noise`).
pub struct MergeInstance {
    pub g: DenseGraph,
    pub a: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

pub fn merge_instance(a: usize, b: usize, r_blocks: usize, noise: f64, seed: u64) -> MergeInstance {
    let mut r = rng(seed);
    let p = if r.gen_bool(0.5) { 1.0 - noise } else { noise };
    let av: Vec<usize> = (0..a).collect();
    let blocks: Vec<Vec<usize>> = (0..r_blocks).map(|i| (a + i * b..a + (i + 1) * b).collect()).collect();
    let mut edges = Vec::new();
    for blk in &blocks {
        random_pairs(&av, blk, p, &mut r, &mut edges);
    }
    let g = DenseGraph::from_edges(a + r_blocks * b, &edges).unwrap();
    MergeInstance { g, a: av, blocks }
}
