use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::DenseGraph;

/// Ordered family of disjoint nonempty blocks covering `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl VertexPartition {
    /// Validates the cover and sorts each block; block order is kept.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        let mut blocks = blocks;
        for (i, b) in blocks.iter_mut().enumerate() {
            if b.is_empty() {
                return domain(format!("block {i} is empty"));
            }
            b.sort_unstable();
            for &v in b.iter() {
                if v >= n {
                    return domain(format!("vertex {v} out of range for n = {n}"));
                }
                if block_of[v] != usize::MAX {
                    return domain(format!("vertex {v} appears in two blocks"));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return domain(format!("vertex {v} is not covered"));
        }
        Ok(VertexPartition { blocks, block_of })
    }

    pub fn trivial(n: usize) -> Self {
        Self::new(n, vec![(0..n).collect()]).expect("n >= 1")
    }

    pub fn singletons(n: usize) -> Self {
        Self::new(n, (0..n).map(|v| vec![v]).collect()).expect("valid")
    }

    /// Contiguous index intervals; the first `n mod k` blocks get one extra vertex.
    pub fn equitable(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return domain(format!("cannot split {n} vertices into {k} blocks"));
        }
        let (q, r) = (n / k, n % k);
        let mut start = 0;
        let mut blocks = Vec::with_capacity(k);
        for i in 0..k {
            let len = q + usize::from(i < r);
            blocks.push((start..start + len).collect());
            start += len;
        }
        Self::new(n, blocks)
    }

    /// Blocks sorted by smallest member.
    pub fn canonical(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(|b| b[0]);
        Self::new(self.n(), blocks).expect("reordering keeps validity")
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn is_equitable(&self) -> bool {
        let s = self.sizes();
        s.iter().max().unwrap_or(&0) - s.iter().min().unwrap_or(&0) <= 1
    }

    /// True when every block of `self` lies inside a block of `coarse`.
    pub fn refines(&self, coarse: &VertexPartition) -> bool {
        self.n() == coarse.n()
            && self.blocks.iter().all(|b| {
                let c = coarse.block_of(b[0]);
                b.iter().all(|&v| coarse.block_of(v) == c)
            })
    }

    /// Partition of `0..n` refining `self` by splitting each block with `f`.
    pub fn split_each(&self, mut f: impl FnMut(usize, &[usize]) -> Vec<Vec<usize>>) -> Result<VertexPartition> {
        let mut out = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            out.extend(f(i, b).into_iter().filter(|p| !p.is_empty()));
        }
        VertexPartition::new(self.n(), out)
    }
}

/// Ordered edge counts `E_ij = e(V_i, V_j)` between all blocks, row major.
pub fn block_edge_counts(g: &DenseGraph, p: &VertexPartition) -> Vec<u64> {
    let k = p.k();
    let mut e = vec![0u64; k * k];
    for u in 0..g.n() {
        let bu = p.block_of(u);
        for v in g.neighbors(u) {
            e[bu * k + p.block_of(v)] += 1;
        }
    }
    e
}

/// Block density matrix `d(V_i, V_j)`, row major.
pub fn block_densities(g: &DenseGraph, p: &VertexPartition) -> Vec<f64> {
    let k = p.k();
    let s = p.sizes();
    block_edge_counts(g, p).iter().enumerate().map(|(ij, &c)| c as f64 / (s[ij / k] * s[ij % k]) as f64).collect()
}

/// Mean square density `q(P)` over ordered block pairs, diagonal included.
pub fn mean_square_density(g: &DenseGraph, p: &VertexPartition) -> f64 {
    let k = p.k();
    let s = p.sizes();
    let n2 = (g.n() * g.n()) as f64;
    block_edge_counts(g, p)
        .iter()
        .enumerate()
        .map(|(ij, &c)| {
            let c = c as f64;
            c * c / ((s[ij / k] * s[ij % k]) as f64 * n2)
        })
        .sum()
}

/// Nonempty intersections `P_i ∩ Q_j` ordered by `(i, j)`.
pub fn common_refinement(p: &VertexPartition, q: &VertexPartition) -> Result<VertexPartition> {
    if p.n() != q.n() {
        return domain("partitions cover different vertex sets");
    }
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for v in 0..p.n() {
        cells.entry((p.block_of(v), q.block_of(v))).or_default().push(v);
    }
    VertexPartition::new(p.n(), cells.into_values().collect())
}

/// Equitable partition into exactly `t` blocks built by chopping each block of
/// `p` into pieces of the target sizes and dealing the leftovers round-robin
/// over the pieces still to be filled. Loses at most `2k/t` of mean square
/// density.
pub fn equitable_rebalance(p: &VertexPartition, t: usize) -> Result<VertexPartition> {
    let n = p.n();
    if t < p.k() {
        return domain(format!("target {t} is below the current block count {}", p.k()));
    }
    if t > n {
        return domain(format!("target {t} exceeds n = {n}"));
    }
    let (q, r) = (n / t, n % t);
    let (mut big, mut small) = (r, t - r);
    let mut pieces: Vec<Vec<usize>> = Vec::with_capacity(t);
    let mut pool = Vec::new();
    for b in p.blocks() {
        let mut rest: &[usize] = b;
        loop {
            if rest.len() > q && big > 0 {
                pieces.push(rest[..q + 1].to_vec());
                rest = &rest[q + 1..];
                big -= 1;
            } else if rest.len() >= q && small > 0 {
                pieces.push(rest[..q].to_vec());
                rest = &rest[q..];
                small -= 1;
            } else {
                break;
            }
        }
        pool.extend_from_slice(rest);
    }
    let mut caps: Vec<usize> = Vec::with_capacity(big + small);
    caps.extend(std::iter::repeat_n(q + 1, big));
    caps.extend(std::iter::repeat_n(q, small));
    let mut open: Vec<Vec<usize>> = vec![Vec::new(); caps.len()];
    let mut cursor = 0;
    for v in pool {
        while open[cursor].len() >= caps[cursor] {
            cursor = (cursor + 1) % caps.len();
        }
        open[cursor].push(v);
        cursor = (cursor + 1) % caps.len();
    }
    pieces.extend(open);
    VertexPartition::new(n, pieces)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
}

impl RegularityParams {
    pub fn new(eps: f64, delta: f64, eta: f64) -> Result<Self> {
        for (name, x) in [("eps", eps), ("delta", delta), ("eta", eta)] {
            if !(x > 0.0 && x < 1.0) {
                return domain(format!("{name} = {x} must lie in (0,1)"));
            }
        }
        Ok(RegularityParams { eps, delta, eta })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub beta: f64,
    pub upsilon: f64,
    pub contained_count: usize,
    /// Per block of `Z`: index of a `P` block holding at least `(1-β)|Z_j|` of it.
    pub container: Vec<Option<usize>>,
    pub verdict: bool,
}

impl RefinementReport {
    /// Whether the partition is a `(beta, upsilon)`-refinement.
    pub fn is_refinement(&self, upsilon: f64) -> bool {
        self.upsilon <= upsilon + 1e-12
    }
}

/// How far `z` is from refining `p` at overlap tolerance `beta`.
pub fn refinement_distance(z: &VertexPartition, p: &VertexPartition, beta: f64) -> Result<RefinementReport> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain("beta must lie in (0,1)");
    }
    if z.n() != p.n() {
        return domain("partitions cover different vertex sets");
    }
    let mut container = Vec::with_capacity(z.k());
    for b in z.blocks() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in b {
            *counts.entry(p.block_of(v)).or_default() += 1;
        }
        let (best, c) = counts.into_iter().fold((0, 0), |acc, (i, c)| if c > acc.1 { (i, c) } else { acc });
        let need = (1.0 - beta) * b.len() as f64;
        container.push((c as f64 >= need - 1e-9).then_some(best));
    }
    let contained_count = container.iter().filter(|c| c.is_some()).count();
    let upsilon = 1.0 - contained_count as f64 / z.k() as f64;
    Ok(RefinementReport { beta, upsilon, contained_count, container, verdict: true })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    pub close: bool,
    pub eps: f64,
    /// Outer index pairs `(i, i')` with more than `εℓ²` deviating inner pairs.
    pub bad_outer_pairs: usize,
    pub k: usize,
    pub l: usize,
    pub max_deviation: f64,
}

/// Whether the refinement `b` of `a` is ε-close to it.
pub fn partition_closeness(
    g: &DenseGraph,
    a: &VertexPartition,
    b: &VertexPartition,
    eps: f64,
) -> Result<ClosenessReport> {
    if !b.refines(a) {
        return domain("second partition does not refine the first");
    }
    let k = a.k();
    let mut inner: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, blk) in b.blocks().iter().enumerate() {
        inner[a.block_of(blk[0])].push(j);
    }
    let l = inner[0].len();
    if inner.iter().any(|v| v.len() != l) {
        return domain("refinement does not split every block into the same number of parts");
    }
    let da = block_densities(g, a);
    let db = block_densities(g, b);
    let kb = b.k();
    let mut bad_outer = 0;
    let mut max_dev: f64 = 0.0;
    for i in 0..k {
        for i2 in 0..k {
            let base = da[i * k + i2];
            let mut bad = 0;
            for &j in &inner[i] {
                for &j2 in &inner[i2] {
                    let dev = (db[j * kb + j2] - base).abs();
                    max_dev = max_dev.max(dev);
                    if dev >= eps {
                        bad += 1;
                    }
                }
            }
            if bad as f64 > eps * (l * l) as f64 {
                bad_outer += 1;
            }
        }
    }
    Ok(ClosenessReport {
        close: bad_outer as f64 <= eps * (k * k) as f64,
        eps,
        bad_outer_pairs: bad_outer,
        k,
        l,
        max_deviation: max_dev,
    })
}
