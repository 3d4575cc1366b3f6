use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Bit mask over `0..n` with one word per 64 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(n: usize) -> Self {
        Bitset { words: vec![0; n.div_ceil(64)] }
    }

    pub fn from_set(n: usize, set: &[usize]) -> Self {
        let mut b = Bitset::new(n);
        for &v in set {
            b.insert(v);
        }
        b
    }

    pub fn from_words(words: Vec<u64>) -> Self {
        Bitset { words }
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.words[v >> 6] |= 1u64 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.words[v >> 6] &= !(1u64 << (v & 63));
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.words[v >> 6] >> (v & 63) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Popcount of the intersection with a raw word slice of the same length.
    #[inline]
    pub fn and_count(&self, other: &[u64]) -> usize {
        self.words.iter().zip(other).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }
}

/// Undirected simple graph stored as a symmetric bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    split: Option<usize>,
}

impl DenseGraph {
    /// Graph on `n ≥ 1` vertices without edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("graph needs at least one vertex");
        }
        let words = n.div_ceil(64);
        Ok(DenseGraph { n, words, rows: vec![0; n * words], split: None })
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// Builds the graph whose edges are the pairs `u < v` with `f(u, v)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            for v in u + 1..n {
                if f(u, v) {
                    g.set(u, v, true);
                }
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return domain(format!("edge ({u},{v}) out of range for n = {n}"));
            }
            if u == v {
                return domain(format!("loop at vertex {u}"));
            }
            g.set(u, v, true);
        }
        Ok(g)
    }

    /// Marks vertices `0..split` as one side of a bipartition.
    pub fn with_bipartition(mut self, split: usize) -> Result<Self> {
        if split > self.n {
            return domain("bipartition split exceeds n");
        }
        self.split = Some(split);
        Ok(self)
    }

    pub fn bipartition(&self) -> Option<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        self.split.map(|s| (0..s, s..self.n))
    }

    pub(crate) fn set(&mut self, u: usize, v: usize, on: bool) {
        let (wu, bu) = (u * self.words + (v >> 6), 1u64 << (v & 63));
        let (wv, bv) = (v * self.words + (u >> 6), 1u64 << (u & 63));
        if on {
            self.rows[wu] |= bu;
            self.rows[wv] |= bv;
        } else {
            self.rows[wu] &= !bu;
            self.rows[wv] &= !bv;
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + (v >> 6)] >> (v & 63) & 1 == 1
    }

    /// Raw adjacency words of `v`.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn codegree(&self, u: usize, v: usize) -> usize {
        self.row(u).iter().zip(self.row(v)).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            out.extend(self.neighbors(u).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    pub fn complement(&self) -> DenseGraph {
        let mut g = self.clone();
        for u in 0..self.n {
            for v in u + 1..self.n {
                g.set(u, v, !self.has_edge(u, v));
            }
        }
        g
    }

    /// Subgraph induced on `set`, relabelled `0..set.len()` in the given order.
    pub fn induced(&self, set: &[usize]) -> Result<DenseGraph> {
        check_set(self.n, set)?;
        DenseGraph::from_fn(set.len(), |a, b| self.has_edge(set[a], set[b]))
    }

    pub fn mask(&self, set: &[usize]) -> Bitset {
        Bitset::from_set(self.n, set)
    }

    /// Ordered pair count `e(X, Y)`; overlapping sets count both orientations.
    pub fn e(&self, x: &[usize], y: &[usize]) -> usize {
        let my = self.mask(y);
        x.iter().map(|&u| my.and_count(self.row(u))).sum()
    }

    /// `e(X, Y)` with `Y` given as a mask.
    pub fn e_mask(&self, x: &[usize], y: &Bitset) -> usize {
        x.iter().map(|&u| y.and_count(self.row(u))).sum()
    }

    /// Density `e(X,Y) / (|X||Y|)`.
    pub fn density(&self, x: &[usize], y: &[usize]) -> Result<f64> {
        check_set(self.n, x)?;
        check_set(self.n, y)?;
        if x.is_empty() || y.is_empty() {
            return domain("density of an empty set");
        }
        Ok(self.e(x, y) as f64 / (x.len() * y.len()) as f64)
    }
}

/// Validates a vertex list: in range and without repeats.
pub fn check_set(n: usize, set: &[usize]) -> Result<()> {
    let mut seen = Bitset::new(n.max(1));
    for &v in set {
        if v >= n {
            return domain(format!("vertex {v} out of range for n = {n}"));
        }
        if seen.contains(v) {
            return domain(format!("vertex {v} repeated in a vertex set"));
        }
        seen.insert(v);
    }
    Ok(())
}

/// Dense real matrix, row major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return domain("ragged matrix rows");
        }
        Ok(Matrix { rows: rows.len(), cols, data: rows.concat() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `Σ_{i∈A, j∈B} M_ij`.
    pub fn block_sum(&self, a: &[usize], b: &[usize]) -> f64 {
        a.iter().map(|&i| b.iter().map(|&j| self.get(i, j)).sum::<f64>()).sum()
    }
}

/// Edge weights in `[0,1]` of a weighted bipartite graph.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    m: Matrix,
}

impl WeightMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.data.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return domain("weights must lie in [0,1]");
        }
        Ok(WeightMatrix { m })
    }

    pub fn constant(rows: usize, cols: usize, w: f64) -> Result<Self> {
        Self::new(Matrix { rows, cols, data: vec![w; rows * cols] })
    }

    pub fn rows(&self) -> usize {
        self.m.rows
    }

    pub fn cols(&self) -> usize {
        self.m.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }
}
