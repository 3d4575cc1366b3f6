use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::random_subset;
use crate::error::{domain, Result};
use crate::graph::{Bitset, DenseGraph, Matrix, WeightMatrix};
use crate::partition::VertexPartition;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLbParams {
    /// Size of each side.
    pub n: usize,
    /// Number of random cuts per side.
    pub r: usize,
    pub alpha: f64,
    pub seed: u64,
}

/// Full-scale parameters for a given `ε`, kept symbolic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLbFullScale {
    pub eps: f64,
    /// `log2 n = 2^-45 ε^-2`.
    pub log2_n: f64,
    /// `r = 2^-40 ε^-2`.
    pub r: f64,
    /// `α = 2^14 ε`.
    pub alpha: f64,
}

pub fn weak_lb_full_scale(eps: f64) -> WeakLbFullScale {
    WeakLbFullScale {
        eps,
        log2_n: 2f64.powi(-45) / (eps * eps),
        r: 2f64.powi(-40) / (eps * eps),
        alpha: 2f64.powi(14) * eps,
    }
}

/// `r` balanced cuts of each side; bit `i` of a vertex signature is set when
/// the vertex lies in part 1 of cut `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutFamily {
    pub n: usize,
    pub r: usize,
    pub u: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
}

impl CutFamily {
    fn bit(sig: &[u64], i: usize) -> bool {
        sig[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Part (0 or 1) of `U`-vertex `x` in cut `i`.
    pub fn u_side(&self, i: usize, x: usize) -> usize {
        usize::from(Self::bit(&self.u[x], i))
    }

    pub fn v_side(&self, i: usize, y: usize) -> usize {
        usize::from(Self::bit(&self.v[y], i))
    }

    /// `s(u, v)`: cuts on which `u` and `v` lie in parts with the same index.
    pub fn agreements(&self, x: usize, y: usize) -> usize {
        let differ: u32 = self.u[x].iter().zip(&self.v[y]).map(|(a, b)| (a ^ b).count_ones()).sum();
        self.r - differ as usize
    }

    /// `W(u,v) = 1/2 + (s − t)α` before clipping.
    pub fn raw_weight(&self, x: usize, y: usize, alpha: f64) -> f64 {
        let s = self.agreements(x, y) as f64;
        0.5 + (2.0 * s - self.r as f64) * alpha
    }

    /// Vertices of `V^i_j`.
    pub fn v_part(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| self.v_side(i, y) == j).collect()
    }

    pub fn u_part(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.n).filter(|&x| self.u_side(i, x) == j).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakLb {
    pub params: WeakLbParams,
    /// Clipped weights `w(u,v)`; rows are `U`, columns `V`.
    pub weights: WeightMatrix,
    pub cuts: CutFamily,
}

fn random_cuts(n: usize, r: usize, rng: &mut rng::Rng) -> Vec<Vec<u64>> {
    let mut sig = vec![vec![0u64; r.div_ceil(64).max(1)]; n];
    for i in 0..r {
        for x in random_subset(rng, n, n / 2) {
            sig[x][i >> 6] |= 1 << (i & 63);
        }
    }
    sig
}

/// Samples `r` independent balanced cuts of each side and builds the clipped
/// weight matrix.
pub fn weak_lb_weights(params: &WeakLbParams) -> Result<WeakLb> {
    let (n, r) = (params.n, params.r);
    if n == 0 || n % 2 != 0 {
        return domain("weak_lb_weights needs an even n >= 2");
    }
    if !(params.alpha >= 0.0 && params.alpha.is_finite()) {
        return domain("alpha must be a nonnegative number");
    }
    let mut ru = rng::stream(params.seed, &[rng::label("weak-lb"), 0]);
    let mut rv = rng::stream(params.seed, &[rng::label("weak-lb"), 1]);
    let cuts = CutFamily { n, r, u: random_cuts(n, r, &mut ru), v: random_cuts(n, r, &mut rv) };
    let mut m = Matrix::zeros(n, n);
    m.data.par_chunks_mut(n).enumerate().for_each(|(x, row)| {
        for (y, w) in row.iter_mut().enumerate() {
            *w = cuts.raw_weight(x, y, params.alpha).clamp(0.0, 1.0);
        }
    });
    Ok(WeakLb { params: params.clone(), weights: WeightMatrix::new(m)?, cuts })
}

/// Bipartite graph on `rows + cols` vertices (rows first) with each pair an
/// edge independently with probability `W(i,j)`.
pub fn realize_bernoulli(w: &WeightMatrix, seed: u64) -> Result<DenseGraph> {
    let (rows, cols) = (w.rows(), w.cols());
    let picks: Vec<Vec<usize>> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, &[rng::label("bernoulli"), i as u64]);
            (0..cols).filter(|&j| r.gen::<f64>() < w.get(i, j)).collect()
        })
        .collect();
    let mut g = DenseGraph::empty(rows + cols)?;
    for (i, js) in picks.iter().enumerate() {
        for &j in js {
            g.set(i, rows + j, true);
        }
    }
    g.with_bipartition(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliReport {
    pub samples: usize,
    /// `θ = 4n^{-1/2}` with `n` the larger side.
    pub theta: f64,
    pub bound: f64,
    pub max_deviation: f64,
    pub violations: usize,
}

/// Compares `e_W(A,B)` with `e_G(A,B)` on random pairs of subsets.
pub fn bernoulli_discrepancy(w: &WeightMatrix, g: &DenseGraph, samples: usize, seed: u64) -> Result<BernoulliReport> {
    let (rows, cols) = (w.rows(), w.cols());
    if g.n() != rows + cols {
        return domain("graph does not match the weight matrix");
    }
    let n = rows.max(cols) as f64;
    let theta = 4.0 / n.sqrt();
    let bound = theta * n * n;
    let mut r = rng::stream(seed, &[rng::label("bernoulli-check")]);
    let mut max_deviation: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..samples {
        let a: Vec<usize> = (0..rows).filter(|_| r.gen_bool(0.5)).collect();
        let b: Vec<usize> = (0..cols).filter(|_| r.gen_bool(0.5)).collect();
        let ew: f64 = a.iter().map(|&i| b.iter().map(|&j| w.get(i, j)).sum::<f64>()).sum();
        let mask = Bitset::from_set(g.n(), &b.iter().map(|&j| rows + j).collect::<Vec<_>>());
        let eg = g.e_mask(&a, &mask) as f64;
        let dev = (ew - eg).abs();
        max_deviation = max_deviation.max(dev);
        if dev > bound {
            violations += 1;
        }
    }
    Ok(BernoulliReport { samples, theta, bound, max_deviation, violations })
}

/// Optional inputs for the partition-dependent diagnostics.
#[derive(Clone, Debug, Default)]
pub struct WeakLbProbe {
    /// Partition of `U` whose useful pairs are counted.
    pub partition: Option<VertexPartition>,
    /// `(A_0, A_1, i)` for the four-term discrepancy quantity.
    pub sets: Option<(Vec<usize>, Vec<usize>, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLbReport {
    pub n: usize,
    pub r: usize,
    pub alpha: f64,
    pub extreme_pairs: usize,
    pub extreme_fraction: f64,
    /// `2e^{-2(1/(8α))²/r}`, the per-pair tail bound.
    pub extreme_bound: f64,
    /// Binomial standard error of a fraction with mean `extreme_bound` over `n²` pairs.
    pub extreme_se: f64,
    pub nice: usize,
    pub very_nice: usize,
    /// `1 − 8·extreme_fraction`; nice vertices are always at least this fraction.
    pub nice_markov_bound: f64,
    /// `1 − 64e^{-2/(64α²r)}`.
    pub nice_tail_bound: f64,
    /// Per block of the probe partition: cuts `i` with `(i, t)` useful.
    pub useful: Option<Vec<usize>>,
    pub discrepancy_weighted: Option<f64>,
    pub discrepancy_graph: Option<f64>,
}

/// `e(A_0,V_0) − e(A_1,V_0) + e(A_1,V_1) − e(A_0,V_1)` for cut `i`, with `e`
/// supplied as a function of a `U`-set and a `V`-set.
fn four_term(cuts: &CutFamily, a0: &[usize], a1: &[usize], i: usize, e: impl Fn(&[usize], &[usize]) -> f64) -> f64 {
    let v0 = cuts.v_part(i, 0);
    let v1 = cuts.v_part(i, 1);
    e(a0, &v0) - e(a1, &v0) + e(a1, &v1) - e(a0, &v1)
}

/// Number of cuts `i` with `|U_t ∩ U^i_j| ≥ |U_t|/32` for both `j`, per block.
pub fn useful_pairs(cuts: &CutFamily, p: &VertexPartition) -> Vec<usize> {
    p.blocks()
        .iter()
        .map(|b| {
            (0..cuts.r)
                .filter(|&i| {
                    let ones = b.iter().filter(|&&x| cuts.u_side(i, x) == 1).count();
                    let need = b.len() as f64 / 32.0;
                    ones as f64 >= need && (b.len() - ones) as f64 >= need
                })
                .count()
        })
        .collect()
}

pub fn weak_lb_diagnostics(lb: &WeakLb, g: Option<&DenseGraph>, probe: &WeakLbProbe) -> Result<WeakLbReport> {
    let cuts = &lb.cuts;
    let (n, r, alpha) = (cuts.n, cuts.r, lb.params.alpha);
    let w = &lb.weights;
    let half = (n / 2) as f64;
    let per_u: Vec<(usize, bool, bool)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut extreme = 0;
            let mut ones = vec![0.0f64; r];
            let mut total = 0.0;
            for y in 0..n {
                if (cuts.raw_weight(x, y, alpha) - 0.5).abs() > 0.25 {
                    extreme += 1;
                }
                let wy = w.get(x, y);
                total += wy;
                for (i, acc) in ones.iter_mut().enumerate() {
                    if cuts.v_side(i, y) == 1 {
                        *acc += wy;
                    }
                }
            }
            let nice = extreme * 8 <= n;
            let very = nice
                && (0..r).all(|i| {
                    let d1 = ones[i] / half;
                    let d0 = (total - ones[i]) / half;
                    let gap = if cuts.u_side(i, x) == 1 { d1 - d0 } else { d0 - d1 };
                    gap >= alpha / 2.0 - 1e-12
                });
            (extreme, nice, very)
        })
        .collect();
    let extreme_pairs: usize = per_u.iter().map(|t| t.0).sum();
    let pairs = (n * n) as f64;
    let extreme_fraction = extreme_pairs as f64 / pairs;
    let (extreme_bound, nice_tail_bound) = if r == 0 || alpha == 0.0 {
        (0.0, 1.0)
    } else {
        let z = 2.0 / (64.0 * alpha * alpha * r as f64);
        ((2.0 * (-z).exp()).min(1.0), 1.0 - 64.0 * (-z).exp())
    };
    let useful = probe.partition.as_ref().map(|p| useful_pairs(cuts, p));
    let (mut dw, mut dg) = (None, None);
    if let Some((a0, a1, i)) = &probe.sets {
        if *i >= r {
            return domain(format!("cut index {i} out of range for r = {r}"));
        }
        dw = Some(four_term(cuts, a0, a1, *i, |a, b| {
            a.iter().map(|&x| b.iter().map(|&y| w.get(x, y)).sum::<f64>()).sum()
        }));
        if let Some(g) = g {
            if g.n() != 2 * n {
                return domain("realized graph must have 2n vertices");
            }
            dg = Some(four_term(cuts, a0, a1, *i, |a, b| {
                let shifted: Vec<usize> = b.iter().map(|&y| n + y).collect();
                g.e(a, &shifted) as f64
            }));
        }
    }
    Ok(WeakLbReport {
        n,
        r,
        alpha,
        extreme_pairs,
        extreme_fraction,
        extreme_bound,
        extreme_se: (extreme_bound * (1.0 - extreme_bound) / pairs).sqrt(),
        nice: per_u.iter().filter(|t| t.1).count(),
        very_nice: per_u.iter().filter(|t| t.2).count(),
        nice_markov_bound: 1.0 - 8.0 * extreme_fraction,
        nice_tail_bound,
        useful,
        discrepancy_weighted: dw,
        discrepancy_graph: dg,
    })
}
