use serde::{Deserialize, Serialize};

use super::cutnorm::{cut_norm_exact, cut_norm_heuristic, CutNormResult, CUT_EXACT_CAP};
use crate::error::{Error, Result};
use crate::graph::{DenseGraph, Matrix};
use crate::partition::{block_densities, VertexPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutMode {
    Exact,
    Heuristic {
        seed: u64,
    },
    /// Exact up to the cap, heuristic beyond.
    Auto {
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakVerdict {
    /// `max |f_P(A,B)| ≤ εn²` (for heuristic runs: no violation found).
    pub ok: bool,
    pub certified: bool,
    pub threshold: f64,
    pub cut: CutNormResult,
}

/// `D(u,v) = A(u,v) − d(V_{b(u)}, V_{b(v)})`, so that `Σ_{A×B} D = f_P(A,B)`.
/// The diagonal is `−d(V_i,V_i)` because loops are never edges.
pub fn defect_matrix(g: &DenseGraph, p: &VertexPartition) -> Matrix {
    let n = g.n();
    let k = p.k();
    let dens = block_densities(g, p);
    let mut m = Matrix::zeros(n, n);
    for u in 0..n {
        let bu = p.block_of(u);
        for v in 0..n {
            let a = if g.has_edge(u, v) { 1.0 } else { 0.0 };
            m.set(u, v, a - dens[bu * k + p.block_of(v)]);
        }
    }
    m
}

/// `f_P(A,B) = e(A,B) − Σ d(V_i,V_j)|A∩V_i||B∩V_j|`.
pub fn weak_defect(g: &DenseGraph, p: &VertexPartition, a: &[usize], b: &[usize]) -> f64 {
    let k = p.k();
    let dens = block_densities(g, p);
    let (mut ca, mut cb) = (vec![0usize; k], vec![0usize; k]);
    for &u in a {
        ca[p.block_of(u)] += 1;
    }
    for &v in b {
        cb[p.block_of(v)] += 1;
    }
    let mut model = 0.0;
    for i in 0..k {
        for j in 0..k {
            model += dens[i * k + j] * (ca[i] * cb[j]) as f64;
        }
    }
    g.e(a, b) as f64 - model
}

/// Whether `p` is weak ε-regular: `|f_P(A,B)| ≤ εn²` for all `A, B`.
pub fn check_weak_partition(g: &DenseGraph, p: &VertexPartition, eps: f64, mode: CutMode) -> Result<WeakVerdict> {
    let n = g.n();
    let d = defect_matrix(g, p);
    let cut = match mode {
        CutMode::Exact => {
            if n > CUT_EXACT_CAP {
                return Err(Error::Refused(format!("exact weak verification needs n <= {CUT_EXACT_CAP}, got {n}")));
            }
            cut_norm_exact(&d)?
        }
        CutMode::Heuristic { seed } => cut_norm_heuristic(&d, seed),
        CutMode::Auto { seed } if n > CUT_EXACT_CAP => cut_norm_heuristic(&d, seed),
        CutMode::Auto { .. } => cut_norm_exact(&d)?,
    };
    let threshold = eps * (n * n) as f64;
    let ok = cut.value <= threshold + 1e-9;
    Ok(WeakVerdict { ok, certified: ok && cut.exact, threshold, cut })
}
