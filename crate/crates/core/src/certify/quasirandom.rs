use serde::{Deserialize, Serialize};

use crate::graph::DenseGraph;

/// Mixing certificate from the closed 4-walk count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasirandomCertificate {
    pub n: usize,
    /// Average degree.
    pub d: f64,
    /// Closed walks of length 4, `Σ_{u,v} codeg(u,v)²` with `codeg(u,u) = deg(u)`.
    pub walk4: u128,
    /// `(walk4 − d⁴)⁺ / n⁴`.
    pub alpha: f64,
    /// `α^{1/4}·n`.
    pub lambda: f64,
}

impl QuasirandomCertificate {
    /// The mixing bound `|e(S,T) − d|S||T|/n| ≤ λ√(|S||T|)` for sets given by size
    /// and ordered edge count.
    pub fn bound_holds(&self, e_st: usize, s: usize, t: usize) -> bool {
        self.deviation(e_st, s, t) <= self.lambda * ((s * t) as f64).sqrt() + 1e-9
    }

    pub fn deviation(&self, e_st: usize, s: usize, t: usize) -> f64 {
        (e_st as f64 - self.d * (s * t) as f64 / self.n as f64).abs()
    }
}

pub fn quasirandom_certificate(g: &DenseGraph) -> QuasirandomCertificate {
    let n = g.n();
    let mut walk4: u128 = 0;
    for u in 0..n {
        let du = g.degree(u) as u128;
        walk4 += du * du;
        for v in u + 1..n {
            let c = g.codegree(u, v) as u128;
            walk4 += 2 * c * c;
        }
    }
    let d = 2.0 * g.edge_count() as f64 / n as f64;
    let excess = (walk4 as f64 - d.powi(4)).max(0.0);
    let nf = n as f64;
    let alpha = excess / nf.powi(4);
    QuasirandomCertificate { n, d, walk4, alpha, lambda: excess.powf(0.25) }
}

/// Checks the mixing bound on every pair `(S, T)` by enumerating `S` and taking
/// the extreme `T` of each size. Returns the worst slack found and a violating
/// `S` when one exists. Intended for `n ≤ 20`.
pub fn mixing_exhaustive(g: &DenseGraph, cert: &QuasirandomCertificate) -> (f64, Option<Vec<usize>>) {
    let n = g.n();
    assert!(n <= 24, "exhaustive mixing check is limited to n <= 24");
    let rows: Vec<u32> = (0..n).map(|v| (0..n).fold(0u32, |m, u| m | (u32::from(g.has_edge(u, v)) << u))).collect();
    let mut worst = f64::INFINITY;
    let mut bad = None;
    let mut c = vec![0.0f64; n];
    for s in 1u32..(1u32 << n) {
        let ss = s.count_ones() as f64;
        let shift = cert.d * ss / n as f64;
        for v in 0..n {
            c[v] = (rows[v] & s).count_ones() as f64 - shift;
        }
        c.sort_unstable_by(|a, b| b.total_cmp(a));
        let (mut top, mut bottom) = (0.0, 0.0);
        for t in 1..=n {
            top += c[t - 1];
            bottom += c[n - t];
            let dev = top.abs().max(bottom.abs());
            let slack = cert.lambda * (ss * t as f64).sqrt() + 1e-9 - dev;
            if slack < worst {
                worst = slack;
                if slack < 0.0 && bad.is_none() {
                    bad = Some((0..n).filter(|&i| s >> i & 1 == 1).collect());
                }
            }
        }
    }
    (worst, bad)
}
