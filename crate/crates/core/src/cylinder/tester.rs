use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::DenseGraph;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TesterOutcome {
    pub accept: bool,
    pub samples: usize,
    /// A sampled vertex set inducing `H`, when one was found.
    pub witness: Option<Vec<usize>>,
}

/// Whether `g[set]` is isomorphic to `h`, by trying every bijection.
pub fn induces(g: &DenseGraph, h: &DenseGraph, set: &[usize]) -> bool {
    let k = h.n();
    if set.len() != k {
        return false;
    }
    let edges_h = h.edge_count();
    let edges_g =
        (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| g.has_edge(set[a], set[b])).count();
    if edges_g != edges_h {
        return false;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    permute(g, h, set, &mut perm, 0)
}

fn permute(g: &DenseGraph, h: &DenseGraph, set: &[usize], perm: &mut [usize], i: usize) -> bool {
    if i == perm.len() {
        return true;
    }
    for j in i..perm.len() {
        perm.swap(i, j);
        let ok = (0..i).all(|a| h.has_edge(a, i) == g.has_edge(set[perm[a]], set[perm[i]]));
        if ok && permute(g, h, set, perm, i + 1) {
            return true;
        }
        perm.swap(i, j);
    }
    false
}

/// One-sided tester: samples `⌈2/δ⌉` random `h`-sets and rejects when one of
/// them induces `H`.
pub fn sampling_tester(g: &DenseGraph, h: &DenseGraph, delta: f64, seed: u64) -> Result<TesterOutcome> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain("delta must lie in (0,1)");
    }
    let samples = (2.0 / delta - 1e-9).ceil() as usize;
    if h.n() > g.n() {
        return Ok(TesterOutcome { accept: true, samples, witness: None });
    }
    let mut r = rng::stream(seed, &[rng::label("tester")]);
    for _ in 0..samples {
        let mut set = sample(&mut r, g.n(), h.n()).into_vec();
        set.sort_unstable();
        if induces(g, h, &set) {
            return Ok(TesterOutcome { accept: false, samples, witness: Some(set) });
        }
    }
    Ok(TesterOutcome { accept: true, samples, witness: None })
}
