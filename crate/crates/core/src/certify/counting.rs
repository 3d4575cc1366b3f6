use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{check_set, Bitset, DenseGraph};

/// Largest pattern handled by [`count_induced`].
pub const MAX_PATTERN: usize = 8;

/// Number of tuples `(v_1..v_h) ∈ W_1×…×W_h` of distinct vertices such that
/// `v_i v_j` is an edge of `g` exactly when `ij` is an edge of `h`.
pub fn count_induced(g: &DenseGraph, h: &DenseGraph, w: &[Vec<usize>]) -> Result<u64> {
    let k = h.n();
    if k != w.len() {
        return domain(format!("pattern has {k} vertices but {} sets were given", w.len()));
    }
    if k > MAX_PATTERN {
        return Err(Error::Refused(format!("pattern size {k} exceeds {MAX_PATTERN}")));
    }
    for s in w {
        check_set(g.n(), s)?;
    }
    let masks: Vec<Bitset> = w.iter().map(|s| g.mask(s)).collect();
    let mut chosen = Vec::with_capacity(k);
    Ok(extend(g, h, &masks, &mut chosen))
}

fn extend(g: &DenseGraph, h: &DenseGraph, masks: &[Bitset], chosen: &mut Vec<usize>) -> u64 {
    let i = chosen.len();
    if i == masks.len() {
        return 1;
    }
    let mut cand = masks[i].clone();
    for (j, &v) in chosen.iter().enumerate() {
        cand.remove(v);
        let adj = h.has_edge(i, j);
        let row = g.row(v);
        let mut words: Vec<u64> = cand.words().to_vec();
        for (c, &r) in words.iter_mut().zip(row) {
            *c &= if adj { r } else { !r };
        }
        cand = Bitset::from_words(words);
    }
    if i + 1 == masks.len() {
        return cand.len() as u64;
    }
    let mut total = 0;
    for v in cand.iter() {
        chosen.push(v);
        total += extend(g, h, masks, chosen);
        chosen.pop();
    }
    total
}

/// `(η/4)^{C(h,2)}·∏|W_i|`.
pub fn counting_lemma_threshold(eta: f64, h: usize, sizes: &[usize]) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return domain("eta must lie in (0,1)");
    }
    if h < 2 {
        return domain("pattern needs at least two vertices");
    }
    if sizes.len() != h {
        return domain("one size per pattern vertex is required");
    }
    let pairs = (h * (h - 1) / 2) as i32;
    Ok((eta / 4.0).powi(pairs) * sizes.iter().map(|&s| s as f64).product::<f64>())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingHypotheses {
    pub gamma_ok: bool,
    pub sizes_ok: bool,
    pub gamma_max: f64,
}

impl CountingHypotheses {
    pub fn hold(&self) -> bool {
        self.gamma_ok && self.sizes_ok
    }
}

/// The counting lemma asks for `γ ≤ η^h/(4h)` and `|W_i| ≥ 1/γ`.
pub fn counting_hypotheses(gamma: f64, eta: f64, h: usize, sizes: &[usize]) -> CountingHypotheses {
    let gamma_max = eta.powi(h as i32) / (4.0 * h as f64);
    CountingHypotheses {
        gamma_ok: gamma > 0.0 && gamma <= gamma_max + 1e-15,
        sizes_ok: gamma > 0.0 && sizes.iter().all(|&s| s as f64 >= 1.0 / gamma - 1e-9),
        gamma_max,
    }
}
