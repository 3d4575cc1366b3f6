use serde::{Deserialize, Serialize};

use super::strong::{select_representatives, strong_cylinder_partition, StrongConfig};
use crate::certify::{
    count_induced, counting_hypotheses, counting_lemma_threshold, pair_density, CheckMode, CountingHypotheses,
};
use crate::edits::EditSet;
use crate::error::{domain, Error, Result};
use crate::graph::DenseGraph;
use crate::partition::VertexPartition;

/// Largest pattern accepted by [`induced_removal`].
pub const MAX_REMOVAL_PATTERN: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovalConfig {
    /// Density threshold `η`.
    pub eta: f64,
    /// Constant regularity target `f(k)` for the representatives.
    pub f: f64,
    /// Energy gap of the strong cylinder step.
    pub gap: f64,
    /// Initial number of parts.
    pub s: usize,
    pub mode: CheckMode,
}

impl RemovalConfig {
    /// `η = ε/8`, `f = η^h/(4h)`, gap `η⁶/4`, `s = ⌈2/η⌉`.
    pub fn full(eps: f64, h: usize, mode: CheckMode) -> Self {
        let eta = eps / 8.0;
        RemovalConfig {
            eta,
            f: eta.powi(h as i32) / (4.0 * h as f64),
            gap: eta.powi(6) / 4.0,
            s: (2.0 / eta).ceil() as usize,
            mode,
        }
    }

    /// `η = ε/8` with `f` and the gap both set to `η` and four initial parts.
    pub fn desk(eps: f64, mode: CheckMode) -> Self {
        let eta = eps / 8.0;
        RemovalConfig { eta, f: eta, gap: eta, s: 4, mode }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum RemovalOutcome {
    /// No induced copy to begin with; nothing is edited.
    Free,
    /// A map `φ: V(H) → [k]` meeting the density conditions on the
    /// representatives, with the induced count it guarantees.
    Certificate {
        phi: Vec<usize>,
        representatives: Vec<Vec<usize>>,
        threshold: f64,
        count: u64,
        hypotheses: CountingHypotheses,
    },
    Edited {
        edits: EditSet,
        partition: VertexPartition,
        representatives: Vec<Vec<usize>>,
        copies_before: u64,
        /// `5ηn²`.
        bound: f64,
    },
}

impl RemovalOutcome {
    pub fn edit_count(&self) -> usize {
        match self {
            RemovalOutcome::Edited { edits, .. } => edits.count(),
            _ => 0,
        }
    }
}

fn find_phi(h: &DenseGraph, dens: &[Option<f64>], k: usize, eta: f64, phi: &mut Vec<usize>) -> bool {
    let i = phi.len();
    if i == h.n() {
        return true;
    }
    for c in 0..k {
        let ok = phi.iter().enumerate().all(|(j, &cj)| match dens[c * k + cj] {
            Some(d) if h.has_edge(i, j) => d > eta,
            Some(d) => d < 1.0 - eta,
            None => false,
        });
        if ok {
            phi.push(c);
            if find_phi(h, dens, k, eta, phi) {
                return true;
            }
            phi.pop();
        }
    }
    false
}

/// Edits `g` to be induced-`H`-free with at most `εn²` changes, or returns a
/// copy certificate when the representatives admit an embedding of `H`.
pub fn induced_removal(g: &DenseGraph, h: &DenseGraph, eps: f64, cfg: &RemovalConfig) -> Result<RemovalOutcome> {
    if !(eps > 0.0 && eps < 0.5) {
        return domain("eps must lie in (0, 1/2)");
    }
    let hn = h.n();
    if hn > MAX_REMOVAL_PATTERN {
        return Err(Error::Refused(format!("pattern size {hn} exceeds {MAX_REMOVAL_PATTERN}")));
    }
    let n = g.n();
    let all: Vec<usize> = (0..n).collect();
    let copies_before = count_induced(g, h, &vec![all.clone(); hn])?;
    if copies_before == 0 {
        return Ok(RemovalOutcome::Free);
    }
    let eta = cfg.eta;
    let strong_cfg = StrongConfig::new(cfg.gap, cfg.s.min(n), cfg.mode);
    let f = cfg.f;
    let strong = strong_cylinder_partition(g, &strong_cfg, &|_| f)?;
    let reps = select_representatives(g, &strong.k, eta, f, cfg.mode)?;
    let w = &reps.parts;
    let k = w.len();
    let mut dens = vec![None; k * k];
    for a in 0..k {
        for b in 0..k {
            dens[a * k + b] = pair_density(g, &w[a], &w[b]);
        }
    }
    let mut phi = Vec::with_capacity(hn);
    if find_phi(h, &dens, k, eta, &mut phi) {
        let sets: Vec<Vec<usize>> = phi.iter().map(|&c| w[c].clone()).collect();
        let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
        let threshold =
            if hn >= 2 { counting_lemma_threshold(eta, hn, &sizes)? } else { sizes.iter().product::<usize>() as f64 };
        let count = count_induced(g, h, &sets)?;
        return Ok(RemovalOutcome::Certificate {
            phi,
            representatives: reps.parts,
            threshold,
            count,
            hypotheses: counting_hypotheses(f, eta, hn, &sizes),
        });
    }
    let v = strong.k.ground();
    let mut edits = EditSet::new();
    for a in 0..k {
        for b in a..k {
            let Some(d) = dens[a * k + b] else { continue };
            let (del, add) = (d <= eta, d >= 1.0 - eta);
            if !del && !add {
                continue;
            }
            let mut changes = Vec::new();
            for &x in &v[a] {
                for &y in &v[b] {
                    if (a != b || x < y) && g.has_edge(x, y) == del {
                        changes.push((x.min(y), x.max(y)));
                    }
                }
            }
            if del {
                edits.record(format!("blocks {a} {b}"), &[], &changes);
            } else {
                edits.record(format!("blocks {a} {b}"), &changes, &[]);
            }
        }
    }
    let edits = edits.finish()?;
    let edited = edits.apply(g)?;
    let left = count_induced(&edited, h, &vec![all; hn])?;
    if left != 0 {
        return Err(Error::Verification(format!("{left} induced copies remain after editing")));
    }
    let bound = 5.0 * eta * (n * n) as f64;
    if edits.count() as f64 > bound + 1e-9 {
        return Err(Error::Verification(format!("{} edits exceed 5*eta*n^2 = {bound:.1}", edits.count())));
    }
    Ok(RemovalOutcome::Edited { edits, partition: strong.p, representatives: reps.parts, copies_before, bound })
}
