use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::dlr::regular_cylinder;
use crate::certify::{check_pair, CheckMode, PairSpec};
use crate::error::{domain, Error, Result};
use crate::graph::{check_set, DenseGraph};

/// Default ceiling on the number of cylinder parts fed to the Ramsey step.
pub const RAMSEY_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyConfig {
    pub cap: usize,
    pub mode: CheckMode,
}

impl RamseyConfig {
    pub fn new(mode: CheckMode) -> Self {
        RamseyConfig { cap: RAMSEY_CAP, mode }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamseyCylinder {
    pub parts: Vec<Vec<usize>>,
    /// Parts in the cylinder the clique was taken from.
    pub k: usize,
    /// Shared density bucket `⌊d·t⌋`.
    pub bucket: usize,
    /// Largest minus smallest pairwise density among the chosen parts.
    pub spread: f64,
}

/// `ε + √β + β`.
pub fn degraded_regularity(eps: f64, beta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) || !(0.0..1.0).contains(&beta) {
        return domain("need eps in (0,1) and beta in [0,1)");
    }
    Ok(degrade(eps, beta))
}

fn degrade(eps: f64, beta: f64) -> f64 {
    eps + beta.sqrt() + beta
}

fn bucket(d: f64, t: usize) -> usize {
    ((d * t as f64).floor() as usize).min(t - 1)
}

/// Greedy pigeonhole clique in a complete graph on `0..k` with edge colors
/// `color(a, b)`.
fn mono_clique(k: usize, color: impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut cand: Vec<usize> = (0..k).collect();
    let mut seq: Vec<(usize, Option<usize>)> = Vec::new();
    while let Some((&v, rest)) = cand.split_first() {
        if rest.is_empty() {
            seq.push((v, None));
            break;
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &w in rest {
            classes.entry(color(v, w)).or_default().push(w);
        }
        let (&c, _) = classes.iter().max_by_key(|(c, ws)| (ws.len(), std::cmp::Reverse(**c))).expect("nonempty");
        seq.push((v, Some(c)));
        cand = classes.remove(&c).expect("present");
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &(_, c) in &seq {
        if let Some(c) = c {
            *counts.entry(c).or_default() += 1;
        }
    }
    let best = counts.iter().max_by_key(|(c, n)| (**n, std::cmp::Reverse(**c))).map(|(c, _)| *c);
    let mut out: Vec<usize> = seq.iter().filter(|(_, c)| c.is_some() && *c == best).map(|(v, _)| *v).collect();
    if let Some(&(last, None)) = seq.last() {
        out.push(last);
    }
    out.sort_unstable();
    out
}

fn ramsey_parts(
    g: &DenseGraph,
    set: &[usize],
    s: usize,
    t: usize,
    alpha: f64,
    cfg: &RamseyConfig,
) -> Result<RamseyCylinder> {
    if s == 0 || t == 0 {
        return domain("s and t must be positive");
    }
    let theory = (t as f64).powf((t * s) as f64);
    let k = (cfg.cap as f64).min(theory).min(set.len() as f64) as usize;
    if k == 0 {
        return domain("empty vertex set");
    }
    let parts = regular_cylinder(g, set, k, alpha, cfg.mode)?;
    let mut dens = vec![0.0; k * k];
    for a in 0..k {
        for b in a + 1..k {
            let d = g.density(&parts[a], &parts[b])?;
            dens[a * k + b] = d;
            dens[b * k + a] = d;
        }
    }
    let mut clique = mono_clique(k, |a, b| bucket(dens[a * k + b], t));
    clique.truncate(s);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, &a) in clique.iter().enumerate() {
        for &b in &clique[x + 1..] {
            lo = lo.min(dens[a * k + b]);
            hi = hi.max(dens[a * k + b]);
        }
    }
    let spread = if hi >= lo { hi - lo } else { 0.0 };
    let bucket_id = if clique.len() > 1 { bucket(dens[clique[0] * k + clique[1]], t) } else { 0 };
    Ok(RamseyCylinder { parts: clique.iter().map(|&c| parts[c].clone()).collect(), k, bucket: bucket_id, spread })
}

/// `s` parts of an α-regular cylinder whose pairwise densities share one
/// bucket of width `1/t`.
pub fn ramsey_uniform_cylinder(
    g: &DenseGraph,
    set: &[usize],
    s: usize,
    t: usize,
    alpha: f64,
    cfg: &RamseyConfig,
) -> Result<RamseyCylinder> {
    check_set(g.n(), set)?;
    let r = ramsey_parts(g, set, s, t, alpha, cfg)?;
    if r.parts.len() < s {
        return Err(Error::Refused(format!(
            "monochromatic clique of size {} found among k = {} parts, s = {s} requested",
            r.parts.len(),
            r.k
        )));
    }
    Ok(r)
}

fn self_regular(g: &DenseGraph, u: &[usize], eps: f64, mode: CheckMode) -> Result<bool> {
    match check_pair(g, u, u, PairSpec::deviation(eps), mode) {
        Ok(v) => Ok(v.regular),
        Err(Error::Refused(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A subset of `set` that is ε-regular with itself. Tries the whole set, then
/// the union of a Ramsey-uniform cylinder at `α = (ε/3)²`, then one vertex.
pub fn self_regular_subset(g: &DenseGraph, set: &[usize], eps: f64, cfg: &RamseyConfig) -> Result<Vec<usize>> {
    check_set(g.n(), set)?;
    if set.is_empty() {
        return domain("empty vertex set");
    }
    if !(eps > 0.0 && eps < 0.5) {
        return domain("eps must lie in (0, 1/2)");
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if sorted.len() == 1 || self_regular(g, &sorted, eps, cfg.mode.substream(&[0]))? {
        return Ok(sorted);
    }
    let alpha = (eps / 3.0).powi(2);
    let st = ((2.0 / alpha).ceil() as usize).min(cfg.cap);
    let r = ramsey_parts(g, &sorted, st, st, alpha, cfg)?;
    let mut union: Vec<usize> = r.parts.concat();
    union.sort_unstable();
    if union.len() > 1 && self_regular(g, &union, eps, cfg.mode.substream(&[1]))? {
        return Ok(union);
    }
    Ok(vec![sorted[0]])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfRegularPartition {
    pub blocks: Vec<Vec<usize>>,
    /// Regularity of the extracted sets, `3ε/4`.
    pub extracted_eps: f64,
    /// Largest `|added| / |extracted|` over blocks.
    pub beta: f64,
    /// Regularity after absorbing the leftovers on both sides.
    pub claimed_eps: f64,
    pub leftover: usize,
}

/// Splits `set` into blocks that are each regular with themselves by pulling
/// out `3ε/4`-regular subsets until at most `ε²|set|/100` vertices remain and
/// spreading those over the blocks in proportion to their sizes.
pub fn self_regular_partition(
    g: &DenseGraph,
    set: &[usize],
    eps: f64,
    cfg: &RamseyConfig,
) -> Result<SelfRegularPartition> {
    check_set(g.n(), set)?;
    if set.is_empty() {
        return domain("empty vertex set");
    }
    if !(eps > 0.0 && eps < 0.5) {
        return domain("eps must lie in (0, 1/2)");
    }
    let inner = 0.75 * eps;
    let limit = eps * eps / 100.0 * set.len() as f64;
    let mut rest: Vec<usize> = set.to_vec();
    rest.sort_unstable();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut round = 0u64;
    while rest.len() as f64 > limit {
        let sub = RamseyConfig { mode: cfg.mode.substream(&[round]), ..*cfg };
        let u = self_regular_subset(g, &rest, inner, &sub)?;
        rest.retain(|v| u.binary_search(v).is_err());
        blocks.push(u);
        round += 1;
    }
    let leftover = rest.len();
    let base: Vec<usize> = blocks.iter().map(Vec::len).collect();
    if blocks.is_empty() {
        blocks.push(std::mem::take(&mut rest));
    } else {
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&b| (std::cmp::Reverse(base[b]), b));
        for (x, v) in rest.into_iter().enumerate() {
            blocks[order[x % order.len()]].push(v);
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
    }
    let beta = blocks
        .iter()
        .zip(&base)
        .map(|(b, &s)| if s == 0 { 0.0 } else { (b.len() - s) as f64 / s as f64 })
        .fold(0.0, f64::max);
    let claimed_eps = degrade(degrade(inner, beta), beta);
    Ok(SelfRegularPartition { blocks, extracted_eps: inner, beta, claimed_eps, leftover })
}
