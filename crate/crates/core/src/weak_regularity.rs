//! Frieze–Kannan weak regular partitions by energy increment, Tao's two-level
//! lemma on top of them, and a Szemerédi-style partition derived from it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certify::{
    check_weak_partition, count_irregular_pairs, CheckMode, CutMode, IrregularReport, EXHAUSTIVE_CAP,
};
use crate::error::{domain, Result};
use crate::graph::DenseGraph;
use crate::partition::{equitable_rebalance, mean_square_density, RegularityParams, VertexPartition};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakRegResult {
    pub partition: VertexPartition,
    pub rounds: usize,
    /// `(round, max |f_P|)` as measured before each refinement.
    pub defect_history: Vec<(usize, f64)>,
    /// `q(P)` after each round, starting with the initial partition.
    pub q_history: Vec<f64>,
    /// Block counts after the witness split of each round.
    pub split_sizes: Vec<usize>,
    /// Rebalance targets of each round.
    pub targets: Vec<usize>,
    /// The final partition passed exact verification.
    pub certified: bool,
}

/// Splits every block by membership in `a` and `b`, dropping empty cells.
fn witness_split(p: &VertexPartition, a: &[usize], b: &[usize]) -> Result<VertexPartition> {
    let n = p.n();
    let (mut in_a, mut in_b) = (vec![false; n], vec![false; n]);
    for &v in a {
        in_a[v] = true;
    }
    for &v in b {
        in_b[v] = true;
    }
    let mut cells: BTreeMap<(usize, bool, bool), Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        cells.entry((p.block_of(v), !in_a[v], !in_b[v])).or_default().push(v);
    }
    VertexPartition::new(n, cells.into_values().collect())
}

fn sub_seed(mode: CutMode, round: usize) -> CutMode {
    match mode {
        CutMode::Heuristic { seed } => CutMode::Heuristic { seed: rng::derive(seed, &[round as u64]) },
        CutMode::Auto { seed } => CutMode::Auto { seed: rng::derive(seed, &[round as u64]) },
        m => m,
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0,1)");
    }
    Ok(())
}

/// Weak ε-regular equitable partition from the trivial partition.
pub fn fk_partition(g: &DenseGraph, eps: f64, mode: CutMode) -> Result<WeakRegResult> {
    fk_from(g, VertexPartition::trivial(g.n()), eps, mode)
}

/// Energy-increment loop from `start`. Each round splits every block along the
/// witness of the largest defect and rebalances to the smallest target among
/// `k, 2k, 4k, …, ⌈16k/ε²⌉` that keeps a net gain of `ε²/2`.
pub fn fk_from(g: &DenseGraph, start: VertexPartition, eps: f64, mode: CutMode) -> Result<WeakRegResult> {
    check_eps(eps)?;
    let n = g.n();
    let mut p = start;
    let mut res = WeakRegResult {
        partition: p.clone(),
        rounds: 0,
        defect_history: Vec::new(),
        q_history: vec![mean_square_density(g, &p)],
        split_sizes: Vec::new(),
        targets: Vec::new(),
        certified: false,
    };
    let max_rounds = (2.0 / (eps * eps)).floor() as usize + 1;
    loop {
        let v = check_weak_partition(g, &p, eps, sub_seed(mode, res.rounds))?;
        res.defect_history.push((res.rounds, v.cut.value));
        if v.ok || res.rounds >= max_rounds {
            res.certified = v.certified;
            break;
        }
        let q0 = *res.q_history.last().expect("nonempty");
        let split = witness_split(&p, &v.cut.arg_a, &v.cut.arg_b)?;
        let k = split.k();
        let cap = ((16.0 * k as f64 / (eps * eps)).ceil() as usize).min(n);
        let mut t = k;
        let next = loop {
            let cand = equitable_rebalance(&split, t)?;
            if mean_square_density(g, &cand) >= q0 + eps * eps / 2.0 - 1e-12 {
                break cand;
            }
            if t >= cap {
                t = n;
                break VertexPartition::singletons(n);
            }
            t = (2 * t).min(cap);
        };
        res.split_sizes.push(k);
        res.targets.push(t);
        p = next;
        res.rounds += 1;
        res.q_history.push(mean_square_density(g, &p));
    }
    res.partition = p;
    Ok(res)
}

/// Like [`fk_from`] but without rebalancing, so the output refines `start`.
pub fn fk_refine(g: &DenseGraph, start: &VertexPartition, eps: f64, mode: CutMode) -> Result<WeakRegResult> {
    check_eps(eps)?;
    let mut p = start.clone();
    let mut res = WeakRegResult {
        partition: p.clone(),
        rounds: 0,
        defect_history: Vec::new(),
        q_history: vec![mean_square_density(g, &p)],
        split_sizes: Vec::new(),
        targets: Vec::new(),
        certified: false,
    };
    loop {
        let v = check_weak_partition(g, &p, eps, sub_seed(mode, res.rounds))?;
        res.defect_history.push((res.rounds, v.cut.value));
        if v.ok {
            res.certified = v.certified;
            break;
        }
        let split = witness_split(&p, &v.cut.arg_a, &v.cut.arg_b)?;
        if split.k() == p.k() {
            // A witness that splits nothing means the defect is not real.
            break;
        }
        res.split_sizes.push(split.k());
        res.targets.push(split.k());
        p = split;
        res.rounds += 1;
        res.q_history.push(mean_square_density(g, &p));
    }
    res.partition = p;
    Ok(res)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaoResult {
    pub p: VertexPartition,
    /// Refines `p`.
    pub q: VertexPartition,
    /// `|P|`.
    pub t: usize,
    /// `q(Q) − q(P)`.
    pub energy_gap: f64,
    pub rounds: usize,
    pub p_certified: bool,
    pub q_certified: bool,
}

/// Iterates weak regularity: `P` weak ε-regular, `Q` a weak `δ(|P|)`-regular
/// refinement; stops once `q(Q) ≤ q(P) + ε`, otherwise continues from `Q`.
pub fn tao_partition(
    g: &DenseGraph,
    eps: f64,
    s: usize,
    delta: &(dyn Fn(usize) -> f64 + Sync),
    mode: CutMode,
) -> Result<TaoResult> {
    check_eps(eps)?;
    if s == 0 || s > g.n() {
        return domain(format!("s must lie in 1..={}", g.n()));
    }
    let mut p = VertexPartition::equitable(g.n(), s)?;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let pr = fk_refine(g, &p, eps, sub_seed(mode, 2 * rounds))?;
        p = pr.partition;
        let t = p.k();
        let d = delta(t);
        if !(d > 0.0 && d < 1.0) {
            return domain(format!("delta({t}) = {d} is outside (0,1)"));
        }
        let qr = fk_refine(g, &p, d, sub_seed(mode, 2 * rounds + 1))?;
        let gap = mean_square_density(g, &qr.partition) - mean_square_density(g, &p);
        if gap <= eps || qr.partition.k() == p.k() {
            return Ok(TaoResult {
                t,
                energy_gap: gap,
                rounds,
                p_certified: pr.certified,
                q_certified: qr.certified,
                p,
                q: qr.partition,
            });
        }
        p = qr.partition;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzemerediResult {
    pub partition: VertexPartition,
    pub report: IrregularReport,
    /// `ηk²`, compared with the ordered irregular count.
    pub budget: f64,
    pub rounds: usize,
    pub tao_rounds: usize,
}

/// Blocks larger than the exhaustive cap are halved until they fit.
fn fit_blocks(p: &VertexPartition, cap: usize) -> Result<VertexPartition> {
    let mut out = Vec::new();
    for b in p.blocks() {
        let parts = b.len().div_ceil(cap);
        let (q, r) = (b.len() / parts, b.len() % parts);
        let mut start = 0;
        for i in 0..parts {
            let len = q + usize::from(i < r);
            out.push(b[start..start + len].to_vec());
            start += len;
        }
    }
    VertexPartition::new(p.n(), out)
}

/// Tao's lemma with `δ(t) = εδ/t`, then witness splitting of irregular pairs
/// until at most `ηk²` ordered pairs are irregular.
pub fn szemeredi_partition(
    g: &DenseGraph,
    params: &RegularityParams,
    mode: CheckMode,
    seed: u64,
) -> Result<SzemerediResult> {
    let (eps, delta, eta) = (params.eps, params.delta, params.eta);
    let tao = tao_partition(g, eps, 1, &|t| eps * delta / t as f64, CutMode::Auto { seed })?;
    let mut p = tao.q;
    if mode == CheckMode::Exact {
        p = fit_blocks(&p, EXHAUSTIVE_CAP)?;
    }
    let n = g.n();
    let mut rounds = 0;
    loop {
        let report = count_irregular_pairs(g, &p, eps, delta, mode.substream(&[rounds as u64]))?;
        let k = p.k();
        let budget = eta * (k * k) as f64;
        if report.count as f64 <= budget + 1e-9 || k == n {
            return Ok(SzemerediResult { partition: p, report, budget, rounds, tao_rounds: tao.rounds });
        }
        let mut cuts: Vec<Vec<usize>> = Vec::new();
        for &(i, j) in &report.pairs {
            let v = crate::certify::check_pair(
                g,
                p.block(i),
                p.block(j),
                crate::certify::PairSpec::band(eps, delta),
                mode.substream(&[rounds as u64, i as u64, j as u64]),
            )?;
            if let Some(w) = v.witness {
                cuts.extend([w.first.x, w.first.y, w.second.x, w.second.y]);
            }
        }
        let mut sig: Vec<Vec<bool>> = vec![Vec::with_capacity(cuts.len()); n];
        for c in &cuts {
            let mut mark = vec![false; n];
            for &v in c {
                mark[v] = true;
            }
            for v in 0..n {
                sig[v].push(mark[v]);
            }
        }
        let mut cells: BTreeMap<(usize, Vec<bool>), Vec<usize>> = BTreeMap::new();
        for (v, s) in sig.iter_mut().enumerate() {
            cells.entry((p.block_of(v), std::mem::take(s))).or_default().push(v);
        }
        let next = VertexPartition::new(n, cells.into_values().collect())?;
        p = if next.k() == p.k() { VertexPartition::singletons(n) } else { next };
        rounds += 1;
    }
}
