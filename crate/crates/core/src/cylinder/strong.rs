use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dlr::{dlr_partition, DlrConfig};
use super::selfreg::{self_regular_partition, RamseyConfig};
use super::{cylinder_is_regular, CylinderPartition};
use crate::certify::CheckMode;
use crate::error::{domain, Error, Result};
use crate::graph::DenseGraph;
use crate::partition::{equitable_rebalance, mean_square_density, VertexPartition};

/// Cylinders of one ground tuple with their regularity flags and whether every
/// verdict was exhaustive.
type TupleCylinders = (Vec<Vec<Vec<usize>>>, Vec<bool>, bool);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongConfig {
    /// Energy gap at which the loop stops.
    pub eps: f64,
    /// Initial number of parts.
    pub s: usize,
    pub mode: CheckMode,
    pub ramsey_cap: usize,
    /// Largest number of block tuples handed to the cylinder step per round.
    pub max_tuples: usize,
    pub max_cylinders: usize,
    pub dlr_rounds: usize,
}

impl StrongConfig {
    pub fn new(eps: f64, s: usize, mode: CheckMode) -> Self {
        StrongConfig {
            eps,
            s,
            mode,
            ramsey_cap: super::RAMSEY_CAP,
            max_tuples: 1 << 16,
            max_cylinders: 4096,
            dlr_rounds: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongRound {
    pub k: usize,
    pub f_k: f64,
    pub tuples: usize,
    pub cylinders: usize,
    pub q_blocks: usize,
    pub q_p: f64,
    pub q_q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongCylinderResult {
    pub p: VertexPartition,
    pub k: CylinderPartition,
    pub q: VertexPartition,
    pub rounds: usize,
    pub f_k: f64,
    /// Mass of cylinders found strongly `f(k)`-regular.
    pub regular_mass: f64,
    pub exhaustive: bool,
    /// The loop did not settle and singleton partitions were returned.
    pub escaped: bool,
    pub history: Vec<StrongRound>,
}

impl StrongCylinderResult {
    pub fn q_p(&self, g: &DenseGraph) -> f64 {
        mean_square_density(g, &self.p)
    }

    pub fn q_q(&self, g: &DenseGraph) -> f64 {
        mean_square_density(g, &self.q)
    }
}

/// Common refinement of every `V_i(K)` and its complement in `V_i`. The
/// ground sets must cover `0..n`.
pub fn reduced_partition(k: &CylinderPartition) -> Result<VertexPartition> {
    let n: usize = k.ground().iter().map(Vec::len).sum();
    let words = k.len().div_ceil(64).max(1);
    let mut sig = vec![vec![0u64; words]; n];
    let mut coord = vec![usize::MAX; n];
    for (i, v) in k.ground().iter().enumerate() {
        for &x in v {
            if x >= n {
                return domain("ground sets must cover 0..n");
            }
            coord[x] = i;
        }
    }
    for (c, cyl) in k.cylinders().iter().enumerate() {
        for w in cyl {
            for &x in w {
                sig[x][c >> 6] |= 1 << (c & 63);
            }
        }
    }
    let mut cells: BTreeMap<(usize, Vec<u64>), Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        cells.entry((coord[x], std::mem::take(&mut sig[x]))).or_default().push(x);
    }
    Ok(VertexPartition::new(n, cells.into_values().collect())?.canonical())
}

fn singleton_result(
    g: &DenseGraph,
    rounds: usize,
    f: &(dyn Fn(usize) -> f64 + Sync),
    history: Vec<StrongRound>,
) -> Result<StrongCylinderResult> {
    let n = g.n();
    let p = VertexPartition::singletons(n);
    let k = CylinderPartition::whole(p.blocks().to_vec())?;
    Ok(StrongCylinderResult {
        q: p.clone(),
        p,
        k,
        rounds,
        f_k: f(n),
        regular_mass: 1.0,
        exhaustive: true,
        escaped: true,
        history,
    })
}

/// Equitable `P`, a strongly `f(|P|)`-regular cylinder partition of its
/// blocks and `Q = Q(K)` with `q(Q) ≤ q(P) + ε`.
pub fn strong_cylinder_partition(
    g: &DenseGraph,
    cfg: &StrongConfig,
    f: &(dyn Fn(usize) -> f64 + Sync),
) -> Result<StrongCylinderResult> {
    let n = g.n();
    let eps = cfg.eps;
    if !(eps > 0.0 && eps < 1.0 / 3.0) {
        return domain("eps must lie in (0, 1/3)");
    }
    if cfg.s == 0 || cfg.s > n {
        return domain(format!("s must lie in 1..={n}"));
    }
    let max_rounds = (2.0 / eps).floor() as usize + 1;
    let mut p = VertexPartition::equitable(n, cfg.s)?;
    let mut history = Vec::new();
    for round in 1..=max_rounds {
        let kk = p.k();
        let fk = f(kk);
        if !(fk > 0.0 && fk <= eps + 1e-15) {
            return domain(format!("f({kk}) = {fk} is outside (0, eps]"));
        }
        let mode = cfg.mode.substream(&[round as u64]);
        let self_eps = fk.min(0.49);
        let pieces: Vec<Vec<Vec<usize>>> = p
            .blocks()
            .par_iter()
            .enumerate()
            .map(|(i, b)| {
                let rc = RamseyConfig { cap: cfg.ramsey_cap, mode: mode.substream(&[0, i as u64]) };
                self_regular_partition(g, b, self_eps, &rc).map(|r| r.blocks)
            })
            .collect::<Result<_>>()?;
        let tuples =
            pieces.iter().try_fold(1usize, |acc, ps| acc.checked_mul(ps.len()).filter(|&t| t <= cfg.max_tuples));
        let Some(tuples) = tuples else {
            return singleton_result(g, round, f, history);
        };
        let dims: Vec<usize> = pieces.iter().map(Vec::len).collect();
        let dlr = DlrConfig {
            eps: fk,
            strong: true,
            mode,
            beta: None,
            max_cylinders: cfg.max_cylinders,
            max_rounds: cfg.dlr_rounds,
        };
        let parts: Vec<TupleCylinders> = (0..tuples)
            .into_par_iter()
            .map(|t| {
                let mut rem = t;
                let mut ground = Vec::with_capacity(kk);
                for (i, &d) in dims.iter().enumerate().rev() {
                    ground.push((i, pieces[i][rem % d].clone()));
                    rem /= d;
                }
                ground.sort_by_key(|x| x.0);
                let ground: Vec<Vec<usize>> = ground.into_iter().map(|x| x.1).collect();
                let cfg = DlrConfig { mode: dlr.mode.substream(&[1, t as u64]), ..dlr };
                let r = dlr_partition(g, ground, &cfg)?;
                Ok((r.partition.cylinders().to_vec(), r.verdict.flags, r.verdict.exhaustive))
            })
            .collect::<Result<_>>()?;
        let mut cylinders = Vec::new();
        let mut flags = Vec::new();
        let mut exhaustive = true;
        for (c, fl, ex) in parts {
            cylinders.extend(c);
            flags.extend(fl);
            exhaustive &= ex;
        }
        let k = CylinderPartition::assemble(p.blocks().to_vec(), cylinders)?;
        let q = reduced_partition(&k)?;
        let (q_p, q_q) = (mean_square_density(g, &p), mean_square_density(g, &q));
        let regular_mass = (0..k.len()).filter(|&c| flags[c]).map(|c| k.density(c)).sum();
        history.push(StrongRound { k: kk, f_k: fk, tuples, cylinders: k.len(), q_blocks: q.k(), q_p, q_q });
        if q_q <= q_p + eps {
            return Ok(StrongCylinderResult {
                p,
                k,
                q,
                rounds: round,
                f_k: fk,
                regular_mass,
                exhaustive,
                escaped: false,
                history,
            });
        }
        let target = ((4.0 * q.k() as f64 / eps).ceil() as usize).min(n);
        p = equitable_rebalance(&q, target)?;
    }
    singleton_result(g, max_rounds, f, history)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Representatives {
    pub parts: Vec<Vec<usize>>,
    pub cylinder: usize,
    pub density: f64,
    /// Ordered pairs `i ≠ j` with `|d(W_i,W_j) − d(V_i,V_j)| > ε`.
    pub far_pairs: usize,
    /// `|V_i| / (4|Q(K)|)`, the size floor applied to each `W_i`.
    pub size_floors: Vec<f64>,
}

/// A cylinder of `k` that is strongly `f_k`-regular, ε-close to the ground
/// partition and has every part at least `|V_i|/(4|Q(K)|)`, searched in order
/// of decreasing mass.
pub fn select_representatives(
    g: &DenseGraph,
    k: &CylinderPartition,
    eps: f64,
    f_k: f64,
    mode: CheckMode,
) -> Result<Representatives> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0,1)");
    }
    let kk = k.k();
    let s = reduced_partition(k)?.k() as f64;
    let ground = k.ground();
    let size_floors: Vec<f64> = ground.iter().map(|v| v.len() as f64 / (4.0 * s)).collect();
    let mut vd = vec![0.0; kk * kk];
    for i in 0..kk {
        for j in 0..kk {
            if i != j {
                vd[i * kk + j] = g.density(&ground[i], &ground[j])?;
            }
        }
    }
    let mut order: Vec<usize> = (0..k.len()).collect();
    order.sort_by(|&a, &b| k.density(b).total_cmp(&k.density(a)).then(a.cmp(&b)));
    let (mut small, mut far, mut irregular) = (0usize, 0usize, 0usize);
    for c in order {
        let parts = &k.cylinders()[c];
        if parts.iter().zip(&size_floors).any(|(w, &fl)| (w.len() as f64) < fl - 1e-9) {
            small += 1;
            continue;
        }
        let mut far_pairs = 0;
        for i in 0..kk {
            for j in 0..kk {
                if i != j && (g.density(&parts[i], &parts[j])? - vd[i * kk + j]).abs() > eps {
                    far_pairs += 1;
                }
            }
        }
        if far_pairs as f64 > eps * (kk * kk) as f64 {
            far += 1;
            continue;
        }
        if !cylinder_is_regular(g, parts, f_k, true, mode.substream(&[c as u64]))?.0 {
            irregular += 1;
            continue;
        }
        return Ok(Representatives {
            parts: parts.clone(),
            cylinder: c,
            density: k.density(c),
            far_pairs,
            size_floors,
        });
    }
    Err(Error::Verification(format!(
        "no cylinder qualifies: {irregular} not strongly regular, {far} not close, {small} too small"
    )))
}
