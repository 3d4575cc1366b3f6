use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cylinder_is_regular, CylinderPartition, CylinderVerdict};
use crate::certify::{check_pair, CheckMode, PairSpec, VerdictMode, EXHAUSTIVE_CAP};
use crate::error::{domain, Error, Result};
use crate::graph::DenseGraph;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlrConfig {
    pub eps: f64,
    /// Require the self-pairs `(W_i, W_i)` too.
    pub strong: bool,
    pub mode: CheckMode,
    /// Size floor as a fraction of `|V_i|`; `None` uses `ε^{k²ε⁻⁵}`.
    pub beta: Option<f64>,
    pub max_cylinders: usize,
    pub max_rounds: usize,
}

impl DlrConfig {
    pub fn new(eps: f64, mode: CheckMode) -> Self {
        DlrConfig { eps, strong: false, mode, beta: None, max_cylinders: 4096, max_rounds: 64 }
    }

    pub fn strong(mut self) -> Self {
        self.strong = true;
        self
    }
}

/// `ε^{k²ε⁻⁵}`; underflows to 0 for all but tiny `k` and large `ε`.
pub fn dlr_beta(eps: f64, k: usize) -> f64 {
    eps.powf((k * k) as f64 / eps.powi(5))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DlrResult {
    pub partition: CylinderPartition,
    pub verdict: CylinderVerdict,
    pub rounds: usize,
    pub beta: f64,
    /// Smallest admissible `|V_i(K)|` per coordinate.
    pub floors: Vec<usize>,
    /// Splits skipped because a piece would fall below its floor.
    pub refused_splits: usize,
    /// Irregular mass at most ε with every verdict exhaustive.
    pub certified: bool,
}

impl DlrResult {
    pub fn irregular_mass(&self) -> f64 {
        1.0 - self.verdict.regular_mass
    }
}

struct Violation {
    i: usize,
    j: usize,
    x: Vec<usize>,
    y: Vec<usize>,
}

/// First irregular pair of a cylinder with its deviating sub-pair.
fn find_violation(
    g: &DenseGraph,
    parts: &[Vec<usize>],
    eps: f64,
    strong: bool,
    mode: CheckMode,
) -> Result<(Option<Violation>, bool)> {
    let k = parts.len();
    let mut exhaustive = true;
    for i in 0..k {
        for j in i..k {
            if i == j && !strong {
                continue;
            }
            let v =
                check_pair(g, &parts[i], &parts[j], PairSpec::deviation(eps), mode.substream(&[i as u64, j as u64]))?;
            exhaustive &= v.mode == VerdictMode::Exhaustive;
            if !v.regular {
                let w = v.witness.expect("irregular verdicts carry a witness");
                return Ok((Some(Violation { i, j, x: w.first.x, y: w.first.y }), exhaustive));
            }
        }
    }
    Ok((None, exhaustive))
}

fn split_by(part: &[usize], cuts: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut cells: std::collections::BTreeMap<Vec<bool>, Vec<usize>> = Default::default();
    for &v in part {
        let key: Vec<bool> = cuts.iter().map(|c| !c.contains(&v)).collect();
        cells.entry(key).or_default().push(v);
    }
    cells.into_values().collect()
}

/// Splits a cylinder along a violation; `None` when a piece would be too small.
fn split_cylinder(parts: &[Vec<usize>], v: &Violation, floors: &[usize]) -> Option<Vec<Vec<Vec<usize>>>> {
    let mut per_coord: Vec<Vec<Vec<usize>>> = parts.iter().map(|p| vec![p.clone()]).collect();
    if v.i == v.j {
        per_coord[v.i] = split_by(&parts[v.i], &[&v.x, &v.y]);
    } else {
        per_coord[v.i] = split_by(&parts[v.i], &[&v.x]);
        per_coord[v.j] = split_by(&parts[v.j], &[&v.y]);
    }
    if per_coord.iter().zip(floors).any(|(ps, &f)| ps.iter().any(|p| p.len() < f)) {
        return None;
    }
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for ps in per_coord {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                ps.iter().map(move |p| {
                    let mut c = prefix.clone();
                    c.push(p.clone());
                    c
                })
            })
            .collect();
    }
    Some(out)
}

/// Cylinder partition of `V_1 × … × V_k` built by splitting irregular
/// cylinders along their witnesses until the irregular mass is at most ε.
pub fn dlr_partition(g: &DenseGraph, ground: Vec<Vec<usize>>, cfg: &DlrConfig) -> Result<DlrResult> {
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return domain("eps must lie in (0,1)");
    }
    let k = ground.len();
    let whole = CylinderPartition::whole(ground)?;
    if whole.ground().iter().flatten().any(|&v| v >= g.n()) {
        return domain("ground set vertex out of range");
    }
    if cfg.mode == CheckMode::Exact && whole.ground().iter().any(|v| v.len() > EXHAUSTIVE_CAP) {
        return Err(Error::Refused(format!("exact mode needs every part of size <= {EXHAUSTIVE_CAP}")));
    }
    let beta = cfg.beta.unwrap_or_else(|| dlr_beta(cfg.eps, k));
    let floors: Vec<usize> =
        whole.ground().iter().map(|v| ((beta * v.len() as f64 - 1e-9).ceil() as usize).max(1)).collect();
    let ground = whole.ground().to_vec();
    let mut cylinders = vec![ground.clone()];
    let mut frozen = vec![false];
    let mut refused = 0;
    let mut rounds = 0;
    loop {
        let evals: Vec<(Option<Violation>, bool)> = cylinders
            .par_iter()
            .enumerate()
            .map(|(c, parts)| {
                find_violation(g, parts, cfg.eps, cfg.strong, cfg.mode.substream(&[rounds as u64, c as u64]))
            })
            .collect::<Result<_>>()?;
        let partition = CylinderPartition::assemble(ground.clone(), cylinders.clone())?;
        let flags: Vec<bool> = evals.iter().map(|e| e.0.is_none()).collect();
        let regular_mass: f64 = (0..partition.len()).filter(|&c| flags[c]).map(|c| partition.density(c)).sum();
        let exhaustive = evals.iter().all(|e| e.1);
        let done = 1.0 - regular_mass <= cfg.eps + 1e-12;
        let mut next = Vec::with_capacity(cylinders.len());
        let mut next_frozen = Vec::with_capacity(cylinders.len());
        let mut changed = false;
        if !done && rounds < cfg.max_rounds {
            let mut room = cfg.max_cylinders.saturating_sub(cylinders.len());
            for ((parts, (viol, _)), &fz) in cylinders.iter().zip(&evals).zip(&frozen) {
                let pieces = match viol {
                    Some(v) if !fz => split_cylinder(parts, v, &floors),
                    _ => None,
                };
                match pieces {
                    Some(ps) if ps.len() > 1 && ps.len() - 1 <= room => {
                        room -= ps.len() - 1;
                        next_frozen.extend(std::iter::repeat_n(false, ps.len()));
                        next.extend(ps);
                        changed = true;
                    }
                    other => {
                        if viol.is_some() && !fz && other.is_none() {
                            refused += 1;
                        }
                        next_frozen.push(fz || (viol.is_some() && other.is_none()));
                        next.push(parts.clone());
                    }
                }
            }
        }
        if done || !changed {
            let verdict = CylinderVerdict { regular_mass, flags, strong: cfg.strong, exhaustive };
            return Ok(DlrResult {
                certified: done && exhaustive,
                partition,
                verdict,
                rounds,
                beta,
                floors,
                refused_splits: refused,
            });
        }
        cylinders = next;
        frozen = next_frozen;
        rounds += 1;
    }
}

/// `k` equal-size sets, one inside each of `k` equal chunks of `set`, forming
/// an ε-regular cylinder.
pub fn regular_cylinder(g: &DenseGraph, set: &[usize], k: usize, eps: f64, mode: CheckMode) -> Result<Vec<Vec<usize>>> {
    if k == 0 || set.len() < k {
        return domain(format!("need 1 <= k <= |V|, got k = {k}, |V| = {}", set.len()));
    }
    let chunk = set.len() / k;
    let ground: Vec<Vec<usize>> = (0..k).map(|i| set[i * chunk..(i + 1) * chunk].to_vec()).collect();
    let singles: Vec<Vec<usize>> = ground.iter().map(|c| vec![c[0]]).collect();
    if chunk == 1 {
        return Ok(singles);
    }
    let res = dlr_partition(g, ground, &DlrConfig::new(eps, mode))?;
    let mut order: Vec<usize> = (0..res.partition.len()).filter(|&c| res.verdict.flags[c]).collect();
    let min_size = |c: usize| res.partition.cylinders()[c].iter().map(Vec::len).min().unwrap_or(0);
    order.sort_by_key(|&c| (std::cmp::Reverse(min_size(c)), c));
    for c in order {
        let m = min_size(c);
        let parts: Vec<Vec<usize>> = res.partition.cylinders()[c].iter().map(|w| w[..m].to_vec()).collect();
        if cylinder_is_regular(g, &parts, eps, false, mode.substream(&[c as u64]))?.0 {
            return Ok(parts);
        }
    }
    Ok(singles)
}
