//! Randomized pair regularization and the regular approximation built on a
//! Tao partition.

use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::cutnorm::CUT_EXACT_CAP;
use crate::certify::{cut_norm_exact, cut_norm_heuristic, CutMode};
use crate::edits::EditSet;
use crate::error::{domain, Error, Result};
use crate::graph::{check_set, DenseGraph, Matrix};
use crate::partition::VertexPartition;
use crate::rng;
use crate::weak_regularity::{fk_refine, tao_partition};

pub const PAIR_ATTEMPTS: usize = 64;
pub const PAIR_SAMPLES: usize = 4096;

/// Decreasing `g : N → (0,1)` with a printable description.
#[derive(Clone)]
pub struct GFunction {
    pub description: String,
    f: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl GFunction {
    pub fn new(description: impl Into<String>, f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        GFunction { description: description.into(), f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("g(t) = {c}"), move |_| c)
    }

    pub fn eval(&self, t: usize) -> Result<f64> {
        let v = (self.f)(t);
        if !(v > 0.0 && v < 1.0) {
            return domain(format!("g({t}) = {v} is outside (0,1)"));
        }
        Ok(v)
    }

    /// `δ(t) = min(g(t)³/(32t²), ε/2)`.
    pub fn delta(&self, t: usize, eps: f64) -> Result<f64> {
        let g = self.eval(t)?;
        Ok((g.powi(3) / (32.0 * (t * t) as f64)).min(eps / 2.0))
    }
}

impl fmt::Debug for GFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GFunction").field("description", &self.description).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizeOptions {
    /// Accept `|B| ≤ 8δ⁻²`. The sampled discrepancy event is then reported
    /// but not required, since its bound is only reachable above that size.
    pub relaxed_size: bool,
    /// Verify weak δ-regularity of the sub-partitions before editing.
    pub verify_weak: Option<CutMode>,
    pub attempts: usize,
    pub samples: usize,
}

impl Default for RegularizeOptions {
    fn default() -> Self {
        RegularizeOptions { relaxed_size: false, verify_weak: None, attempts: PAIR_ATTEMPTS, samples: PAIR_SAMPLES }
    }
}

impl RegularizeOptions {
    pub fn relaxed() -> Self {
        RegularizeOptions { relaxed_size: true, ..Self::default() }
    }
}

/// One randomized draw and its three success events.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptOutcome {
    pub additions: Vec<(usize, usize)>,
    pub deletions: Vec<(usize, usize)>,
    pub density_before: f64,
    pub density_after: f64,
    /// `(δ + (q(𝒜,ℬ) − q(A,B))^{1/2})|A||B|`.
    pub edit_bound: f64,
    /// Largest sampled `|e(A',B') − η|A'||B'||`.
    pub max_discrepancy: f64,
    /// `2δ|A||B|`.
    pub discrepancy_bound: f64,
    pub density_ok: bool,
    pub edits_ok: bool,
    pub discrepancy_ok: bool,
}

impl AttemptOutcome {
    pub fn success(&self) -> bool {
        self.density_ok && self.edits_ok && self.discrepancy_ok
    }

    pub fn edit_count(&self) -> usize {
        self.additions.len() + self.deletions.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRegularization {
    pub edits: EditSet,
    pub attempts: usize,
    pub outcome: AttemptOutcome,
    /// Result of the weak-regularity precheck when one was requested.
    pub weak_verified: Option<bool>,
}

/// Adjacency between `a` and `b` as one bit row per member of `a`.
struct Local {
    rows: Vec<Vec<u64>>,
    words: usize,
}

impl Local {
    fn new(g: &DenseGraph, a: &[usize], b: &[usize]) -> Self {
        let words = b.len().div_ceil(64).max(1);
        let rows = a
            .iter()
            .map(|&u| {
                let mut r = vec![0u64; words];
                for (j, &v) in b.iter().enumerate() {
                    if g.has_edge(u, v) {
                        r[j >> 6] |= 1 << (j & 63);
                    }
                }
                r
            })
            .collect();
        Local { rows, words }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j >> 6] >> (j & 63) & 1 == 1
    }

    fn flip(&mut self, i: usize, j: usize) {
        self.rows[i][j >> 6] ^= 1 << (j & 63);
    }

    fn count(&self, ai: &[usize], bmask: &[u64]) -> usize {
        ai.iter()
            .map(|&i| self.rows[i].iter().zip(bmask).map(|(x, y)| (x & y).count_ones() as usize).sum::<usize>())
            .sum()
    }

    fn mask(&self, bj: &[usize]) -> Vec<u64> {
        let mut m = vec![0u64; self.words];
        for &j in bj {
            m[j >> 6] |= 1 << (j & 63);
        }
        m
    }
}

/// Index blocks of `a` induced by a partition given as vertex lists.
fn local_blocks(side: &[usize], parts: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut pos = std::collections::HashMap::with_capacity(side.len());
    for (i, &v) in side.iter().enumerate() {
        pos.insert(v, i);
    }
    let mut seen = 0;
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        if p.is_empty() {
            return domain("empty block in a pair sub-partition");
        }
        let mut idx = Vec::with_capacity(p.len());
        for v in p {
            match pos.get(v) {
                Some(&i) => idx.push(i),
                None => return domain(format!("vertex {v} of a sub-partition lies outside its side")),
            }
        }
        seen += idx.len();
        out.push(idx);
    }
    if seen != side.len() {
        return domain("sub-partition does not cover its side");
    }
    Ok(out)
}

/// Weak δ-regularity of `(𝒜, ℬ)` for the pair: the largest
/// `|Σ|A_i∩S||B_j∩T|d(A_i,B_j) − e(S,T)|` against `δ|A||B|`.
pub fn pair_weak_defect(
    g: &DenseGraph,
    a: &[usize],
    b: &[usize],
    pa: &[Vec<usize>],
    pb: &[Vec<usize>],
    mode: CutMode,
) -> Result<(f64, bool)> {
    let la = local_blocks(a, pa)?;
    let lb = local_blocks(b, pb)?;
    let loc = Local::new(g, a, b);
    let mut m = Matrix::zeros(a.len(), b.len());
    for ai in &la {
        for bj in &lb {
            let d = loc.count(ai, &loc.mask(bj)) as f64 / (ai.len() * bj.len()) as f64;
            for &i in ai {
                for &j in bj {
                    m.set(i, j, f64::from(u8::from(loc.get(i, j))) - d);
                }
            }
        }
    }
    let exact = a.len().min(b.len()) <= CUT_EXACT_CAP;
    let r = match mode {
        CutMode::Exact => cut_norm_exact(&m)?,
        CutMode::Auto { .. } if exact => cut_norm_exact(&m)?,
        CutMode::Auto { seed } | CutMode::Heuristic { seed } => cut_norm_heuristic(&m, seed),
    };
    Ok((r.value, r.exact))
}

fn validate_pair(g: &DenseGraph, a: &[usize], b: &[usize], delta: f64, relaxed: bool) -> Result<()> {
    check_set(g.n(), a)?;
    check_set(g.n(), b)?;
    if a.is_empty() || b.is_empty() {
        return domain("pair sides must be nonempty");
    }
    let mb = g.mask(b);
    if a.iter().any(|&v| mb.contains(v)) {
        return domain("pair sides must be disjoint");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return domain("delta must lie in (0,1)");
    }
    let small = a.len().min(b.len()) as f64;
    if !relaxed && small <= 8.0 / (delta * delta) {
        return domain(format!("smaller side {small} must exceed 8/delta^2 = {:.2}", 8.0 / (delta * delta)));
    }
    Ok(())
}

/// One draw of the rewiring: inside each `(A_i, B_j)` edges are deleted with
/// probability `α/d(A_i,B_j)` when `α ≥ 0` and non-edges added with
/// probability `−α/(1−d(A_i,B_j))` otherwise, where `α = d(A_i,B_j) − d(A,B)`.
#[allow(clippy::too_many_arguments)]
pub fn regularize_attempt(
    g: &DenseGraph,
    a: &[usize],
    b: &[usize],
    pa: &[Vec<usize>],
    pb: &[Vec<usize>],
    delta: f64,
    samples: usize,
    r: &mut rng::Rng,
) -> Result<AttemptOutcome> {
    let la = local_blocks(a, pa)?;
    let lb = local_blocks(b, pb)?;
    let mut loc = Local::new(g, a, b);
    let size = (a.len() * b.len()) as f64;
    let all_a: Vec<usize> = (0..a.len()).collect();
    let all_b = loc.mask(&(0..b.len()).collect::<Vec<_>>());
    let eta = loc.count(&all_a, &all_b) as f64 / size;
    let (mut additions, mut deletions) = (Vec::new(), Vec::new());
    let mut flips = Vec::new();
    let mut q_sub = 0.0;
    for ai in &la {
        for bj in &lb {
            let cells = (ai.len() * bj.len()) as f64;
            let d = loc.count(ai, &loc.mask(bj)) as f64 / cells;
            q_sub += d * d * cells / size;
            let alpha = d - eta;
            for &i in ai {
                for &j in bj {
                    let edge = loc.get(i, j);
                    let flip = if alpha >= 0.0 {
                        edge && d > 0.0 && r.gen::<f64>() < alpha / d
                    } else {
                        !edge && r.gen::<f64>() < -alpha / (1.0 - d)
                    };
                    if flip {
                        flips.push((i, j));
                        if edge {
                            deletions.push((a[i], b[j]));
                        } else {
                            additions.push((a[i], b[j]));
                        }
                    }
                }
            }
        }
    }
    for (i, j) in flips {
        loc.flip(i, j);
    }
    let density_after = loc.count(&all_a, &all_b) as f64 / size;
    let edit_bound = (delta + (q_sub - eta * eta).max(0.0).sqrt()) * size;
    let discrepancy_bound = 2.0 * delta * size;
    let disc = |ai: &[usize], bj: &[usize], loc: &Local| -> f64 {
        (loc.count(ai, &loc.mask(bj)) as f64 - eta * (ai.len() * bj.len()) as f64).abs()
    };
    let mut max_discrepancy: f64 = 0.0;
    for ai in &la {
        for bj in &lb {
            max_discrepancy = max_discrepancy.max(disc(ai, bj, &loc));
        }
    }
    for _ in 0..samples {
        let (pa_, pb_) = (r.gen::<f64>(), r.gen::<f64>());
        let sa: Vec<usize> = (0..a.len()).filter(|_| r.gen::<f64>() < pa_).collect();
        let sb: Vec<usize> = (0..b.len()).filter(|_| r.gen::<f64>() < pb_).collect();
        max_discrepancy = max_discrepancy.max(disc(&sa, &sb, &loc));
    }
    let edits = (additions.len() + deletions.len()) as f64;
    Ok(AttemptOutcome {
        density_before: eta,
        density_after,
        edit_bound,
        max_discrepancy,
        discrepancy_bound,
        density_ok: (density_after - eta).abs() <= delta + 1e-12,
        edits_ok: edits <= edit_bound + 1e-9,
        discrepancy_ok: max_discrepancy <= discrepancy_bound + 1e-9,
        additions,
        deletions,
    })
}

/// Rewires the pair `(A, B)` towards uniform density, redrawing until the
/// density, edit-count and sampled discrepancy events all hold.
#[allow(clippy::too_many_arguments)]
pub fn regularize_pair(
    g: &DenseGraph,
    a: &[usize],
    b: &[usize],
    pa: &[Vec<usize>],
    pb: &[Vec<usize>],
    delta: f64,
    seed: u64,
    opts: &RegularizeOptions,
) -> Result<PairRegularization> {
    validate_pair(g, a, b, delta, opts.relaxed_size)?;
    let weak_verified = match opts.verify_weak {
        Some(mode) => {
            let (value, _) = pair_weak_defect(g, a, b, pa, pb, mode)?;
            Some(value <= delta * (a.len() * b.len()) as f64 + 1e-9)
        }
        None => None,
    };
    let mut last = None;
    for attempt in 0..opts.attempts {
        let mut r = rng::stream(seed, &[rng::label("regularize"), attempt as u64]);
        let out = regularize_attempt(g, a, b, pa, pb, delta, opts.samples, &mut r)?;
        let accepted = if opts.relaxed_size { out.density_ok && out.edits_ok } else { out.success() };
        if accepted {
            let mut edits = EditSet::new();
            edits.record("pair", &out.additions, &out.deletions);
            return Ok(PairRegularization {
                edits: edits.finish()?,
                attempts: attempt + 1,
                outcome: out,
                weak_verified,
            });
        }
        last = Some(out);
    }
    let last = last.expect("at least one attempt");
    Err(Error::RetryExhausted {
        attempts: opts.attempts,
        detail: format!(
            "density {:.4} -> {:.4}, edits {} (bound {:.1}), discrepancy {:.1} (bound {:.1})",
            last.density_before,
            last.density_after,
            last.edit_count(),
            last.edit_bound,
            last.max_discrepancy,
            last.discrepancy_bound
        ),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxMode {
    /// Tao partition at `ε_0 = (ε/2)²`; when the pair-size precondition cannot
    /// hold the singleton partition is returned without edits.
    Faithful,
    /// `P` equitable into `s` parts, `Q` its weak `δ(s)`-regular refinement,
    /// and the pair-size precondition relaxed.
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub i: usize,
    pub j: usize,
    pub edits: usize,
    pub attempts: usize,
    pub density_before: f64,
    pub density_after: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxResult {
    pub edits: EditSet,
    pub partition: VertexPartition,
    pub refinement: Option<VertexPartition>,
    pub mode: ApproxMode,
    pub eps0: f64,
    pub delta: f64,
    /// The singleton partition was returned because `n` is below the size
    /// the construction needs.
    pub escaped: bool,
    pub pairs: Vec<PairSummary>,
}

/// Edits at most `εn²` pairs so that every pair of blocks of the returned
/// partition is close to uniform between the blocks.
pub fn regular_approximation(
    g: &DenseGraph,
    eps: f64,
    s: usize,
    gfn: &GFunction,
    seed: u64,
    mode: ApproxMode,
) -> Result<ApproxResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0,1)");
    }
    let n = g.n();
    if s == 0 || s > n {
        return domain(format!("s must lie in 1..={n}"));
    }
    let eps0 = (eps / 2.0).powi(2);
    let cut = CutMode::Auto { seed: rng::derive(seed, &[rng::label("approx-cut")]) };
    let escape = |delta: f64| ApproxResult {
        edits: EditSet::new(),
        partition: VertexPartition::singletons(n),
        refinement: None,
        mode,
        eps0,
        delta,
        escaped: true,
        pairs: Vec::new(),
    };
    let (p, q, delta, opts) = match mode {
        ApproxMode::Faithful => {
            let ds = gfn.delta(s, eps)?;
            if n as f64 <= 16.0 * s as f64 / (ds * ds) {
                return Ok(escape(ds));
            }
            let dfn = |t: usize| gfn.delta(t, eps).unwrap_or(f64::NAN);
            let tao = tao_partition(g, eps0, s, &dfn, cut)?;
            let dt = gfn.delta(tao.t, eps)?;
            let smallest = tao.p.sizes().into_iter().min().unwrap_or(0) as f64;
            if smallest <= 8.0 / (dt * dt) {
                return Ok(escape(dt));
            }
            (tao.p, tao.q, dt, RegularizeOptions::default())
        }
        ApproxMode::Desk => {
            let p = VertexPartition::equitable(n, s)?;
            let ds = gfn.delta(s, eps)?;
            let q = fk_refine(g, &p, ds, cut)?.partition;
            (p, q, ds, RegularizeOptions::relaxed())
        }
    };
    let k = p.k();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let sub = |i: usize| -> Vec<Vec<usize>> {
        let mut parts: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &v in p.block(i) {
            parts.entry(q.block_of(v)).or_default().push(v);
        }
        parts.into_values().collect()
    };
    let results: Vec<PairRegularization> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = if p.block(i).len() >= p.block(j).len() { (i, j) } else { (j, i) };
            let pseed = rng::derive(seed, &[rng::label("pair"), i as u64, j as u64]);
            regularize_pair(g, p.block(a), p.block(b), &sub(a), &sub(b), delta, pseed, &opts).map_err(|e| match e {
                Error::RetryExhausted { attempts, detail } => {
                    Error::RetryExhausted { attempts, detail: format!("pair ({i},{j}): {detail}") }
                }
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    let mut edits = EditSet::new();
    let mut summaries = Vec::with_capacity(pairs.len());
    for (&(i, j), r) in pairs.iter().zip(&results) {
        edits.record(format!("pair {i} {j}"), &r.edits.additions, &r.edits.deletions);
        summaries.push(PairSummary {
            i,
            j,
            edits: r.edits.count(),
            attempts: r.attempts,
            density_before: r.outcome.density_before,
            density_after: r.outcome.density_after,
        });
    }
    Ok(ApproxResult {
        edits: edits.finish()?,
        partition: p,
        refinement: Some(q),
        mode,
        eps0,
        delta,
        escaped: false,
        pairs: summaries,
    })
}
