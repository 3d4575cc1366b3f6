//! Regularity checks for a single vertex-set pair.
//!
//! Two criteria are supported. `Band` asks that all sub-pair densities with
//! `|X'| ≥ δ|X|`, `|Y'| ≥ δ|Y|` lie in a closed band of width ε. `Deviation`
//! asks that each such density is within ε of `d(X, Y)`. Pairs may overlap;
//! for regularity purposes a sub-pair's density is `e(X',Y')` over the number
//! of ordered distinct-vertex pairs in `X' × Y'`, and sub-pairs with no such
//! pair are skipped.

use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{check_set, DenseGraph};
use crate::partition::VertexPartition;
use crate::rng;

/// Largest side the exhaustive checker enumerates.
pub const EXHAUSTIVE_CAP: usize = 18;

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    Band,
    Deviation,
}

/// How a check is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckMode {
    Exact,
    Sampled {
        trials: usize,
        seed: u64,
    },
    /// Exact when the smaller side fits the cap, sampled otherwise.
    Auto {
        trials: usize,
        seed: u64,
    },
}

impl CheckMode {
    fn resolve(self, small_side: usize) -> CheckMode {
        match self {
            CheckMode::Auto { trials, seed } if small_side > EXHAUSTIVE_CAP => CheckMode::Sampled { trials, seed },
            CheckMode::Auto { .. } => CheckMode::Exact,
            m => m,
        }
    }

    /// Same mode with the seed replaced by a derived stream id.
    pub fn substream(self, path: &[u64]) -> CheckMode {
        match self {
            CheckMode::Sampled { trials, seed } => CheckMode::Sampled { trials, seed: rng::derive(seed, path) },
            CheckMode::Auto { trials, seed } => CheckMode::Auto { trials, seed: rng::derive(seed, path) },
            m => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictMode {
    Exhaustive,
    Sampled { trials: usize },
    Spectral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubPair {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub density: f64,
}

/// Two sub-pairs whose densities break the criterion. For `Band` these are
/// the densest and sparsest sub-pairs; for `Deviation` the first is the
/// deviating sub-pair and the second the whole pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub first: SubPair,
    pub second: SubPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub regular: bool,
    pub witness: Option<Witness>,
    pub mode: VerdictMode,
    pub criterion: Criterion,
    pub eps: f64,
    pub delta: f64,
    /// Largest observed spread (band) or deviation from `d(X,Y)`.
    pub observed: f64,
}

impl PairVerdict {
    /// Regular and established by full enumeration.
    pub fn certified(&self) -> bool {
        self.regular && self.mode == VerdictMode::Exhaustive
    }
}

/// Smallest admissible subset size `max(1, ⌈δ·size⌉)`.
pub fn floor_count(delta: f64, size: usize) -> usize {
    ((delta * size as f64 - 1e-9).ceil().max(1.0) as usize).min(size.max(1))
}

/// `e(X,Y)` over ordered distinct pairs of `X × Y`; `None` when there are none.
pub fn pair_density(g: &DenseGraph, x: &[usize], y: &[usize]) -> Option<f64> {
    let my = g.mask(y);
    let overlap = x.iter().filter(|&&v| my.contains(v)).count();
    let denom = x.len() * y.len() - overlap;
    (denom > 0).then(|| g.e_mask(x, &my) as f64 / denom as f64)
}

/// Parameters of a single pair check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub eps: f64,
    pub delta: f64,
    pub criterion: Criterion,
}

impl PairSpec {
    pub fn band(eps: f64, delta: f64) -> Self {
        PairSpec { eps, delta, criterion: Criterion::Band }
    }

    /// Deviation form with the floor equal to ε.
    pub fn deviation(eps: f64) -> Self {
        PairSpec { eps, delta: eps, criterion: Criterion::Deviation }
    }
}

/// Band check by full enumeration; refuses sides above [`EXHAUSTIVE_CAP`].
pub fn check_pair_exhaustive(g: &DenseGraph, x: &[usize], y: &[usize], eps: f64, delta: f64) -> Result<PairVerdict> {
    check_pair(g, x, y, PairSpec::band(eps, delta), CheckMode::Exact)
}

/// One-sided band check by random and degree-guided candidates.
pub fn check_pair_sampled(
    g: &DenseGraph,
    x: &[usize],
    y: &[usize],
    eps: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<PairVerdict> {
    check_pair(g, x, y, PairSpec::band(eps, delta), CheckMode::Sampled { trials, seed })
}

pub fn check_pair(g: &DenseGraph, x: &[usize], y: &[usize], spec: PairSpec, mode: CheckMode) -> Result<PairVerdict> {
    check_set(g.n(), x)?;
    check_set(g.n(), y)?;
    if x.is_empty() || y.is_empty() {
        return domain("regularity of a pair with an empty side");
    }
    if spec.eps.is_nan() || spec.eps < 0.0 || !(0.0..=1.0).contains(&spec.delta) {
        return domain("eps must be nonnegative and delta in [0,1]");
    }
    match mode.resolve(x.len().min(y.len())) {
        CheckMode::Exact => {
            if x.len().min(y.len()) > EXHAUSTIVE_CAP {
                return Err(Error::Refused(format!(
                    "sides of size {} and {} exceed the exhaustive cap {EXHAUSTIVE_CAP}; use sampled mode",
                    x.len(),
                    y.len()
                )));
            }
            Ok(exhaustive(g, x, y, spec))
        }
        CheckMode::Sampled { trials, seed } => Ok(sampled(g, x, y, spec, trials.max(1), seed)),
        CheckMode::Auto { .. } => unreachable!("resolved above"),
    }
}

#[derive(Clone, Copy)]
struct Extreme {
    value: f64,
    mask: u32,
    a: usize,
    b: usize,
}

/// Per-`Y` contributions for one `X'` mask, split by membership in `X'`.
struct Classes {
    inside: Vec<(u32, usize)>,
    outside: Vec<(u32, usize)>,
}

fn classes(adj: &[u32], in_x: &[Option<usize>], mask: u32) -> Classes {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for (j, &a) in adj.iter().enumerate() {
        let c = (a & mask).count_ones();
        match in_x[j] {
            Some(i) if mask >> i & 1 == 1 => inside.push((c, j)),
            _ => outside.push((c, j)),
        }
    }
    // Descending count, ascending index.
    inside.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    outside.sort_unstable_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    Classes { inside, outside }
}

fn prefix(v: &[(u32, usize)], rev: bool) -> Vec<u64> {
    let mut out = Vec::with_capacity(v.len() + 1);
    out.push(0);
    let mut s = 0u64;
    for i in 0..v.len() {
        s += if rev { v[v.len() - 1 - i].0 } else { v[i].0 } as u64;
        out.push(s);
    }
    out
}

fn exhaustive(g: &DenseGraph, x0: &[usize], y0: &[usize], spec: PairSpec) -> PairVerdict {
    // Enumerate subsets of the smaller side; densities are symmetric.
    let swap = x0.len() > y0.len();
    let (x, y) = if swap { (y0, x0) } else { (x0, y0) };
    let fx = floor_count(spec.delta, x.len());
    let fy = floor_count(spec.delta, y.len());
    let xpos: std::collections::HashMap<usize, usize> = x.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<u32> = y
        .iter()
        .map(|&v| x.iter().enumerate().fold(0u32, |m, (i, &u)| m | (u32::from(g.has_edge(u, v)) << i)))
        .collect();
    let in_x: Vec<Option<usize>> = y.iter().map(|v| xpos.get(v).copied()).collect();

    let mut hi: Option<Extreme> = None;
    let mut lo: Option<Extreme> = None;
    let full: u32 = (1u32 << x.len()) - 1;
    for mask in 1..=full {
        let sx = mask.count_ones() as usize;
        if sx < fx {
            continue;
        }
        let cl = classes(&adj, &in_x, mask);
        let (ti, bi) = (prefix(&cl.inside, false), prefix(&cl.inside, true));
        let (to, bo) = (prefix(&cl.outside, false), prefix(&cl.outside, true));
        for a in 0..=cl.inside.len() {
            for b in 0..=cl.outside.len() {
                if a + b < fy {
                    continue;
                }
                let denom = sx * (a + b) - a;
                if denom == 0 {
                    continue;
                }
                let dmax = (ti[a] + to[b]) as f64 / denom as f64;
                let dmin = (bi[a] + bo[b]) as f64 / denom as f64;
                if hi.is_none_or(|h| dmax > h.value) {
                    hi = Some(Extreme { value: dmax, mask, a, b });
                }
                if lo.is_none_or(|l| dmin < l.value) {
                    lo = Some(Extreme { value: dmin, mask, a, b });
                }
            }
        }
    }

    let build = |e: Extreme, top: bool| -> SubPair {
        let cl = classes(&adj, &in_x, e.mask);
        let pick = |v: &[(u32, usize)], k: usize| -> Vec<usize> {
            let it: Box<dyn Iterator<Item = &(u32, usize)>> =
                if top { Box::new(v.iter()) } else { Box::new(v.iter().rev()) };
            it.take(k).map(|&(_, j)| y[j]).collect()
        };
        let mut ys = pick(&cl.inside, e.a);
        ys.extend(pick(&cl.outside, e.b));
        ys.sort_unstable();
        let xs: Vec<usize> = (0..x.len()).filter(|i| e.mask >> i & 1 == 1).map(|i| x[i]).collect();
        if swap {
            SubPair { x: ys, y: xs, density: e.value }
        } else {
            SubPair { x: xs, y: ys, density: e.value }
        }
    };

    let whole = || SubPair { x: x0.to_vec(), y: y0.to_vec(), density: pair_density(g, x0, y0).unwrap_or(0.0) };
    let (hi, lo) = match (hi, lo) {
        (Some(h), Some(l)) => (h, l),
        _ => {
            return PairVerdict {
                regular: true,
                witness: None,
                mode: VerdictMode::Exhaustive,
                criterion: spec.criterion,
                eps: spec.eps,
                delta: spec.delta,
                observed: 0.0,
            }
        }
    };
    let (observed, witness) = match spec.criterion {
        Criterion::Band => {
            let spread = hi.value - lo.value;
            (spread, (spread > spec.eps + TOL).then(|| Witness { first: build(hi, true), second: build(lo, false) }))
        }
        Criterion::Deviation => {
            let d0 = pair_density(g, x0, y0).unwrap_or(0.0);
            let (up, down) = (hi.value - d0, d0 - lo.value);
            let dev = up.max(down);
            let w = (dev > spec.eps + TOL).then(|| {
                let first = if up >= down { build(hi, true) } else { build(lo, false) };
                Witness { first, second: whole() }
            });
            (dev, w)
        }
    };
    PairVerdict {
        regular: witness.is_none(),
        witness,
        mode: VerdictMode::Exhaustive,
        criterion: spec.criterion,
        eps: spec.eps,
        delta: spec.delta,
        observed,
    }
}

/// Indices of `set` ordered by `score` (descending), ties by position.
fn order_by(set: &[usize], score: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut v: Vec<(usize, usize)> = set.iter().map(|&u| (score(u), u)).collect();
    v.sort_by(|p, q| q.0.cmp(&p.0).then(p.1.cmp(&q.1)));
    v.into_iter().map(|(_, u)| u).collect()
}

fn sampled(g: &DenseGraph, x: &[usize], y: &[usize], spec: PairSpec, trials: usize, seed: u64) -> PairVerdict {
    let fx = floor_count(spec.delta, x.len());
    let fy = floor_count(spec.delta, y.len());
    let d0 = pair_density(g, x, y).unwrap_or(0.0);
    let mut best_hi: Option<SubPair> = None;
    let mut best_lo: Option<SubPair> = None;
    let mut consider = |xs: Vec<usize>, ys: Vec<usize>| {
        if let Some(d) = pair_density(g, &xs, &ys) {
            if best_hi.as_ref().is_none_or(|h| d > h.density) {
                best_hi = Some(SubPair { x: xs.clone(), y: ys.clone(), density: d });
            }
            if best_lo.as_ref().is_none_or(|l| d < l.density) {
                best_lo = Some(SubPair { x: xs, y: ys, density: d });
            }
        }
    };
    let toward = |from: &[usize], to: &[usize]| {
        let m = g.mask(from);
        order_by(to, |v| m.and_count(g.row(v)))
    };
    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v
    };

    consider(x.to_vec(), y.to_vec());
    // Degree-guided candidates with a few alternating refinements.
    let by_deg = toward(y, x);
    for &top in &[true, false] {
        for &size in &[fx, x.len().div_ceil(2).max(fx)] {
            let mut xs: Vec<usize> = if top { by_deg[..size].to_vec() } else { by_deg[x.len() - size..].to_vec() };
            for _ in 0..3 {
                let oy = toward(&xs, y);
                let ys = if top { oy[..fy].to_vec() } else { oy[y.len() - fy..].to_vec() };
                consider(sorted(&xs), sorted(&ys));
                let ox = toward(&ys, x);
                xs = if top { ox[..size].to_vec() } else { ox[x.len() - size..].to_vec() };
            }
        }
    }
    let mut r = rng::stream(seed, &[rng::label("pair-sampled")]);
    for _ in 0..trials {
        let sx = r.gen_range(fx..=x.len());
        let xs: Vec<usize> = sample(&mut r, x.len(), sx).into_iter().map(|i| x[i]).collect();
        let oy = toward(&xs, y);
        let sy = r.gen_range(fy..=y.len());
        consider(sorted(&xs), sorted(&oy[..sy]));
        consider(sorted(&xs), sorted(&oy[y.len() - sy..]));
        let ys: Vec<usize> = sample(&mut r, y.len(), sy).into_iter().map(|i| y[i]).collect();
        consider(sorted(&xs), sorted(&ys));
    }

    let (hi, lo) = (best_hi.expect("whole pair considered"), best_lo.expect("whole pair considered"));
    let (observed, witness) = match spec.criterion {
        Criterion::Band => {
            let spread = hi.density - lo.density;
            (spread, (spread > spec.eps + TOL).then_some(Witness { first: hi, second: lo }))
        }
        Criterion::Deviation => {
            let (up, down) = (hi.density - d0, d0 - lo.density);
            let whole = SubPair { x: x.to_vec(), y: y.to_vec(), density: d0 };
            let w = (up.max(down) > spec.eps + TOL)
                .then_some(Witness { first: if up >= down { hi } else { lo }, second: whole });
            (up.max(down), w)
        }
    };
    PairVerdict {
        regular: witness.is_none(),
        witness,
        mode: VerdictMode::Sampled { trials },
        criterion: spec.criterion,
        eps: spec.eps,
        delta: spec.delta,
        observed,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrregularReport {
    /// Ordered block pairs `(i, j)`, `i ≠ j`, found irregular.
    pub count: usize,
    /// Unordered irregular pairs `i < j`.
    pub pairs: Vec<(usize, usize)>,
    /// Whether every verdict came from full enumeration.
    pub exhaustive: bool,
}

/// Irregular ordered block pairs of `p` under the band criterion.
pub fn count_irregular_pairs(
    g: &DenseGraph,
    p: &VertexPartition,
    eps: f64,
    delta: f64,
    mode: CheckMode,
) -> Result<IrregularReport> {
    let k = p.k();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let verdicts: Vec<PairVerdict> = pairs
        .par_iter()
        .map(|&(i, j)| {
            check_pair(g, p.block(i), p.block(j), PairSpec::band(eps, delta), mode.substream(&[i as u64, j as u64]))
        })
        .collect::<Result<_>>()?;
    let bad: Vec<(usize, usize)> = pairs.iter().zip(&verdicts).filter(|(_, v)| !v.regular).map(|(&ij, _)| ij).collect();
    Ok(IrregularReport {
        count: 2 * bad.len(),
        pairs: bad,
        exhaustive: verdicts.iter().all(|v| v.mode == VerdictMode::Exhaustive),
    })
}
