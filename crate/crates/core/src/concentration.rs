//! Tail bounds, random-graph samplers, discrepancy thresholds and the tower
//! bookkeeping functions.

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::DenseGraph;
use crate::rng::{self, Rng};

/// `e^{−2a²/n}`, the binomial upper-tail bound.
pub fn chernoff_tail(a: f64, n: usize) -> Result<f64> {
    if n == 0 || a.is_nan() || a < 0.0 {
        return domain("chernoff_tail needs n >= 1 and a >= 0");
    }
    Ok((-2.0 * a * a / n as f64).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiscrepancyKind {
    /// `u1·u2·(u1 ln(em/u1) + u2 ln(eM/u2))` for the bipartite family.
    BipartiteF { u1: usize, u2: usize, m: usize, big_m: usize },
    /// `2·u1·u2²·ln(ne/u2)` for disjoint sets, `u1 ≤ u2`.
    GnpG { u1: usize, u2: usize, n: usize },
    /// `½·u³·ln(ne/u)` for edges inside one set.
    GnpSelfG { u: usize, n: usize },
    /// `u1·u2²·ln(ne/u2)` for sets that may overlap, checked at `5√h`.
    GnpH { u1: usize, u2: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyThreshold {
    pub kind: DiscrepancyKind,
    pub value: f64,
}

impl DiscrepancyThreshold {
    /// Allowed absolute deviation: `√value`, or `5√value` for the overlapping form.
    pub fn bound(&self) -> f64 {
        match self.kind {
            DiscrepancyKind::GnpH { .. } => 5.0 * self.value.sqrt(),
            _ => self.value.sqrt(),
        }
    }

    pub fn holds(&self, deviation: f64) -> bool {
        deviation.abs() <= self.bound() + 1e-9
    }
}

fn ln_ratio(universe: usize, u: usize) -> Result<f64> {
    if u == 0 || universe == 0 {
        return domain("subset and universe sizes must be positive");
    }
    if u > universe {
        return domain(format!("subset size {u} exceeds universe size {universe}"));
    }
    Ok((std::f64::consts::E * universe as f64 / u as f64).ln())
}

pub fn discrepancy_threshold(kind: DiscrepancyKind) -> Result<DiscrepancyThreshold> {
    let value = match kind {
        DiscrepancyKind::BipartiteF { u1, u2, m, big_m } => {
            let (a, b) = (u1 as f64, u2 as f64);
            a * b * (a * ln_ratio(m, u1)? + b * ln_ratio(big_m, u2)?)
        }
        DiscrepancyKind::GnpG { u1, u2, n } | DiscrepancyKind::GnpH { u1, u2, n } => {
            if u1 > u2 {
                return domain("expects u1 <= u2");
            }
            if u1 == 0 {
                return domain("subset sizes must be positive");
            }
            let c = if matches!(kind, DiscrepancyKind::GnpG { .. }) { 2.0 } else { 1.0 };
            c * u1 as f64 * (u2 as f64).powi(2) * ln_ratio(n, u2)?
        }
        DiscrepancyKind::GnpSelfG { u, n } => 0.5 * (u as f64).powi(3) * ln_ratio(n, u)?,
    };
    Ok(DiscrepancyThreshold { kind, value })
}

/// `G(n, p)`: each pair independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<DenseGraph> {
    if !(0.0..=1.0).contains(&p) {
        return domain("p must lie in [0,1]");
    }
    let mut r = rng::stream(seed, &[rng::label("gnp")]);
    DenseGraph::from_fn(n, |_, _| r.gen_bool(p))
}

/// Uniform `size`-subset of `0..universe`, sorted.
pub fn random_subset(r: &mut Rng, universe: usize, size: usize) -> Vec<usize> {
    let mut v = sample(r, universe, size).into_vec();
    v.sort_unstable();
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub samples: usize,
    /// Disjoint pairs violating `|e − p·u1·u2| ≤ √g`.
    pub disjoint_violations: usize,
    /// Single sets violating `|e(U) − p·C(u,2)| ≤ √g(u)`.
    pub self_violations: usize,
    /// Arbitrary pairs violating `|e − p·(u1·u2 − |U1∩U2|)| ≤ 5√h`.
    pub overlap_violations: usize,
    /// Largest observed deviation divided by its bound, over all checks.
    pub worst_ratio: f64,
}

impl UniformityReport {
    pub fn violations(&self) -> usize {
        self.disjoint_violations + self.self_violations + self.overlap_violations
    }
}

/// Samples random subsets and tests the three `G(n,p)` discrepancy bounds.
pub fn check_uniformity(g: &DenseGraph, p: f64, samples: usize, seed: u64) -> Result<UniformityReport> {
    let n = g.n();
    let mut r = rng::stream(seed, &[rng::label("uniformity")]);
    let mut rep = UniformityReport {
        samples,
        disjoint_violations: 0,
        self_violations: 0,
        overlap_violations: 0,
        worst_ratio: 0.0,
    };
    let note = |rep: &mut UniformityReport, dev: f64, t: &DiscrepancyThreshold| {
        let b = t.bound();
        if b > 0.0 {
            rep.worst_ratio = rep.worst_ratio.max(dev.abs() / b);
        }
        !t.holds(dev)
    };
    for _ in 0..samples {
        // Disjoint pair from a random split of a random subset.
        if n >= 2 {
            let total = r.gen_range(2..=n);
            let mut both = sample(&mut r, n, total).into_vec();
            let cut = r.gen_range(1..total);
            let u2: Vec<usize> = both.split_off(cut);
            let u1 = both;
            let (a, b) = if u1.len() <= u2.len() { (&u1, &u2) } else { (&u2, &u1) };
            let t = discrepancy_threshold(DiscrepancyKind::GnpG { u1: a.len(), u2: b.len(), n })?;
            let dev = g.e(a, b) as f64 - p * (a.len() * b.len()) as f64;
            if note(&mut rep, dev, &t) {
                rep.disjoint_violations += 1;
            }
        }
        // Single set.
        let u = r.gen_range(1..=n);
        let s = random_subset(&mut r, n, u);
        let t = discrepancy_threshold(DiscrepancyKind::GnpSelfG { u, n })?;
        let dev = (g.e(&s, &s) / 2) as f64 - p * (u * (u - 1) / 2) as f64;
        if note(&mut rep, dev, &t) {
            rep.self_violations += 1;
        }
        // Two independent sets, possibly overlapping.
        let (s1, s2) = (r.gen_range(1..=n), r.gen_range(1..=n));
        let a = random_subset(&mut r, n, s1.min(s2));
        let b = random_subset(&mut r, n, s1.max(s2));
        let t = discrepancy_threshold(DiscrepancyKind::GnpH { u1: a.len(), u2: b.len(), n })?;
        // Loops are never edges, so shared vertices drop out of the mean.
        let shared = a.iter().filter(|v| b.binary_search(v).is_ok()).count();
        let dev = g.e(&a, &b) as f64 - p * (a.len() * b.len() - shared) as f64;
        if note(&mut rep, dev, &t) {
            rep.overlap_violations += 1;
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub sigma: f64,
    /// `(1/2 − μ)(1 − σ²) > τ/2 + 2(1 − τ)α(1 − α)`.
    pub hypothesis: bool,
    pub qualifying: usize,
    pub needed: f64,
    pub verdict: bool,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Counts the partitions `(A_i, B_i)` of `[M]` with `min(a_i, b_i) > α‖λ‖₁`.
/// Each partition is given by the membership vector of `A_i`.
pub fn balance_check(family: &[Vec<bool>], lambda: &[f64], tau: f64, alpha: f64, mu: f64) -> Result<BalanceReport> {
    if lambda.iter().any(|&x| x < 0.0) {
        return domain("lambda must be nonnegative");
    }
    let l1: f64 = lambda.iter().sum();
    if l1 <= 0.0 {
        return domain("lambda must not be all zero");
    }
    if family.iter().any(|row| row.len() != lambda.len()) {
        return domain("every partition must cover the coordinates of lambda");
    }
    let sigma = lambda.iter().map(|x| x * x).sum::<f64>().sqrt() / l1;
    let hypothesis = (0.5 - mu) * (1.0 - sigma * sigma) > tau / 2.0 + 2.0 * (1.0 - tau) * alpha * (1.0 - alpha);
    let mut a = Vec::with_capacity(family.len());
    let mut b = Vec::with_capacity(family.len());
    for row in family {
        let ai: f64 = row.iter().zip(lambda).filter(|(&m, _)| m).map(|(_, &x)| x).sum();
        a.push(ai);
        b.push(l1 - ai);
    }
    let qualifying = a.iter().zip(&b).filter(|(&x, &y)| x.min(y) > alpha * l1).count();
    let needed = tau * family.len() as f64;
    Ok(BalanceReport { sigma, hypothesis, qualifying, needed, verdict: qualifying as f64 >= needed - 1e-9, a, b })
}

/// Value of a tower, exact when it can be materialized.
#[derive(Clone, Debug, PartialEq)]
pub enum TowerValue {
    Exact(BigUint),
    /// Too large to materialize: a tower of `height` twos over `top`.
    Height {
        height: usize,
        top: BigUint,
    },
}

/// Largest exponent we materialize with big integers.
const MAX_BITS: u64 = 1 << 20;

fn pow2(e: &BigUint) -> Option<BigUint> {
    let e: u64 = e.try_into().ok().filter(|&e: &u64| e <= MAX_BITS)?;
    Some(BigUint::from(1u8) << e)
}

/// `t_0(x) = x`, `t_{i+1}(x) = 2^{t_i(x)}` in floating point; infinite on overflow.
pub fn tower(i: usize, x: f64) -> f64 {
    let mut v = x;
    for _ in 0..i {
        v = v.exp2();
        if v.is_infinite() {
            return f64::INFINITY;
        }
    }
    v
}

/// `T(1) = 2`, `T(n) = 2^{T(n−1)}`.
pub fn tower_int(n: usize) -> TowerValue {
    assert!(n >= 1, "tower_int is defined for n >= 1");
    let mut v = BigUint::from(2u8);
    for level in 2..=n {
        match pow2(&v) {
            Some(next) => v = next,
            None => return TowerValue::Height { height: n - level + 1, top: v },
        }
    }
    TowerValue::Exact(v)
}

/// `W(1) = 2`, `W(n) = T(W(n−1))`.
pub fn wowzer(n: usize) -> TowerValue {
    assert!(n >= 1, "wowzer is defined for n >= 1");
    let mut w = BigUint::from(2u8);
    for _ in 2..=n {
        let height: usize = match (&w).try_into() {
            Ok(h) if h <= 64 => h,
            _ => return TowerValue::Height { height: usize::MAX, top: w },
        };
        match tower_int(height) {
            TowerValue::Exact(v) => w = v,
            other => return other,
        }
    }
    TowerValue::Exact(w)
}

/// `log* x`: 0 for `x ≤ 1`, else `1 + log*(log₂ x)`.
pub fn iterated_log(x: f64) -> u32 {
    let mut v = x;
    let mut k = 0;
    while v > 1.0 {
        v = v.log2();
        k += 1;
    }
    k
}

/// `log*` of a big integer, taking the first logarithm from the bit length.
pub fn iterated_log_big(x: &BigUint) -> u32 {
    let bits = x.bits();
    if bits <= 1000 {
        let f: f64 = x.to_string().parse().unwrap_or(f64::INFINITY);
        return iterated_log(f);
    }
    // log2 x lies in [bits − 1, bits); exact for powers of two.
    let is_pow2 = x.count_ones() == 1;
    let l = if is_pow2 { (bits - 1) as f64 } else { (bits - 1) as f64 + 0.5 };
    1 + iterated_log(l)
}
