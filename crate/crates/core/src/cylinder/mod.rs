//! Cylinder partitions and the strong regularity pipeline built on them.

mod dlr;
mod removal;
mod selfreg;
mod strong;
mod tester;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{check_pair, CheckMode, PairSpec, VerdictMode};
use crate::error::{domain, Result};
use crate::graph::{check_set, Bitset, DenseGraph};

pub use dlr::{dlr_beta, dlr_partition, regular_cylinder, DlrConfig, DlrResult};
pub use removal::{induced_removal, RemovalConfig, RemovalOutcome, MAX_REMOVAL_PATTERN};
pub use selfreg::{
    degraded_regularity, ramsey_uniform_cylinder, self_regular_partition, self_regular_subset, RamseyConfig,
    RamseyCylinder, SelfRegularPartition, RAMSEY_CAP,
};
pub use strong::{
    reduced_partition, select_representatives, strong_cylinder_partition, Representatives, StrongConfig,
    StrongCylinderResult, StrongRound,
};
pub use tester::{induces, sampling_tester, TesterOutcome};

/// Partition of `V_1 × … × V_k` into cylinders `W_1 × … × W_k`, `W_i ⊆ V_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderPartition {
    ground: Vec<Vec<usize>>,
    cylinders: Vec<Vec<Vec<usize>>>,
}

impl CylinderPartition {
    /// Validates the ground sets, every part, pairwise disjointness of the
    /// cylinders and that their sizes add up to the whole product.
    pub fn new(ground: Vec<Vec<usize>>, cylinders: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let c = Self::assemble(ground, cylinders)?;
        let n = c.ground.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let masks: Vec<Vec<Bitset>> =
            c.cylinders.iter().map(|cyl| cyl.iter().map(|w| Bitset::from_set(n, w)).collect()).collect();
        for a in 0..masks.len() {
            for b in a + 1..masks.len() {
                let meet = masks[a].iter().zip(&masks[b]).all(|(x, y)| x.and_count(y.words()) > 0);
                if meet {
                    return domain(format!("cylinders {a} and {b} intersect"));
                }
            }
        }
        if c.total_size() != c.product_size() {
            return domain("cylinders do not cover the product");
        }
        Ok(c)
    }

    /// Shape checks only; the caller guarantees the cylinders partition the product.
    pub(crate) fn assemble(ground: Vec<Vec<usize>>, cylinders: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut ground = ground;
        if ground.is_empty() {
            return domain("a cylinder partition needs k >= 1");
        }
        let n = ground.iter().flatten().copied().max().map_or(0, |m| m + 1);
        for v in &mut ground {
            if v.is_empty() {
                return domain("empty ground set");
            }
            v.sort_unstable();
        }
        check_set(n, &ground.concat())?;
        let mut cylinders = cylinders;
        for (ci, cyl) in cylinders.iter_mut().enumerate() {
            if cyl.len() != ground.len() {
                return domain(format!("cylinder {ci} has {} parts, expected {}", cyl.len(), ground.len()));
            }
            for (i, w) in cyl.iter_mut().enumerate() {
                w.sort_unstable();
                if w.is_empty() {
                    return domain(format!("cylinder {ci} has an empty part {i}"));
                }
                if w.windows(2).any(|p| p[0] == p[1]) || w.iter().any(|v| ground[i].binary_search(v).is_err()) {
                    return domain(format!("part {i} of cylinder {ci} is not a subset of V_{i}"));
                }
            }
        }
        Ok(CylinderPartition { ground, cylinders })
    }

    /// The single cylinder `V_1 × … × V_k`.
    pub fn whole(ground: Vec<Vec<usize>>) -> Result<Self> {
        let cyl = ground.clone();
        Self::assemble(ground, vec![cyl])
    }

    pub fn k(&self) -> usize {
        self.ground.len()
    }

    pub fn ground(&self) -> &[Vec<usize>] {
        &self.ground
    }

    pub fn cylinders(&self) -> &[Vec<Vec<usize>>] {
        &self.cylinders
    }

    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    fn size_of(parts: &[Vec<usize>]) -> BigUint {
        parts.iter().fold(BigUint::from(1u32), |acc, w| acc * BigUint::from(w.len()))
    }

    /// `∏ |W_i|` of cylinder `c`.
    pub fn cylinder_size(&self, c: usize) -> BigUint {
        Self::size_of(&self.cylinders[c])
    }

    pub fn product_size(&self) -> BigUint {
        Self::size_of(&self.ground)
    }

    pub fn total_size(&self) -> BigUint {
        (0..self.len()).map(|c| self.cylinder_size(c)).sum()
    }

    /// `d(K) = ∏|W_i| / ∏|V_i|`.
    pub fn density(&self, c: usize) -> f64 {
        self.cylinders[c].iter().zip(&self.ground).map(|(w, v)| w.len() as f64 / v.len() as f64).product()
    }

    /// `Σ_K d(K) = 1`, checked in integer arithmetic.
    pub fn mass_is_one(&self) -> bool {
        self.total_size() == self.product_size()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderVerdict {
    /// `Σ d(K)` over cylinders found regular.
    pub regular_mass: f64,
    pub flags: Vec<bool>,
    /// Self-pairs `(W_i, W_i)` were required too.
    pub strong: bool,
    /// Every verdict came from exhaustive enumeration.
    pub exhaustive: bool,
}

/// Whether all pairs `(W_i, W_j)`, `i < j` (and `i = j` when `strong`) are
/// ε-regular in the deviation sense.
pub fn cylinder_is_regular(
    g: &DenseGraph,
    parts: &[Vec<usize>],
    eps: f64,
    strong: bool,
    mode: CheckMode,
) -> Result<(bool, bool)> {
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
                return Ok((false, exhaustive));
            }
        }
    }
    Ok((true, exhaustive))
}

pub fn cylinder_verdict(
    g: &DenseGraph,
    k: &CylinderPartition,
    eps: f64,
    strong: bool,
    mode: CheckMode,
) -> Result<CylinderVerdict> {
    let res: Vec<(bool, bool)> = k
        .cylinders()
        .par_iter()
        .enumerate()
        .map(|(c, parts)| cylinder_is_regular(g, parts, eps, strong, mode.substream(&[c as u64])))
        .collect::<Result<_>>()?;
    let regular_mass = res.iter().enumerate().filter(|(_, r)| r.0).map(|(c, _)| k.density(c)).sum();
    Ok(CylinderVerdict {
        regular_mass,
        flags: res.iter().map(|r| r.0).collect(),
        strong,
        exhaustive: res.iter().all(|r| r.1),
    })
}
