use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::concentration::{discrepancy_threshold, random_subset, DiscrepancyKind};
use crate::error::{domain, Error, Result};
use crate::rng;

pub const FAMILY_RETRIES: usize = 32;

/// Rows of the bipartite graph `B(m, M)`: row `i` is the membership vector of
/// `A_i ⊂ [M]`, a set of size `M/2`; `B_i` is its complement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFamily {
    pub m: usize,
    pub big_m: usize,
    pub mu: f64,
    pub rows: Vec<Vec<bool>>,
    pub report: FamilyReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub attempts: usize,
    /// Largest number of rows on which two columns agree.
    pub max_agreement: usize,
    /// `(1/2 + μ)m`; agreement must stay strictly below it.
    pub agreement_bound: f64,
    pub agreement_ok: bool,
    /// The agreement property is only required when `m ≥ 2μ⁻² ln M`.
    pub agreement_required: bool,
    /// Largest common-member or common-nonmember count of two rows.
    pub max_common: usize,
    /// `(1/4 + M^{-1/4})M`; common counts must stay strictly below it.
    pub common_bound: f64,
    pub common_ok: bool,
    pub discrepancy_samples: usize,
    pub discrepancy_violations: usize,
}

impl FamilyReport {
    /// All enforced properties hold.
    pub fn ok(&self) -> bool {
        (self.agreement_ok || !self.agreement_required) && self.common_ok && self.discrepancy_violations == 0
    }
}

impl PartitionFamily {
    /// Indices in `A_i`.
    pub fn first(&self, i: usize) -> Vec<usize> {
        (0..self.big_m).filter(|&j| self.rows[i][j]).collect()
    }
}

fn evaluate(rows: &[Vec<bool>], big_m: usize, mu: f64, samples: usize, r: &mut rng::Rng) -> Result<FamilyReport> {
    let m = rows.len();
    let mut max_agreement = 0;
    for j in 0..big_m {
        for j2 in j + 1..big_m {
            let agree = rows.iter().filter(|row| row[j] == row[j2]).count();
            max_agreement = max_agreement.max(agree);
        }
    }
    let mut max_common = 0;
    for i in 0..m {
        for i2 in i + 1..m {
            let both = (0..big_m).filter(|&j| rows[i][j] && rows[i2][j]).count();
            let neither = (0..big_m).filter(|&j| !rows[i][j] && !rows[i2][j]).count();
            max_common = max_common.max(both).max(neither);
        }
    }
    let agreement_bound = (0.5 + mu) * m as f64;
    let common_bound = (0.25 + (big_m as f64).powf(-0.25)) * big_m as f64;
    let mut violations = 0;
    for _ in 0..samples {
        let s1 = r.gen_range(1..=m);
        let u1 = random_subset(r, m, s1);
        let s2 = r.gen_range(1..=big_m);
        let u2 = random_subset(r, big_m, s2);
        let e: usize = u1.iter().map(|&i| u2.iter().filter(|&&j| rows[i][j]).count()).sum();
        let t = discrepancy_threshold(DiscrepancyKind::BipartiteF { u1: u1.len(), u2: u2.len(), m, big_m })?;
        if !t.holds(e as f64 - 0.5 * (u1.len() * u2.len()) as f64) {
            violations += 1;
        }
    }
    Ok(FamilyReport {
        attempts: 0,
        max_agreement,
        agreement_bound,
        agreement_ok: m < 2 || big_m < 2 || (max_agreement as f64) < agreement_bound,
        agreement_required: m as f64 >= 2.0 / (mu * mu) * (big_m as f64).ln(),
        max_common,
        common_bound,
        common_ok: m < 2 || (max_common as f64) < common_bound,
        discrepancy_samples: samples,
        discrepancy_violations: violations,
    })
}

/// Samples `m` uniform `M/2`-subsets of `[M]` and retries until the pairwise
/// agreement and common-neighbourhood properties hold and sampled subset
/// discrepancies stay within `√f`. The agreement property is enforced only when
/// `m ≥ 2μ⁻² ln M`, the range in which it can hold; otherwise it is reported.
pub fn partition_family(m: usize, big_m: usize, mu: f64, seed: u64) -> Result<PartitionFamily> {
    partition_family_with(m, big_m, mu, seed, 4096)
}

pub fn partition_family_with(m: usize, big_m: usize, mu: f64, seed: u64, samples: usize) -> Result<PartitionFamily> {
    if m == 0 || big_m < 2 || !big_m.is_multiple_of(2) {
        return domain("partition_family needs m >= 1 and an even M >= 2");
    }
    if !(mu > 0.0 && mu < 0.5) {
        return domain("mu must lie in (0, 1/2)");
    }
    let mut last = None;
    for attempt in 0..FAMILY_RETRIES {
        let mut r = rng::stream(seed, &[rng::label("family"), attempt as u64]);
        let rows: Vec<Vec<bool>> = (0..m)
            .map(|_| {
                let mut row = vec![false; big_m];
                for j in random_subset(&mut r, big_m, big_m / 2) {
                    row[j] = true;
                }
                row
            })
            .collect();
        let mut report = evaluate(&rows, big_m, mu, samples, &mut r)?;
        report.attempts = attempt + 1;
        if report.ok() {
            return Ok(PartitionFamily { m, big_m, mu, rows, report });
        }
        last = Some(report);
    }
    Err(Error::RetryExhausted {
        attempts: FAMILY_RETRIES,
        detail: format!("last family report: {:?}", last.expect("at least one attempt")),
    })
}
