use serde::{Deserialize, Serialize};

use super::gowers::{gowers_graph, GowersInstance, GowersParams, RHO};
use crate::error::{domain, Result};

/// Schedule entries of the first row that are evaluated numerically.
pub const ROW_ENTRIES: usize = 8;

/// Desk limits for instantiating the strong lower-bound construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongLbCaps {
    pub levels: usize,
    pub m1: usize,
    pub cap_a: usize,
    pub p_max: f64,
    pub block: usize,
}

impl Default for StrongLbCaps {
    fn default() -> Self {
        StrongLbCaps { levels: 3, m1: 16, cap_a: 4, p_max: 0.25, block: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub j: usize,
    /// `log2 m_{ℓ,j}`, absent once it leaves the `f64` range.
    pub log2_m: Option<f64>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub ell: usize,
    /// `log2 M_ℓ`; infinite when not representable.
    pub log2_big_m: f64,
    /// `ε_ℓ = f(M_ℓ)`.
    pub eps_ell: f64,
    /// `h_ℓ = ε⁵ / (2^70 ε_ℓ)`.
    pub h: f64,
    /// `2^30 ε^-4 ε_ℓ`.
    pub p_floor: f64,
    /// `p_{ℓ,h_ℓ-1}`, which also carries the `2^10 ε` term.
    pub p_special: f64,
    /// Leading `p_{ℓ,j}` with their part counts; only filled for `ℓ = 1`.
    pub entries: Vec<ScheduleEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongLbSchedule {
    pub eps: f64,
    pub f1: f64,
    /// `t = 2^-20 ε^-1`.
    pub t: f64,
    /// `log2 m_1` with `m_1 = 2^10 ε^-2`.
    pub log2_m1: f64,
    /// `ε < 2^-100`, the range in which the lower bound is claimed.
    pub eps_in_range: bool,
    pub rows: Vec<ScheduleRow>,
}

fn next_log2(l: f64) -> Option<f64> {
    let e = 0.9 * l + RHO.log2();
    if e > 1000.0 {
        return None;
    }
    Some(l + 2f64.powf(e).floor())
}

/// Evaluates the parameter schedule. `f` receives `log2` of a part count
/// (infinite when the count is beyond `f64`) and must be decreasing.
pub fn strong_lb_schedule(eps: f64, f: &dyn Fn(f64) -> f64) -> Result<StrongLbSchedule> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain("eps must lie in (0,1)");
    }
    let f1 = f(0.0);
    let limit = 2f64.powi(-100) * eps.powi(6);
    if !(f1 > 0.0 && f1 <= limit) {
        return domain(format!("f(1) = {f1:e} must lie in (0, 2^-100 eps^6 = {limit:e}]"));
    }
    let t = 2f64.powi(-20) / eps;
    let log2_m1 = 10.0 - 2.0 * eps.log2();
    let row_count = (t.ceil() as usize).clamp(1, 3);
    let mut rows = Vec::with_capacity(row_count);
    let mut log2_big_m = 0.0;
    for ell in 1..=row_count {
        let eps_ell = f(log2_big_m);
        let h = eps.powi(5) / (2f64.powi(70) * eps_ell);
        let p_floor = 2f64.powi(30) * eps.powi(-4) * eps_ell;
        let p_special = p_floor.max(2f64.powi(10) * eps);
        let mut entries = Vec::new();
        let mut l = Some(if ell == 1 { log2_m1 } else { log2_big_m });
        if !log2_big_m.is_finite() {
            l = None;
        }
        let mut row_log2 = Vec::new();
        for j in 1..=(h.max(1.0).min(ROW_ENTRIES as f64) as usize) {
            let mpow = l.map_or(0.0, |l| 2f64.powf(-l / 10.0));
            let special = (j as f64 - (h - 1.0)).abs() < 0.5;
            let p = if special { mpow.max(p_special) } else { mpow.max(p_floor) };
            if ell == 1 {
                entries.push(ScheduleEntry { j, log2_m: l, p });
            }
            row_log2.push(l);
            l = l.and_then(next_log2);
        }
        rows.push(ScheduleRow { ell, log2_big_m, eps_ell, h, p_floor, p_special, entries });
        // M_{ℓ+1} = m_{ℓ, h_ℓ - 2}; only known when h_ℓ is small enough to walk.
        let idx = h - 2.0;
        log2_big_m = if idx >= 1.0 && (idx as usize) <= row_log2.len() {
            row_log2[idx as usize - 1].unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
    }
    Ok(StrongLbSchedule { eps, f1, t, log2_m1, eps_in_range: eps < 2f64.powi(-100), rows })
}

/// Evaluates the schedule, then builds a capped instance of the nested
/// construction whose level probabilities are the first-row `p_{1,j}` clipped
/// to `caps.p_max`.
pub fn strong_lb_graph(
    eps: f64,
    f: &dyn Fn(f64) -> f64,
    caps: &StrongLbCaps,
    seed: u64,
) -> Result<(StrongLbSchedule, GowersInstance)> {
    let schedule = strong_lb_schedule(eps, f)?;
    if caps.levels == 0 || !(caps.p_max > 0.0 && caps.p_max <= 1.0) {
        return domain("caps need levels >= 1 and p_max in (0,1]");
    }
    let row = &schedule.rows[0];
    let mut notes = vec![format!("m_1 = 2^{} replaced by cap {}", schedule.log2_m1, caps.m1)];
    let p: Vec<f64> = (0..caps.levels - 1)
        .map(|i| {
            let raw = row.entries.get(i).map_or(row.p_floor, |e| e.p);
            if raw > caps.p_max {
                notes.push(format!("p_{} = {raw:e} clipped to {}", i + 1, caps.p_max));
            }
            raw.min(caps.p_max)
        })
        .collect();
    let params = GowersParams {
        m1: caps.m1,
        rho: RHO,
        s: caps.levels,
        p,
        seed,
        cap_a: caps.cap_a,
        block: caps.block,
        mu: None,
        samples: 4096,
    };
    let mut inst = gowers_graph(&params)?;
    notes.append(&mut inst.deviations);
    inst.deviations = notes;
    Ok((schedule, inst))
}
