use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::partition_family;
use crate::concentration::{discrepancy_threshold, gnp, random_subset, DiscrepancyKind};
use crate::error::{domain, Result};
use crate::graph::{Bitset, DenseGraph};
use crate::partition::{mean_square_density, VertexPartition};
use crate::rng;

pub const GOWERS_RETRIES: usize = 8;
/// `ρ = 2^-20`.
pub const RHO: f64 = 1.0 / 1_048_576.0;
/// Largest vertex count the generator will materialize.
pub const MAX_VERTICES: usize = 1 << 15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GowersParams {
    pub m1: usize,
    pub rho: f64,
    /// Number of partitions `P_1..P_s`; random graphs exist on `P_1..P_{s-1}`.
    pub s: usize,
    /// `p_1..p_{s-1}`.
    pub p: Vec<f64>,
    pub seed: u64,
    /// Used for `a_i` whenever `2^{⌊ρ m_i^{9/10}⌋}` is below 2 or above the cap.
    pub cap_a: usize,
    /// Vertices per block of the finest partition.
    pub block: usize,
    /// Family parameter; defaults to `2ρ^{1/2}`.
    pub mu: Option<f64>,
    /// Random subset pairs per sampled discrepancy check.
    pub samples: usize,
}

impl GowersParams {
    pub fn desk(m1: usize, s: usize, p: f64, cap_a: usize, seed: u64) -> Self {
        GowersParams {
            m1,
            rho: RHO,
            s,
            p: vec![p; s.saturating_sub(1)],
            seed,
            cap_a,
            block: 1,
            mu: None,
            samples: 4096,
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or(2.0 * self.rho.sqrt())
    }
}

/// `X^1_Y` for one ordered edge `(X, Y)` of `G_i`, as offsets of the
/// `P_{i+1}`-blocks of `X`; `X^2_Y` is the complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSplit {
    pub x: usize,
    pub y: usize,
    pub first: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GowersLevel {
    pub m: usize,
    pub a: usize,
    pub p: f64,
    /// Edges `(X, Y)`, `X < Y`, of `G_i`.
    pub edges: Vec<(usize, usize)>,
    /// Both orientations of every edge, sorted by `(x, y)`.
    pub splits: Vec<LevelSplit>,
}

impl GowersLevel {
    pub fn graph(&self) -> DenseGraph {
        DenseGraph::from_edges(self.m, &self.edges).expect("level edges are valid")
    }

    pub fn split(&self, x: usize, y: usize) -> Option<&LevelSplit> {
        self.splits.binary_search_by(|s| (s.x, s.y).cmp(&(x, y))).ok().map(|i| &self.splits[i])
    }

    /// Offsets forming `X^d_Y`.
    pub fn offsets(&self, x: usize, y: usize, d: usize) -> Vec<usize> {
        let s = self.split(x, y).expect("split exists for every edge");
        if d == 1 {
            s.first.clone()
        } else {
            (0..self.a).filter(|o| s.first.binary_search(o).is_err()).collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub m: usize,
    pub p: f64,
    /// `m^{3/4}`.
    pub spread: f64,
    pub degree_dev: f64,
    pub codegree_dev: f64,
    pub fresh_edges: usize,
    pub fresh_required: f64,
    /// `max d_G(v, U(X))` over `v ∉ X`.
    pub u_density: f64,
    /// `max d_G(v, Y^d_X)` over `v ∈ X^{3-d}_Y` and fresh edges.
    pub split_density: f64,
    /// `max |N(X) ∩ N_{G^i}(X)| / |N(X)|`.
    pub overlap: f64,
    pub discrepancy_samples: usize,
    pub discrepancy_violations: usize,
    pub planted_complete: bool,
    pub q_before: f64,
    pub q_after: f64,
    /// `2^-5 p_i`.
    pub gain_required: f64,
    pub degree_ok: bool,
    pub codegree_ok: bool,
    pub fresh_ok: bool,
    pub u_ok: bool,
    pub split_ok: bool,
    pub overlap_ok: bool,
    pub discrepancy_ok: bool,
    pub energy_ok: bool,
}

impl LevelDiagnostics {
    /// Edge-distribution battery for this level, energy excluded.
    pub fn battery_ok(&self) -> bool {
        self.degree_ok
            && self.codegree_ok
            && self.fresh_ok
            && self.u_ok
            && self.split_ok
            && self.overlap_ok
            && self.discrepancy_ok
            && self.planted_complete
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GowersReport {
    /// `3 Σ p_i`.
    pub nu: f64,
    /// `ν ≤ 1/2`, the hypothesis under which the battery holds with probability 1/2.
    pub nu_hypothesis: bool,
    pub levels: Vec<LevelDiagnostics>,
    pub battery_passed: bool,
    pub energy_passed: bool,
}

#[derive(Clone, Debug)]
pub struct GowersInstance {
    pub params: GowersParams,
    pub n: usize,
    pub graph: DenseGraph,
    /// `P_1..P_s`, blocks are index intervals.
    pub partitions: Vec<VertexPartition>,
    /// `G_1..G_{s-1}` with their splits.
    pub levels: Vec<GowersLevel>,
    pub m: Vec<usize>,
    pub a: Vec<usize>,
    /// Every place where desk caps replaced a formula value.
    pub deviations: Vec<String>,
    pub attempts: usize,
    pub report: GowersReport,
}

impl GowersInstance {
    /// Vertices of `X^d_Y` for the level-`i` edge `(X, Y)` (0-based level).
    pub fn half(&self, i: usize, x: usize, y: usize, d: usize) -> Vec<usize> {
        let lv = &self.levels[i];
        let big = self.n / self.m[i];
        let small = self.n / self.m[i + 1];
        let mut out = Vec::with_capacity(big / 2);
        for o in lv.offsets(x, y, d) {
            let start = x * big + o * small;
            out.extend(start..start + small);
        }
        out
    }

    /// Vertices of block `x` of `P_i`.
    pub fn block(&self, i: usize, x: usize) -> std::ops::Range<usize> {
        let b = self.n / self.m[i];
        x * b..(x + 1) * b
    }
}

/// `m_i` and `a_i` with the desk cap applied; returns the deviations.
fn level_sizes(params: &GowersParams) -> Result<(Vec<usize>, Vec<usize>, Vec<String>)> {
    let mut m = vec![params.m1];
    let mut a = Vec::new();
    let mut dev = Vec::new();
    for i in 0..params.s - 1 {
        let mi = m[i];
        let e = (params.rho * (mi as f64).powf(0.9)).floor();
        let formula = if e < 62.0 { Some(1usize << e as u32) } else { None };
        let ai = match formula {
            Some(f) if f >= 2 && f <= params.cap_a => f,
            _ => {
                dev.push(format!("a_{} = 2^{} replaced by cap {}", i + 1, e, params.cap_a));
                params.cap_a
            }
        };
        let next = mi
            .checked_mul(ai)
            .filter(|&x| x.saturating_mul(params.block) <= MAX_VERTICES)
            .ok_or_else(|| crate::error::Error::Domain(format!("m_{} exceeds the vertex budget", i + 2)))?;
        a.push(ai);
        m.push(next);
    }
    for (i, &p) in params.p.iter().enumerate() {
        let floor = (m[i] as f64).powf(-0.1);
        if p < floor {
            dev.push(format!("p_{} = {p} is below m_{}^(-1/10) = {floor:.4}", i + 1, i + 1));
        }
    }
    Ok((m, a, dev))
}

fn validate(params: &GowersParams) -> Result<()> {
    if params.s == 0 {
        return domain("gowers_graph needs s >= 1");
    }
    if params.m1 == 0 || params.block == 0 {
        return domain("m1 and block must be positive");
    }
    if params.p.len() != params.s - 1 {
        return domain(format!("expected {} level probabilities, got {}", params.s - 1, params.p.len()));
    }
    if params.p.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return domain("level probabilities must lie in [0,1]");
    }
    if params.cap_a < 2 || !params.cap_a.is_multiple_of(2) {
        return domain("cap_a must be even and at least 2");
    }
    if !(params.rho > 0.0 && params.rho < 1.0) {
        return domain("rho must lie in (0,1)");
    }
    let mu = params.mu();
    if !(mu > 0.0 && mu < 0.5) {
        return domain("mu must lie in (0, 1/2)");
    }
    Ok(())
}

/// Builds the nested-partition construction and runs its diagnostic battery,
/// redrawing up to [`GOWERS_RETRIES`] times. When no draw passes, the last one
/// is returned with its failing report.
pub fn gowers_graph(params: &GowersParams) -> Result<GowersInstance> {
    validate(params)?;
    let (m, a, deviations) = level_sizes(params)?;
    let mut last = None;
    for attempt in 0..GOWERS_RETRIES {
        let inst = draw(params, &m, &a, &deviations, attempt)?;
        if inst.report.battery_passed {
            return Ok(inst);
        }
        last = Some(inst);
    }
    Ok(last.expect("at least one attempt"))
}

fn draw(
    params: &GowersParams,
    m: &[usize],
    a: &[usize],
    deviations: &[String],
    attempt: usize,
) -> Result<GowersInstance> {
    let s = params.s;
    let n = m[s - 1] * params.block;
    let partitions = m.iter().map(|&mi| VertexPartition::equitable(n, mi)).collect::<Result<Vec<_>>>()?;
    let aseed = rng::derive(params.seed, &[rng::label("gowers"), attempt as u64]);
    let mu = params.mu();
    let mut levels = Vec::with_capacity(s - 1);
    for i in 0..s - 1 {
        let gi = gnp(m[i], params.p[i], rng::derive(aseed, &[rng::label("level"), i as u64]))?;
        let per_x: Vec<Vec<LevelSplit>> = (0..m[i])
            .into_par_iter()
            .map(|x| -> Result<Vec<LevelSplit>> {
                let nbrs: Vec<usize> = gi.neighbors(x).collect();
                if nbrs.is_empty() {
                    return Ok(Vec::new());
                }
                let fseed = rng::derive(aseed, &[rng::label("split"), i as u64, x as u64]);
                let fam = partition_family(nbrs.len(), a[i], mu, fseed)?;
                Ok(nbrs.iter().enumerate().map(|(r, &y)| LevelSplit { x, y, first: fam.first(r) }).collect())
            })
            .collect::<Result<_>>()?;
        levels.push(GowersLevel {
            m: m[i],
            a: a[i],
            p: params.p[i],
            edges: gi.edges(),
            splits: per_x.into_iter().flatten().collect(),
        });
    }
    let mut inst = GowersInstance {
        params: params.clone(),
        n,
        graph: DenseGraph::empty(n)?,
        partitions,
        levels,
        m: m.to_vec(),
        a: a.to_vec(),
        deviations: deviations.to_vec(),
        attempts: attempt + 1,
        report: GowersReport {
            nu: 0.0,
            nu_hypothesis: true,
            levels: Vec::new(),
            battery_passed: true,
            energy_passed: true,
        },
    };
    let mut g = DenseGraph::empty(n)?;
    for i in 0..s - 1 {
        for &(x, y) in &inst.levels[i].edges {
            for d in 1..=2 {
                let hx = inst.half(i, x, y, d);
                let hy = inst.half(i, y, x, d);
                for &u in &hx {
                    for &v in &hy {
                        g.set(u, v, true);
                    }
                }
            }
        }
    }
    inst.graph = g;
    inst.report = battery(&inst)?;
    Ok(inst)
}

/// `G^i` on `P_i` (0-based `i`): blocks `X, Y` adjacent when some earlier level
/// edge `(X', Y')` and `d` give `X ⊂ X'^d_{Y'}` and `Y ⊂ Y'^d_{X'}`.
pub fn upper_graph(inst: &GowersInstance, i: usize) -> DenseGraph {
    let mut up = DenseGraph::empty(inst.m[i]).expect("m_i >= 1");
    for j in 0..i {
        let lv = &inst.levels[j];
        let r = inst.m[i] / inst.m[j + 1];
        let expand = |x: usize, os: &[usize]| -> Vec<usize> {
            os.iter()
                .flat_map(|&o| {
                    let b = x * lv.a + o;
                    b * r..(b + 1) * r
                })
                .collect()
        };
        for &(x, y) in &lv.edges {
            for d in 1..=2 {
                let bx = expand(x, &lv.offsets(x, y, d));
                let by = expand(y, &lv.offsets(y, x, d));
                for &u in &bx {
                    for &v in &by {
                        up.set(u, v, true);
                    }
                }
            }
        }
    }
    up
}

/// Rebuilds the adjacency from `G^s`: `u ~ v` iff their `P_s`-blocks are
/// adjacent in `G^s`.
pub fn rederive(inst: &GowersInstance) -> DenseGraph {
    let s = inst.m.len();
    let gs = upper_graph(inst, s - 1);
    let b = inst.n / inst.m[s - 1];
    let mut g = DenseGraph::from_fn(inst.n, |u, v| gs.has_edge(u / b, v / b)).expect("n >= 1");
    if let Some((a, _)) = inst.graph.bipartition() {
        g = g.with_bipartition(a.end).expect("same n");
    }
    g
}

fn max_density(g: &DenseGraph, vs: impl Iterator<Item = usize>, target: &Bitset, size: usize) -> f64 {
    vs.map(|v| target.and_count(g.row(v)) as f64 / size as f64).fold(0.0, f64::max)
}

fn level_report(inst: &GowersInstance, i: usize, nu: f64) -> Result<LevelDiagnostics> {
    let g = &inst.graph;
    let lv = &inst.levels[i];
    let mi = lv.m;
    let p = lv.p;
    let gi = lv.graph();
    let up = upper_graph(inst, i);
    let spread = (mi as f64).powf(0.75);

    let degree_dev = (0..mi).map(|x| (gi.degree(x) as f64 - p * mi as f64).abs()).fold(0.0, f64::max);
    let mut codegree_dev: f64 = 0.0;
    for x in 0..mi {
        for y in x + 1..mi {
            codegree_dev = codegree_dev.max((gi.codegree(x, y) as f64 - p * p * mi as f64).abs());
        }
    }

    let fresh_edges = lv.edges.iter().filter(|&&(x, y)| !up.has_edge(x, y)).count();
    let fresh_required = p * (mi * mi) as f64 / 4.0;

    let u_density = (0..mi)
        .into_par_iter()
        .map(|x| {
            let nbrs: Vec<usize> = gi.neighbors(x).collect();
            if nbrs.is_empty() {
                return 0.0;
            }
            let mut mask = Bitset::new(inst.n);
            for &y in &nbrs {
                for v in inst.block(i, y) {
                    mask.insert(v);
                }
            }
            let size = mask.len();
            let own = inst.block(i, x);
            max_density(g, (0..inst.n).filter(|v| !own.contains(v)), &mask, size)
        })
        .reduce(|| 0.0, f64::max);

    let split_density = lv
        .splits
        .par_iter()
        .filter(|sp| !up.has_edge(sp.x, sp.y))
        .map(|sp| {
            let mut worst: f64 = 0.0;
            for d in 1..=2 {
                let target = inst.half(i, sp.y, sp.x, d);
                let mask = g.mask(&target);
                let from = inst.half(i, sp.x, sp.y, 3 - d);
                worst = worst.max(max_density(g, from.into_iter(), &mask, target.len()));
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let mut overlap: f64 = 0.0;
    let mut overlap_ok = true;
    for x in 0..mi {
        let deg = gi.degree(x);
        if deg == 0 {
            continue;
        }
        let both: usize = gi.row(x).iter().zip(up.row(x)).map(|(a, b)| (a & b).count_ones() as usize).sum();
        overlap = overlap.max(both as f64 / deg as f64);
        overlap_ok &= both as f64 <= nu * deg as f64 + 1e-9;
    }

    let mut r = rng::stream(inst.params.seed, &[rng::label("gowers-discrepancy"), inst.attempts as u64, i as u64]);
    let mut violations = 0;
    for _ in 0..inst.params.samples {
        let u2 = r.gen_range(1..=mi);
        let u1 = r.gen_range(1..=u2);
        let s1 = random_subset(&mut r, mi, u1);
        let s2 = random_subset(&mut r, mi, u2);
        let e = gi.e(&s1, &s2) as f64;
        let t = discrepancy_threshold(DiscrepancyKind::GnpH { u1, u2, n: mi })?;
        if !t.holds(e - p * (u1 * u2) as f64) {
            violations += 1;
        }
    }

    let mut planted_complete = true;
    for &(x, y) in &lv.edges {
        for d in 1..=2 {
            let hx = inst.half(i, x, y, d);
            let hy = inst.half(i, y, x, d);
            planted_complete &= g.e(&hx, &hy) == hx.len() * hy.len();
        }
    }

    let q_before = mean_square_density(g, &inst.partitions[i]);
    let q_after = mean_square_density(g, &inst.partitions[i + 1]);
    let gain_required = p / 32.0;

    Ok(LevelDiagnostics {
        level: i + 1,
        m: mi,
        p,
        spread,
        degree_dev,
        codegree_dev,
        fresh_edges,
        fresh_required,
        u_density,
        split_density,
        overlap,
        discrepancy_samples: inst.params.samples,
        discrepancy_violations: violations,
        planted_complete,
        q_before,
        q_after,
        gain_required,
        degree_ok: degree_dev <= spread + 1e-9,
        codegree_ok: codegree_dev <= spread + 1e-9,
        fresh_ok: fresh_edges as f64 >= fresh_required - 1e-9,
        u_ok: u_density <= nu + 1e-9,
        split_ok: split_density <= nu + 1e-9,
        overlap_ok,
        discrepancy_ok: violations == 0,
        energy_ok: q_after >= q_before + gain_required - 1e-6,
    })
}

/// Runs the edge-distribution battery on every level.
pub fn battery(inst: &GowersInstance) -> Result<GowersReport> {
    let nu = 3.0 * inst.params.p.iter().sum::<f64>();
    let levels = (0..inst.levels.len()).map(|i| level_report(inst, i, nu)).collect::<Result<Vec<_>>>()?;
    Ok(GowersReport {
        nu,
        nu_hypothesis: nu <= 0.5,
        battery_passed: levels.iter().all(LevelDiagnostics::battery_ok),
        energy_passed: levels.iter().all(|l| l.energy_ok),
        levels,
    })
}
