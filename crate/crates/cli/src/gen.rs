use anyhow::Result;
use clap::Subcommand;
use graphreg::concentration::gnp;
use graphreg::io::write_graph;
use graphreg::lower_bounds::{
    gowers_graph, half_graph, realize_bernoulli, strong_lb_graph, weak_lb_diagnostics, weak_lb_weights, GowersInstance,
    GowersLevel, GowersParams, GowersReport, StrongLbCaps, StrongLbSchedule, WeakLbParams, WeakLbProbe,
};
use graphreg::DenseGraph;
use serde::Serialize;
use serde_json::json;

use crate::ctx::{Ctx, Outcome};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Gen {
    /// Half graph on 2n vertices, a_i b_j an edge iff i <= j.
    HalfGraph {
        #[arg(long)]
        n: usize,
    },
    /// Binomial random graph G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    /// Layered random construction with a diagnostic sidecar.
    Gowers {
        #[arg(long, default_value_t = 16)]
        m1: usize,
        #[arg(long, default_value_t = 3)]
        s: usize,
        #[arg(long, default_value_t = 0.15)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        cap_a: usize,
        /// Vertices per finest block.
        #[arg(long, default_value_t = 1)]
        block: usize,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Strong lower-bound instance for a constant regularity function.
    StrongLb {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        f_const: f64,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        m1: usize,
        #[arg(long, default_value_t = 4)]
        cap_a: usize,
        #[arg(long, default_value_t = 0.25)]
        p_max: f64,
        #[arg(long, default_value_t = 1)]
        block: usize,
    },
    /// Weighted bipartite construction from random cuts. Writes the weight
    /// matrix as JSON, or a sampled graph with --realize.
    WeakLb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        realize: bool,
    },
}

impl Gen {
    pub fn name(&self) -> &'static str {
        match self {
            Gen::HalfGraph { .. } => "half-graph",
            Gen::Gnp { .. } => "gnp",
            Gen::Gowers { .. } => "gowers",
            Gen::StrongLb { .. } => "strong-lb",
            Gen::WeakLb { .. } => "weak-lb",
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    params: &'a GowersParams,
    n: usize,
    m: &'a [usize],
    a: &'a [usize],
    partitions: Vec<&'a [Vec<usize>]>,
    levels: &'a [GowersLevel],
    deviations: &'a [String],
    attempts: usize,
    report: &'a GowersReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<&'a StrongLbSchedule>,
}

fn graph_summary(g: &DenseGraph) -> serde_json::Value {
    json!({ "n": g.n(), "edges": g.edge_count() })
}

fn write_instance(ctx: &mut Ctx, inst: &GowersInstance, schedule: Option<&StrongLbSchedule>) -> Result<Outcome> {
    let out = ctx.out_path()?;
    ctx.write(&out, &write_graph(&inst.graph))?;
    let side = Sidecar {
        params: &inst.params,
        n: inst.n,
        m: &inst.m,
        a: &inst.a,
        partitions: inst.partitions.iter().map(|p| p.blocks()).collect(),
        levels: &inst.levels,
        deviations: &inst.deviations,
        attempts: inst.attempts,
        report: &inst.report,
        schedule,
    };
    let path = ctx.sidecar()?;
    ctx.write_json(&path, &side)?;
    Outcome::ok(json!({
        "graph": graph_summary(&inst.graph),
        "m": inst.m,
        "a": inst.a,
        "attempts": inst.attempts,
        "battery_passed": inst.report.battery_passed,
        "energy_passed": inst.report.energy_passed,
        "deviations": inst.deviations.len(),
        "sidecar": path,
    }))
}

pub fn run(cmd: &Gen, ctx: &mut Ctx) -> Result<Outcome> {
    let seed = ctx.seed;
    match *cmd {
        Gen::HalfGraph { n } => {
            let out = ctx.out_path()?;
            let g = half_graph(n)?;
            ctx.write(&out, &write_graph(&g))?;
            Outcome::ok(graph_summary(&g))
        }
        Gen::Gnp { n, p } => {
            let out = ctx.out_path()?;
            let g = gnp(n, p, seed)?;
            ctx.write(&out, &write_graph(&g))?;
            Outcome::ok(graph_summary(&g))
        }
        Gen::Gowers { m1, s, p, cap_a, block, samples } => {
            let params = GowersParams { block, samples, ..GowersParams::desk(m1, s, p, cap_a, seed) };
            let inst = gowers_graph(&params)?;
            write_instance(ctx, &inst, None)
        }
        Gen::StrongLb { eps, f_const, levels, m1, cap_a, p_max, block } => {
            let caps = StrongLbCaps { levels, m1, cap_a, p_max, block };
            let (schedule, inst) = strong_lb_graph(eps, &|_| f_const, &caps, seed)?;
            write_instance(ctx, &inst, Some(&schedule))
        }
        Gen::WeakLb { n, r, alpha, realize } => {
            let out = ctx.out_path()?;
            let lb = weak_lb_weights(&WeakLbParams { n, r, alpha, seed })?;
            if !realize {
                ctx.write_json(&out, &json!({ "params": lb.params, "weights": lb.weights.matrix(), "cuts": lb.cuts }))?;
                let report = weak_lb_diagnostics(&lb, None, &WeakLbProbe::default())?;
                return Outcome::ok(json!({ "n": n, "r": r, "alpha": alpha, "diagnostics": report }));
            }
            let g = realize_bernoulli(&lb.weights, seed)?;
            ctx.write(&out, &write_graph(&g))?;
            let report = weak_lb_diagnostics(&lb, Some(&g), &WeakLbProbe::default())?;
            let path = ctx.sidecar()?;
            ctx.write_json(&path, &json!({ "params": lb.params, "cuts": lb.cuts, "diagnostics": report }))?;
            Outcome::ok(json!({ "graph": graph_summary(&g), "diagnostics": report, "sidecar": path }))
        }
    }
}
