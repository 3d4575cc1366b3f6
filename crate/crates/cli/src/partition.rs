use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use graphreg::cylinder::{strong_cylinder_partition, StrongConfig};
use graphreg::io::{write_cylinders, write_edits, write_partition};
use graphreg::weak_regularity::fk_from;
use graphreg::{
    fk_partition, mean_square_density, regular_approximation, szemeredi_partition, tao_partition, ApproxMode,
    GFunction, RegularityParams,
};
use serde::Serialize;
use serde_json::json;

use crate::common::{CheckArgs, CutArgs};
use crate::ctx::{Ctx, Outcome};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Partition {
    /// Weak ε-regular partition by energy increment.
    Weak {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Start from this partition instead of the trivial one.
        #[arg(long)]
        from: Option<PathBuf>,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Pair (P, Q) with Q a weak δ(|P|)-refinement of P, δ(t) = C/t.
    /// Writes Q to --out and P to --p-out.
    Tao {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        delta_c: f64,
        #[arg(long)]
        p_out: Option<PathBuf>,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Partition with at most ηk² irregular ordered block pairs.
    Szemeredi {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: f64,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Edits towards a graph whose block pairs are all close to uniform.
    /// Writes the edit set to --out and the partition to --partition-out.
    Approx {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Constant value of the regularity function g.
        #[arg(long)]
        g: f64,
        /// Follow the full construction; escapes to singletons on small graphs.
        #[arg(long)]
        faithful: bool,
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Equitable P, a strongly regular cylinder partition of its blocks and
    /// the partition Q it induces. Writes cylinders to --out.
    StrongCylinder {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        /// Constant regularity target f(k).
        #[arg(long)]
        f_const: f64,
        #[arg(long)]
        p_out: Option<PathBuf>,
        #[arg(long)]
        q_out: Option<PathBuf>,
        #[command(flatten)]
        check: CheckArgs,
    },
}

impl Partition {
    pub fn name(&self) -> &'static str {
        match self {
            Partition::Weak { .. } => "weak",
            Partition::Tao { .. } => "tao",
            Partition::Szemeredi { .. } => "szemeredi",
            Partition::Approx { .. } => "approx",
            Partition::StrongCylinder { .. } => "strong-cylinder",
        }
    }
}

pub fn run(cmd: &Partition, ctx: &mut Ctx) -> Result<Outcome> {
    let seed = ctx.seed;
    match cmd {
        Partition::Weak { graph, eps, from, cut } => {
            let g = ctx.graph(graph)?;
            let r = match from {
                Some(path) => {
                    let start = ctx.partition(path, g.n())?;
                    fk_from(&g, start, *eps, cut.mode(seed))?
                }
                None => fk_partition(&g, *eps, cut.mode(seed))?,
            };
            ctx.emit(&write_partition(&r.partition))?;
            Outcome::ok(json!({
                "k": r.partition.k(),
                "sizes": r.partition.sizes(),
                "rounds": r.rounds,
                "certified": r.certified,
                "q": mean_square_density(&g, &r.partition),
                "defect_history": r.defect_history,
                "q_history": r.q_history,
                "split_sizes": r.split_sizes,
                "targets": r.targets,
            }))
        }
        Partition::Tao { graph, eps, s, delta_c, p_out, cut } => {
            let g = ctx.graph(graph)?;
            let c = *delta_c;
            let r = tao_partition(&g, *eps, *s, &|t| c / t as f64, cut.mode(seed))?;
            ctx.emit(&write_partition(&r.q))?;
            if let Some(p) = p_out {
                ctx.write(p, &write_partition(&r.p))?;
            }
            Outcome::ok(json!({
                "p_k": r.p.k(),
                "q_k": r.q.k(),
                "t": r.t,
                "energy_gap": r.energy_gap,
                "rounds": r.rounds,
                "p_certified": r.p_certified,
                "q_certified": r.q_certified,
            }))
        }
        Partition::Szemeredi { graph, eps, delta, eta, check } => {
            let g = ctx.graph(graph)?;
            let params = RegularityParams::new(*eps, *delta, *eta)?;
            let r = szemeredi_partition(&g, &params, check.mode(seed), seed)?;
            ctx.emit(&write_partition(&r.partition))?;
            Outcome::ok(json!({
                "k": r.partition.k(),
                "sizes": r.partition.sizes(),
                "irregular": r.report,
                "budget": r.budget,
                "rounds": r.rounds,
                "tao_rounds": r.tao_rounds,
            }))
        }
        Partition::Approx { graph, eps, s, g: gc, faithful, partition_out } => {
            let g = ctx.graph(graph)?;
            let mode = if *faithful { ApproxMode::Faithful } else { ApproxMode::Desk };
            let r = regular_approximation(&g, *eps, *s, &GFunction::constant(*gc), seed, mode)?;
            ctx.emit(&write_edits(&r.edits))?;
            if let Some(p) = partition_out {
                ctx.write(p, &write_partition(&r.partition))?;
            }
            let n = g.n() as f64;
            Outcome::ok(json!({
                "edits": r.edits.count(),
                "additions": r.edits.additions.len(),
                "deletions": r.edits.deletions.len(),
                "budget": eps * n * n,
                "k": r.partition.k(),
                "refinement_k": r.refinement.as_ref().map(|q| q.k()),
                "mode": r.mode,
                "eps0": r.eps0,
                "delta": r.delta,
                "escaped": r.escaped,
                "pairs": r.pairs,
            }))
        }
        Partition::StrongCylinder { graph, eps, s, f_const, p_out, q_out, check } => {
            let g = ctx.graph(graph)?;
            let cfg = StrongConfig::new(*eps, *s, check.mode(seed));
            let f = *f_const;
            let r = strong_cylinder_partition(&g, &cfg, &|_| f)?;
            ctx.emit(&write_cylinders(&r.k))?;
            if let Some(p) = p_out {
                ctx.write(p, &write_partition(&r.p))?;
            }
            if let Some(q) = q_out {
                ctx.write(q, &write_partition(&r.q))?;
            }
            Outcome::ok(json!({
                "p_k": r.p.k(),
                "cylinders": r.k.len(),
                "q_k": r.q.k(),
                "q_p": mean_square_density(&g, &r.p),
                "q_q": mean_square_density(&g, &r.q),
                "rounds": r.rounds,
                "f_k": r.f_k,
                "regular_mass": r.regular_mass,
                "exhaustive": r.exhaustive,
                "escaped": r.escaped,
                "history": r.history,
            }))
        }
    }
}
