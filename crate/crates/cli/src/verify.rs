use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use graphreg::certify::{
    check_pair, check_weak_partition, count_induced, count_irregular_pairs, mixing_exhaustive, quasirandom_certificate,
    PairSpec,
};
use graphreg::concentration::random_subset;
use graphreg::cylinder::cylinder_verdict;
use graphreg::partition::partition_closeness;
use graphreg::rng;
use graphreg::{mean_square_density, RegularityParams};
use rand::Rng as _;
use serde::Serialize;
use serde_json::json;

use crate::common::{pattern, vertex_set, CheckArgs, CutArgs};
use crate::ctx::{Ctx, Outcome};

/// Largest graph for the exhaustive mixing check.
const MIXING_EXACT_CAP: usize = 20;

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Verify {
    /// Whether a partition is weak ε-regular.
    Weak {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        eps: f64,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Regularity of one pair (X, Y), vertex lists like `0-7,12`.
    Pair {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        eps: f64,
        /// Subset floor; defaults to eps.
        #[arg(long)]
        delta: Option<f64>,
        /// Compare sub-pair densities with d(X, Y) instead of a band of width eps.
        #[arg(long)]
        deviation: bool,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Irregular block pairs of a partition against the budget ηk².
    Szemeredi {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: f64,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Mixing certificate from 4-walk counts, checked exhaustively up to
    /// n = 20 and on random set pairs above.
    Quasirandom {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
    },
    /// Regular mass of a cylinder partition.
    Cylinders {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cylinders: PathBuf,
        #[arg(long)]
        eps: f64,
        /// Require the self-pairs (W_i, W_i) as well.
        #[arg(long)]
        strong: bool,
        /// Pass when the regular mass reaches this value.
        #[arg(long, default_value_t = 1.0)]
        min_mass: f64,
        #[command(flatten)]
        check: CheckArgs,
    },
    /// Whether `fine` is ε-close to `coarse` block pair by block pair.
    Closeness {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        coarse: PathBuf,
        #[arg(long)]
        fine: PathBuf,
        #[arg(long)]
        eps: f64,
    },
    /// Exact count of induced copies of a pattern, after optional edits.
    Free {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        edits: Option<PathBuf>,
        /// Fail when the edit set is larger than this.
        #[arg(long)]
        max_edits: Option<usize>,
    },
}

impl Verify {
    pub fn name(&self) -> &'static str {
        match self {
            Verify::Weak { .. } => "weak",
            Verify::Pair { .. } => "pair",
            Verify::Szemeredi { .. } => "szemeredi",
            Verify::Quasirandom { .. } => "quasirandom",
            Verify::Cylinders { .. } => "cylinders",
            Verify::Closeness { .. } => "closeness",
            Verify::Free { .. } => "free",
        }
    }
}

pub fn run(cmd: &Verify, ctx: &mut Ctx) -> Result<Outcome> {
    let seed = ctx.seed;
    match cmd {
        Verify::Weak { graph, partition, eps, cut } => {
            let g = ctx.graph(graph)?;
            let p = ctx.partition(partition, g.n())?;
            let v = check_weak_partition(&g, &p, *eps, cut.mode(seed))?;
            Outcome::verdict(v.ok, json!({ "verdict": v.ok, "k": p.k(), "q": mean_square_density(&g, &p), "check": v }))
        }
        Verify::Pair { graph, x, y, eps, delta, deviation, check } => {
            let g = ctx.graph(graph)?;
            let (x, y) = (vertex_set(x)?, vertex_set(y)?);
            let delta = delta.unwrap_or(*eps);
            let spec =
                if *deviation { PairSpec { delta, ..PairSpec::deviation(*eps) } } else { PairSpec::band(*eps, delta) };
            let v = check_pair(&g, &x, &y, spec, check.mode(seed))?;
            Outcome::verdict(v.regular, json!({ "verdict": v.regular, "certified": v.certified(), "check": v }))
        }
        Verify::Szemeredi { graph, partition, eps, delta, eta, check } => {
            let g = ctx.graph(graph)?;
            let p = ctx.partition(partition, g.n())?;
            let params = RegularityParams::new(*eps, *delta, *eta)?;
            let r = count_irregular_pairs(&g, &p, params.eps, params.delta, check.mode(seed))?;
            let k = p.k() as f64;
            let budget = params.eta * k * k;
            let ok = r.count as f64 <= budget + 1e-9;
            Outcome::verdict(ok, json!({ "verdict": ok, "k": p.k(), "budget": budget, "irregular": r }))
        }
        Verify::Quasirandom { graph, samples } => {
            let g = ctx.graph(graph)?;
            let cert = quasirandom_certificate(&g);
            let n = g.n();
            if n <= MIXING_EXACT_CAP {
                let (slack, bad) = mixing_exhaustive(&g, &cert);
                let ok = bad.is_none();
                return Outcome::verdict(
                    ok,
                    json!({ "verdict": ok, "exhaustive": true, "certificate": cert, "worst_slack": slack, "violation": bad }),
                );
            }
            let mut r = rng::stream(seed, &[rng::label("mixing")]);
            let mut worst = f64::INFINITY;
            let mut bad = None;
            for _ in 0..*samples {
                let size = r.gen_range(1..=n);
                let s = random_subset(&mut r, n, size);
                let size = r.gen_range(1..=n);
                let t = random_subset(&mut r, n, size);
                let bound = cert.lambda * ((s.len() * t.len()) as f64).sqrt();
                let slack = bound - cert.deviation(g.e(&s, &t), s.len(), t.len());
                if slack < worst {
                    worst = slack;
                }
                if bad.is_none() && !cert.bound_holds(g.e(&s, &t), s.len(), t.len()) {
                    bad = Some((s, t));
                }
            }
            let ok = bad.is_none();
            Outcome::verdict(
                ok,
                json!({ "verdict": ok, "exhaustive": false, "samples": samples, "certificate": cert, "worst_slack": worst, "violation": bad }),
            )
        }
        Verify::Cylinders { graph, cylinders, eps, strong, min_mass, check } => {
            let g = ctx.graph(graph)?;
            let k = ctx.cylinders(cylinders)?;
            let v = cylinder_verdict(&g, &k, *eps, *strong, check.mode(seed))?;
            let ok = v.regular_mass >= min_mass - 1e-9;
            Outcome::verdict(
                ok,
                json!({
                    "verdict": ok,
                    "cylinders": k.len(),
                    "regular_mass": v.regular_mass,
                    "irregular": v.flags.iter().filter(|f| !**f).count(),
                    "exhaustive": v.exhaustive,
                    "strong": v.strong,
                }),
            )
        }
        Verify::Closeness { graph, coarse, fine, eps } => {
            let g = ctx.graph(graph)?;
            let a = ctx.partition(coarse, g.n())?;
            let b = ctx.partition(fine, g.n())?;
            let r = partition_closeness(&g, &a, &b, *eps)?;
            Outcome::verdict(r.close, json!({ "verdict": r.close, "report": r }))
        }
        Verify::Free { graph, pattern: spec, edits, max_edits } => {
            let mut g = ctx.graph(graph)?;
            let h = pattern(ctx, spec)?;
            let mut edit_count = None;
            if let Some(path) = edits {
                let e = ctx.edits(path)?;
                g = e.apply(&g)?;
                edit_count = Some(e.count());
            }
            let all: Vec<usize> = (0..g.n()).collect();
            let copies = count_induced(&g, &h, &vec![all; h.n()])?;
            let within = match (edit_count, max_edits) {
                (Some(c), Some(m)) => c <= *m,
                _ => true,
            };
            let ok = copies == 0 && within;
            Outcome::verdict(
                ok,
                json!({ "verdict": ok, "labelled_copies": copies, "edits": edit_count, "max_edits": max_edits }),
            )
        }
    }
}
