use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use graphreg::cylinder::{induced_removal, RemovalConfig, RemovalOutcome};
use graphreg::io::write_edits;
use graphreg::EditSet;
use serde::Serialize;
use serde_json::json;

use crate::common::{pattern, CheckArgs};
use crate::ctx::{Ctx, Outcome};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Removal {
    /// Edits making the graph induced-H-free, or a certificate that many
    /// induced copies exist. Writes the edit set (possibly empty) to --out.
    Induced {
        #[arg(long)]
        graph: PathBuf,
        /// `triangle`, `path3`, `K<k>`, `E<k>`, `P<k>`, `C<k>` or a graph file.
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        eps: f64,
        /// Use the full-strength constants instead of the desk ones.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        check: CheckArgs,
    },
}

impl Removal {
    pub fn name(&self) -> &'static str {
        "induced"
    }
}

pub fn run(cmd: &Removal, ctx: &mut Ctx) -> Result<Outcome> {
    let Removal::Induced { graph, pattern: spec, eps, full, check } = cmd;
    let g = ctx.graph(graph)?;
    let h = pattern(ctx, spec)?;
    let mode = check.mode(ctx.seed);
    let cfg = if *full { RemovalConfig::full(*eps, h.n(), mode) } else { RemovalConfig::desk(*eps, mode) };
    let outcome = induced_removal(&g, &h, *eps, &cfg)?;
    let n = g.n() as f64;
    let budget = eps * n * n;
    let result = match &outcome {
        RemovalOutcome::Free => {
            ctx.emit(&write_edits(&EditSet::new()))?;
            json!({ "outcome": "free", "edits": 0 })
        }
        RemovalOutcome::Certificate { phi, representatives, threshold, count, hypotheses } => {
            ctx.emit(&write_edits(&EditSet::new()))?;
            json!({
                "outcome": "certificate",
                "phi": phi,
                "representative_sizes": representatives.iter().map(Vec::len).collect::<Vec<_>>(),
                "threshold": threshold,
                "count": count,
                "hypotheses": hypotheses,
            })
        }
        RemovalOutcome::Edited { edits, partition, copies_before, bound, .. } => {
            ctx.emit(&write_edits(edits))?;
            json!({
                "outcome": "edited",
                "edits": edits.count(),
                "additions": edits.additions.len(),
                "deletions": edits.deletions.len(),
                "provenance": edits.provenance,
                "k": partition.k(),
                "copies_before": copies_before,
                "bound": bound,
                "budget": budget,
            })
        }
    };
    Outcome::ok(json!({ "pattern": spec, "config": cfg, "result": result }))
}
