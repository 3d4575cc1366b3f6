use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use graphreg::partition::block_edge_counts;
use graphreg::{fk_partition, mean_square_density};
use serde::Serialize;
use serde_json::json;

use crate::common::CutArgs;
use crate::ctx::{Ctx, Outcome};

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Report {
    /// Block-pair edge counts and densities of a partition.
    Densities {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        /// Emit CSV rows instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Per-round defect and energy of the weak regularity loop.
    History {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        csv: bool,
        #[command(flatten)]
        cut: CutArgs,
    },
}

impl Report {
    pub fn name(&self) -> &'static str {
        match self {
            Report::Densities { .. } => "densities",
            Report::History { .. } => "history",
        }
    }
}

#[derive(Serialize)]
struct DensityRow {
    i: usize,
    j: usize,
    size_i: usize,
    size_j: usize,
    edges: u64,
    density: f64,
}

#[derive(Serialize)]
struct HistoryRow {
    round: usize,
    defect: Option<f64>,
    q: Option<f64>,
    blocks_after_split: Option<usize>,
    target: Option<usize>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// CSV goes to `--out` when given, otherwise it replaces the JSON summary.
fn finish<T: Serialize>(ctx: &mut Ctx, csv: bool, rows: &[T], summary: serde_json::Value) -> Result<Outcome> {
    if !csv {
        return Outcome::ok(json!({ "summary": summary, "rows": rows }));
    }
    let text = to_csv(rows)?;
    if ctx.out.is_some() {
        ctx.emit(&text)?;
        return Outcome::ok(summary);
    }
    let mut o = Outcome::ok(summary)?;
    o.csv = Some(text);
    Ok(o)
}

pub fn run(cmd: &Report, ctx: &mut Ctx) -> Result<Outcome> {
    match cmd {
        Report::Densities { graph, partition, csv } => {
            let g = ctx.graph(graph)?;
            let p = ctx.partition(partition, g.n())?;
            let k = p.k();
            let counts = block_edge_counts(&g, &p);
            let sizes = p.sizes();
            let rows: Vec<DensityRow> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let edges = counts[i * k + j];
                    DensityRow {
                        i,
                        j,
                        size_i: sizes[i],
                        size_j: sizes[j],
                        edges,
                        density: edges as f64 / (sizes[i] * sizes[j]) as f64,
                    }
                })
                .collect();
            finish(ctx, *csv, &rows, json!({ "k": k, "q": mean_square_density(&g, &p) }))
        }
        Report::History { graph, eps, csv, cut } => {
            let g = ctx.graph(graph)?;
            let r = fk_partition(&g, *eps, cut.mode(ctx.seed))?;
            let len = r.q_history.len().max(r.defect_history.len());
            let rows: Vec<HistoryRow> = (0..len)
                .map(|round| HistoryRow {
                    round,
                    defect: r.defect_history.iter().find(|(t, _)| *t == round).map(|&(_, d)| d),
                    q: r.q_history.get(round).copied(),
                    blocks_after_split: round.checked_sub(1).and_then(|t| r.split_sizes.get(t).copied()),
                    target: round.checked_sub(1).and_then(|t| r.targets.get(t).copied()),
                })
                .collect();
            finish(ctx, *csv, &rows, json!({ "rounds": r.rounds, "k": r.partition.k(), "certified": r.certified }))
        }
    }
}
