use std::path::Path;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use graphreg::{CheckMode, CutMode, DenseGraph};
use serde::Serialize;

use crate::ctx::{usage, Ctx};

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    Sampled,
    Auto,
}

/// Pair-check options.
#[derive(Args, Clone, Debug, Serialize)]
pub struct CheckArgs {
    /// exact enumerates subsets (smaller side at most 18); sampled searches for witnesses.
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 4096)]
    pub trials: usize,
}

impl CheckArgs {
    pub fn mode(&self, seed: u64) -> CheckMode {
        match self.mode {
            ModeArg::Exact => CheckMode::Exact,
            ModeArg::Sampled => CheckMode::Sampled { trials: self.trials, seed },
            ModeArg::Auto => CheckMode::Auto { trials: self.trials, seed },
        }
    }
}

/// Cut-norm options.
#[derive(Args, Clone, Debug, Serialize)]
pub struct CutArgs {
    /// Exact cut norm (n at most 24).
    #[arg(long, conflicts_with = "heuristic")]
    pub exact: bool,
    /// Local-search cut norm regardless of n.
    #[arg(long)]
    pub heuristic: bool,
}

impl CutArgs {
    pub fn mode(&self, seed: u64) -> CutMode {
        if self.exact {
            CutMode::Exact
        } else if self.heuristic {
            CutMode::Heuristic { seed }
        } else {
            CutMode::Auto { seed }
        }
    }
}

/// A named pattern (`triangle`, `path3`, `K<k>`, `E<k>`, `P<k>`, `C<k>`) or a
/// graph file.
pub fn pattern(ctx: &mut Ctx, spec: &str) -> Result<DenseGraph> {
    let named = |k: usize, f: &dyn Fn(usize, usize) -> bool| DenseGraph::from_fn(k, f);
    let size = |s: &str| s.parse::<usize>().ok().filter(|&k| k >= 1);
    let g = match spec {
        "triangle" => named(3, &|_, _| true),
        "path3" => named(3, &|u, v| v == u + 1),
        _ => {
            let (head, tail) = spec.split_at(spec.chars().next().map_or(0, char::len_utf8));
            match (head, size(tail)) {
                ("K", Some(k)) => named(k, &|_, _| true),
                ("E", Some(k)) => named(k, &|_, _| false),
                ("P", Some(k)) => named(k, &|u, v| v == u + 1),
                ("C", Some(k)) if k >= 3 => named(k, &|u, v| v == u + 1 || (u == 0 && v == k - 1)),
                _ => return ctx.graph(Path::new(spec)).context("pattern is neither a known name nor a graph file"),
            }
        }
    };
    Ok(g?)
}

/// Comma-separated vertices and inclusive ranges, e.g. `0-7,12`.
pub fn vertex_set(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parse = |s: &str| s.trim().parse::<usize>().with_context(|| format!("bad vertex {s:?}"));
        match item.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if a > b {
                    return usage(format!("empty range {item}"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(item)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
