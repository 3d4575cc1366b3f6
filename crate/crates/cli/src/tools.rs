use std::path::PathBuf;

use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use graphreg::concentration::{
    check_uniformity, chernoff_tail, discrepancy_threshold, iterated_log, iterated_log_big, tower, tower_int, wowzer,
    DiscrepancyKind, TowerValue,
};
use graphreg::cylinder::sampling_tester;
use graphreg::lower_bounds::{partition_family, strong_lb_schedule};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::common::pattern;
use crate::ctx::{usage, Ctx, Outcome};

/// Values with more bits are reported by size only.
const DECIMAL_BITS: u64 = 4096;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    BipartiteF,
    GnpG,
    GnpSelfG,
    GnpH,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum Tools {
    /// T(k) with T(1) = 2, and t_k(x) with t_0(x) = x when --x is given.
    Tower {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        x: Option<f64>,
    },
    /// W(k) with W(1) = 2 and W(k) = T(W(k-1)).
    Wowzer {
        #[arg(long)]
        k: usize,
    },
    /// Iterated base-2 logarithm of an integer or float.
    Logstar {
        #[arg(long)]
        x: String,
    },
    /// Upper tail bound for a sum of n independent [0,1] variables.
    Chernoff {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        n: usize,
    },
    /// Discrepancy threshold for one of the union-bound families.
    Thresholds {
        #[arg(long, value_enum)]
        kind: ThresholdKind,
        #[arg(long)]
        u1: Option<usize>,
        #[arg(long)]
        u2: Option<usize>,
        #[arg(long)]
        u: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        big_m: Option<usize>,
    },
    /// Parameter schedule of the strong lower bound for a constant f.
    Schedule {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        f_const: f64,
    },
    /// Sampled edge-count uniformity of a graph against density p.
    Uniformity {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// One-sided sampling tester for induced copies of a pattern.
    Tester {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        delta: f64,
    },
    /// Family of m balanced subsets of [M] with bounded pairwise agreement.
    /// Writes one 0/1 row per line to --out when given.
    Family {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        big_m: usize,
        #[arg(long)]
        mu: f64,
    },
}

impl Tools {
    pub fn name(&self) -> &'static str {
        match self {
            Tools::Tower { .. } => "tower",
            Tools::Wowzer { .. } => "wowzer",
            Tools::Logstar { .. } => "logstar",
            Tools::Chernoff { .. } => "chernoff",
            Tools::Thresholds { .. } => "thresholds",
            Tools::Schedule { .. } => "schedule",
            Tools::Uniformity { .. } => "uniformity",
            Tools::Tester { .. } => "tester",
            Tools::Family { .. } => "family",
        }
    }
}

fn big(v: &BigUint) -> Value {
    let bits = v.bits();
    if bits <= DECIMAL_BITS {
        json!({ "decimal": v.to_string(), "bits": bits })
    } else {
        json!({ "bits": bits, "log_star": iterated_log_big(v) })
    }
}

fn tower_json(v: &TowerValue) -> Value {
    match v {
        TowerValue::Exact(x) => json!({ "exact": big(x) }),
        TowerValue::Height { height, top } => json!({ "tower_of_twos": { "height": height, "top": big(top) } }),
    }
}

fn need(name: &str, v: Option<usize>) -> Result<usize> {
    match v {
        Some(v) => Ok(v),
        None => usage(format!("this threshold kind needs --{name}")),
    }
}

pub fn run(cmd: &Tools, ctx: &mut Ctx) -> Result<Outcome> {
    let seed = ctx.seed;
    match cmd {
        Tools::Tower { k, x } => {
            if *k == 0 {
                return usage("--k must be at least 1");
            }
            let t = x.map(|x| tower(*k, x));
            Outcome::ok(json!({ "k": k, "T": tower_json(&tower_int(*k)), "t_k_x": t }))
        }
        Tools::Wowzer { k } => {
            if *k == 0 {
                return usage("--k must be at least 1");
            }
            Outcome::ok(json!({ "k": k, "W": tower_json(&wowzer(*k)) }))
        }
        Tools::Logstar { x } => match x.parse::<BigUint>() {
            Ok(v) => Outcome::ok(json!({ "x": x, "log_star": iterated_log_big(&v) })),
            Err(_) => match x.parse::<f64>() {
                Ok(f) => Outcome::ok(json!({ "x": x, "log_star": iterated_log(f) })),
                Err(_) => usage(format!("--x {x:?} is not a number")),
            },
        },
        Tools::Chernoff { a, n } => Outcome::ok(json!({ "a": a, "n": n, "bound": chernoff_tail(*a, *n)? })),
        Tools::Thresholds { kind, u1, u2, u, n, m, big_m } => {
            let k = match kind {
                ThresholdKind::BipartiteF => DiscrepancyKind::BipartiteF {
                    u1: need("u1", *u1)?,
                    u2: need("u2", *u2)?,
                    m: need("m", *m)?,
                    big_m: need("big-m", *big_m)?,
                },
                ThresholdKind::GnpG => {
                    DiscrepancyKind::GnpG { u1: need("u1", *u1)?, u2: need("u2", *u2)?, n: need("n", *n)? }
                }
                ThresholdKind::GnpSelfG => DiscrepancyKind::GnpSelfG { u: need("u", *u)?, n: need("n", *n)? },
                ThresholdKind::GnpH => {
                    DiscrepancyKind::GnpH { u1: need("u1", *u1)?, u2: need("u2", *u2)?, n: need("n", *n)? }
                }
            };
            let t = discrepancy_threshold(k)?;
            Outcome::ok(json!({ "threshold": t, "bound": t.bound() }))
        }
        Tools::Schedule { eps, f_const } => {
            let f = *f_const;
            Outcome::ok(strong_lb_schedule(*eps, &|_| f)?)
        }
        Tools::Uniformity { graph, p, samples } => {
            let g = ctx.graph(graph)?;
            let r = check_uniformity(&g, *p, *samples, seed)?;
            Outcome::ok(json!({ "violations": r.violations(), "report": r }))
        }
        Tools::Tester { graph, pattern: spec, delta } => {
            let g = ctx.graph(graph)?;
            let h = pattern(ctx, spec)?;
            Outcome::ok(sampling_tester(&g, &h, *delta, seed)?)
        }
        Tools::Family { m, big_m, mu } => {
            let f = partition_family(*m, *big_m, *mu, seed)?;
            let rows: String = f
                .rows
                .iter()
                .map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).chain(['\n']).collect::<String>())
                .collect();
            ctx.emit(&rows)?;
            Outcome::ok(json!({ "m": f.m, "big_m": f.big_m, "mu": f.mu, "ok": f.report.ok(), "report": f.report }))
        }
    }
}
