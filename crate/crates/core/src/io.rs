//! Plain-text formats for graphs, partitions, edit sets and cylinder partitions.

use std::fmt::Write;

use crate::cylinder::CylinderPartition;
use crate::edits::EditSet;
use crate::error::{Error, Result};
use crate::graph::DenseGraph;
use crate::partition::VertexPartition;

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn nums(line: usize, s: &str) -> Result<Vec<usize>> {
    s.split_whitespace().map(|t| t.parse::<usize>().or_else(|_| perr(line, format!("bad integer {t:?}")))).collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

/// `n m` header, then one sorted `u v` line per edge with `u < v`.
pub fn write_graph(g: &DenseGraph) -> String {
    let edges = g.edges();
    let mut s = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

pub fn read_graph(text: &str) -> Result<DenseGraph> {
    let mut lines = content_lines(text);
    let (hl, header) = match lines.next() {
        Some(x) => x,
        None => return perr(1, "missing header"),
    };
    let h = nums(hl, header)?;
    if h.len() != 2 {
        return perr(hl, "header must be \"n m\"");
    }
    let (n, m) = (h[0], h[1]);
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines {
        let e = nums(ln, l)?;
        if e.len() != 2 {
            return perr(ln, "edge line must be \"u v\"");
        }
        if e[0] >= e[1] || e[1] >= n {
            return perr(ln, format!("edge ({}, {}) must satisfy u < v < n", e[0], e[1]));
        }
        if edges.last().is_some_and(|&last| last >= (e[0], e[1])) {
            return perr(ln, "edges must be sorted and distinct");
        }
        edges.push((e[0], e[1]));
    }
    if edges.len() != m {
        return perr(hl, format!("header announces {m} edges, found {}", edges.len()));
    }
    DenseGraph::from_edges(n, &edges)
}

/// One line per block with its sorted members.
pub fn write_partition(p: &VertexPartition) -> String {
    let mut s = String::new();
    for b in p.blocks() {
        s.push_str(&join(b));
        s.push('\n');
    }
    s
}

pub fn read_partition(text: &str, n: usize) -> Result<VertexPartition> {
    let mut blocks = Vec::new();
    for (ln, l) in content_lines(text) {
        let b = nums(ln, l)?;
        if b.windows(2).any(|w| w[0] >= w[1]) {
            return perr(ln, "block members must be sorted");
        }
        blocks.push(b);
    }
    VertexPartition::new(n, blocks)
}

/// Sorted `+ u v` lines followed by sorted `- u v` lines.
pub fn write_edits(e: &EditSet) -> String {
    let mut s = String::new();
    for (u, v) in &e.additions {
        let _ = writeln!(s, "+ {u} {v}");
    }
    for (u, v) in &e.deletions {
        let _ = writeln!(s, "- {u} {v}");
    }
    s
}

pub fn read_edits(text: &str) -> Result<EditSet> {
    let mut e = EditSet::new();
    for (ln, l) in content_lines(text) {
        let (sign, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        let uv = nums(ln, rest)?;
        if uv.len() != 2 || uv[0] >= uv[1] {
            return perr(ln, "edit line must be \"+ u v\" or \"- u v\" with u < v");
        }
        match sign {
            "+" => e.additions.push((uv[0], uv[1])),
            "-" => e.deletions.push((uv[0], uv[1])),
            _ => return perr(ln, format!("unknown edit sign {sign:?}")),
        }
    }
    e.finish()
}

/// Header `k`, then `k` ground-set lines, then one line per cylinder with its
/// `k` part sets separated by `|`.
pub fn write_cylinders(c: &CylinderPartition) -> String {
    let mut s = format!("{}\n", c.k());
    for v in c.ground() {
        s.push_str(&join(v));
        s.push('\n');
    }
    for cyl in c.cylinders() {
        let parts: Vec<String> = cyl.iter().map(|w| join(w)).collect();
        s.push_str(&parts.join(" | "));
        s.push('\n');
    }
    s
}

pub fn read_cylinders(text: &str) -> Result<CylinderPartition> {
    let mut lines = content_lines(text);
    let (hl, header) = match lines.next() {
        Some(x) => x,
        None => return perr(1, "missing header"),
    };
    let k = match nums(hl, header)?.as_slice() {
        [k] => *k,
        _ => return perr(hl, "header must be \"k\""),
    };
    let mut ground = Vec::with_capacity(k);
    for _ in 0..k {
        match lines.next() {
            Some((ln, l)) => ground.push(nums(ln, l)?),
            None => return perr(hl, "missing ground sets"),
        }
    }
    let mut cylinders = Vec::new();
    for (ln, l) in lines {
        let parts: Vec<Vec<usize>> = l.split('|').map(|p| nums(ln, p)).collect::<Result<_>>()?;
        if parts.len() != k {
            return perr(ln, format!("cylinder has {} parts, expected {k}", parts.len()));
        }
        cylinders.push(parts);
    }
    CylinderPartition::new(ground, cylinders)
}

fn join(v: &[usize]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s
}
