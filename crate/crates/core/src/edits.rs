use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::DenseGraph;

/// Edit counts attributed to one source, usually a block pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditTag {
    pub label: String,
    pub additions: usize,
    pub deletions: usize,
}

/// Edge additions and deletions relative to a base graph. Edges are stored as
/// `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditSet {
    pub additions: Vec<(usize, usize)>,
    pub deletions: Vec<(usize, usize)>,
    pub provenance: Vec<EditTag>,
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl EditSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.additions.len() + self.deletions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Appends edits under one provenance label. Order is fixed by `finish`.
    pub fn record(&mut self, label: impl Into<String>, add: &[(usize, usize)], del: &[(usize, usize)]) {
        self.additions.extend(add.iter().map(|&(u, v)| norm(u, v)));
        self.deletions.extend(del.iter().map(|&(u, v)| norm(u, v)));
        if !add.is_empty() || !del.is_empty() {
            self.provenance.push(EditTag { label: label.into(), additions: add.len(), deletions: del.len() });
        }
    }

    /// Sorts both lists and rejects repeats or edits present in both.
    pub fn finish(mut self) -> Result<Self> {
        self.additions.sort_unstable();
        self.deletions.sort_unstable();
        for list in [&self.additions, &self.deletions] {
            if list.windows(2).any(|w| w[0] == w[1]) {
                return domain("edit listed twice");
            }
        }
        if self.additions.iter().any(|e| self.deletions.binary_search(e).is_ok()) {
            return domain("edge both added and deleted");
        }
        Ok(self)
    }

    /// Edits turning `before` into `after`.
    pub fn diff(before: &DenseGraph, after: &DenseGraph) -> Result<Self> {
        if before.n() != after.n() {
            return domain("graphs differ in vertex count");
        }
        let mut e = EditSet::new();
        for u in 0..before.n() {
            for v in u + 1..before.n() {
                match (before.has_edge(u, v), after.has_edge(u, v)) {
                    (false, true) => e.additions.push((u, v)),
                    (true, false) => e.deletions.push((u, v)),
                    _ => {}
                }
            }
        }
        Ok(e)
    }

    /// Applies the edits, checking that additions are non-edges and deletions edges.
    pub fn apply(&self, g: &DenseGraph) -> Result<DenseGraph> {
        let mut out = g.clone();
        for &(u, v) in &self.additions {
            if u >= g.n() || v >= g.n() || u == v {
                return domain(format!("addition ({u},{v}) is not a vertex pair"));
            }
            if g.has_edge(u, v) {
                return domain(format!("addition ({u},{v}) is already an edge"));
            }
            out.set(u, v, true);
        }
        for &(u, v) in &self.deletions {
            if u >= g.n() || v >= g.n() || !g.has_edge(u, v) {
                return domain(format!("deletion ({u},{v}) is not an edge"));
            }
            out.set(u, v, false);
        }
        Ok(out)
    }
}
