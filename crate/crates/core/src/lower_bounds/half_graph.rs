use crate::error::{domain, Result};
use crate::graph::DenseGraph;

/// Bipartite graph on `a_1..a_n` (vertices `0..n`) and `b_1..b_n` (vertices
/// `n..2n`) with `a_i b_j` an edge iff `i ≤ j`.
pub fn half_graph(n: usize) -> Result<DenseGraph> {
    if n == 0 {
        return domain("half_graph needs n >= 1");
    }
    DenseGraph::from_fn(2 * n, |u, v| u < n && v >= n && u <= v - n)?.with_bipartition(n)
}
