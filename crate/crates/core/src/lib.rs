//! Regularity partitions of dense graphs with exact verifiers for every claim
//! they make at small scale.
//!
//! Graphs are [`DenseGraph`] bit matrices. Weak (cut-norm) partitions come from
//! [`fk_partition`], two-level partitions from [`tao_partition`], pairwise
//! regular ones from [`szemeredi_partition`], cylinder partitions from
//! [`cylinder::strong_cylinder_partition`], and edits towards regular or
//! induced-free graphs from [`regular_approximation`] and
//! [`cylinder::induced_removal`]. Lower-bound generators live in
//! [`lower_bounds`]. Randomized routines take a `u64` seed and derive all
//! randomness from it, independently of thread count.

pub mod certify;
pub mod concentration;
pub mod cylinder;
pub mod edits;
pub mod error;
pub mod graph;
pub mod io;
pub mod lower_bounds;
pub mod partition;
pub mod regular_approx;
pub mod rng;
pub mod weak_regularity;

pub use certify::{CheckMode, CutMode, PairSpec};
pub use cylinder::{CylinderPartition, CylinderVerdict};
pub use edits::EditSet;
pub use error::{Error, Result};
pub use graph::{Bitset, DenseGraph, Matrix, WeightMatrix};
pub use partition::{mean_square_density, RegularityParams, VertexPartition};
pub use regular_approx::{regular_approximation, regularize_pair, ApproxMode, GFunction};
pub use weak_regularity::{fk_partition, szemeredi_partition, tao_partition};
