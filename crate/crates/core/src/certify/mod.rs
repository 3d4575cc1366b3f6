//! Verifiers: pair regularity, cut norms, weak partitions, 4-walk mixing
//! certificates and induced-copy counts.

pub mod counting;
pub mod cutnorm;
pub mod pair;
pub mod quasirandom;
pub mod weak;

pub use counting::{count_induced, counting_hypotheses, counting_lemma_threshold, CountingHypotheses};
pub use cutnorm::{cut_norm_exact, cut_norm_heuristic, CutNormResult};
pub use pair::{
    check_pair, check_pair_exhaustive, check_pair_sampled, count_irregular_pairs, floor_count, pair_density, CheckMode,
    Criterion, IrregularReport, PairSpec, PairVerdict, SubPair, VerdictMode, Witness, EXHAUSTIVE_CAP,
};
pub use quasirandom::{mixing_exhaustive, quasirandom_certificate, QuasirandomCertificate};
pub use weak::{check_weak_partition, defect_matrix, weak_defect, CutMode, WeakVerdict};
