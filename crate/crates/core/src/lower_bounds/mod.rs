//! Lower-bound constructions and their diagnostics.

mod family;
mod gowers;
mod half_graph;
mod strong_lb;
mod weak_lb;

pub use family::{partition_family, partition_family_with, FamilyReport, PartitionFamily, FAMILY_RETRIES};
pub use gowers::{
    battery, gowers_graph, rederive, upper_graph, GowersInstance, GowersLevel, GowersParams, GowersReport,
    LevelDiagnostics, LevelSplit, GOWERS_RETRIES, MAX_VERTICES, RHO,
};
pub use half_graph::half_graph;
pub use strong_lb::{strong_lb_graph, strong_lb_schedule, ScheduleEntry, ScheduleRow, StrongLbCaps, StrongLbSchedule};
pub use weak_lb::{
    bernoulli_discrepancy, realize_bernoulli, useful_pairs, weak_lb_diagnostics, weak_lb_full_scale, weak_lb_weights,
    BernoulliReport, CutFamily, WeakLb, WeakLbFullScale, WeakLbParams, WeakLbProbe, WeakLbReport,
};
