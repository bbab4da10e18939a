//! Numerical audits of the quantitative convexity estimates: chord-arc constants,
//! tangent distances, Ahlfors regularity, counting bounds and boundary contacts.

mod ahlfors;
mod chord_arc;
mod counting;
mod intersections;
mod report;
mod tangent;

pub use ahlfors::{ahlfors_constant, disk_region_area};
pub use chord_arc::{chord_arc_audit, chord_arc_ratio, lune_ratio, theoretical_chord_arc, ChordArcConstant};
pub use counting::{counting_audit, packing_ahlfors, segment_sum_audit, Probe};
pub use intersections::{boundary_intersections, intersections_audit, strictly_convex};
pub use report::{AuditReport, Table, Witness};
pub use tangent::lemma22_audit;
