//! The vertical-line sweep functional `g_m` over square covers, circumscribing
//! polygons and the stage-by-stage estimate ledger, run on finite prefixes of a
//! packing ordered by decreasing diameter.

mod cover;
mod gm;
mod ledger;
mod polygon;

pub use cover::{dyadic_cover, Square, SquareCover};
pub use gm::{
    basic_difference_audit, compute_gm, compute_gm_all, cover_bound_audit, line_components, GmProfile, SweepGrid,
};
pub use ledger::{main_estimate_audit, main_estimate_stability, COVER_CHECK_RESOLUTION};
pub use polygon::{
    circumscribe_and_refine, circumscribing_rect, good_estimate_audit, good_estimate_audit_with, lambda_threshold,
    midpoint_audit, midpoint_constant, EdgeSource, Polygon,
};
