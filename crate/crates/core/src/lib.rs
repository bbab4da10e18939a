//! Planar packings by convex curves and the quantitative estimates around
//! the dimension of their residual sets.
//!
//! The crate is `no_std` (with `alloc`); the default `std` feature only adds
//! `std::error::Error` plumbing, and `parallel` turns on rayon-backed sweeps.
//! All floating point transcendental functions go through [`libm`] so that
//! results are bit-identical whichever features are enabled.
//!
//! Module map:
//!
//! * [`geometry`]: curve descriptors, sampling, differential quantities and
//!   metric predicates.
//! * [`verify`]: audits of chord-arc, tangent-distance, Ahlfors-regularity,
//!   counting and segment-sum estimates, reported as [`AuditReport`]s.
//! * [`generate`]: Apollonian, Sierpinski, lune, bounded-curvature and the
//!   two dimension-one counterexample constructions.
//! * [`dimension`]: residual rasters, box counting, s-content and packing
//!   exponents.
//! * [`sweep`]: the vertical-line sweep functional over square covers, the
//!   circumscribing polygons and the per-stage estimate ledger.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is how NaN gets rejected along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dimension;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod math;
pub mod par;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CurveDescriptor, CurveSamples, Packing, Point, Rect, Region};
pub use verify::AuditReport;
