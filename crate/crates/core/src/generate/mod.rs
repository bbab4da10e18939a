//! Packing generators: Apollonian gaskets, Sierpinski triangles, lunes, random
//! bounded-curvature families and the two counterexample constructions whose
//! residual sets have dimension one.

mod apollonian;
mod bounded;
mod counterexample;
mod sierpinski;

pub use apollonian::{descartes_quadruple, gen_apollonian};
pub use bounded::{ellipse_aspect_cap, gen_bounded_curvature_packing};
pub use counterexample::{gen_counterexample_convex, gen_counterexample_strict, Ball, CoverLedger, LevelLedger};
pub use sierpinski::gen_sierpinski;

use crate::error::{Error, Result};
use crate::geometry::CurveDescriptor;

/// Boundary of the intersection of the unit disks centred at `(0,0)` and `(c,0)`.
pub fn gen_lune_curve(c: f64) -> Result<CurveDescriptor> {
    if c >= 2.0 {
        return Err(Error::Degenerate("lune with c >= 2 is empty".into()));
    }
    if !(c >= 0.0) {
        return Err(Error::OutOfRange { value: c, range: "[0, 2)" });
    }
    Ok(CurveDescriptor::lune(c))
}

/// Uniform draw in `[0, 1)` from the top 53 bits.
pub(crate) fn uniform<R: rand_core::RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
