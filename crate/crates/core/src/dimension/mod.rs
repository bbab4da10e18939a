//! Residual-set rasters, box counting, s-content and packing exponents.
//!
//! Box dimension is the computable proxy here: it bounds Hausdorff dimension from
//! above, so fitted slopes are consistency checks for lower-bound statements, never
//! proofs of them.

mod bits;
mod boxcount;
mod exponent;
mod raster;

pub use bits::BitGrid;
pub use boxcount::{box_count, default_scales, dimension_fit, s_content, DimFit, BOX_DIMENSION_CAVEAT};
pub use exponent::{packing_exponent, ExponentEstimate};
pub use raster::{rasterize_residual, rasterize_residual_with_cap, ResidualRaster, DEFAULT_CELL_CAP};
