use serde::{Deserialize, Serialize};

use super::BitGrid;
use crate::error::{Error, Result};
use crate::geometry::{Packing, Point, Rect, Region};
use crate::math::{ceil, floor};

/// Default cap on raster cells (`2^30`, 128 MiB of flags).
pub const DEFAULT_CELL_CAP: u64 = 1 << 30;

/// Cells of a square window flagged when they meet the residual set: not strictly
/// inside any region and not strictly outside the ambient domain.
///
/// The window is the square on the packing domain's lower-left corner with side
/// `max(width, height)`; cells beyond the domain rectangle are cleared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRaster {
    pub window: Rect,
    pub resolution: usize,
    pub bits: BitGrid,
    /// Fraction of set cells that are only partly covered by some region.
    pub band_fraction: f64,
}

impl ResidualRaster {
    pub fn cell(&self) -> f64 {
        self.window.width() / self.resolution as f64
    }

    pub fn count(&self) -> u64 {
        self.bits.count()
    }
}

pub fn rasterize_residual(packing: &Packing, resolution: usize) -> Result<ResidualRaster> {
    rasterize_residual_with_cap(packing, resolution, DEFAULT_CELL_CAP)
}

/// x-extent of the closed convex region over the band `y0 ≤ y ≤ y1`.
fn band_extent(r: &Region, y0: f64, y1: f64) -> Option<(f64, f64)> {
    let bb = r.bbox();
    if y1 < bb.y0 || y0 > bb.y1 {
        return None;
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in [y0, y1] {
        if let Some((a, b)) = r.slice_at_y(y) {
            lo = lo.min(a);
            hi = hi.max(b);
        }
    }
    for u in [Point::new(-1.0, 0.0), Point::new(1.0, 0.0)] {
        let p = r.support_point(u);
        if p.y >= y0 && p.y <= y1 {
            lo = lo.min(p.x);
            hi = hi.max(p.x);
        }
    }
    // a band thinner than the region's tip can miss every slice and extreme point
    if lo > hi {
        for u in [Point::new(0.0, -1.0), Point::new(0.0, 1.0)] {
            let p = r.support_point(u);
            if p.y >= y0 && p.y <= y1 {
                lo = lo.min(p.x);
                hi = hi.max(p.x);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

pub fn rasterize_residual_with_cap(packing: &Packing, resolution: usize, cap: u64) -> Result<ResidualRaster> {
    if !resolution.is_power_of_two() || resolution > 1 << 14 {
        return Err(Error::OutOfRange { value: resolution as f64, range: "powers of two up to 2^14" });
    }
    let cells = (resolution as u64) * (resolution as u64);
    if cells > cap {
        return Err(Error::MemoryGuard { requested: cells, cap });
    }
    let d = packing.domain;
    let side = d.width().max(d.height());
    let window = Rect::new(d.x0, d.y0, d.x0 + side, d.y0 + side);
    let n = resolution;
    let h = side / n as f64;
    let mut bits = BitGrid::new(n, true);
    let mut band = BitGrid::new(n, false);
    let xs = |i: usize| window.x0 + i as f64 * h;
    let ys = |j: usize| window.y0 + j as f64 * h;
    // smallest k with xs(k) > x, and largest k with xs(k) < x (0 when none)
    let first_gt = |x: f64| {
        let mut k = (floor((x - window.x0) / h).max(-1.0) as i64 + 1).min(n as i64 + 1) as usize;
        while k > 0 && xs(k - 1) > x {
            k -= 1;
        }
        while k <= n && xs(k) <= x {
            k += 1;
        }
        k.min(n)
    };
    let last_lt = |x: f64| {
        let mut k = (ceil((x - window.x0) / h).max(0.0) as i64 - 1).clamp(0, n as i64) as usize;
        while k < n && xs(k + 1) < x {
            k += 1;
        }
        while k > 0 && xs(k) >= x {
            k -= 1;
        }
        k
    };

    // strictly outside the domain rectangle
    for j in 0..n {
        if ys(j) > d.y1 {
            bits.set_range(j, 0, n, false);
        } else {
            bits.set_range(j, first_gt(d.x1), n, false);
        }
    }
    // strictly outside the ambient open set
    if let Some(outer) = &packing.outer {
        for j in 0..n {
            match band_extent(outer, ys(j), ys(j + 1)) {
                None => bits.set_range(j, 0, n, false),
                Some((lo, hi)) => {
                    bits.set_range(j, 0, last_lt(lo), false);
                    bits.set_range(j, first_gt(hi), n, false);
                }
            }
        }
    }
    for r in &packing.regions {
        let bb = r.bbox();
        let j0 = (floor((bb.y0 - window.y0) / h) as i64).clamp(0, n as i64) as usize;
        let j1 = (ceil((bb.y1 - window.y0) / h) as i64 + 1).clamp(0, n as i64) as usize;
        for j in j0..j1 {
            let (y0, y1) = (ys(j), ys(j + 1));
            if let Some((lo, hi)) = band_extent(r, y0, y1) {
                band.set_range(j, last_lt(lo), first_gt(hi), true);
            }
            // a cell lies in the open convex region iff its four corners do
            if let (Some((a0, b0)), Some((a1, b1))) = (r.slice_at_y(y0), r.slice_at_y(y1)) {
                let (lo, hi) = (a0.max(a1), b0.min(b1));
                let (i0, i1) = (first_gt(lo), last_lt(hi));
                if i1 > i0 {
                    bits.set_range(j, i0, i1, false);
                    band.set_range(j, i0, i1, false);
                }
            }
        }
    }
    let set = bits.count();
    let band_fraction = if set > 0 { bits.count_and(&band) as f64 / set as f64 } else { 0.0 };
    Ok(ResidualRaster { window, resolution, bits, band_fraction })
}
