use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{CurveDescriptor, Packing, PackingMeta, ParamValue, Point, Rect, Region};
use crate::math::sqrt;

/// Sierpinski packing of the unit equilateral triangle with vertices `(0,0)`, `(1,0)`,
/// `(½, √3/2)`: level `ℓ` removes the `3^{ℓ−1}` inverted triangles of side `2^{−ℓ}`.
///
/// Regions are listed level by level; the window is the unit square and the outer
/// triangle is recorded as `outer`.
pub fn gen_sierpinski(depth: u32) -> Result<Packing> {
    if !(1..=12).contains(&depth) {
        return Err(Error::OutOfRange { value: depth as f64, range: "[1, 12]" });
    }
    let top = Point::new(0.5, sqrt(3.0) / 2.0);
    let mut level = alloc::vec![[Point::new(0.0, 0.0), Point::new(1.0, 0.0), top]];
    let mut regions = Vec::with_capacity((3usize.pow(depth) - 1) / 2);
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 3);
        for [a, b, c] in level {
            let (ab, bc, ca) = (a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5));
            regions.push(Region::new(CurveDescriptor::polygon(alloc::vec![ab, bc, ca]))?);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
        }
        level = next;
    }
    let meta = PackingMeta::new("sierpinski").with("depth", ParamValue::Int(depth as i64));
    let mut packing = Packing::new(Rect::unit(), regions, meta);
    packing.outer = Some(Region::new(CurveDescriptor::polygon(alloc::vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), top]))?);
    Ok(packing)
}
