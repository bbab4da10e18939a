use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{CurveDescriptor, CurveSamples, Point, Rect, Shape};
use crate::error::{Error, Result};

/// An open convex Jordan region together with cached bounding box and diameter.
///
/// Serialises as its boundary descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CurveDescriptor", into = "CurveDescriptor")]
pub struct Region {
    boundary: CurveDescriptor,
    bbox: Rect,
    diam: f64,
    shape: Shape,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.boundary == other.boundary
    }
}

impl TryFrom<CurveDescriptor> for Region {
    type Error = Error;
    fn try_from(d: CurveDescriptor) -> Result<Region> {
        Region::new(d)
    }
}

impl From<Region> for CurveDescriptor {
    fn from(r: Region) -> CurveDescriptor {
        r.boundary
    }
}

impl Region {
    pub fn new(boundary: CurveDescriptor) -> Result<Region> {
        let shape = boundary.build()?;
        if let CurveDescriptor::Polyline { .. } = boundary {
            let v = shape.polygon_vertices().unwrap_or_default();
            let n = v.len();
            for i in 0..n {
                let turn = (v[(i + 1) % n] - v[i]).cross(v[(i + 2) % n] - v[(i + 1) % n]);
                if turn < 0.0 {
                    return Err(Error::NotConvex);
                }
            }
        }
        let bbox = shape.bbox();
        let diam = shape.diameter();
        if !(diam > 1e-300) {
            return Err(Error::Degenerate("region diameter is zero".into()));
        }
        Ok(Region { boundary, bbox, diam, shape })
    }

    pub fn circle(cx: f64, cy: f64, r: f64) -> Result<Region> {
        Region::new(CurveDescriptor::circle(cx, cy, r))
    }

    pub fn boundary(&self) -> &CurveDescriptor {
        &self.boundary
    }

    pub fn bbox(&self) -> Rect {
        self.bbox
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn length(&self) -> f64 {
        self.shape.length()
    }

    /// Centre and radius when the region is a disk.
    pub fn as_circle(&self) -> Option<(Point, f64)> {
        self.shape.as_circle()
    }

    pub fn polygon_vertices(&self) -> Option<Vec<Point>> {
        self.shape.polygon_vertices()
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point) -> bool {
        self.bbox.contains_point(p) && self.shape.contains(p)
    }

    /// Open interval of `x` with `(x, y)` inside the region.
    pub fn slice_at_y(&self, y: f64) -> Option<(f64, f64)> {
        self.shape.slice(y, false)
    }

    /// Open interval of `y` with `(x, y)` inside the region.
    pub fn slice_at_x(&self, x: f64) -> Option<(f64, f64)> {
        self.shape.slice(x, true)
    }

    /// Support function `max_{z ∈ D} u·z`.
    pub fn support(&self, u: Point) -> f64 {
        self.shape.support(u)
    }

    pub fn support_point(&self, u: Point) -> Point {
        self.shape.support_point(u)
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.shape.boundary_distance(p)
    }

    /// Boundary point at parameter `t ∈ [0, 1)`.
    pub fn point_at(&self, t: f64) -> Point {
        self.shape.point(t)
    }

    /// Point, unit tangent and curvature at parameter `t`.
    pub fn frame_at(&self, t: f64) -> (Point, Point, f64) {
        self.shape.frame(t)
    }

    pub fn samples(&self, n: usize) -> CurveSamples {
        let pts = (0..n.max(3)).map(|i| self.shape.point(i as f64 / n.max(3) as f64)).collect();
        CurveSamples { points: pts }
    }

    pub fn min_curvature(&self) -> f64 {
        self.shape.min_curvature()
    }

    pub fn max_curvature(&self) -> f64 {
        self.shape.max_curvature(4096)
    }

    /// Scale-free curvature bound `κ_min · length`.
    pub fn curvature_bound(&self) -> f64 {
        self.shape.min_curvature() * self.shape.length()
    }

    pub fn scaled(&self, k: f64) -> Result<Region> {
        Region::new(self.boundary.scaled(k))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Result<Region> {
        Region::new(self.boundary.translated(dx, dy))
    }

    /// Area; exact for disks, ellipses and polygons, otherwise from a dense inscribed polygon.
    pub fn area(&self) -> f64 {
        if let Some((_, r)) = self.as_circle() {
            return crate::math::PI * r * r;
        }
        if let CurveDescriptor::Ellipse { a, b, .. } = self.boundary {
            return crate::math::PI * a * b;
        }
        if let Some(v) = self.polygon_vertices() {
            return super::curve::signed_area(&v).abs();
        }
        let s = self.samples(1 << 14);
        s.signed_area().abs()
    }
}
