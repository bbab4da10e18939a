//! Metric predicates on samples and regions.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{point_segment_distance, CurveSamples, Point, Region};
use crate::error::{Error, Result};
use crate::math::{golden_max, PI, TAU};
use crate::par;

/// Length of the shorter sample arc between two indices; the full perimeter when they agree.
pub fn arc_length(samples: &CurveSamples, from_index: usize, to_index: usize) -> Result<f64> {
    let n = samples.len();
    for index in [from_index, to_index] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
    }
    let cum = samples.cumulative();
    let total = cum[n];
    if from_index == to_index {
        return Ok(total);
    }
    let (i, j) = (from_index.min(to_index), from_index.max(to_index));
    let forward = cum[j] - cum[i];
    Ok(forward.min(total - forward))
}

/// Shorter arc between samples `i` and `j` given the cumulative table of [`CurveSamples::cumulative`].
pub(crate) fn shorter_arc(cum: &[f64], i: usize, j: usize) -> f64 {
    let total = cum[cum.len() - 1];
    let (i, j) = (i.min(j), i.max(j));
    let forward = cum[j] - cum[i];
    forward.min(total - forward)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convexity {
    pub convex: bool,
    pub strictly_convex: bool,
}

/// Convexity of a closed polyline from the signs of consecutive edge cross products.
///
/// Three consecutive samples whose triangle area is below `1e-12 · diam²` count as
/// collinear: allowed for convexity, excluded for strict convexity.
pub fn convexity_check(samples: &CurveSamples) -> Result<Convexity> {
    let pts = &samples.points;
    let n = pts.len();
    let diam = samples.diameter();
    let tol = 1e-12 * diam * diam;
    let (mut pos, mut neg, mut flat) = (false, false, false);
    let mut turning = 0.0;
    for i in 0..n {
        let a = pts[(i + n - 1) % n];
        let b = pts[i];
        let c = pts[(i + 1) % n];
        let (e0, e1) = (b - a, c - b);
        let area = 0.5 * e0.cross(e1);
        if area.abs() < tol {
            flat = true;
        } else if area > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
        turning += crate::math::atan2(e0.cross(e1), e0.dot(e1));
    }
    let one_sign = !(pos && neg);
    let winding_once = (turning.abs() - TAU).abs() < 1e-6;
    if one_sign && winding_once {
        return Ok(Convexity { convex: true, strictly_convex: !flat });
    }
    if !is_simple(pts) {
        return Err(Error::NotJordan("sample polyline intersects itself".into()));
    }
    Ok(Convexity { convex: false, strictly_convex: false })
}

/// Whether a closed polyline is free of self-intersections (adjacent edges may share endpoints).
fn is_simple(pts: &[Point]) -> bool {
    let n = pts.len();
    let mut edges: Vec<(f64, f64, usize)> = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            (a.x.min(b.x), a.x.max(b.x), i)
        })
        .collect();
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (k, &(_, hi, i)) in edges.iter().enumerate() {
        for &(lo2, _, j) in &edges[k + 1..] {
            if lo2 > hi {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            if segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| (q - p).cross(r - p);
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on(c, d, a)) || (d2 == 0.0 && on(c, d, b)) || (d3 == 0.0 && on(a, b, c)) || (d4 == 0.0 && on(a, b, d))
}

fn directed_hausdorff(a: &CurveSamples, b: &CurveSamples) -> f64 {
    let m = b.len();
    let dists = par::map_range(a.len(), |i| {
        let p = a.points[i];
        (0..m).map(|j| point_segment_distance(p, b.points[j], b.points[(j + 1) % m])).fold(f64::INFINITY, f64::min)
    });
    dists.into_iter().fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two closed polylines (points to polyline).
pub fn hausdorff_distance(a: &CurveSamples, b: &CurveSamples) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Width of the projection of the samples onto the direction `(cos θ, sin θ)`.
pub fn projection_extent(samples: &CurveSamples, angle: f64) -> f64 {
    let u = Point::unit(angle);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &samples.points {
        let v = p.dot(u);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Oriented line through `point` with unit `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point,
    pub normal: Point,
}

impl Line {
    /// Positive on the side the normal points to.
    pub fn signed_distance(&self, p: Point) -> f64 {
        self.normal.dot(p - self.point)
    }

    pub fn direction(&self) -> Point {
        self.normal.perp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportingLine {
    /// The region lies on the non-positive side.
    pub line: Line,
    /// The external point is on the line rather than strictly beyond it.
    pub touching: bool,
}

const COARSE_DIRECTIONS: usize = 512;

/// Maximises `f` over direction angles: coarse scan, then golden refinement.
fn max_over_directions<F: Fn(f64) -> f64>(f: F, extra: &[f64]) -> (f64, f64) {
    let step = TAU / COARSE_DIRECTIONS as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..COARSE_DIRECTIONS {
        let th = i as f64 * step;
        let v = f(th);
        if v > best.1 {
            best = (th, v);
        }
    }
    for &th in extra {
        let v = f(th);
        if v > best.1 {
            best = (th, v);
        }
    }
    let (th, v) = golden_max(&f, best.0 - step, best.0 + step, 100);
    if v > best.1 {
        (th, v)
    } else {
        best
    }
}

fn edge_normal_angles(r: &Region) -> Vec<f64> {
    match r.polygon_vertices() {
        Some(v) => {
            let n = v.len();
            (0..n).map(|i| (-(v[(i + 1) % n] - v[i]).perp()).angle()).collect()
        }
        None => Vec::new(),
    }
}

/// Largest gap `min_{z∈b} u·z − max_{w∈a} u·w` over unit directions `u`, with the maximiser.
///
/// Positive: distance between disjoint bodies. Zero: touching. Negative: overlap.
pub fn separation(a: &Region, b: &Region) -> (f64, Point) {
    if let (Some((c1, r1)), Some((c2, r2))) = (a.as_circle(), b.as_circle()) {
        let d = c2 - c1;
        let u = if d.norm() > 0.0 { d.normalized() } else { Point::new(1.0, 0.0) };
        return (d.norm() - r1 - r2, u);
    }
    let mut extra = edge_normal_angles(a);
    extra.extend(edge_normal_angles(b).into_iter().map(|t| t + PI));
    support_gap(|u| a.support(u), |u| b.support(u), &extra)
}

/// Separation of two convex bodies given by their support functions, with
/// `extra` candidate direction angles (e.g. edge normals) added to the scan.
pub(crate) fn support_gap<A: Fn(Point) -> f64, B: Fn(Point) -> f64>(ha: A, hb: B, extra: &[f64]) -> (f64, Point) {
    let gap = |th: f64| {
        let u = Point::unit(th);
        -hb(-u) - ha(u)
    };
    let (th, g) = max_over_directions(gap, extra);
    (g, Point::unit(th))
}

/// Edge-normal angles of a polygonal region (empty for curved boundaries).
pub(crate) fn normal_angles(r: &Region) -> Vec<f64> {
    edge_normal_angles(r)
}

/// Distance between two regions with disjoint interiors (0 when touching).
pub fn region_distance(a: &Region, b: &Region) -> f64 {
    separation(a, b).0.max(0.0)
}

/// `dist(D₁, D₂) / min(diam D₁, diam D₂)`.
pub fn relative_separation(d1: &Region, d2: &Region) -> f64 {
    region_distance(d1, d2) / d1.diam().min(d2.diam())
}

/// Line supporting `region` that leaves `external` strictly on the other side.
pub fn supporting_line(region: &Region, external: Point) -> Result<SupportingLine> {
    if region.contains(external) {
        return Err(Error::NoSeparator);
    }
    let gap = |th: f64| {
        let u = Point::unit(th);
        u.dot(external) - region.support(u)
    };
    let (th, g) = max_over_directions(gap, &edge_normal_angles(region));
    let u = Point::unit(th);
    let point = region.support_point(u);
    let touching = g <= 1e-12 * region.diam();
    Ok(SupportingLine { line: Line { point, normal: u }, touching })
}

/// Line tangent to `a` separating it from `b`, oriented so that `a` is on the
/// non-positive side; `None` when the interiors overlap.
pub fn separating_line(a: &Region, b: &Region) -> Option<(Line, f64)> {
    let (gap, u) = separation(a, b);
    if gap < -1e-9 * a.diam().min(b.diam()) {
        return None;
    }
    Some((Line { point: a.support_point(u), normal: u }, gap))
}
