//! Closed, positively oriented curves made of straight segments and circular arcs.
//!
//! Lunes, rounded squares and polygons are all of this form, which gives exact
//! arc-length parametrisation, curvature, slices and support points.

use alloc::vec::Vec;

use super::{Point, Rect};
use crate::math::{floor, sqrt, wrap_angle, FRAC_PI_2, TAU};

const ANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Piece {
    Seg { a: Point, b: Point },
    /// Counterclockwise arc of the circle `(c, r)` from angle `a0` through `sweep > 0`.
    Arc { c: Point, r: f64, a0: f64, sweep: f64 },
}

impl Piece {
    fn length(&self) -> f64 {
        match *self {
            Piece::Seg { a, b } => a.dist(b),
            Piece::Arc { r, sweep, .. } => r * sweep,
        }
    }

    fn start(&self) -> Point {
        match *self {
            Piece::Seg { a, .. } => a,
            Piece::Arc { c, r, a0, .. } => c + Point::polar(r, a0),
        }
    }

    fn end(&self) -> Point {
        match *self {
            Piece::Seg { b, .. } => b,
            Piece::Arc { c, r, a0, sweep } => c + Point::polar(r, a0 + sweep),
        }
    }

    fn tangent_at_start(&self) -> Point {
        match *self {
            Piece::Seg { a, b } => (b - a).normalized(),
            Piece::Arc { a0, .. } => Point::unit(a0 + FRAC_PI_2),
        }
    }

    fn tangent_at_end(&self) -> Point {
        match *self {
            Piece::Seg { a, b } => (b - a).normalized(),
            Piece::Arc { a0, sweep, .. } => Point::unit(a0 + sweep + FRAC_PI_2),
        }
    }

    /// Point, unit tangent and curvature at arc length `s` from the start.
    fn frame(&self, s: f64) -> (Point, Point, f64) {
        match *self {
            Piece::Seg { a, b } => {
                let len = a.dist(b);
                let t = if len > 0.0 { s / len } else { 0.0 };
                (a.lerp(b, t), (b - a).normalized(), 0.0)
            }
            Piece::Arc { c, r, a0, .. } => {
                let th = a0 + s / r;
                (c + Point::polar(r, th), Point::unit(th + FRAC_PI_2), 1.0 / r)
            }
        }
    }

    /// Whether direction angle `th` lies in the arc's angular range.
    fn arc_covers(a0: f64, sweep: f64, th: f64) -> bool {
        let d = wrap_angle(th - a0);
        d <= sweep + ANGLE_SLACK || d >= TAU - ANGLE_SLACK
    }

    /// Along-line coordinates where the line `y = w` (or `x = w` when `vertical`) meets
    /// this piece.
    fn line_hits(&self, w: f64, vertical: bool, out: &mut Vec<f64>) {
        // (along, fixed) coordinates
        let uv = |p: Point| if vertical { (p.y, p.x) } else { (p.x, p.y) };
        match *self {
            Piece::Seg { a, b } => {
                let (au, av) = uv(a);
                let (bu, bv) = uv(b);
                if av == bv {
                    if av == w {
                        out.push(au);
                        out.push(bu);
                    }
                    return;
                }
                if (av - w) * (bv - w) > 0.0 {
                    return;
                }
                let t = (w - av) / (bv - av);
                out.push(au + (bu - au) * t);
            }
            Piece::Arc { c, r, a0, sweep } => {
                let (cu, cv) = uv(c);
                let d = w - cv;
                if d.abs() > r {
                    return;
                }
                let h = sqrt((r * r - d * d).max(0.0));
                for dh in [h, -h] {
                    let rel = if vertical { Point::new(d, dh) } else { Point::new(dh, d) };
                    if Self::arc_covers(a0, sweep, rel.angle()) {
                        out.push(cu + dh);
                    }
                }
            }
        }
    }

    fn support(&self, u: Point) -> f64 {
        let mut best = self.start().dot(u).max(self.end().dot(u));
        if let Piece::Arc { c, r, a0, sweep } = *self {
            if Self::arc_covers(a0, sweep, u.angle()) {
                best = best.max(c.dot(u) + r * u.norm());
            }
        }
        best
    }

    fn support_point(&self, u: Point) -> Point {
        let (s, e) = (self.start(), self.end());
        let mut best = if s.dot(u) >= e.dot(u) { s } else { e };
        if let Piece::Arc { c, r, a0, sweep } = *self {
            let th = u.angle();
            if Self::arc_covers(a0, sweep, th) {
                let p = c + Point::polar(r, th);
                if p.dot(u) > best.dot(u) {
                    best = p;
                }
            }
        }
        best
    }

    fn dist_to(&self, p: Point) -> f64 {
        match *self {
            Piece::Seg { a, b } => super::point_segment_distance(p, a, b),
            Piece::Arc { c, r, a0, sweep } => {
                let v = p - c;
                if v.norm() > 0.0 && Self::arc_covers(a0, sweep, v.angle()) {
                    (v.norm() - r).abs()
                } else {
                    p.dist(self.start()).min(p.dist(self.end()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Chain {
    pieces: Vec<Piece>,
    /// `cum[i]` is the arc length at the start of piece `i`; last entry is the total.
    cum: Vec<f64>,
    bbox: Rect,
    polygon: bool,
}

impl Chain {
    /// Builds a chain, dropping zero-length pieces.
    pub(crate) fn new(pieces: Vec<Piece>) -> Chain {
        let pieces: Vec<Piece> = pieces.into_iter().filter(|p| p.length() > 0.0).collect();
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        for p in &pieces {
            cum.push(acc);
            acc += p.length();
        }
        cum.push(acc);
        let polygon = pieces.iter().all(|p| matches!(p, Piece::Seg { .. }));
        let mut chain = Chain { pieces, cum, bbox: Rect::new(0.0, 0.0, 0.0, 0.0), polygon };
        let x1 = chain.support(Point::new(1.0, 0.0));
        let x0 = -chain.support(Point::new(-1.0, 0.0));
        let y1 = chain.support(Point::new(0.0, 1.0));
        let y0 = -chain.support(Point::new(0.0, -1.0));
        chain.bbox = Rect::new(x0, y0, x1, y1);
        chain
    }

    pub(crate) fn polygon(vertices: &[Point]) -> Chain {
        let n = vertices.len();
        Chain::new((0..n).map(|i| Piece::Seg { a: vertices[i], b: vertices[(i + 1) % n] }).collect())
    }

    /// Image under `z ↦ scale·z + offset`.
    pub(crate) fn transformed(&self, scale: f64, offset: Point) -> Chain {
        let map = |p: Point| p * scale + offset;
        Chain::new(
            self.pieces
                .iter()
                .map(|p| match *p {
                    Piece::Seg { a, b } => Piece::Seg { a: map(a), b: map(b) },
                    Piece::Arc { c, r, a0, sweep } => Piece::Arc { c: map(c), r: r * scale, a0, sweep },
                })
                .collect(),
        )
    }

    pub(crate) fn is_polygon(&self) -> bool {
        self.polygon
    }

    pub(crate) fn vertices(&self) -> Vec<Point> {
        self.pieces.iter().map(Piece::start).collect()
    }

    pub(crate) fn length(&self) -> f64 {
        *self.cum.last().unwrap_or(&0.0)
    }

    pub(crate) fn bbox(&self) -> Rect {
        self.bbox
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let total = self.length();
        let s = if s >= total { s - total * floor(s / total) } else { s.max(0.0) };
        let idx = match self.cum[..self.pieces.len()].binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (idx, s - self.cum[idx])
    }

    /// Point, unit tangent and curvature at normalised arc-length parameter `t ∈ [0, 1)`.
    pub(crate) fn frame(&self, t: f64) -> (Point, Point, f64) {
        let (i, ds) = self.locate(t * self.length());
        self.pieces[i].frame(ds)
    }

    pub(crate) fn min_curvature(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Seg { .. } => 0.0,
                Piece::Arc { r, .. } => 1.0 / r,
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn max_curvature(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| match *p {
                Piece::Seg { .. } => 0.0,
                Piece::Arc { r, .. } => 1.0 / r,
            })
            .fold(0.0, f64::max)
    }

    /// Total turning: smooth part plus exterior angles at corners.
    pub(crate) fn total_turning(&self) -> f64 {
        let n = self.pieces.len();
        let mut total = 0.0;
        for i in 0..n {
            if let Piece::Arc { sweep, .. } = self.pieces[i] {
                total += sweep;
            }
            let t0 = self.pieces[i].tangent_at_end();
            let t1 = self.pieces[(i + 1) % n].tangent_at_start();
            total += crate::math::atan2(t0.cross(t1), t0.dot(t1));
        }
        total
    }

    pub(crate) fn support(&self, u: Point) -> f64 {
        self.pieces.iter().map(|p| p.support(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn support_point(&self, u: Point) -> Point {
        let mut best = self.pieces[0].support_point(u);
        for p in &self.pieces[1..] {
            let q = p.support_point(u);
            if q.dot(u) > best.dot(u) {
                best = q;
            }
        }
        best
    }

    pub(crate) fn boundary_distance(&self, p: Point) -> f64 {
        self.pieces.iter().map(|q| q.dist_to(p)).fold(f64::INFINITY, f64::min)
    }

    /// Open slice of the (convex) interior by the horizontal line `y = w`, as an x-interval.
    pub(crate) fn slice(&self, w: f64, vertical: bool) -> Option<(f64, f64)> {
        let (lo, hi) = if vertical { (self.bbox.x0, self.bbox.x1) } else { (self.bbox.y0, self.bbox.y1) };
        if w <= lo || w >= hi {
            return None;
        }
        let mut hits = Vec::new();
        for p in &self.pieces {
            p.line_hits(w, vertical, &mut hits);
        }
        let a = hits.iter().copied().fold(f64::INFINITY, f64::min);
        let b = hits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (a < b).then_some((a, b))
    }

    /// Crossing-number point-in-polygon test; only meaningful for polygons.
    pub(crate) fn polygon_contains(&self, p: Point) -> bool {
        let mut inside = false;
        for piece in &self.pieces {
            if let Piece::Seg { a, b } = *piece {
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if p.x < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside && self.boundary_distance(p) > 0.0
    }
}

/// Boundary of `core ⊕ disk(rho)` for a convex core bounded by circular arcs meeting at
/// corners. `arcs` lists `(center, radius, a0, sweep)` of the core's arcs in order; each
/// consecutive pair meets at a corner which receives a fillet of radius `rho`.
pub(crate) fn offset_arc_polygon(arcs: &[(Point, f64, f64, f64)], rho: f64) -> Chain {
    let n = arcs.len();
    let mut pieces = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (c, r, a0, sweep) = arcs[i];
        pieces.push(Piece::Arc { c, r: r + rho, a0, sweep });
        let an = arcs[(i + 1) % n].2;
        let corner = c + Point::polar(r, a0 + sweep);
        let from = a0 + sweep;
        let to = an;
        let fillet = wrap_angle(to - from);
        if rho > 0.0 && fillet > 1e-12 && fillet < TAU - 1e-12 {
            pieces.push(Piece::Arc { c: corner, r: rho, a0: from, sweep: fillet });
        }
    }
    Chain::new(pieces)
}

/// Rounded polygon `core ⊕ disk(rho)` of a convex polygon core given CCW.
pub(crate) fn offset_polygon(core: &[Point], rho: f64) -> Chain {
    let n = core.len();
    let mut pieces = Vec::with_capacity(2 * n);
    for i in 0..n {
        let a = core[i];
        let b = core[(i + 1) % n];
        let normal = -(b - a).normalized().perp();
        pieces.push(Piece::Seg { a: a + normal * rho, b: b + normal * rho });
        let c = core[(i + 2) % n];
        let next_normal = -(c - b).normalized().perp();
        let from = normal.angle();
        let sweep = wrap_angle(next_normal.angle() - from);
        if rho > 0.0 && sweep > 1e-12 && sweep < TAU - 1e-12 {
            pieces.push(Piece::Arc { c: b, r: rho, a0: from, sweep });
        }
    }
    Chain::new(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;

    fn square() -> Chain {
        Chain::polygon(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
    }

    #[test]
    fn polygon_basics() {
        let sq = square();
        assert_eq!(sq.length(), 4.0);
        assert!((sq.total_turning() - TAU).abs() < 1e-12);
        assert_eq!(sq.slice(0.5, false), Some((0.0, 1.0)));
        assert_eq!(sq.slice(1.0, false), None);
        assert!(sq.polygon_contains(Point::new(0.5, 0.5)));
        assert!(!sq.polygon_contains(Point::new(1.5, 0.5)));
        assert_eq!(sq.bbox(), Rect::unit());
    }

    #[test]
    fn rounded_square_offset() {
        let core = [
            Point::new(-0.5, -0.5),
            Point::new(0.5, -0.5),
            Point::new(0.5, 0.5),
            Point::new(-0.5, 0.5),
        ];
        let ch = offset_polygon(&core, 0.25);
        let expected = 4.0 + TAU * 0.25;
        assert!((ch.length() - expected).abs() < 1e-12);
        assert!((ch.total_turning() - TAU).abs() < 1e-12);
        assert!((ch.bbox().x1 - 0.75).abs() < 1e-15);
        let (p, _, k) = ch.frame(0.0);
        assert!((p.x + 0.5).abs() < 1e-15 && (p.y + 0.75).abs() < 1e-15);
        assert_eq!(k, 0.0);
    }

    #[test]
    fn arc_slice() {
        let ch = Chain::new(alloc::vec![Piece::Arc { c: Point::new(0.0, 0.0), r: 1.0, a0: 0.0, sweep: TAU }]);
        let (a, b) = ch.slice(0.6, false).unwrap();
        assert!((a + 0.8).abs() < 1e-12 && (b - 0.8).abs() < 1e-12);
        let (a, b) = ch.slice(-0.6, true).unwrap();
        assert!((a + 0.8).abs() < 1e-12 && (b - 0.8).abs() < 1e-12);
        assert!((ch.length() - 2.0 * PI).abs() < 1e-12);
    }
}
