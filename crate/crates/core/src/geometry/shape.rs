//! Evaluators behind [`CurveDescriptor`](super::CurveDescriptor).

use alloc::vec::Vec;

use super::chain::Chain;
use super::{Point, Rect};
use crate::math::{
    cos, floor, golden_max, hypot, pow, signed_pow, sin, sqrt, wrap_angle, PI, TAU,
};

/// Nodes used to tabulate superellipse arc length and to integrate ellipse length.
const TABLE: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Ellipse {
    pub c: Point,
    pub a: f64,
    pub b: f64,
    /// Unit vector of the `a` axis.
    e1: Point,
    length: f64,
}

impl Ellipse {
    pub(crate) fn new(c: Point, a: f64, b: f64, angle: f64) -> Ellipse {
        let e1 = Point::unit(angle);
        let mut e = Ellipse { c, a, b, e1, length: 0.0 };
        e.length = if a == b {
            TAU * a
        } else {
            // periodic trapezoid rule converges geometrically for this integrand
            let n = 4096;
            let h = TAU / n as f64;
            let sum: f64 = (0..n)
                .map(|i| {
                    let th = i as f64 * h;
                    hypot(a * sin(th), b * cos(th))
                })
                .sum();
            sum * h
        };
        e
    }

    fn local_to_world(&self, v: Point) -> Point {
        self.c + self.e1 * v.x + self.e1.perp() * v.y
    }

    fn world_to_local(&self, p: Point) -> Point {
        let d = p - self.c;
        Point::new(d.dot(self.e1), d.dot(self.e1.perp()))
    }

    fn frame(&self, t: f64) -> (Point, Point, f64) {
        let th = TAU * t;
        let (s, c) = (sin(th), cos(th));
        let p = self.local_to_world(Point::new(self.a * c, self.b * s));
        let d = Point::new(-self.a * s, self.b * c);
        let speed = d.norm();
        let tangent = (self.e1 * d.x + self.e1.perp() * d.y) * (1.0 / speed);
        let kappa = self.a * self.b / (speed * speed * speed);
        (p, tangent, kappa)
    }

    fn quad(&self, p: Point) -> f64 {
        let l = self.world_to_local(p);
        (l.x / self.a) * (l.x / self.a) + (l.y / self.b) * (l.y / self.b)
    }

    fn support(&self, u: Point) -> f64 {
        let (ux, uy) = (u.dot(self.e1), u.dot(self.e1.perp()));
        self.c.dot(u) + hypot(self.a * ux, self.b * uy)
    }

    fn support_point(&self, u: Point) -> Point {
        let (ux, uy) = (u.dot(self.e1), u.dot(self.e1.perp()));
        let h = hypot(self.a * ux, self.b * uy);
        self.local_to_world(Point::new(self.a * self.a * ux / h, self.b * self.b * uy / h))
    }

    fn slice(&self, w: f64, vertical: bool) -> Option<(f64, f64)> {
        // quadratic form A dx² + 2B dx dy + C dy² < 1 in world offsets
        let (cs, sn) = (self.e1.x, self.e1.y);
        let (ia, ib) = (1.0 / (self.a * self.a), 1.0 / (self.b * self.b));
        let qa = cs * cs * ia + sn * sn * ib;
        let qb = cs * sn * (ia - ib);
        let qc = sn * sn * ia + cs * cs * ib;
        let (fixed, coef_u, coef_v, cu) = if vertical {
            (w - self.c.x, qc, qa, self.c.y)
        } else {
            (w - self.c.y, qa, qc, self.c.x)
        };
        // coef_u du² + 2 qb fixed du + coef_v fixed² - 1 = 0
        let bq = qb * fixed;
        let disc = bq * bq - coef_u * (coef_v * fixed * fixed - 1.0);
        if disc <= 0.0 {
            return None;
        }
        let r = sqrt(disc);
        let lo = (-bq - r) / coef_u;
        let hi = (-bq + r) / coef_u;
        (lo < hi).then_some((cu + lo, cu + hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Superellipse {
    pub c: Point,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    /// Cumulative arc length at the table nodes `u_i = 8 i / TABLE`.
    cum: Vec<f64>,
}

impl Superellipse {
    pub(crate) fn new(c: Point, a: f64, b: f64, p: f64) -> Superellipse {
        let mut s = Superellipse { c, a, b, p, cum: Vec::with_capacity(TABLE + 1) };
        let mut prev = s.at_u(0.0);
        let mut acc = 0.0;
        s.cum.push(0.0);
        for i in 1..=TABLE {
            let q = s.at_u(8.0 * i as f64 / TABLE as f64);
            acc += q.dist(prev);
            s.cum.push(acc);
            prev = q;
        }
        s
    }

    /// Point of the unit curve in the first octant, graph-parametrised by `g ∈ [0, 1]`.
    fn octant(&self, g: f64) -> Point {
        let d = pow(2.0, -1.0 / self.p);
        let y = g * d;
        let x = pow((1.0 - pow(y, self.p)).max(0.0), 1.0 / self.p);
        Point::new(x, y)
    }

    /// Curve point at table parameter `u ∈ [0, 8)` (two octants per quadrant).
    fn at_u(&self, u: f64) -> Point {
        let u = u - 8.0 * floor(u / 8.0);
        let k = floor(u / 2.0).min(3.0);
        let v = u - 2.0 * k;
        let q = if v < 1.0 {
            self.octant(v)
        } else {
            let o = self.octant(2.0 - v);
            Point::new(o.y, o.x)
        };
        let q = match k as i32 {
            0 => q,
            1 => Point::new(-q.y, q.x),
            2 => Point::new(-q.x, -q.y),
            _ => Point::new(q.y, -q.x),
        };
        Point::new(self.c.x + self.a * q.x, self.c.y + self.b * q.y)
    }

    fn length(&self) -> f64 {
        self.cum[TABLE]
    }

    fn u_at_fraction(&self, t: f64) -> f64 {
        let t = t - floor(t);
        let s = t * self.length();
        let i = match self.cum.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(TABLE - 1),
            Err(i) => (i - 1).min(TABLE - 1),
        };
        let seg = self.cum[i + 1] - self.cum[i];
        let f = if seg > 0.0 { (s - self.cum[i]) / seg } else { 0.0 };
        8.0 * (i as f64 + f) / TABLE as f64
    }

    fn gradient_terms(&self, p: Point) -> (f64, f64, f64, f64) {
        let x = (p.x - self.c.x) / self.a;
        let y = (p.y - self.c.y) / self.b;
        let pp = self.p;
        let fx = pp * signed_pow(x, pp - 1.0) / self.a;
        let fy = pp * signed_pow(y, pp - 1.0) / self.b;
        let fxx = pp * (pp - 1.0) * pow(x.abs(), pp - 2.0) / (self.a * self.a);
        let fyy = pp * (pp - 1.0) * pow(y.abs(), pp - 2.0) / (self.b * self.b);
        (fx, fy, fxx, fyy)
    }

    fn frame(&self, t: f64) -> (Point, Point, f64) {
        let p = self.at_u(self.u_at_fraction(t));
        let (fx, fy, fxx, fyy) = self.gradient_terms(p);
        let g = hypot(fx, fy);
        let tangent = Point::new(-fy / g, fx / g);
        let kappa = (fxx * fy * fy + fyy * fx * fx) / (g * g * g);
        (p, tangent, kappa)
    }

    fn level(&self, p: Point) -> f64 {
        pow(((p.x - self.c.x) / self.a).abs(), self.p) + pow(((p.y - self.c.y) / self.b).abs(), self.p)
    }

    fn dual(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    fn support(&self, u: Point) -> f64 {
        let q = self.dual();
        let (wx, wy) = (self.a * u.x, self.b * u.y);
        self.c.dot(u) + pow(pow(wx.abs(), q) + pow(wy.abs(), q), 1.0 / q)
    }

    fn support_point(&self, u: Point) -> Point {
        let q = self.dual();
        let (wx, wy) = (self.a * u.x, self.b * u.y);
        let norm = pow(pow(wx.abs(), q) + pow(wy.abs(), q), 1.0 / q);
        let x = signed_pow(wx / norm, q - 1.0);
        let y = signed_pow(wy / norm, q - 1.0);
        Point::new(self.c.x + self.a * x, self.c.y + self.b * y)
    }

    fn slice(&self, w: f64, vertical: bool) -> Option<(f64, f64)> {
        let (fixed, half_fixed, half_along, center) = if vertical {
            (w - self.c.x, self.a, self.b, self.c.y)
        } else {
            (w - self.c.y, self.b, self.a, self.c.x)
        };
        let f = (fixed / half_fixed).abs();
        if f >= 1.0 {
            return None;
        }
        let h = half_along * pow(1.0 - pow(f, self.p), 1.0 / self.p);
        (h > 0.0).then_some((center - h, center + h))
    }
}

/// Evaluator for one curve kind.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Shape {
    Ellipse(Ellipse),
    Superellipse(Superellipse),
    Chain(Chain),
}

impl Shape {
    /// Boundary point, unit tangent and curvature at parameter `t ∈ [0, 1)`.
    ///
    /// Ellipses use the eccentric angle `2πt`; the other kinds are parametrised by
    /// normalised arc length.
    pub(crate) fn frame(&self, t: f64) -> (Point, Point, f64) {
        match self {
            Shape::Ellipse(e) => e.frame(t),
            Shape::Superellipse(s) => s.frame(t),
            Shape::Chain(c) => c.frame(t),
        }
    }

    pub(crate) fn point(&self, t: f64) -> Point {
        match self {
            Shape::Superellipse(s) => s.at_u(s.u_at_fraction(t)),
            _ => self.frame(t).0,
        }
    }

    pub(crate) fn length(&self) -> f64 {
        match self {
            Shape::Ellipse(e) => e.length,
            Shape::Superellipse(s) => s.length(),
            Shape::Chain(c) => c.length(),
        }
    }

    pub(crate) fn support(&self, u: Point) -> f64 {
        match self {
            Shape::Ellipse(e) => e.support(u),
            Shape::Superellipse(s) => s.support(u),
            Shape::Chain(c) => c.support(u),
        }
    }

    pub(crate) fn support_point(&self, u: Point) -> Point {
        match self {
            Shape::Ellipse(e) => e.support_point(u),
            Shape::Superellipse(s) => s.support_point(u),
            Shape::Chain(c) => c.support_point(u),
        }
    }

    pub(crate) fn bbox(&self) -> Rect {
        match self {
            Shape::Chain(c) => c.bbox(),
            _ => {
                let x1 = self.support(Point::new(1.0, 0.0));
                let x0 = -self.support(Point::new(-1.0, 0.0));
                let y1 = self.support(Point::new(0.0, 1.0));
                let y0 = -self.support(Point::new(0.0, -1.0));
                Rect::new(x0, y0, x1, y1)
            }
        }
    }

    /// Open slice of the interior by `y = w` (x-interval), or by `x = w` (y-interval)
    /// when `vertical`.
    pub(crate) fn slice(&self, w: f64, vertical: bool) -> Option<(f64, f64)> {
        match self {
            Shape::Ellipse(e) => e.slice(w, vertical),
            Shape::Superellipse(s) => s.slice(w, vertical),
            Shape::Chain(c) => c.slice(w, vertical),
        }
    }

    /// Strict interior test.
    pub(crate) fn contains(&self, p: Point) -> bool {
        match self {
            Shape::Ellipse(e) => e.quad(p) < 1.0,
            Shape::Superellipse(s) => s.level(p) < 1.0,
            Shape::Chain(c) if c.is_polygon() => c.polygon_contains(p),
            Shape::Chain(_) => matches!(self.slice(p.y, false), Some((a, b)) if a < p.x && p.x < b),
        }
    }

    pub(crate) fn min_curvature(&self) -> f64 {
        match self {
            Shape::Ellipse(e) => e.a.min(e.b) / (e.a.max(e.b) * e.a.max(e.b)),
            Shape::Superellipse(s) if s.p == 2.0 => s.a.min(s.b) / (s.a.max(s.b) * s.a.max(s.b)),
            Shape::Superellipse(_) => 0.0,
            Shape::Chain(c) => c.min_curvature(),
        }
    }

    pub(crate) fn max_curvature(&self, n: usize) -> f64 {
        match self {
            Shape::Ellipse(e) => e.a.max(e.b) / (e.a.min(e.b) * e.a.min(e.b)),
            Shape::Chain(c) => c.max_curvature(),
            Shape::Superellipse(_) => (0..n).map(|i| self.frame(i as f64 / n as f64).2).fold(0.0, f64::max),
        }
    }

    /// `∫ κ ds` including corner turning for chains.
    pub(crate) fn total_turning(&self) -> f64 {
        match self {
            Shape::Chain(c) => c.total_turning(),
            _ => {
                let n = TABLE;
                let mut prev = self.frame(0.0).1.angle();
                let first = prev;
                let mut total = 0.0;
                for i in 1..=n {
                    let a = if i == n { first } else { self.frame(i as f64 / n as f64).1.angle() };
                    let mut d = wrap_angle(a - prev);
                    if d > PI {
                        d -= TAU;
                    }
                    total += d;
                    prev = a;
                }
                total
            }
        }
    }

    /// Width of the shape in direction `u` (unit).
    pub(crate) fn width(&self, u: Point) -> f64 {
        self.support(u) + self.support(-u)
    }

    pub(crate) fn diameter(&self) -> f64 {
        match self {
            Shape::Ellipse(e) => 2.0 * e.a.max(e.b),
            Shape::Chain(c) if c.is_polygon() => {
                let v = c.vertices();
                let mut best = 0.0f64;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        best = best.max(v[i].dist(v[j]));
                    }
                }
                best
            }
            _ => {
                // diameter = maximal width; the width function is smooth between kinks
                let n = 720;
                let step = PI / n as f64;
                let mut best = (0.0, f64::NEG_INFINITY);
                for i in 0..n {
                    let th = i as f64 * step;
                    let w = self.width(Point::unit(th));
                    if w > best.1 {
                        best = (th, w);
                    }
                }
                let (_, w) = golden_max(|th| self.width(Point::unit(th)), best.0 - step, best.0 + step, 80);
                w.max(best.1)
            }
        }
    }

    /// Distance from `p` to the boundary curve.
    pub(crate) fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Shape::Chain(c) => c.boundary_distance(p),
            Shape::Ellipse(e) if e.a == e.b => (p.dist(e.c) - e.a).abs(),
            _ => {
                let n = 2048;
                let mut best = (0.0, f64::INFINITY);
                for i in 0..n {
                    let t = i as f64 / n as f64;
                    let d = self.point(t).dist(p);
                    if d < best.1 {
                        best = (t, d);
                    }
                }
                let h = 1.0 / n as f64;
                let (_, neg) = golden_max(|t| -self.point(t).dist(p), best.0 - h, best.0 + h, 80);
                best.1.min(-neg)
            }
        }
    }

    pub(crate) fn as_circle(&self) -> Option<(Point, f64)> {
        match self {
            Shape::Ellipse(e) if e.a == e.b => Some((e.c, e.a)),
            _ => None,
        }
    }

    pub(crate) fn polygon_vertices(&self) -> Option<Vec<Point>> {
        match self {
            Shape::Chain(c) if c.is_polygon() => Some(c.vertices()),
            _ => None,
        }
    }
}
