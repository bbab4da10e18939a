use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::chain::{offset_arc_polygon, offset_polygon, Chain, Piece};
use super::shape::{Ellipse, Superellipse};
use super::{Point, Shape};
use crate::error::{Error, Result};
use crate::math::{atan2, sqrt, PI, TAU};

fn one() -> f64 {
    1.0
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

/// Analytic or polygonal description of a closed convex curve, positively oriented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CurveDescriptor {
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    /// Semi-axes `a`, `b`; `angle` rotates the `a` axis counterclockwise.
    Ellipse {
        cx: f64,
        cy: f64,
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        angle: f64,
    },
    /// `|x/a|^p + |y/b|^p = 1` about `(cx, cy)`.
    Superellipse {
        cx: f64,
        cy: f64,
        a: f64,
        b: f64,
        p: f64,
    },
    /// Boundary of the intersection of the unit disks centred at `(0,0)` and `(c,0)`,
    /// optionally with corners rounded by `smoothing`, then scaled and translated.
    Lune {
        c: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        smoothing: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        dx: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        dy: f64,
    },
    /// Axis-parallel square of side `side` with corners replaced by quarter circles of
    /// radius `alpha`. With `bulge = Some(R)` the flat sides become arcs of radius `R`
    /// touching the square's sides at their midpoints, which makes the curve strictly convex.
    SmoothenedSquare {
        cx: f64,
        cy: f64,
        side: f64,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bulge: Option<f64>,
    },
    /// Convex polygon; clockwise input is reversed.
    Polyline { vertices: Vec<Point> },
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDescriptor(format!("{name} is not finite")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDescriptor(format!("{name} must be positive, got {v}")))
    }
}

impl CurveDescriptor {
    pub fn circle(cx: f64, cy: f64, r: f64) -> Self {
        CurveDescriptor::Circle { cx, cy, r }
    }

    pub fn ellipse(cx: f64, cy: f64, a: f64, b: f64, angle: f64) -> Self {
        CurveDescriptor::Ellipse { cx, cy, a, b, angle }
    }

    pub fn lune(c: f64) -> Self {
        CurveDescriptor::Lune { c, smoothing: 0.0, scale: 1.0, dx: 0.0, dy: 0.0 }
    }

    pub fn polygon(vertices: Vec<Point>) -> Self {
        CurveDescriptor::Polyline { vertices }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CurveDescriptor::Circle { .. } => "circle",
            CurveDescriptor::Ellipse { .. } => "ellipse",
            CurveDescriptor::Superellipse { .. } => "superellipse",
            CurveDescriptor::Lune { .. } => "lune",
            CurveDescriptor::SmoothenedSquare { .. } => "smoothened-square",
            CurveDescriptor::Polyline { .. } => "polyline",
        }
    }

    /// Kinds with a closed-form curvature function.
    pub fn is_analytic(&self) -> bool {
        !matches!(self, CurveDescriptor::Polyline { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            CurveDescriptor::Circle { cx, cy, r } => {
                finite("cx", cx)?;
                finite("cy", cy)?;
                positive("r", r)
            }
            CurveDescriptor::Ellipse { cx, cy, a, b, angle } => {
                finite("cx", cx)?;
                finite("cy", cy)?;
                finite("angle", angle)?;
                positive("a", a)?;
                positive("b", b)
            }
            CurveDescriptor::Superellipse { cx, cy, a, b, p } => {
                finite("cx", cx)?;
                finite("cy", cy)?;
                positive("a", a)?;
                positive("b", b)?;
                finite("p", p)?;
                if p < 2.0 {
                    return Err(Error::InvalidDescriptor(format!("superellipse exponent p = {p} < 2")));
                }
                Ok(())
            }
            CurveDescriptor::Lune { c, smoothing, scale, dx, dy } => {
                finite("c", c)?;
                finite("dx", dx)?;
                finite("dy", dy)?;
                positive("scale", scale)?;
                finite("smoothing", smoothing)?;
                if !(0.0..2.0).contains(&c) {
                    return Err(Error::InvalidDescriptor(format!("lune parameter c = {c} outside [0, 2)")));
                }
                if !(0.0..1.0).contains(&smoothing) || c >= 2.0 * (1.0 - smoothing) {
                    return Err(Error::InvalidDescriptor(format!(
                        "lune smoothing {smoothing} too large for c = {c}"
                    )));
                }
                Ok(())
            }
            CurveDescriptor::SmoothenedSquare { cx, cy, side, alpha, bulge } => {
                finite("cx", cx)?;
                finite("cy", cy)?;
                positive("side", side)?;
                finite("alpha", alpha)?;
                if alpha < 0.0 || alpha > side / 2.0 {
                    return Err(Error::InvalidDescriptor(format!("corner radius {alpha} outside [0, side/2]")));
                }
                if let Some(r) = bulge {
                    positive("bulge", r)?;
                    let h = side / 2.0;
                    if r <= h || alpha >= h || 2.0 * (r - alpha) * (r - alpha) <= (r - h) * (r - h) {
                        return Err(Error::InvalidDescriptor(format!("bulge radius {r} too small for side {side}")));
                    }
                }
                Ok(())
            }
            CurveDescriptor::Polyline { ref vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidDescriptor("polyline needs at least 3 vertices".into()));
                }
                for v in vertices {
                    finite("vertex", v.x)?;
                    finite("vertex", v.y)?;
                }
                let area = signed_area(vertices);
                if area == 0.0 || !area.is_finite() {
                    return Err(Error::InvalidDescriptor("polyline encloses no area".into()));
                }
                let n = vertices.len();
                for i in 0..n {
                    if vertices[i] == vertices[(i + 1) % n] {
                        return Err(Error::InvalidDescriptor("repeated polyline vertex".into()));
                    }
                }
                Ok(())
            }
        }
    }

    pub(crate) fn build(&self) -> Result<Shape> {
        self.validate()?;
        Ok(match *self {
            CurveDescriptor::Circle { cx, cy, r } => Shape::Ellipse(Ellipse::new(Point::new(cx, cy), r, r, 0.0)),
            CurveDescriptor::Ellipse { cx, cy, a, b, angle } => {
                Shape::Ellipse(Ellipse::new(Point::new(cx, cy), a, b, angle))
            }
            CurveDescriptor::Superellipse { cx, cy, a, b, p } => {
                Shape::Superellipse(Superellipse::new(Point::new(cx, cy), a, b, p))
            }
            CurveDescriptor::Lune { c, smoothing, scale, dx, dy } => Shape::Chain(lune_chain(c, smoothing, scale, dx, dy)),
            CurveDescriptor::SmoothenedSquare { cx, cy, side, alpha, bulge } => {
                Shape::Chain(square_chain(Point::new(cx, cy), side / 2.0, alpha, bulge))
            }
            CurveDescriptor::Polyline { ref vertices } => {
                let mut v = vertices.clone();
                if signed_area(&v) < 0.0 {
                    v.reverse();
                }
                Shape::Chain(Chain::polygon(&v))
            }
        })
    }

    /// Copy scaled by `k` about the origin.
    pub fn scaled(&self, k: f64) -> Self {
        use CurveDescriptor::*;
        match self.clone() {
            Circle { cx, cy, r } => Circle { cx: cx * k, cy: cy * k, r: r * k },
            Ellipse { cx, cy, a, b, angle } => Ellipse { cx: cx * k, cy: cy * k, a: a * k, b: b * k, angle },
            Superellipse { cx, cy, a, b, p } => Superellipse { cx: cx * k, cy: cy * k, a: a * k, b: b * k, p },
            Lune { c, smoothing, scale, dx, dy } => Lune { c, smoothing, scale: scale * k, dx: dx * k, dy: dy * k },
            SmoothenedSquare { cx, cy, side, alpha, bulge } => SmoothenedSquare {
                cx: cx * k,
                cy: cy * k,
                side: side * k,
                alpha: alpha * k,
                bulge: bulge.map(|r| r * k),
            },
            Polyline { vertices } => Polyline { vertices: vertices.into_iter().map(|v| v * k).collect() },
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        use CurveDescriptor::*;
        let d = Point::new(dx, dy);
        match self.clone() {
            Circle { cx, cy, r } => Circle { cx: cx + dx, cy: cy + dy, r },
            Ellipse { cx, cy, a, b, angle } => Ellipse { cx: cx + dx, cy: cy + dy, a, b, angle },
            Superellipse { cx, cy, a, b, p } => Superellipse { cx: cx + dx, cy: cy + dy, a, b, p },
            Lune { c, smoothing, scale, dx: ox, dy: oy } => Lune { c, smoothing, scale, dx: ox + dx, dy: oy + dy },
            SmoothenedSquare { cx, cy, side, alpha, bulge } => {
                SmoothenedSquare { cx: cx + dx, cy: cy + dy, side, alpha, bulge }
            }
            Polyline { vertices } => Polyline { vertices: vertices.into_iter().map(|v| v + d).collect() },
        }
    }

    /// Boundary point at parameter `t ∈ [0, 1)`; see [`sample_curve`](super::sample_curve).
    pub fn point_at(&self, t: f64) -> Result<Point> {
        Ok(self.build()?.point(t))
    }
}

pub(crate) fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

/// Lune boundary starting at `p = (1, 0)` and running counterclockwise, so that
/// `q = (c − 1, 0)` sits at half the length.
fn lune_chain(c: f64, rho: f64, scale: f64, dx: f64, dy: f64) -> Chain {
    let core_r = 1.0 - rho;
    let h = sqrt((core_r * core_r - c * c / 4.0).max(0.0));
    let phi1 = atan2(h, c / 2.0);
    let phi2 = atan2(h, -c / 2.0);
    let o1 = Point::new(0.0, 0.0);
    let o2 = Point::new(c, 0.0);
    let arcs = [
        (o1, core_r, 0.0, phi1),
        (o2, core_r, phi2, TAU - 2.0 * phi2),
        (o1, core_r, TAU - phi1, phi1),
    ];
    let base = if c == 0.0 {
        Chain::new(alloc::vec![Piece::Arc { c: o1, r: 1.0, a0: 0.0, sweep: TAU }])
    } else {
        offset_arc_polygon(&arcs, rho)
    };
    base.transformed(scale, Point::new(dx, dy))
}

fn square_chain(center: Point, h: f64, alpha: f64, bulge: Option<f64>) -> Chain {
    match bulge {
        None => {
            let g = h - alpha;
            let core = [
                Point::new(g, -g),
                Point::new(g, g),
                Point::new(-g, g),
                Point::new(-g, -g),
            ];
            let chain = if g > 0.0 {
                offset_polygon(&core, alpha)
            } else {
                Chain::new(alloc::vec![Piece::Arc { c: Point::new(0.0, 0.0), r: alpha, a0: 0.0, sweep: TAU }])
            };
            chain.transformed(1.0, center)
        }
        Some(r) => {
            // four disks of radius r - alpha centred at distance r - h from the centre
            let d = r - h;
            let rr = r - alpha;
            let u = (-d + sqrt(2.0 * rr * rr - d * d)) / 2.0;
            let beta = atan2(u, u + d);
            let mut arcs = Vec::with_capacity(4);
            for k in 0..4 {
                let dir = k as f64 * PI / 2.0;
                let c = Point::polar(-d, dir);
                arcs.push((c, rr, dir - beta, 2.0 * beta));
            }
            offset_arc_polygon(&arcs, alpha).transformed(1.0, center)
        }
    }
}

/// Curvature samples and derived constants of a closed curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    /// `(t, κ(t))` at uniform parameters.
    pub samples: Vec<(f64, f64)>,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub length: f64,
    /// `κ_min · length`, the scale-free curvature bound.
    pub k: f64,
    /// `∫ κ ds`, corner turning included.
    pub total_turning: f64,
}

/// Curvature of an analytic descriptor at `n` uniform parameters.
pub fn curvature_profile(desc: &CurveDescriptor, n: usize) -> Result<CurvatureProfile> {
    if !desc.is_analytic() {
        return Err(Error::UnsupportedKind("polyline"));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("curvature_profile needs n > 0".into()));
    }
    let shape = desc.build()?;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (t, shape.frame(t).2)
        })
        .collect();
    let length = shape.length();
    let kappa_min = shape.min_curvature();
    Ok(CurvatureProfile {
        samples,
        kappa_min,
        kappa_max: shape.max_curvature(n),
        length,
        k: kappa_min * length,
        total_turning: shape.total_turning(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lune_endpoints() {
        let s = CurveDescriptor::lune(1.0).build().unwrap();
        let p = s.point(0.0);
        let q = s.point(0.5);
        assert!(p.dist(Point::new(1.0, 0.0)) < 1e-12);
        assert!(q.dist(Point::new(0.0, 0.0)) < 1e-12);
        assert!((s.length() - 4.0 * libm::acos(0.5)).abs() < 1e-12);
    }

    #[test]
    fn bulged_square_fits_square() {
        let d = CurveDescriptor::SmoothenedSquare { cx: 0.5, cy: 0.5, side: 1.0, alpha: 0.05, bulge: Some(20.0) };
        let s = d.build().unwrap();
        let b = s.bbox();
        assert!((b.x1 - 1.0).abs() < 1e-12 && (b.y0).abs() < 1e-12);
        assert!((s.total_turning() - TAU).abs() < 1e-9);
        assert!(s.min_curvature() > 0.0);
    }
}
