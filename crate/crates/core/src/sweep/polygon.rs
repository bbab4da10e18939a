use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{separating_line, CurveDescriptor, Line, Packing, Point, Rect, Region};
use crate::math::{pow, sqrt, TAU};
use crate::verify::AuditReport;

/// What created an edge of a circumscribing polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "kebab-case")]
pub enum EdgeSource {
    /// Side of the circumscribing rectangle: 0 bottom, 1 right, 2 top, 3 left.
    Rect(usize),
    /// Separator from a region at least as large as `B`.
    Region(usize),
    /// Separator from one of the frame rectangles outside the strip.
    Frame(usize),
    /// Separator from a region crossing the window boundary.
    BoundaryRegion(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    /// Convex, counter-clockwise.
    pub vertices: Vec<Point>,
    /// Edge `i` runs from `vertices[i]` to `vertices[i + 1]`.
    pub provenance: Vec<EdgeSource>,
    /// Point of tangency with `∂B` of the line carrying each edge.
    pub edge_tangency: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Polygon {
    fn from_rect(r: &Rect, touch: [Point; 4]) -> Self {
        Polygon {
            vertices: r.corners().to_vec(),
            provenance: (0..4).map(EdgeSource::Rect).collect(),
            edge_tangency: touch.to_vec(),
            flags: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The set `Z(P)` of tangency points, deduplicated.
    pub fn tangency_points(&self) -> Vec<Point> {
        let scale = self.diam();
        let mut out: Vec<Point> = Vec::new();
        for &z in &self.edge_tangency {
            if !out.iter().any(|p| p.dist(z) <= 1e-9 * scale) {
                out.push(z);
            }
        }
        out
    }

    pub fn diam(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    /// Outward unit normal of edge `i`.
    pub fn normal(&self, i: usize) -> Point {
        let (a, b) = (self.vertices[i], self.vertices[(i + 1) % self.len()]);
        (-(b - a).perp()).normalized()
    }

    /// Closed containment.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        (0..self.len()).all(|i| self.normal(i).dot(p - self.vertices[i]) <= tol)
    }

    pub fn contains_polygon(&self, other: &Polygon, tol: f64) -> bool {
        other.vertices.iter().all(|&v| self.contains(v, tol))
    }

    /// Open vertical chord `(y0, y1)` at abscissa `x`.
    pub fn slice_at_x(&self, x: f64) -> Option<(f64, f64)> {
        let n = self.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let (xa, xb) = (a.x.min(b.x), a.x.max(b.x));
            if x < xa || x > xb {
                continue;
            }
            if xb - xa <= 0.0 {
                lo = lo.min(a.y.min(b.y));
                hi = hi.max(a.y.max(b.y));
            } else {
                let y = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        (hi > lo).then_some((lo, hi))
    }

    /// Largest distance from an edge line to `B`'s supporting line in the same
    /// direction, relative to `diam(B)`; zero when every edge supports `B`.
    pub fn support_defect(&self, b: &Region) -> f64 {
        (0..self.len())
            .map(|i| {
                let u = self.normal(i);
                (u.dot(self.vertices[i]) - b.support(u)).abs()
            })
            .fold(0.0, f64::max)
            / b.diam()
    }

    pub fn as_region(&self) -> Result<Region> {
        Region::new(CurveDescriptor::polygon(self.vertices.clone()))
    }

    /// Keeps the part on the non-positive side of `line`; the new edge is labelled `src`.
    fn clip(&mut self, line: &Line, src: EdgeSource) {
        let scale = self.diam();
        let eps = 1e-12 * scale;
        let n = self.len();
        let sd: Vec<f64> = self.vertices.iter().map(|&v| line.signed_distance(v)).collect();
        if sd.iter().all(|&d| d <= eps) {
            return;
        }
        let (mut verts, mut prov, mut tang) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let (ina, inb) = (sd[i] <= eps, sd[j] <= eps);
            let cut = || a.lerp(b, sd[i] / (sd[i] - sd[j]));
            match (ina, inb) {
                (true, true) => {
                    verts.push(a);
                    prov.push(self.provenance[i]);
                    tang.push(self.edge_tangency[i]);
                }
                (true, false) => {
                    verts.push(a);
                    prov.push(self.provenance[i]);
                    tang.push(self.edge_tangency[i]);
                    verts.push(cut());
                    prov.push(src);
                    tang.push(line.point);
                }
                (false, true) => {
                    verts.push(cut());
                    prov.push(self.provenance[i]);
                    tang.push(self.edge_tangency[i]);
                }
                (false, false) => {}
            }
        }
        let m = verts.len();
        let keep: Vec<usize> = (0..m).filter(|&i| verts[i].dist(verts[(i + 1) % m]) > eps).collect();
        self.vertices = keep.iter().map(|&i| verts[i]).collect();
        self.provenance = keep.iter().map(|&i| prov[i]).collect();
        self.edge_tangency = keep.iter().map(|&i| tang[i]).collect();
    }
}

/// Axis-parallel rectangle circumscribing `b` and its four tangency points
/// (bottom, right, top, left).
pub fn circumscribing_rect(b: &Region) -> (Rect, [Point; 4]) {
    let dirs = [Point::new(0.0, -1.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(-1.0, 0.0)];
    let z = dirs.map(|u| b.support_point(u));
    let r = Rect::new(-b.support(dirs[3]), -b.support(dirs[0]), b.support(dirs[1]), b.support(dirs[2]));
    (r, z)
}

fn same_region(a: &Region, b: &Region) -> bool {
    a.boundary() == b.boundary()
}

fn rect_region(r: &Rect) -> Result<Region> {
    Region::new(CurveDescriptor::polygon(r.corners().to_vec()))
}

/// Open convex `a` meets open convex `b`.
fn overlaps(a: &Region, b: &Region) -> bool {
    if !a.bbox().interiors_overlap(&b.bbox()) {
        return false;
    }
    crate::geometry::separation(a, b).0 < -1e-12 * a.diam().min(b.diam())
}

fn separator(b: &Region, other: &Region) -> Result<Line> {
    separating_line(b, other).map(|(l, _)| l).ok_or_else(|| Error::NotAPacking("separated region overlaps B".into()))
}

/// Largest `λ` for which the inset rectangle and strip construction around `b` is
/// possible: the inset must leave a non-empty rectangle and `(k/2π)λ² ≤ λ`.
pub fn lambda_threshold(b: &Region) -> f64 {
    let (r, _) = circumscribing_rect(b);
    let len = b.length();
    let k = b.curvature_bound();
    let mut t = r.width() / (2.0 * len);
    if k > 0.0 {
        t = t.min(sqrt(r.height() * TAU / (2.0 * k * len))).min(TAU / k);
    }
    t
}

/// `P`: the circumscribing rectangle cut by separators from every other region of
/// diameter at least `diam(B)` that meets it. `P̃`: `P` further cut by separators from
/// the frame rectangles `(R ∖ R̃) ∖ S` and from boundary-crossing regions whose part
/// inside `R` leaves the strip `S`, the `λ·length(∂B)`-strip of `Z(R)`.
pub fn circumscribe_and_refine(b: &Region, packing: &Packing, lambda: f64) -> Result<(Polygon, Polygon)> {
    let threshold = lambda_threshold(b);
    if !(lambda > 0.0 && lambda < threshold) {
        return Err(Error::InfeasibleLambda { lambda, threshold });
    }
    let (r, z) = circumscribing_rect(b);
    let rreg = rect_region(&r)?;
    let len = b.length();
    let k = b.curvature_bound();
    let mut p = Polygon::from_rect(&r, z);
    for (i, d) in packing.regions.iter().enumerate() {
        if same_region(d, b) || d.diam() < b.diam() || !overlaps(d, &rreg) {
            continue;
        }
        p.clip(&separator(b, d)?, EdgeSource::Region(i));
    }

    let mut pt = p.clone();
    let (hx, hy) = (lambda * len, k / TAU * lambda * lambda * len);
    let inner = Rect::new(r.x0 + hx, r.y0 + hy, r.x1 - hx, r.y1 - hy);
    let strips = strip_intervals(&z, hx);
    let bands = [
        Rect::new(r.x0, r.y0, r.x1, inner.y0),
        Rect::new(r.x0, inner.y1, r.x1, r.y1),
        Rect::new(r.x0, inner.y0, inner.x0, inner.y1),
        Rect::new(inner.x1, inner.y0, r.x1, inner.y1),
    ];
    let tiny = 1e-12 * len;
    let mut frame = 0;
    for band in bands {
        for (a, c) in subtract(band.x0, band.x1, &strips) {
            let piece = Rect::new(a, band.y0, c, band.y1);
            if piece.width() <= tiny || piece.height() <= tiny {
                continue;
            }
            let preg = rect_region(&piece)?;
            if overlaps(&preg, b) {
                pt.flags.push(alloc::format!("frame rectangle {frame} meets B"));
            } else {
                pt.clip(&separator(b, &preg)?, EdgeSource::Frame(frame));
            }
            frame += 1;
        }
    }

    for i in 0..packing.len() {
        let d = &packing.regions[i];
        if same_region(d, b) || !packing.boundary_crossing(i) {
            continue;
        }
        if pt.len() < 3 || !overlaps(d, &pt.as_region()?) {
            continue;
        }
        let Some((a, c)) = x_extent_inside(d, &r) else { continue };
        if strips.iter().any(|&(s0, s1)| s0 <= a && c <= s1) {
            continue;
        }
        pt.clip(&separator(b, d)?, EdgeSource::BoundaryRegion(i));
    }
    Ok((p, pt))
}

/// Open x-intervals of the `mu`-strips around the points, merged.
fn strip_intervals(z: &[Point], mu: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = z.iter().map(|p| (p.x - mu, p.x + mu)).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in iv {
        match out.last_mut() {
            Some(l) if a <= l.1 => l.1 = l.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// `[x0, x1]` minus the open intervals.
fn subtract(x0: f64, x1: f64, iv: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut cur = x0;
    for &(a, b) in iv {
        if b <= cur {
            continue;
        }
        if a >= x1 {
            break;
        }
        if a > cur {
            out.push((cur, a));
        }
        cur = cur.max(b);
    }
    if cur < x1 {
        out.push((cur, x1));
    }
    out
}

/// x-projection of `d ∩ r` from the region's boundary polygon clipped to `r`.
fn x_extent_inside(d: &Region, r: &Rect) -> Option<(f64, f64)> {
    let mut poly = Polygon {
        vertices: d.samples(512).points,
        provenance: alloc::vec![EdgeSource::Rect(0); 512],
        edge_tangency: alloc::vec![Point::default(); 512],
        flags: Vec::new(),
    };
    let lines = [
        Line { point: Point::new(r.x0, r.y0), normal: Point::new(0.0, -1.0) },
        Line { point: Point::new(r.x1, r.y0), normal: Point::new(1.0, 0.0) },
        Line { point: Point::new(r.x1, r.y1), normal: Point::new(0.0, 1.0) },
        Line { point: Point::new(r.x0, r.y1), normal: Point::new(-1.0, 0.0) },
    ];
    for l in &lines {
        poly.clip(l, EdgeSource::Rect(0));
        if poly.len() < 3 {
            return None;
        }
    }
    let lo = poly.vertices.iter().map(|v| v.x).fold(f64::INFINITY, f64::min);
    let hi = poly.vertices.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max);
    (hi > lo).then_some((lo, hi))
}

/// Abscissas `x_i` at cell midpoints of `proj(B)`, optionally dropping those within
/// `mu` (plus a `1e-9` relative jitter margin) of a tangency abscissa.
fn admissible(b: &Region, z: &[Point], mu: f64, grid: usize, restrict: bool) -> Vec<f64> {
    let bb = b.bbox();
    let margin = mu + 1e-9 * b.length();
    let mut xs: Vec<f64> = (0..grid).map(|i| bb.x0 + (i as f64 + 0.5) / grid as f64 * bb.width()).collect();
    if restrict {
        xs.retain(|&x| z.iter().all(|p| (x - p.x).abs() >= margin));
    } else {
        xs.extend(z.iter().map(|p| p.x).filter(|&x| x > bb.x0 && x < bb.x1));
        xs.sort_by(f64::total_cmp);
    }
    xs
}

/// Gap lengths `|I₁|, |I₂|` and `|L ∩ P|` on the admissible lines.
fn gaps(p: &Polygon, b: &Region, xs: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    xs.iter()
        .filter_map(|&x| {
            let (ya, yb) = b.slice_at_x(x)?;
            let (p0, p1) = p.slice_at_x(x)?;
            Some((x, (ya - p0).max(0.0), (p1 - yb).max(0.0), p1 - p0))
        })
        .collect()
}

/// Gap estimates for a polygon circumscribing `b` on vertical lines outside the
/// `λ·length(∂B)`-strip of `Z(P)`.
pub fn good_estimate_audit(p: &Polygon, b: &Region, k: f64, lambda: f64, s: f64, grid: usize) -> Result<AuditReport> {
    good_estimate_audit_with(p, b, k, lambda, s, grid, true)
}

/// As [`good_estimate_audit`]; with `restrict = false` every line meeting `B` is used,
/// including the tangency abscissas themselves.
pub fn good_estimate_audit_with(
    p: &Polygon,
    b: &Region,
    k: f64,
    lambda: f64,
    s: f64,
    grid: usize,
    restrict: bool,
) -> Result<AuditReport> {
    if !(s > 1.0 && s <= 2.0) {
        return Err(Error::OutOfRange { value: s, range: "(1, 2]" });
    }
    if !(lambda > 0.0) || grid == 0 {
        return Err(Error::InvalidArgument("lambda must be positive and grid non-zero".into()));
    }
    let len = b.length();
    let z = p.tangency_points();
    let xs = admissible(b, &z, lambda * len, grid, restrict);
    let g = gaps(p, b, &xs);
    let bound_i = k / TAU * lambda * lambda;
    let mut rep = AuditReport::new(
        "good-estimate",
        "|I_i| / length >= (k/2pi) lambda^2; |I1|^{s-1} + |I2|^{s-1} - |L ∩ P|^{s-1} >= length^{s-1} / 2",
    );
    rep.bound("ratio_bound", bound_i).bound("k", k).bound("lambda", lambda).bound("s", s);
    rep.measure("admissible_lines", g.len() as f64).measure("length", len);
    if g.is_empty() {
        rep.flag("vacuous: the strips cover the projection of B");
        rep.pass = true;
        return Ok(rep);
    }
    let margin_ii = |s: f64, (_, i1, i2, whole): (f64, f64, f64, f64)| {
        pow(i1, s - 1.0) + pow(i2, s - 1.0) - pow(whole, s - 1.0) - 0.5 * pow(len, s - 1.0)
    };
    let mut min_ratio = (f64::INFINITY, 0.0);
    let mut min_m = (f64::INFINITY, 0.0);
    for &row in &g {
        let ratio = row.1.min(row.2) / len;
        if ratio < min_ratio.0 {
            min_ratio = (ratio, row.0);
        }
        let m = margin_ii(s, row);
        if m < min_m.0 {
            min_m = (m, row.0);
        }
    }
    let holds = |s: f64| g.iter().all(|&row| margin_ii(s, row) >= 0.0);
    let s0 = if holds(2.0) {
        2.0
    } else if !holds(1.0 + 1e-12) {
        1.0
    } else {
        let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if holds(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    rep.measure("min_gap_ratio", min_ratio.0)
        .measure("min_margin_ii", min_m.0)
        .measure("empirical_s0", s0);
    rep.witness("smallest gap", alloc::vec![Point::new(min_ratio.1, 0.0)], min_ratio.0, Vec::new());
    rep.witness("smallest (ii) margin", alloc::vec![Point::new(min_m.1, 0.0)], min_m.0, Vec::new());
    if !restrict {
        rep.flag("unrestricted: tangency strips not excluded");
    }
    rep.pass = min_ratio.0 >= bound_i * (1.0 - 1e-6) && min_m.0 >= 0.0;
    Ok(rep)
}

/// Smallest `dist(z₁, ∂B) / (λ² length(∂B))` over admissible lines, where `z₁` is
/// where the line meets the chord through the leftmost and rightmost points of `B`.
/// Returns `None` when no line is admissible; errors if some `z₁` falls outside `B`.
pub fn midpoint_constant(b: &Region, lambda: f64, grid: usize) -> Result<Option<(f64, Point)>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::OutOfRange { value: lambda, range: "(0, 1)" });
    }
    let (_, z) = circumscribing_rect(b);
    let (wl, wr) = (z[3], z[1]);
    if !(wr.x > wl.x) {
        return Err(Error::Degenerate("region has no horizontal extent".into()));
    }
    let len = b.length();
    let xs = admissible(b, &z, lambda * len, grid, true);
    let mut best: Option<(f64, Point)> = None;
    for x in xs {
        let z1 = wl.lerp(wr, (x - wl.x) / (wr.x - wl.x));
        if !b.contains(z1) {
            return Err(Error::NotConvex);
        }
        let c = b.boundary_distance(z1) / (lambda * lambda * len);
        if best.is_none_or(|(v, _)| c < v) {
            best = Some((c, z1));
        }
    }
    Ok(best)
}

/// Measures the interior-point constant over a list of `λ` values and checks it stays
/// bounded away from zero: every value positive and the value at the smallest `λ` at
/// least a third of the value at the largest.
pub fn midpoint_audit(b: &Region, lambdas: &[f64], grid: usize) -> Result<AuditReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidArgument("no lambda values".into()));
    }
    let mut ls = lambdas.to_vec();
    ls.sort_by(f64::total_cmp);
    let mut rep = AuditReport::new(
        "midpoint",
        "dist(z1, boundary) >= c1 lambda^2 length with c1 bounded away from 0 across lambda",
    );
    let mut vals = Vec::new();
    for &l in &ls {
        match midpoint_constant(b, l, grid)? {
            Some((c, z1)) => {
                rep.measure(&alloc::format!("c1@{l}"), c);
                rep.witness(&alloc::format!("z1@{l}"), alloc::vec![z1], c, alloc::vec![l]);
                vals.push(c);
            }
            None => {
                rep.flag(&alloc::format!("no admissible line at lambda {l}"));
            }
        }
    }
    if vals.is_empty() {
        rep.flag("vacuous");
        rep.pass = true;
        return Ok(rep);
    }
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let drift = vals[0] / vals[vals.len() - 1];
    rep.measure("c1_min", min).measure("small_to_large_ratio", drift);
    rep.bound("min_ratio", 1.0 / 3.0);
    rep.pass = min > 0.0 && drift >= 1.0 / 3.0;
    Ok(rep)
}
