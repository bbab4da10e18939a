use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Packing, Point, Rect, Region};
use crate::geometry::metric::support_gap;
use crate::math::{ceil, floor, fsum, pow, FRAC_PI_2, PI};

/// Open axis-parallel square with lower-left corner `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub x: f64,
    pub y: f64,
    pub side: f64,
}

impl Square {
    pub fn new(x: f64, y: f64, side: f64) -> Self {
        Square { x, y, side }
    }

    pub fn rect(&self) -> Rect {
        Rect::square(self.x, self.y, self.side)
    }

    pub fn diam(&self) -> f64 {
        core::f64::consts::SQRT_2 * self.side
    }

    /// Strict containment (the square is open).
    pub fn contains(&self, p: Point) -> bool {
        p.x > self.x && p.x < self.x + self.side && p.y > self.y && p.y < self.y + self.side
    }

    /// The open square and the open region share a point.
    pub fn meets(&self, region: &Region) -> bool {
        let r = self.rect();
        if !r.interiors_overlap(&region.bbox()) {
            return false;
        }
        if let Some((c, rad)) = region.as_circle() {
            return r.distance_to_point(c) < rad;
        }
        let corners = r.corners();
        let hs = |u: Point| corners.iter().map(|c| u.dot(*c)).fold(f64::NEG_INFINITY, f64::max);
        let (gap, _) = support_gap(|u| region.support(u), hs, &[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        gap < -1e-12 * region.diam()
    }

    /// The region lies inside the closed square.
    pub fn contains_region(&self, region: &Region) -> bool {
        self.rect().contains_rect(&region.bbox(), 0.0)
    }
}

/// Finite cover by open squares.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SquareCover {
    pub squares: Vec<Square>,
}

impl SquareCover {
    pub fn new(squares: Vec<Square>) -> Result<Self> {
        if let Some(q) = squares.iter().find(|q| !(q.side > 0.0 && q.side.is_finite() && q.x.is_finite() && q.y.is_finite())) {
            return Err(Error::InvalidArgument(alloc::format!("square side must be positive, got {}", q.side)));
        }
        Ok(SquareCover { squares })
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// `Σ ℓ(K_j)^s`.
    pub fn side_sum(&self, s: f64) -> f64 {
        fsum(self.squares.iter().map(|q| pow(q.side, s)))
    }

    /// Order-sensitive digest of the exact square data, used to match profiles to covers.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for q in &self.squares {
            for v in [q.x, q.y, q.side] {
                for b in v.to_bits().to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        h
    }

    /// First point of a `resolution²` grid of cell centres over the packing's domain
    /// that lies outside every region and outside every square.
    pub fn uncovered_point(&self, packing: &Packing, resolution: usize) -> Option<Point> {
        let d = packing.domain;
        let index = XIndex::new(d.x0, d.x1, resolution.max(1), self.squares.iter().map(|q| (q.x, q.x + q.side)));
        let rindex = XIndex::new(d.x0, d.x1, resolution.max(1), packing.regions.iter().map(|r| (r.bbox().x0, r.bbox().x1)));
        for i in 0..resolution {
            let x = d.x0 + (i as f64 + 0.5) / resolution as f64 * d.width();
            let sq = index.candidates(x);
            let rg = rindex.candidates(x);
            for j in 0..resolution {
                let p = Point::new(x, d.y0 + (j as f64 + 0.5) / resolution as f64 * d.height());
                if rg.iter().any(|&k| packing.regions[k as usize].contains(p)) {
                    continue;
                }
                if !sq.iter().any(|&k| self.squares[k as usize].contains(p)) {
                    return Some(p);
                }
            }
        }
        None
    }
}

/// Dyadic cover of the window minus the regions: every closed cell of side
/// `2^-level · max(w, h)` (anchored at the domain's lower-left corner) that is not
/// contained in a single region, enlarged about its centre by `1 + enlarge` so
/// the open squares also cover the grid lines.
pub fn dyadic_cover(packing: &Packing, level: u32, enlarge: f64) -> Result<SquareCover> {
    if level > 12 {
        return Err(Error::OutOfRange { value: level as f64, range: "0..=12" });
    }
    if !(enlarge > 0.0 && enlarge < 1.0) {
        return Err(Error::OutOfRange { value: enlarge, range: "(0, 1)" });
    }
    let d = packing.domain;
    let n = 1usize << level;
    let side = d.width().max(d.height()) / n as f64;
    let (nx, ny) = (
        (ceil(d.width() / side) as usize).clamp(1, n),
        (ceil(d.height() / side) as usize).clamp(1, n),
    );
    let mut inside = alloc::vec![false; nx * ny];
    let corner = |i: usize, j: usize| Point::new(d.x0 + i as f64 * side, d.y0 + j as f64 * side);
    for r in &packing.regions {
        let b = r.bbox();
        let i0 = (floor((b.x0 - d.x0) / side).max(0.0) as usize).min(nx);
        let i1 = (ceil((b.x1 - d.x0) / side).max(0.0) as usize).min(nx);
        let j0 = (floor((b.y0 - d.y0) / side).max(0.0) as usize).min(ny);
        let j1 = (ceil((b.y1 - d.y0) / side).max(0.0) as usize).min(ny);
        for j in j0..j1 {
            for i in i0..i1 {
                if !inside[j * nx + i]
                    && [corner(i, j), corner(i + 1, j), corner(i + 1, j + 1), corner(i, j + 1)].iter().all(|&p| r.contains(p))
                {
                    inside[j * nx + i] = true;
                }
            }
        }
    }
    let pad = 0.5 * enlarge * side;
    let mut squares = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !inside[j * nx + i] {
                let c = corner(i, j);
                squares.push(Square::new(c.x - pad, c.y - pad, side + 2.0 * pad));
            }
        }
    }
    SquareCover::new(squares)
}

/// Bucketed lookup of items by x-extent.
pub(crate) struct XIndex {
    x0: f64,
    width: f64,
    buckets: Vec<Vec<u32>>,
}

impl XIndex {
    pub(crate) fn new<I: Iterator<Item = (f64, f64)>>(x0: f64, x1: f64, buckets: usize, extents: I) -> Self {
        let nb = buckets.max(1);
        let width = (x1 - x0) / nb as f64;
        let mut b = alloc::vec![Vec::new(); nb];
        for (k, (a, c)) in extents.enumerate() {
            let lo = (floor((a - x0) / width).max(0.0) as usize).min(nb - 1);
            let hi = (floor((c - x0) / width).max(0.0) as usize).min(nb - 1);
            if c < x0 || a > x1 {
                continue;
            }
            for bucket in &mut b[lo..=hi] {
                bucket.push(k as u32);
            }
        }
        XIndex { x0, width, buckets: b }
    }

    pub(crate) fn candidates(&self, x: f64) -> &[u32] {
        let nb = self.buckets.len();
        let i = floor((x - self.x0) / self.width);
        if !(i >= 0.0) || i as usize >= nb {
            return &[];
        }
        &self.buckets[i as usize]
    }
}
