use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{separation, CurveDescriptor, Packing, PackingMeta, ParamValue, Point, Rect, Region};
use crate::math::{ceil, floor, fsum, pow, round};

/// Hard cap on the number of cover balls of one construction.
const MAX_BALLS: f64 = 1e7;
/// Halvings below a tile's reach that candidate squares may go.
const CELL_HALVINGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// Cover bookkeeping of one level of a counterexample construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelLedger {
    pub level: usize,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// The closed squares `Q_i` of this level, in index order.
    pub tiles: Vec<Rect>,
    /// The corner scale `α_i` of each tile.
    pub alphas: Vec<f64>,
    /// Tile indices (0-based) whose `α_i` was clamped below a quarter side.
    pub clamped: Vec<usize>,
    /// Index range of this level's regions in the packing.
    pub regions: (usize, usize),
    /// Balls covering the part of each tile left uncovered by its region.
    pub balls: Vec<Ball>,
    pub sum_r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum_r_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverLedger {
    pub construction: String,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub s: Vec<f64>,
    pub levels: Vec<LevelLedger>,
}

fn check_common(domain: &Rect, eps: &[f64], levels: usize, grid: usize) -> Result<()> {
    if !domain.is_valid() || (domain.width() - domain.height()).abs() > 1e-12 * domain.width() {
        return Err(Error::InvalidArgument("counterexample domain must be a square".into()));
    }
    if grid == 0 || levels == 0 {
        return Err(Error::InvalidArgument("levels and grid must be positive".into()));
    }
    if levels > eps.len() {
        return Err(Error::InvalidArgument(format!("{levels} levels need {levels} eps values, got {}", eps.len())));
    }
    if eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) || eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps must be positive and strictly decreasing".into()));
    }
    Ok(())
}

fn first_level(domain: &Rect, grid: usize) -> Vec<Rect> {
    let side = domain.width() / grid as f64;
    let mut tiles = Vec::with_capacity(grid * grid);
    for j in 0..grid {
        for i in 0..grid {
            tiles.push(Rect::square(domain.x0 + i as f64 * side, domain.y0 + j as f64 * side, side));
        }
    }
    tiles
}

/// Up to `max` dyadic squares whose closure lies in the residual open set, largest
/// first. Candidates are the dyadic cells within `reach` of a corner of some tile
/// placed so far, at sizes from `reach/2` down to `reach/2^CELL_HALVINGS`; accepted
/// squares are pairwise disjoint.
fn next_level(domain: &Rect, regions: &[Region], placed: &[(Rect, f64)], max: usize) -> Result<Vec<Rect>> {
    let reach_max = placed.iter().map(|p| p.1).fold(0.0, f64::max);
    let reach_min = placed.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let mut cell = domain.width();
    while cell > reach_max / 2.0 {
        cell *= 0.5;
    }
    let floor_size = reach_min / pow(2.0, CELL_HALVINGS as f64);
    let mut out: Vec<Rect> = Vec::new();
    while out.len() < max && cell >= floor_size && cell > 0.0 {
        let mut seen = BTreeSet::new();
        for (tile, reach) in placed {
            if !(cell <= reach / 2.0 && cell >= reach / pow(2.0, CELL_HALVINGS as f64)) {
                continue;
            }
            for v in tile.corners() {
                let i0 = floor((v.x - reach - domain.x0) / cell) as i64;
                let i1 = ceil((v.x + reach - domain.x0) / cell) as i64;
                let j0 = floor((v.y - reach - domain.y0) / cell) as i64;
                let j1 = ceil((v.y + reach - domain.y0) / cell) as i64;
                for j in j0..j1 {
                    for i in i0..i1 {
                        if out.len() >= max {
                            return Ok(out);
                        }
                        if !seen.insert((i, j)) {
                            continue;
                        }
                        let q = Rect::square(domain.x0 + i as f64 * cell, domain.y0 + j as f64 * cell, cell);
                        if out.iter().all(|o| !o.interiors_overlap(&q)) && in_residual(domain, regions, &q) {
                            out.push(q);
                        }
                    }
                }
            }
        }
        cell *= 0.5;
    }
    if out.is_empty() {
        return Err(Error::Infeasible("no dyadic square fits in the residual set; the level is vacuous".into()));
    }
    Ok(out)
}

fn in_residual(domain: &Rect, regions: &[Region], q: &Rect) -> bool {
    if !domain.contains_rect(q, 0.0) {
        return false;
    }
    let margin = 1e-12 * q.width();
    let near: Vec<&Region> = regions.iter().filter(|r| r.bbox().touches(q)).collect();
    if near.is_empty() {
        return true;
    }
    let Ok(poly) = Region::new(CurveDescriptor::polygon(q.corners().to_vec())) else {
        return false;
    };
    near.iter().all(|r| separation(&poly, r).0 > margin)
}

/// Convex counterexample: squares with rounded corners, `α_i = ε_ℓ/2^i` on the
/// `i`-th tile of level `ℓ` (1-based), each tile's uncovered part covered by the four
/// corner balls of radius `α_i`.
///
/// Level 1 tiles the square domain into `grid²` squares; each later level takes up to
/// `grid²` dyadic squares inside the residual open set left by all earlier regions,
/// largest first.
pub fn gen_counterexample_convex(domain: Rect, eps: &[f64], levels: usize, grid: usize) -> Result<(Packing, CoverLedger)> {
    check_common(&domain, eps, levels, grid)?;
    let mut regions: Vec<Region> = Vec::new();
    let mut ledger = CoverLedger { construction: "convex".into(), eps: eps[..levels].to_vec(), s: Vec::new(), levels: Vec::new() };
    let mut placed: Vec<(Rect, f64)> = Vec::new();
    for level in 1..=levels {
        let e = eps[level - 1];
        let tiles =
            if level == 1 { first_level(&domain, grid) } else { next_level(&domain, &regions, &placed, grid * grid)? };
        let start = regions.len();
        let (mut alphas, mut clamped, mut balls) = (Vec::new(), Vec::new(), Vec::new());
        for (i, q) in tiles.iter().enumerate() {
            let side = q.width();
            let mut alpha = e / pow(2.0, (i + 1) as f64);
            if alpha >= side / 4.0 {
                alpha = side / 4.0 * (1.0 - 1e-9);
                clamped.push(i);
            }
            let c = q.center();
            regions.push(Region::new(CurveDescriptor::SmoothenedSquare { cx: c.x, cy: c.y, side, alpha, bulge: None })?);
            for v in q.corners() {
                balls.push(Ball { center: v, radius: alpha });
            }
            alphas.push(alpha);
        }
        let sum_r = fsum(balls.iter().map(|b| b.radius));
        placed.extend(tiles.iter().zip(&alphas).map(|(q, &a)| (*q, a)));
        ledger.levels.push(LevelLedger {
            level,
            eps: e,
            s: None,
            tiles,
            alphas,
            clamped,
            regions: (start, regions.len()),
            balls,
            sum_r,
            sum_r_s: None,
        });
    }
    let meta = PackingMeta::new("cex-convex")
        .with("eps", ParamValue::List(eps[..levels].to_vec()))
        .with("levels", ParamValue::Int(levels as i64))
        .with("grid", ParamValue::Int(grid as i64));
    Ok((Packing::new(domain, regions, meta), ledger))
}

/// Strict counterexample: strictly convex curves in each tile whose uncovered part
/// is covered by `N = 4ℓ(Q)/α` balls of radius `α`.
///
/// With `α = ℓ(Q)/m` (integer `m ≥ 4`, the smallest meeting `4ℓ(Q)α^{s_ℓ−1} < ε_ℓ/2^i`
/// and `α < ε_ℓ`) the ball centres are spaced `α` apart along `∂Q`, corners included.
/// The curve is a square with sides bulged outward along arcs of radius
/// `(ℓ/2)²/(0.6α)` (inward depth at most `0.3α` from `∂Q`) and corners rounded to
/// radius `α/4`. The cover is verified on a grid of spacing `α/8` over the frame of
/// depth `0.8α`, with margins absorbing the grid spacing, and the inner square is
/// checked to lie in the region.
pub fn gen_counterexample_strict(
    domain: Rect,
    s_seq: &[f64],
    eps: &[f64],
    levels: usize,
    grid: usize,
) -> Result<(Packing, CoverLedger)> {
    check_common(&domain, eps, levels, grid)?;
    if levels > s_seq.len() {
        return Err(Error::InvalidArgument(format!("{levels} levels need {levels} s values, got {}", s_seq.len())));
    }
    if s_seq.iter().any(|&s| !(s > 1.0 && s <= 2.0)) || s_seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("s values must lie in (1, 2] and strictly decrease".into()));
    }
    let mut regions: Vec<Region> = Vec::new();
    let mut ledger = CoverLedger {
        construction: "strict".into(),
        eps: eps[..levels].to_vec(),
        s: s_seq[..levels].to_vec(),
        levels: Vec::new(),
    };
    let mut placed: Vec<(Rect, f64)> = Vec::new();
    let mut total_balls = 0.0;
    for level in 1..=levels {
        let (e, s) = (eps[level - 1], s_seq[level - 1]);
        let tiles =
            if level == 1 { first_level(&domain, grid) } else { next_level(&domain, &regions, &placed, grid * grid)? };
        let start = regions.len();
        let mut plan = Vec::with_capacity(tiles.len());
        for (i, q) in tiles.iter().enumerate() {
            let side = q.width();
            let target = e / pow(2.0, (i + 1) as f64);
            let alpha_max = e.min(pow(target / (4.0 * side), 1.0 / (s - 1.0)));
            let mut m = (floor(side / alpha_max) + 1.0).max(4.0);
            total_balls += 4.0 * m;
            if total_balls > MAX_BALLS || !m.is_finite() {
                return Err(Error::Infeasible(format!(
                    "level {level}, tile {i}: alpha < {alpha_max:e} needs more than {MAX_BALLS:e} cover balls"
                )));
            }
            while !(4.0 * side * pow(side / m, s - 1.0) < target && side / m < e) {
                m += 1.0;
            }
            plan.push((m as usize, side / m));
        }
        let (mut alphas, mut balls) = (Vec::new(), Vec::new());
        for (i, (q, &(m, alpha))) in tiles.iter().zip(&plan).enumerate() {
            let region = bulged_tile(q, alpha)?;
            let centers = boundary_lattice(q, m);
            verify_cover(q, &region, alpha, m).map_err(|msg| {
                Error::Infeasible(format!("level {level}, tile {i} (side {}, alpha {alpha:e}): {msg}", q.width()))
            })?;
            balls.extend(centers.into_iter().map(|c| Ball { center: c, radius: alpha }));
            regions.push(region);
            alphas.push(alpha);
        }
        let sum_r = fsum(balls.iter().map(|b| b.radius));
        let sum_r_s = fsum(balls.iter().map(|b| pow(b.radius, s)));
        placed.extend(tiles.iter().zip(&alphas).map(|(q, &a)| (*q, a)));
        ledger.levels.push(LevelLedger {
            level,
            eps: e,
            s: Some(s),
            tiles,
            alphas,
            clamped: Vec::new(),
            regions: (start, regions.len()),
            balls,
            sum_r,
            sum_r_s: Some(sum_r_s),
        });
    }
    let meta = PackingMeta::new("cex-strict")
        .with("s_seq", ParamValue::List(s_seq[..levels].to_vec()))
        .with("eps", ParamValue::List(eps[..levels].to_vec()))
        .with("levels", ParamValue::Int(levels as i64))
        .with("grid", ParamValue::Int(grid as i64));
    Ok((Packing::new(domain, regions, meta), ledger))
}

fn bulged_tile(q: &Rect, alpha: f64) -> Result<Region> {
    let side = q.width();
    let h = side / 2.0;
    let bulge = (h * h / (0.6 * alpha)).max(2.0 * side);
    let c = q.center();
    Region::new(CurveDescriptor::SmoothenedSquare { cx: c.x, cy: c.y, side, alpha: alpha / 4.0, bulge: Some(bulge) })
}

/// `4m` points spaced `side/m` along `∂q`, counterclockwise from the lower-left corner.
fn boundary_lattice(q: &Rect, m: usize) -> Vec<Point> {
    let c = q.corners();
    let mut out = Vec::with_capacity(4 * m);
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        for j in 0..m {
            out.push(a.lerp(b, j as f64 / m as f64));
        }
    }
    out
}

fn nearest_center_distance(q: &Rect, m: usize, p: Point) -> f64 {
    let c = q.corners();
    let mut best = f64::INFINITY;
    for k in 0..4 {
        let (a, b) = (c[k], c[(k + 1) % 4]);
        let t = (p - a).dot(b - a) / (b - a).dot(b - a) * m as f64;
        let j0 = round(t) as i64;
        for j in [j0 - 1, j0, j0 + 1] {
            let j = j.clamp(0, m as i64);
            best = best.min(p.dist(a.lerp(b, j as f64 / m as f64)));
        }
    }
    best
}

fn verify_cover(q: &Rect, region: &Region, alpha: f64, m: usize) -> core::result::Result<(), String> {
    let depth = 0.8 * alpha;
    let inner = Rect::new(q.x0 + depth, q.y0 + depth, q.x1 - depth, q.y1 - depth);
    if let Some(v) = inner.corners().into_iter().find(|&v| !region.contains(v)) {
        return Err(format!("inner square corner ({}, {}) lies outside the region", v.x, v.y));
    }
    let step = alpha / 8.0;
    let slack = step * core::f64::consts::FRAC_1_SQRT_2;
    let along = ceil(q.width() / step) as usize;
    let across = ceil(depth / step) as usize;
    let covered = |p: Point| {
        nearest_center_distance(q, m, p) <= alpha - slack
            || (region.contains(p) && region.boundary_distance(p) >= slack)
    };
    for i in 0..along {
        let u = (i as f64 + 0.5) * step;
        for j in 0..across {
            let w = (j as f64 + 0.5) * step;
            let pts = [
                Point::new(q.x0 + u, q.y0 + w),
                Point::new(q.x1 - w, q.y0 + u),
                Point::new(q.x1 - u, q.y1 - w),
                Point::new(q.x0 + w, q.y1 - u),
            ];
            if let Some(p) = pts.into_iter().find(|&p| !covered(p)) {
                return Err(format!("grid cell at ({}, {}) is not covered", p.x, p.y));
            }
        }
    }
    Ok(())
}
