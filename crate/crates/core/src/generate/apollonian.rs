use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{Packing, PackingMeta, ParamValue, Rect, Region};
use crate::math::sqrt;

/// The two curvatures completing a triple of mutually tangent circles, larger first.
pub fn descartes_quadruple(k1: f64, k2: f64, k3: f64) -> Result<(f64, f64)> {
    let q = k1 * k2 + k2 * k3 + k3 * k1;
    if q < 0.0 || !q.is_finite() {
        return Err(Error::NoRealSolution(format!("k1k2 + k2k3 + k3k1 = {q} < 0")));
    }
    let s = k1 + k2 + k3;
    let r = 2.0 * sqrt(q);
    Ok((s + r, s - r))
}

/// Circle in curvature-centre coordinates: `k` and `w = k·z`.
#[derive(Clone, Copy)]
struct Kc {
    k: f64,
    wx: f64,
    wy: f64,
}

impl Kc {
    fn reflect(self, a: Kc, b: Kc, c: Kc) -> Kc {
        Kc {
            k: 2.0 * (a.k + b.k + c.k) - self.k,
            wx: 2.0 * (a.wx + b.wx + c.wx) - self.wx,
            wy: 2.0 * (a.wy + b.wy + c.wy) - self.wy,
        }
    }
}

/// Apollonian gasket of the `(−1, 2, 2, 3, 3)` family inside the circle of radius
/// `outer_radius` centred at `(outer_radius, outer_radius)`, with every circle of
/// curvature at most `max_curvature`.
///
/// The recursion runs on integer curvatures and Gaussian-integer curvature-centres,
/// so the arithmetic is exact until the final division. Regions are returned in
/// order of increasing curvature (ties by generation order); the window is the
/// bounding square of the outer circle, recorded as `outer`.
pub fn gen_apollonian(max_curvature: f64, outer_radius: f64) -> Result<Packing> {
    if !(outer_radius > 0.0 && outer_radius.is_finite()) {
        return Err(Error::OutOfRange { value: outer_radius, range: "(0, ∞)" });
    }
    // curvatures in units of 1/outer_radius
    let cap = max_curvature * outer_radius;
    if !(cap >= 3.0 - 1e-12) || !cap.is_finite() {
        return Err(Error::OutOfRange { value: max_curvature, range: "[3/outer_radius, ∞)" });
    }
    let outer = Kc { k: -1.0, wx: 0.0, wy: 0.0 };
    let a = Kc { k: 2.0, wx: 1.0, wy: 0.0 };
    let b = Kc { k: 2.0, wx: -1.0, wy: 0.0 };
    let c = Kc { k: 3.0, wx: 0.0, wy: 2.0 };
    let d = c.reflect(outer, a, b);

    let mut circles: Vec<Kc> = alloc::vec![a, b, c, d];
    // (newest circle, its three tangent parents); the seed quadruple spawns through c
    let mut queue: VecDeque<[Kc; 4]> = VecDeque::new();
    for q in [[c, outer, a, b], [d, outer, a, b]] {
        queue.push_back(q);
    }
    while let Some([n, p, q, r]) = queue.pop_front() {
        for (old, x, y) in [(p, q, r), (q, p, r), (r, p, q)] {
            let m = old.reflect(n, x, y);
            if m.k <= cap {
                circles.push(m);
                queue.push_back([m, n, x, y]);
            }
        }
    }

    let mut order: Vec<usize> = (0..circles.len()).collect();
    order.sort_by(|&i, &j| circles[i].k.total_cmp(&circles[j].k));
    let rr = outer_radius;
    let regions = order
        .into_iter()
        .map(|i| {
            let kc = circles[i];
            Region::circle(rr + kc.wx / kc.k * rr, rr + kc.wy / kc.k * rr, rr / kc.k)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = PackingMeta::new("apollonian")
        .with("max_curvature", ParamValue::Num(max_curvature))
        .with("outer_radius", ParamValue::Num(outer_radius));
    let mut packing = Packing::new(Rect::new(0.0, 0.0, 2.0 * rr, 2.0 * rr), regions, meta);
    packing.outer = Some(Region::circle(rr, rr, rr)?);
    Ok(packing)
}
