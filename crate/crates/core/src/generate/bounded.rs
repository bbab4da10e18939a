use alloc::vec::Vec;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::uniform;
use crate::error::{Error, Result};
use crate::geometry::metric::support_gap;
use crate::geometry::{CurveDescriptor, Packing, PackingMeta, ParamValue, Point, Rect, Region};
use crate::math::{pow, sqrt, PI, TAU};

const TRIALS: usize = 400;
const SHRINK: f64 = 0.85;

fn scale_free_bound(q: f64) -> f64 {
    Region::new(CurveDescriptor::ellipse(0.0, 0.0, q, 1.0, 0.0)).map(|r| r.curvature_bound()).unwrap_or(0.0)
}

/// Largest ellipse aspect ratio `a/b` with `κ_min·length ≥ k`.
///
/// `κ_min·length = length(q, 1)/q²` decreases from `2π` at `q = 1`; the root is
/// bracketed by bisection and the lower end returned, so the bound holds for the cap.
pub fn ellipse_aspect_cap(k: f64) -> Result<f64> {
    if !(k > 0.0 && k <= TAU) {
        return Err(Error::OutOfRange { value: k, range: "(0, 2π]" });
    }
    if k >= TAU - 1e-12 {
        return Ok(1.0);
    }
    // length(q,1) < 4q + 4, so q = 8/k + 2 is past the root
    let mut lo = 1.0;
    let mut hi = 8.0 / k + 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if scale_free_bound(mid) >= k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Copy)]
struct Ell {
    c: Point,
    a: f64,
    b: f64,
    angle: f64,
    e1: Point,
}

impl Ell {
    fn support(&self, u: Point) -> f64 {
        let (p, q) = (u.dot(self.e1), u.dot(self.e1.perp()));
        u.dot(self.c) + sqrt(self.a * self.a * p * p + self.b * self.b * q * q)
    }

    fn disjoint(&self, o: &Ell) -> bool {
        let d = self.c.dist(o.c);
        if d >= self.a + o.a {
            return true;
        }
        if d < self.b + o.b {
            return false;
        }
        let (gap, _) = support_gap(|u| self.support(u), |u| o.support(u), &[]);
        gap > 1e-9 * self.a.min(o.a)
    }
}

/// Greedy random packing of `domain` by `count` ellipses with `κ_min·length ≥ k`.
///
/// Semi-major axes follow `a₀·(i+1)^{−0.6}` with `a₀ = 0.12·min(width, height)`;
/// each region gets up to 400 uniform placements, shrinking by 0.85 after every
/// failed round. Aspect ratios are uniform in `[1, cap]` and orientations uniform.
pub fn gen_bounded_curvature_packing(domain: Rect, k: f64, count: usize, seed: u64) -> Result<Packing> {
    if !domain.is_valid() {
        return Err(Error::InvalidArgument("domain rectangle is degenerate".into()));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let cap = ellipse_aspect_cap(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = 0.12 * domain.width().min(domain.height());
    let floor_a = a0 * 1e-6;
    let mut placed: Vec<Ell> = Vec::with_capacity(count);
    let mut shrink = 1.0;
    while placed.len() < count {
        let i = placed.len();
        let mut a = a0 * pow((i + 1) as f64, -0.6) * shrink;
        let mut done = false;
        while !done {
            if a < floor_a {
                return Err(Error::Infeasible("domain is too crowded for the requested count".into()));
            }
            for _ in 0..TRIALS {
                let q = 1.0 + (cap - 1.0) * uniform(&mut rng);
                let angle = PI * uniform(&mut rng);
                let x = domain.x0 + a + (domain.width() - 2.0 * a) * uniform(&mut rng);
                let y = domain.y0 + a + (domain.height() - 2.0 * a) * uniform(&mut rng);
                let e = Ell { c: Point::new(x, y), a, b: a / q, angle, e1: Point::unit(angle) };
                if placed.iter().all(|o| e.disjoint(o)) {
                    placed.push(e);
                    done = true;
                    break;
                }
            }
            if !done {
                a *= SHRINK;
                shrink *= SHRINK;
            }
        }
    }
    let regions = placed
        .iter()
        .map(|e| {
            let d = if e.a == e.b {
                CurveDescriptor::circle(e.c.x, e.c.y, e.a)
            } else {
                CurveDescriptor::ellipse(e.c.x, e.c.y, e.a, e.b, e.angle)
            };
            Region::new(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = PackingMeta::new("bounded")
        .with("k", ParamValue::Num(k))
        .with("count", ParamValue::Int(count as i64))
        .with("aspect_cap", ParamValue::Num(cap));
    let mut packing = Packing::new(domain, regions, meta);
    packing.meta.seed = Some(seed);
    Ok(packing)
}
