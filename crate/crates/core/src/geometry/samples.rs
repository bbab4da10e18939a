use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{CurveDescriptor, Point};
use crate::error::{Error, Result};

/// Closed polyline through boundary points at uniform parameter steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSamples {
    pub points: Vec<Point>,
}

/// Samples `desc` at `t = i / n`, `i = 0..n`.
///
/// Circles and ellipses use the angle parameter starting on the positive `a` axis;
/// the other kinds are sampled at equal arc-length steps.
pub fn sample_curve(desc: &CurveDescriptor, n: usize) -> Result<CurveSamples> {
    if n < 16 {
        return Err(Error::InvalidArgument(alloc::format!("need at least 16 samples, got {n}")));
    }
    let shape = desc.build()?;
    let points: Vec<Point> = (0..n).map(|i| shape.point(i as f64 / n as f64)).collect();
    CurveSamples::from_points(points)
}

impl CurveSamples {
    /// Wraps an explicit closed polyline (implicit closing edge).
    pub fn from_points(points: Vec<Point>) -> Result<CurveSamples> {
        if points.len() < 3 {
            return Err(Error::Degenerate("fewer than 3 sample points".into()));
        }
        let n = points.len();
        for i in 0..n {
            if !points[i].is_finite() {
                return Err(Error::Degenerate("non-finite sample point".into()));
            }
            if points[i] == points[(i + 1) % n] {
                return Err(Error::Degenerate(alloc::format!("consecutive samples {i} coincide")));
            }
        }
        Ok(CurveSamples { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.points[i], self.points[(i + 1) % self.len()])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        a.dist(b)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).sum()
    }

    /// Cumulative edge lengths: entry `i` is the length from point 0 to point `i`;
    /// the final entry is the perimeter.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for i in 0..self.len() {
            acc += self.edge_length(i);
            cum.push(acc);
        }
        cum
    }

    /// Maximal pairwise distance, via convex hull and rotating calipers.
    pub fn diameter(&self) -> f64 {
        let hull = convex_hull(&self.points);
        let m = hull.len();
        if m < 2 {
            return 0.0;
        }
        if m == 2 {
            return hull[0].dist(hull[1]);
        }
        let mut best = 0.0f64;
        let mut j = 1;
        for i in 0..m {
            let a = hull[i];
            let b = hull[(i + 1) % m];
            let e = b - a;
            while e.cross(hull[(j + 1) % m] - a) > e.cross(hull[j] - a) {
                j = (j + 1) % m;
            }
            best = best.max(a.dist(hull[j])).max(b.dist(hull[j]));
        }
        best
    }

    pub fn signed_area(&self) -> f64 {
        super::curve::signed_area(&self.points)
    }
}

/// Andrew's monotone chain; counterclockwise, without collinear points.
pub(crate) fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = points.to_vec();
    p.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    let push = |hull: &mut Vec<Point>, start: usize, q: Point| {
        while hull.len() >= start + 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if (b - a).cross(q - a) > 0.0 {
                break;
            }
            hull.pop();
        }
        hull.push(q);
    };
    for &q in &p {
        push(&mut hull, 0, q);
    }
    hull.pop();
    let start = hull.len();
    for &q in p.iter().rev() {
        push(&mut hull, start, q);
    }
    hull.pop();
    hull
}
