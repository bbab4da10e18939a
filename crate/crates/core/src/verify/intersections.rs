use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::AuditReport;
use crate::error::{Error, Result};
use crate::geometry::{regions_disjoint, separation, CurveDescriptor, Packing, Point, Region};
use crate::math::{ceil, floor, golden_max, sqrt};

const MIN_SAMPLES: usize = 4096;
const MAX_SAMPLES: usize = 1 << 20;
const RUN_GAP: usize = 4;

fn wrap(t: f64) -> f64 {
    t - floor(t)
}

/// Common boundary points of two regions with disjoint interiors.
///
/// Boundary samples of `d1` within `tol` of `∂d2` are grouped into runs of
/// consecutive samples. A run along which the boundaries genuinely coincide (ends
/// within `1e-9·scale`, and longer than a tangency between curves of the two minimal
/// curvatures could keep them within `tol`) is a contact segment and contributes its
/// two end points; any other run contributes the single point of closest approach.
pub fn boundary_intersections(d1: &Region, d2: &Region, tol: f64) -> Result<Vec<Point>> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange { value: tol, range: "(0, ∞)" });
    }
    if !regions_disjoint(d1, d2) {
        return Err(Error::NotAPacking("regions overlap".into()));
    }
    if let (Some((c1, r1)), Some((c2, r2))) = (d1.as_circle(), d2.as_circle()) {
        let d = c2 - c1;
        if d.norm() - r1 - r2 > tol {
            return Ok(Vec::new());
        }
        return Ok(vec![c1 + d.normalized() * r1]);
    }
    let (gap, u) = separation(d1, d2);
    if gap > tol {
        return Ok(Vec::new());
    }
    let scale = d1.diam().min(d2.diam());
    // spacing such that a tangency between two samples is within tol/4 of both
    let kappa = curvature_scale(d1) + curvature_scale(d2);
    let n = if kappa > 0.0 {
        ceil(d1.length() / sqrt(2.0 * tol / kappa)) as usize
    } else {
        MIN_SAMPLES
    }
    .clamp(MIN_SAMPLES, MAX_SAMPLES);

    // common points lie on the separating line {u·z = h₁(u)}
    let h1 = d1.support(u);
    let slack = tol + gap.abs();
    let near: Vec<usize> = (0..n).filter(|&i| u.dot(d1.point_at(i as f64 / n as f64)) >= h1 - slack).collect();
    let dist: Vec<(usize, f64)> = near.iter().map(|&i| (i, d2.boundary_distance(d1.point_at(i as f64 / n as f64)))).collect();
    let matched: Vec<(usize, f64)> = dist.into_iter().filter(|&(_, d)| d <= tol).collect();
    if matched.is_empty() {
        return Ok(Vec::new());
    }

    // runs of cyclically consecutive indices; gaps of up to RUN_GAP samples are
    // bridged, since the distance evaluation near a tangency is noisy at the tol level
    let mut runs: Vec<Vec<(usize, f64)>> = Vec::new();
    for &m in &matched {
        match runs.last_mut() {
            Some(run) if m.0 - run.last().unwrap().0 <= RUN_GAP => run.push(m),
            _ => runs.push(vec![m]),
        }
    }
    if runs.len() > 1 && runs[0][0].0 + n - runs.last().unwrap().last().unwrap().0 <= RUN_GAP {
        let first = runs.remove(0);
        runs.last_mut().unwrap().extend(first);
    }

    let touch = 1e-9 * scale;
    // near a tangency the boundaries stay within tol over at most this extent
    let kmin = d1.min_curvature() + d2.min_curvature();
    let zone = if kmin > 0.0 { 3.0 * sqrt(2.0 * tol / kmin) } else { 0.0 };
    let mut out = Vec::new();
    for run in runs {
        let (first, last) = (run[0], *run.last().unwrap());
        let (pa, pb) = (d1.point_at(first.0 as f64 / n as f64), d1.point_at(last.0 as f64 / n as f64));
        if run.len() >= 3 && first.1 <= touch && last.1 <= touch && pa.dist(pb) > zone {
            out.push(pa);
            out.push(pb);
            continue;
        }
        let t0 = first.0 as f64 / n as f64;
        let span = if last.0 >= first.0 { last.0 - first.0 } else { last.0 + n - first.0 };
        let lo = t0 - 1.0 / n as f64;
        let hi = t0 + (span + 1) as f64 / n as f64;
        let (t, _) = golden_max(|t| -d2.boundary_distance(d1.point_at(wrap(t))), lo, hi, 80);
        out.push(d1.point_at(wrap(t)));
    }
    Ok(out)
}

fn curvature_scale(r: &Region) -> f64 {
    match r.as_circle() {
        Some((_, radius)) => 1.0 / radius,
        None => r.max_curvature(),
    }
}

/// Whether the boundary is strictly convex (no straight pieces).
pub fn strictly_convex(r: &Region) -> bool {
    match r.boundary() {
        CurveDescriptor::Polyline { .. } => false,
        CurveDescriptor::Superellipse { .. } => true,
        _ => r.min_curvature() > 0.0,
    }
}

/// Boundary-contact audit of a packing: every pair of strictly convex regions shares
/// at most one boundary point.
pub fn intersections_audit(packing: &Packing, tol: f64) -> Result<AuditReport> {
    let mut report = AuditReport::new("intersections", "strictly convex pairs share <= 1 boundary point");
    let n = packing.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| packing.regions[a].bbox().x0.total_cmp(&packing.regions[b].bbox().x0));
    let (mut pairs, mut contacts, mut multi, mut violations) = (0usize, 0usize, 0usize, 0usize);
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let bi = packing.regions[i].bbox();
        active.retain(|&j| packing.regions[j].bbox().x1 >= bi.x0 - tol);
        for &j in &active {
            let bj = packing.regions[j].bbox();
            if bj.y0 > bi.y1 + tol || bi.y0 > bj.y1 + tol {
                continue;
            }
            let (a, b) = (i.min(j), i.max(j));
            let (ra, rb) = (&packing.regions[a], &packing.regions[b]);
            let pts = boundary_intersections(ra, rb, tol).map_err(|e| match e {
                Error::NotAPacking(_) => Error::NotAPacking(format!("regions {a} and {b} overlap")),
                e => e,
            })?;
            pairs += 1;
            if pts.is_empty() {
                continue;
            }
            contacts += 1;
            if pts.len() > 1 {
                multi += 1;
                if strictly_convex(ra) && strictly_convex(rb) {
                    violations += 1;
                    report.witness("multiple_contacts", pts.clone(), pts.len() as f64, vec![a as f64, b as f64]);
                }
            }
        }
        active.push(i);
    }
    report.bound("tol", tol);
    report.measure("pairs_examined", pairs as f64);
    report.measure("contacts", contacts as f64);
    report.measure("multi_point_contacts", multi as f64);
    report.measure("violations", violations as f64);
    if multi > violations {
        report.flag("multi-point contacts between non-strictly convex regions");
    }
    report.pass = violations == 0;
    Ok(report)
}
