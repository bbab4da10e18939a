use alloc::vec;
use alloc::vec::Vec;

use super::AuditReport;
use crate::error::{Error, Result};
use crate::geometry::{curvature_profile, CurveDescriptor, Point};
use crate::math::{PI, TAU};
use crate::par;

/// Sub-steps per sample interval when measuring arc lengths between samples.
const ARC_SUBSTEPS: usize = 8;

/// Tangent-distance and projection audit of a convex analytic curve.
///
/// Part (i) checks `dist(z₁, L(z₂)) ≥ (k/2π)·arc(z₁, z₂)²/length` over all ordered
/// pairs of `n` samples, where `L(z₂)` is the tangent line at `z₂` and `arc` is the
/// shorter boundary arc. Part (ii) checks that every orthogonal projection of the
/// curve has length at least `(k/8π)·length`, over `angle_count` directions.
pub fn lemma22_audit(desc: &CurveDescriptor, n: usize, angle_count: usize) -> Result<AuditReport> {
    if n < 16 || angle_count == 0 {
        return Err(Error::InvalidArgument("lemma22_audit needs n >= 16 and angle_count > 0".into()));
    }
    let profile = curvature_profile(desc, n)?;
    let shape = desc.build()?;
    let length = profile.length;
    let k = profile.k;

    let frames: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let (p, t, _) = shape.frame(i as f64 / n as f64);
            (p, t)
        })
        .collect();
    // cumulative arc length at each sample, from a polyline ARC_SUBSTEPS times finer
    let m = n * ARC_SUBSTEPS;
    let fine: Vec<Point> = (0..=m).map(|i| shape.point((i % m) as f64 / m as f64)).collect();
    let mut cum = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for i in 0..=n {
        cum.push(acc);
        if i < n {
            for j in i * ARC_SUBSTEPS..(i + 1) * ARC_SUBSTEPS {
                acc += fine[j].dist(fine[j + 1]);
            }
        }
    }
    let total = cum[n];

    // raw quantity dist·length/arc², compared with k/2π
    let rows = par::map_range(n, |i| {
        let mut best = (f64::INFINITY, i, i);
        let z1 = frames[i].0;
        for (j, &(z2, t2)) in frames.iter().enumerate() {
            if i == j {
                continue;
            }
            let forward = (cum[i.max(j)] - cum[i.min(j)]).abs();
            let arc = forward.min(total - forward);
            let dist = (z1 - z2).cross(t2).abs();
            let raw = dist * length / (arc * arc);
            if raw < best.0 {
                best = (raw, i, j);
            }
        }
        best
    });
    let worst = rows.into_iter().fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a });

    let widths = par::map_range(angle_count, |a| {
        let u = Point::unit(PI * a as f64 / angle_count as f64);
        shape.support(u) + shape.support(-u)
    });
    let (wi, width_min) = widths
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &w)| if w < acc.1 { (i, w) } else { acc });

    let mut report = AuditReport::new("lemma22", "ratio_i >= 1 - 1e-6 and ratio_ii >= 1 - 1e-6");
    report.bound("k", k).bound("length", length).bound("kappa_min", profile.kappa_min);
    report.measure("tangent_raw_min", worst.0);
    report.measure("projection_min", width_min);
    report.witness("tangent_worst_pair", vec![frames[worst.1].0, frames[worst.2].0], worst.0, vec![
        worst.1 as f64,
        worst.2 as f64,
    ]);
    let u = Point::unit(PI * wi as f64 / angle_count as f64);
    report.witness(
        "narrowest_projection",
        vec![shape.support_point(u), shape.support_point(-u)],
        width_min,
        vec![PI * wi as f64 / angle_count as f64],
    );
    if !(k > 0.0) {
        report.flag("hypothesis-violated");
        report.measure("projection_raw_min", width_min / length);
        report.pass = true;
        return Ok(report);
    }
    let ratio_i = worst.0 / (k / TAU);
    let ratio_ii = width_min / ((k / (8.0 * PI)) * length);
    report.bound("tangent_factor", k / TAU).bound("projection_bound", (k / (8.0 * PI)) * length);
    report.measure("ratio_i", ratio_i).measure("ratio_ii", ratio_ii);
    report.pass = ratio_i >= 1.0 - 1e-6 && ratio_ii >= 1.0 - 1e-6;
    Ok(report)
}
