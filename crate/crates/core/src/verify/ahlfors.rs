use alloc::vec;
use alloc::vec::Vec;

use super::AuditReport;
use crate::error::{Error, Result};
use crate::geometry::{Point, Region};
use crate::math::{ceil, sqrt};
use crate::par;

/// `Area(B(center, radius) ∩ region)` by a midpoint sweep over `rows` horizontal
/// strips; each strip contributes the exact overlap of the disk chord and the
/// region slice at its midline.
pub fn disk_region_area(region: &Region, center: Point, radius: f64, rows: usize) -> f64 {
    let bb = region.bbox();
    let y0 = (center.y - radius).max(bb.y0);
    let y1 = (center.y + radius).min(bb.y1);
    if !(y1 > y0) || rows == 0 {
        return 0.0;
    }
    let h = (y1 - y0) / rows as f64;
    let mut acc = 0.0;
    for i in 0..rows {
        let y = y0 + (i as f64 + 0.5) * h;
        let dy = y - center.y;
        let w2 = radius * radius - dy * dy;
        if w2 <= 0.0 {
            continue;
        }
        let w = sqrt(w2);
        if let Some((a, b)) = region.slice_at_y(y) {
            let lo = a.max(center.x - w);
            let hi = b.min(center.x + w);
            if hi > lo {
                acc += hi - lo;
            }
        }
    }
    acc * h
}

/// Strip count for an area budget of `area_samples` grid cells.
pub(crate) fn rows_for(area_samples: usize) -> usize {
    (ceil(sqrt(area_samples as f64)) as usize).max(8)
}

/// Audit radii `diam·(j/radius_count)²`, `j = 1..=radius_count`: dense at small scales, ending at `diam`.
fn radii(diam: f64, radius_count: usize) -> Vec<f64> {
    (1..=radius_count)
        .map(|j| {
            let f = j as f64 / radius_count as f64;
            diam * f * f
        })
        .collect()
}

fn min_ratio(region: &Region, p: Point, radii: &[f64], rows: usize) -> (f64, f64) {
    radii
        .iter()
        .map(|&r| (disk_region_area(region, p, r, rows) / (r * r), r))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a })
}

/// Empirical Ahlfors 2-regularity constant: the minimum of `Area(B(p, r) ∩ D)/r²`
/// over `center_count` boundary points and `radius_count` radii in `(0, diam]`.
///
/// Interior points halfway between boundary points and the mean of 64 boundary samples
/// are spot-checked; the audit passes when their minimum does not undercut the
/// boundary minimum by more than 0.02.
pub fn ahlfors_constant(region: &Region, center_count: usize, radius_count: usize, area_samples: usize) -> Result<AuditReport> {
    let diam = region.diam();
    if !(diam >= 1e-9) {
        return Err(Error::Degenerate("region diameter below 1e-9".into()));
    }
    if center_count == 0 || radius_count == 0 {
        return Err(Error::InvalidArgument("ahlfors_constant needs positive budgets".into()));
    }
    let rows = rows_for(area_samples);
    let rs = radii(diam, radius_count);
    let boundary = par::map_range(center_count, |i| {
        let p = region.point_at(i as f64 / center_count as f64);
        let (ratio, r) = min_ratio(region, p, &rs, rows);
        (ratio, r, p)
    });
    let (m_emp, r_at, p_at) =
        boundary.iter().copied().fold((f64::INFINITY, 0.0, Point::new(0.0, 0.0)), |a, b| if b.0 < a.0 { b } else { a });

    let spots = 8.min(center_count);
    let ring = region.samples(64).points;
    let anchor = ring.iter().fold(Point::new(0.0, 0.0), |a, &p| a + p) * (1.0 / ring.len() as f64);
    let interior = par::map_range(spots, |i| {
        let q = region.point_at(i as f64 / spots as f64);
        let p = anchor.lerp(q, 0.5);
        if region.contains(p) {
            min_ratio(region, p, &rs, rows).0
        } else {
            f64::INFINITY
        }
    });
    let interior_min = interior.into_iter().fold(f64::INFINITY, f64::min);

    let mut report = AuditReport::new("ahlfors", "M_emp > 0 and interior_min >= M_emp - 0.02");
    report.bound("diam", diam).bound("rows", rows as f64);
    report.measure("M_emp", m_emp).measure("interior_min", interior_min).measure("r_at_min", r_at);
    report.witness("min_ball", vec![p_at], m_emp, vec![r_at]);
    report.pass = m_emp > 0.0 && interior_min >= m_emp - 0.02;
    Ok(report)
}
