use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::ahlfors::{ahlfors_constant, disk_region_area, rows_for};
use super::AuditReport;
use crate::error::{Error, Result};
use crate::geometry::metric::{normal_angles, separation, support_gap};
use crate::geometry::{point_segment_distance, CurveDescriptor, Packing, Point, Region};
use crate::math::{fsum, pow, round, PI};
use crate::par;

const AREA_SAMPLES: usize = 100_000;
const MAX_CLASSES: usize = 16;
const SELF_PROBES: usize = 16;

/// The compact set `E` of the counting estimates.
#[derive(Debug, Clone)]
pub enum Probe {
    Region(Region),
    Segment(Point, Point),
}

impl Probe {
    pub fn diam(&self) -> f64 {
        match self {
            Probe::Region(r) => r.diam(),
            Probe::Segment(a, b) => a.dist(*b),
        }
    }

    /// A point of `E`.
    pub fn anchor(&self) -> Point {
        match self {
            Probe::Region(r) => {
                let ring = r.samples(64).points;
                ring.iter().fold(Point::new(0.0, 0.0), |a, &p| a + p) * (1.0 / ring.len() as f64)
            }
            Probe::Segment(a, b) => a.lerp(*b, 0.5),
        }
    }

    /// Signed separation between `d` and `E`: the distance when disjoint, negative on overlap.
    pub fn gap(&self, d: &Region) -> f64 {
        match self {
            Probe::Region(e) => separation(d, e).0,
            Probe::Segment(a, b) => segment_gap(d, *a, *b),
        }
    }
}

fn segment_gap(d: &Region, a: Point, b: Point) -> f64 {
    if let Some((c, r)) = d.as_circle() {
        return point_segment_distance(c, a, b) - r;
    }
    let mut extra = normal_angles(d);
    let n = (b - a).perp();
    if n.norm() > 0.0 {
        extra.push(n.angle());
        extra.push((-n).angle());
    }
    support_gap(|u| d.support(u), |u: Point| u.dot(a).max(u.dot(b)), &extra).0
}

/// Scale- and translation-free key of a descriptor, so that similar regions share
/// one Ahlfors measurement.
fn shape_key(d: &CurveDescriptor, diam: f64) -> Vec<i64> {
    let q = |x: f64| round(x * 1e9) as i64;
    match d {
        CurveDescriptor::Circle { .. } => vec![0],
        CurveDescriptor::Ellipse { a, b, angle, .. } => vec![1, q(a / b), q(*angle)],
        CurveDescriptor::Superellipse { a, b, p, .. } => vec![2, q(a / b), q(*p)],
        CurveDescriptor::Lune { c, smoothing, .. } => vec![3, q(*c), q(*smoothing)],
        CurveDescriptor::SmoothenedSquare { side, alpha, bulge, .. } => {
            vec![4, q(alpha / side), q(bulge.map(|r| r / side).unwrap_or(-1.0))]
        }
        CurveDescriptor::Polyline { vertices } => {
            let o = vertices[0];
            let mut key = vec![5];
            for v in vertices {
                key.push(round((v.x - o.x) / diam * 1e6) as i64);
                key.push(round((v.y - o.y) / diam * 1e6) as i64);
            }
            key
        }
    }
}

/// Common Ahlfors constant of a packing: the minimum over its distinct shape
/// classes (at most 16, evenly spaced in order of appearance).
pub fn packing_ahlfors(packing: &Packing) -> Result<(f64, usize)> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for r in &packing.regions {
        if seen.insert(shape_key(r.boundary(), r.diam())) {
            reps.push(r);
        }
    }
    if reps.is_empty() {
        return Err(Error::Degenerate("empty packing has no Ahlfors constant".into()));
    }
    let picks: Vec<&Region> = if reps.len() > MAX_CLASSES {
        (0..MAX_CLASSES).map(|i| reps[i * reps.len() / MAX_CLASSES]).collect()
    } else {
        reps
    };
    let mut m = f64::INFINITY;
    for r in &picks {
        m = m.min(ahlfors_constant(r, 64, 16, AREA_SAMPLES)?.get("M_emp"));
    }
    if !(m > 0.0) {
        return Err(Error::Degenerate("measured Ahlfors constant is not positive".into()));
    }
    Ok((m, picks.len()))
}

fn annulus_ratio(d: &Region, x: Point, r: f64, big_r: f64, rows: usize) -> f64 {
    let area = disk_region_area(d, x, big_r, rows) - disk_region_area(d, x, r, rows);
    area / ((big_r - r) * (big_r - r))
}

/// Counting audit: the number of regions meeting `E` with `diam ≥ c·diam E` is at
/// most `K(c⁻² + 1)`, `K = max{4π/c′, 25π/M}`.
///
/// `M` is measured over the packing unless supplied. `c′` is the worst annulus ratio
/// `Area(D ∩ B(x,R)∖B(x,r))/(R−r)²` over the regions with `diam ≥ 4·diam E` meeting
/// `E` (with `x` a point of `E`, `r = diam E`, `R = 2r`) and over self-probes of up to
/// 16 regions anchored on their own boundary with `r = diam/4`, `R = diam/2`.
pub fn counting_audit(packing: &Packing, probe: &Probe, c: f64, m: Option<f64>) -> Result<AuditReport> {
    if !(c > 0.0) {
        return Err(Error::OutOfRange { value: c, range: "(0, ∞)" });
    }
    let de = probe.diam();
    if !(de > 0.0) {
        return Err(Error::Degenerate("probe set has zero diameter".into()));
    }
    let mut report = AuditReport::new("counting", "count <= K (c^-2 + 1)");
    let m = match m {
        Some(m) if m > 0.0 => m,
        Some(m) => return Err(Error::OutOfRange { value: m, range: "(0, ∞)" }),
        None => {
            let (m, classes) = packing_ahlfors(packing)?;
            report.measure("shape_classes", classes as f64);
            m
        }
    };

    let scale = de.max(packing.domain.diagonal());
    let meets: Vec<bool> = par::map_range(packing.len(), |i| probe.gap(&packing.regions[i]) < -1e-12 * scale);
    let diams = packing.diameters();
    let count_at = |c: f64| (0..packing.len()).filter(|&i| meets[i] && diams[i] >= c * de).count();

    let rows = rows_for(AREA_SAMPLES);
    let x = probe.anchor();
    let i4: Vec<usize> = (0..packing.len()).filter(|&i| meets[i] && diams[i] >= 4.0 * de).collect();
    let probe_ratios = par::map_range(i4.len(), |k| annulus_ratio(&packing.regions[i4[k]], x, de, 2.0 * de, rows));
    let c_probe = probe_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let selves: Vec<usize> = if packing.len() > SELF_PROBES {
        (0..SELF_PROBES).map(|k| k * packing.len() / SELF_PROBES).collect()
    } else {
        (0..packing.len()).collect()
    };
    let self_ratios = par::map_range(selves.len(), |k| {
        let d = &packing.regions[selves[k]];
        annulus_ratio(d, d.point_at(0.0), d.diam() / 4.0, d.diam() / 2.0, rows)
    });
    let c_self = self_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c_prime = c_probe.min(c_self);
    if !(c_prime > 0.0 && c_prime.is_finite()) {
        return Err(Error::Degenerate("annulus constant could not be measured".into()));
    }

    let k = (4.0 * PI / c_prime).max(25.0 * PI / m);
    let bound = |c: f64| k * (1.0 / (c * c) + 1.0);
    let count = count_at(c);

    let mut table = super::Table::new(&["c", "count", "bound"]);
    let mut monotone = true;
    let mut prev = usize::MAX;
    for j in -2i32..=2 {
        let cj = c * pow(2.0, j as f64);
        let n = count_at(cj);
        monotone &= n <= prev;
        prev = n;
        table.rows.push(vec![cj, n as f64, bound(cj)]);
    }
    let mut prev = 0usize;
    for j in 0..=8 {
        let eps = de * pow(2.0, -(j as f64));
        let n = (0..packing.len()).filter(|&i| meets[i] && diams[i] > eps).count();
        monotone &= n >= prev;
        prev = n;
    }

    report.bound("c", c).bound("M", m).bound("c_prime", c_prime).bound("K", k).bound("count_bound", bound(c));
    report.measure("count", count as f64).measure("intersecting", meets.iter().filter(|&&b| b).count() as f64);
    report.measure("i4", i4.len() as f64).measure("c_prime_self", c_self);
    if c_probe.is_finite() {
        report.measure("c_prime_probe", c_probe);
    } else {
        report.flag("no region with diam >= 4 diam E meets E; c' from self-probes");
    }
    report.measure("count_over_bound", count as f64 / bound(c));
    if let Some(w) = (0..packing.len()).filter(|&i| meets[i] && diams[i] >= c * de).min_by(|&a, &b| diams[a].total_cmp(&diams[b])) {
        report.witness("smallest_counted", vec![packing.regions[w].point_at(0.0)], diams[w], vec![w as f64]);
    }
    if !monotone {
        report.flag("count not monotone over the c or epsilon grid");
    }
    report.table = Some(table);
    report.pass = (count as f64) <= bound(c) && monotone;
    Ok(report)
}

/// Segment-sum audit over the regions with `diam ≤ c·l` and `dist(D, E) ≤ c·diam`:
/// `K_emp(s) = (s−1)·Σ diam^s / l^s` for each `s`; passes when the largest `K_emp`
/// is finite and at most twice the median, i.e. one constant serves every `s`.
pub fn segment_sum_audit(packing: &Packing, segment: (Point, Point), c: f64, s_values: &[f64]) -> Result<AuditReport> {
    let (a, b) = segment;
    let l = a.dist(b);
    if !(l > 0.0) {
        return Err(Error::Degenerate("segment has zero length".into()));
    }
    if !(c > 0.0) {
        return Err(Error::OutOfRange { value: c, range: "(0, ∞)" });
    }
    if s_values.is_empty() {
        return Err(Error::InvalidArgument("no exponents given".into()));
    }
    for &s in s_values {
        if !(s > 1.0 && s <= 2.0) {
            return Err(Error::OutOfRange { value: s, range: "(1, 2]" });
        }
    }
    let probe = Probe::Segment(a, b);
    let keep = par::map_range(packing.len(), |i| {
        let d = &packing.regions[i];
        d.diam() <= c * l && probe.gap(d).max(0.0) <= c * d.diam()
    });
    let diams: Vec<f64> = (0..packing.len()).filter(|&i| keep[i]).map(|i| packing.regions[i].diam()).collect();

    let mut report = AuditReport::new("segment-sum", "max_s K_emp <= 2 median_s K_emp");
    report.bound("c", c).bound("l", l);
    report.measure("family_size", diams.len() as f64);
    if diams.is_empty() {
        report.flag("vacuous: no region satisfies the hypotheses");
        report.pass = true;
        return Ok(report);
    }
    let mut table = super::Table::new(&["s", "sum", "K_emp"]);
    let mut ks = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let sum = fsum(diams.iter().map(|&d| pow(d / l, s)));
        let k = (s - 1.0) * sum;
        table.rows.push(vec![s, sum * pow(l, s), k]);
        ks.push(k);
    }
    let mut sorted = ks.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let max = sorted[sorted.len() - 1];
    report.measure("K_emp_max", max).measure("K_emp_median", median).measure("K_emp_min", sorted[0]);
    report.table = Some(table);
    report.pass = max.is_finite() && max <= 2.0 * median;
    Ok(report)
}
