use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::AuditReport;
use crate::error::{Error, Result};
use crate::geometry::metric::shorter_arc;
use crate::geometry::{convexity_check, sample_curve, CurveDescriptor, CurveSamples};
use crate::math::{acos, cos, FRAC_PI_2, FRAC_PI_4, PI, TAU};
use crate::par;

const COARSE: usize = 256;

#[derive(Debug, Clone, Copy)]
struct Best {
    ratio: f64,
    i: usize,
    j: usize,
}

fn better(a: Best, b: Best) -> Best {
    // ties resolved toward the lexicographically smaller pair for determinism
    if b.ratio > a.ratio || (b.ratio == a.ratio && (b.i, b.j) < (a.i, a.j)) {
        b
    } else {
        a
    }
}

fn pair_ratio(s: &CurveSamples, cum: &[f64], min_chord: f64, i: usize, j: usize) -> Option<f64> {
    if i == j {
        return None;
    }
    let chord = s.points[i].dist(s.points[j]);
    if chord < min_chord {
        return None;
    }
    Some(shorter_arc(cum, i, j) / chord)
}

fn scan<I: Fn(usize) -> Vec<(usize, usize)> + Sync + Send>(
    s: &CurveSamples,
    cum: &[f64],
    min_chord: f64,
    rows: usize,
    pairs_of_row: I,
) -> Best {
    let per_row = par::map_range(rows, |r| {
        let mut best = Best { ratio: f64::NEG_INFINITY, i: 0, j: 0 };
        for (i, j) in pairs_of_row(r) {
            if let Some(ratio) = pair_ratio(s, cum, min_chord, i, j) {
                best = better(best, Best { ratio, i: i.min(j), j: i.max(j) });
            }
        }
        best
    });
    per_row.into_iter().fold(Best { ratio: f64::NEG_INFINITY, i: 0, j: 0 }, better)
}

/// Empirical chord-arc constant of a convex closed polyline.
///
/// All pairs are evaluated when there are at most `pair_budget` of them; otherwise
/// all pairs among 256 evenly spaced samples, followed by an exhaustive search in
/// the neighbourhood of the coarse maximiser.
pub fn chord_arc_ratio(samples: &CurveSamples, pair_budget: usize) -> Result<AuditReport> {
    let convexity = convexity_check(samples)?;
    if !convexity.convex {
        return Err(Error::NotConvex);
    }
    let n = samples.len();
    let cum = samples.cumulative();
    let min_chord = 1e-9 * samples.diameter();
    let total_pairs = n * (n - 1) / 2;
    let mut report = AuditReport::new("chord-arc", "L_emp >= 1");
    let best = if total_pairs <= pair_budget {
        report.flag("exhaustive");
        scan(samples, &cum, min_chord, n, |i| (i + 1..n).map(|j| (i, j)).collect())
    } else {
        report.flag("stratified");
        let m = COARSE.min(n);
        let idx: Vec<usize> = (0..m).map(|k| k * n / m).collect();
        let coarse = scan(samples, &cum, min_chord, m, |a| (a + 1..m).map(|b| (idx[a], idx[b])).collect());
        let w = n / m + 1;
        let side = 2 * w + 1;
        let local = scan(samples, &cum, min_chord, side, |a| {
            let i = (coarse.i + n + a - w) % n;
            (0..side).map(|b| (i, (coarse.j + n + b - w) % n)).collect()
        });
        better(coarse, local)
    };
    report.measure("L_emp", best.ratio);
    report.measure("pairs_evaluated", total_pairs.min(pair_budget) as f64);
    report.measure("samples", n as f64);
    report.witness(
        "worst_pair",
        vec![samples.points[best.i], samples.points[best.j]],
        best.ratio,
        vec![best.i as f64, best.j as f64],
    );
    report.pass = best.ratio.is_finite() && best.ratio >= 1.0 - 1e-9;
    Ok(report)
}

/// Chord-arc audit of a descriptor at `n` samples, with the worst pair
/// re-examined on samples four times finer.
pub fn chord_arc_audit(desc: &CurveDescriptor, n: usize, pair_budget: usize) -> Result<AuditReport> {
    let samples = sample_curve(desc, n)?;
    let mut report = chord_arc_ratio(&samples, pair_budget)?;
    let w = &report.witnesses[0];
    let (i, j) = (w.params[0] as usize, w.params[1] as usize);
    let fine = sample_curve(desc, 4 * n)?;
    let cum = fine.cumulative();
    let min_chord = 1e-9 * fine.diameter();
    let m = 4 * n;
    let radius = 8;
    let side = 2 * radius + 1;
    let refined = scan(&fine, &cum, min_chord, side, |a| {
        let fi = (4 * i + m + a - radius) % m;
        (0..side).map(|b| (fi, (4 * j + m + b - radius) % m)).collect()
    });
    report.measure("L_emp_coarse", report.get("L_emp"));
    report.measure("L_emp_refined", refined.ratio);
    let l = report.get("L_emp").max(refined.ratio);
    report.measure("L_emp", l);
    if refined.ratio > report.get("L_emp_coarse") {
        report.witness(
            "worst_pair_refined",
            vec![fine.points[refined.i], fine.points[refined.j]],
            refined.ratio,
            vec![refined.i as f64, refined.j as f64],
        );
    }
    Ok(report)
}

/// The chord-arc constant obtained from a curvature bound `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordArcConstant {
    pub delta: f64,
    /// `min{cos(π/2 − δ), k/16π}`: the lower bound for `|z₁ − z₂| / length(C|[z₁, z₂])`.
    pub raw_constant: f64,
    /// `1 / raw_constant`, the chord-arc constant proper.
    pub l: f64,
}

/// `δ = min{k²/32π, π/4}`, `raw = min{cos(π/2 − δ), k/16π}`, `L = 1/raw`.
pub fn theoretical_chord_arc(k: f64) -> Result<ChordArcConstant> {
    if !(k > 0.0 && k <= TAU) {
        return Err(Error::OutOfRange { value: k, range: "(0, 2π]" });
    }
    // (k / 32π)·k keeps δ = π/8 exact at k = 2π
    let delta = ((k / (32.0 * PI)) * k).min(FRAC_PI_4);
    let raw_constant = cos(FRAC_PI_2 - delta).min(k / (16.0 * PI));
    Ok(ChordArcConstant { delta, raw_constant, l: 1.0 / raw_constant })
}

/// Arc-to-chord ratio between the two extreme points of the lune with parameter `c`:
/// `2·arccos(c/2) / (2 − c)`.
pub fn lune_ratio(c: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&c) {
        return Err(Error::OutOfRange { value: c, range: "[0, 2)" });
    }
    Ok(2.0 * acos(c / 2.0) / (2.0 - c))
}
