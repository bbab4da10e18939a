use alloc::vec::Vec;

use super::cover::SquareCover;
use super::gm::Sweep;
use super::polygon::midpoint_constant;
use crate::error::{Error, Result};
use crate::geometry::{Packing, Point};
use crate::math::pow;
use crate::verify::{AuditReport, Table};

/// Resolution of the grid of points used to check that the cover contains `S_n`.
pub const COVER_CHECK_RESOLUTION: usize = 512;

/// Per-stage ledger of `Δ_m = ∫g_m − ∫g_{m−1}` against `c₀·diam(B_m)^s·#J_m`.
///
/// `λ = s − 1`; the size threshold is `τ = c₁λ²` with `c₁` the smallest measured
/// interior-point constant over the regions. `J_m` holds the squares that meet `B_m`
/// without containing it and have `diam ≥ τ·length(∂B_m)`; stage `m` is in the second
/// case when some square meeting `B_m` is that large, otherwise in the first.
pub fn main_estimate_audit(packing_prefix: &Packing, cover: &SquareCover, s: f64, grid: usize) -> Result<AuditReport> {
    if !(s > 1.0 && s <= 1.2) {
        return Err(Error::OutOfRange { value: s, range: "(1, 1.2]" });
    }
    let sw = Sweep::new(packing_prefix, cover, s, grid)?;
    if let Some(p) = cover.uncovered_point(packing_prefix, COVER_CHECK_RESOLUTION) {
        return Err(Error::CoverMissesResidual(alloc::format!("({}, {}) is not covered", p.x, p.y)));
    }
    let lambda = s - 1.0;
    let mut c1 = f64::INFINITY;
    for b in &packing_prefix.regions {
        if let Some((c, _)) = midpoint_constant(b, lambda, 256)? {
            c1 = c1.min(c);
        }
    }
    if !c1.is_finite() {
        return Err(Error::Degenerate("no region admits an interior-point constant".into()));
    }
    let tau = c1 * lambda * lambda;
    let profiles = sw.all_profiles(s);
    let n = packing_prefix.len();

    let mut table = Table::new(&["m", "diam", "j_m", "delta", "case", "c0_stage", "contained"]);
    let mut c0: f64 = 0.0;
    let (mut case1, mut case2) = (0usize, 0usize);
    for m in 1..=n {
        let b = &packing_prefix.regions[m - 1];
        let delta = profiles[m].integral - profiles[m - 1].integral;
        let thresh = tau * b.length();
        let (mut jm, mut big, mut contained) = (0usize, false, false);
        for q in &cover.squares {
            if !q.meets(b) {
                continue;
            }
            let large = q.diam() >= thresh;
            big |= large;
            if q.contains_region(b) {
                contained = true;
            } else if large {
                jm += 1;
            }
        }
        let case = if big { 2.0 } else { 1.0 };
        if big {
            case2 += 1;
        } else {
            case1 += 1;
        }
        let stage = (-delta / (pow(b.diam(), s) * jm.max(1) as f64)).max(0.0);
        c0 = c0.max(stage);
        table.rows.push(alloc::vec![m as f64, b.diam(), jm as f64, delta, case, stage, contained as u8 as f64]);
    }

    let deltas: Vec<f64> = table.rows.iter().map(|r| r[3]).collect();
    let telescoped = crate::math::fsum(deltas.iter().copied());
    let (i0, i_n) = (profiles[0].integral, profiles[n].integral);
    let side_sum = cover.side_sum(s);
    let mut rep = AuditReport::new(
        "main-estimate",
        "integral g_m >= integral g_{m-1} - c0 diam(B_m)^s #J_m with a finite empirical c0",
    );
    rep.measure("c0_emp", c0)
        .measure("c1", c1)
        .measure("tau", tau)
        .measure("integral_g0", i0)
        .measure("integral_gn", i_n)
        .measure("side_sum", side_sum)
        .measure("telescoping_error", (telescoped - (i_n - i0)).abs())
        .measure("case1_stages", case1 as f64)
        .measure("case2_stages", case2 as f64)
        .measure("squares", cover.len() as f64);
    rep.bound("s", s).bound("lambda", lambda);
    rep.table = Some(table);
    rep.pass = c0.is_finite() && i_n <= side_sum * (1.0 + 1e-6);
    Ok(rep)
}

/// Runs the stage ledger over successive covers and checks the shape of the
/// estimate: `c₀` stays within a factor 3 across covers (all-zero counts as stable)
/// and `Σ ℓ(K_j)^s` never drops below 0.9 of its value on the first cover.
pub fn main_estimate_stability(
    packing_prefix: &Packing,
    covers: &[SquareCover],
    s: f64,
    grid: usize,
) -> Result<AuditReport> {
    if covers.len() < 2 {
        return Err(Error::InvalidArgument("stability needs at least two covers".into()));
    }
    let mut rep = AuditReport::new(
        "main-estimate-stability",
        "max c0 <= 3 min c0 across covers; side sums >= 0.9 x first",
    );
    let mut table = Table::new(&["cover", "squares", "c0_emp", "side_sum", "integral_g0", "integral_gn"]);
    let mut pass_each = true;
    for (i, c) in covers.iter().enumerate() {
        let r = main_estimate_audit(packing_prefix, c, s, grid)?;
        pass_each &= r.pass;
        table.rows.push(alloc::vec![
            i as f64,
            c.len() as f64,
            r.get("c0_emp"),
            r.get("side_sum"),
            r.get("integral_g0"),
            r.get("integral_gn"),
        ]);
    }
    let c0: Vec<f64> = table.rows.iter().map(|r| r[2]).collect();
    let sums: Vec<f64> = table.rows.iter().map(|r| r[3]).collect();
    let (lo, hi) = (c0.iter().copied().fold(f64::INFINITY, f64::min), c0.iter().copied().fold(0.0, f64::max));
    let spread = if hi <= 1e-12 { 1.0 } else if lo <= 0.0 { f64::INFINITY } else { hi / lo };
    let sum_ratio = sums.iter().map(|v| v / sums[0]).fold(f64::INFINITY, f64::min);
    rep.measure("c0_min", lo)
        .measure("c0_max", hi)
        .measure("c0_spread", spread)
        .measure("side_sum_min_ratio", sum_ratio);
    rep.bound("spread_max", 3.0).bound("side_sum_ratio_min", 0.9);
    rep.witness("c0 per cover", Vec::<Point>::new(), hi, c0);
    rep.table = Some(table);
    rep.pass = pass_each && spread.is_finite() && spread <= 3.0 && sum_ratio >= 0.9;
    Ok(rep)
}
