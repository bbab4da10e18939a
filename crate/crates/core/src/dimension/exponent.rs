use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Packing;
use crate::math::{fsum, ln};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// Zero of the fitted growth exponent; `None` when confidence is low.
    pub estimate: Option<f64>,
    /// Primary zero plus or minus its change from the next shallower tail window.
    pub bracket: (f64, f64),
    /// Adjacent grid values between which the growth exponent changes sign.
    pub grid_bracket: Option<(f64, f64)>,
    pub low_confidence: bool,
    pub flags: Vec<String>,
    /// `(s, β(s))` for every grid value.
    pub table: Vec<(f64, f64)>,
    /// `(first rank, zero)` for each tail window.
    pub windows: Vec<(usize, f64)>,
}

/// Smallest first rank of a tail window.
const MIN_RANK: usize = 16;

/// Decay rate `γ` of `log(1/d)` against `log(rank)` over ranks `>= lo`, using the
/// largest rank of each group of equal diameters (the counting function at its jumps).
fn decay_rate(d: &[f64], lo: usize) -> Option<f64> {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in lo.max(1) - 1..d.len() {
        if i + 1 == d.len() || d[i + 1] < d[i] {
            xs.push(ln((i + 1) as f64));
            ys.push(-ln(d[i]));
        }
    }
    if xs.len() < 4 {
        return None;
    }
    let m = xs.len() as f64;
    let mx = fsum(xs.iter().copied()) / m;
    let my = fsum(ys.iter().copied()) / m;
    let sxx = fsum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = fsum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)));
    (sxx > 0.0 && sxy > 0.0).then(|| sxy / sxx)
}

/// Estimates `inf{s : Σ diam^s < ∞}` for the decreasing diameter sequence.
///
/// With `d_i ≈ C·i^{-γ}` the sums of `d^s` over index blocks `[m, 2m)` grow like
/// `m^{β(s)}`, `β(s) = 1 − sγ`; the series converges exactly when `β(s) < 0`, so the
/// exponent is the zero `1/γ`. `γ` is fitted on the deepest of the tail windows
/// (ranks `>= n/16`, `>= n/64`, `>= n/256`) holding at least four distinct sizes.
pub fn packing_exponent(packing: &Packing, s_grid: &[f64]) -> Result<ExponentEstimate> {
    let mut grid: Vec<f64> = s_grid.to_vec();
    if grid.is_empty() || grid.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidArgument("s grid needs positive values".into()));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut d = packing.diameters();
    d.retain(|x| *x > 0.0 && x.is_finite());
    d.sort_by(|a, b| b.total_cmp(a));
    let n = d.len();

    let mut flags = Vec::new();
    if n < 100 {
        flags.push(alloc::format!("only {n} regions"));
    }
    if n == 0 || d[0] / d[n - 1] < 100.0 {
        flags.push("diameters span less than two decades".into());
    }
    // Shallow to deep.
    let zeros: Vec<(usize, f64)> = [8u32, 6, 4]
        .iter()
        .map(|&sh| (n >> sh).max(MIN_RANK))
        .filter_map(|lo| decay_rate(&d, lo).map(|g| (lo, 1.0 / g)))
        .collect();
    let main = zeros.last().map(|z| 1.0 / z.1);
    if main.is_none() {
        flags.push("too few distinct sizes in the tail to fit".into());
    }
    let low_confidence = !flags.is_empty();
    let bracket = match zeros.as_slice() {
        [] => (0.0, f64::INFINITY),
        [z] => (z.1, z.1),
        [.., prev, last] => {
            let w = (last.1 - prev.1).abs();
            ((last.1 - w).max(0.0), last.1 + w)
        }
    };
    let (table, grid_bracket) = match main {
        Some(g) => {
            let table: Vec<(f64, f64)> = grid.iter().map(|&s| (s, 1.0 - s * g)).collect();
            let gb = table.windows(2).find(|w| w[0].1 >= 0.0 && w[1].1 < 0.0).map(|w| (w[0].0, w[1].0));
            if gb.is_none() {
                if table[0].1 < 0.0 {
                    flags.push("growth exponent negative on the whole grid; the exponent lies below it".into());
                } else {
                    flags.push("growth exponent positive on the whole grid; the exponent lies above it".into());
                }
            }
            (table, gb)
        }
        None => (Vec::new(), None),
    };
    Ok(ExponentEstimate {
        estimate: if low_confidence { None } else { main.map(|g| 1.0 / g) },
        bracket,
        grid_bracket,
        low_confidence,
        flags,
        table,
        windows: zeros,
    })
}
