use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::ResidualRaster;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::math::{fsum, ln, log2, pow, round, sqrt};
use crate::sweep::SquareCover;

pub const BOX_DIMENSION_CAVEAT: &str =
    "box-counting dimension bounds Hausdorff dimension from above; slopes are consistency checks, not lower bounds";

/// Number of `δ`-grid squares meeting the residual set, for each `δ` in `scales`.
///
/// Each `δ` must be the raster cell times a power of two; counts come from OR-pooling
/// the raster, which is exact at those scales.
pub fn box_count(raster: &ResidualRaster, scales: &[f64]) -> Result<Vec<(f64, u64)>> {
    let cell = raster.cell();
    let mut levels = alloc::vec![raster.bits.clone()];
    let mut out = Vec::with_capacity(scales.len());
    for &delta in scales {
        if !(delta > 0.0) {
            return Err(Error::OutOfRange { value: delta, range: "(0, ∞)" });
        }
        let ratio = delta / cell;
        if ratio < 1.0 - 1e-9 {
            return Err(Error::ScaleBelowCell { delta, cell });
        }
        let k = round(log2(ratio));
        if (ratio - pow(2.0, k)).abs() > 1e-9 * ratio || (1usize << k as u32) > raster.resolution {
            return Err(Error::InvalidArgument(alloc::format!(
                "scale {delta} is not a dyadic multiple of the cell {cell} within the window"
            )));
        }
        let k = k as usize;
        while levels.len() <= k {
            let next = levels.last().unwrap().pool();
            levels.push(next);
        }
        out.push((delta, levels[k].count()));
    }
    Ok(out)
}

/// Dyadic scales from the window side down to the raster cell, dropping the two
/// coarsest and the finest octave.
pub fn default_scales(raster: &ResidualRaster) -> Vec<f64> {
    let levels = raster.resolution.trailing_zeros() as usize;
    let side = raster.window.width();
    (2..levels).map(|k| side / (1u64 << k) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimFit {
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Slopes between consecutive scales, coarse to fine.
    pub local_slopes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Rect>,
    pub note: String,
}

/// Least-squares slope of `log N` against `log 1/δ`.
pub fn dimension_fit(counts: &[(f64, u64)]) -> Result<DimFit> {
    if counts.len() < 4 {
        return Err(Error::InvalidArgument("dimension fit needs at least 4 scales".into()));
    }
    if counts.iter().any(|&(_, n)| n == 0) {
        return Err(Error::InvalidArgument("zero box count".into()));
    }
    let mut pts: Vec<(f64, f64, u64)> = counts.iter().map(|&(d, n)| (d, ln(1.0 / d), n)).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (dmax, dmin) = (pts[0].0, pts[pts.len() - 1].0);
    if dmax / dmin < 4.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument("scales must span at least two octaves".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = pts.iter().map(|p| ln(p.2 as f64)).collect();
    let m = xs.len() as f64;
    let mx = fsum(xs.iter().copied()) / m;
    let my = fsum(ys.iter().copied()) / m;
    let sxx = fsum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = fsum(xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)));
    let syy = fsum(ys.iter().map(|y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    let local_slopes = (1..pts.len()).map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])).collect();
    Ok(DimFit {
        scales: pts.iter().map(|p| p.0).collect(),
        counts: pts.iter().map(|p| p.2).collect(),
        slope,
        intercept,
        r2,
        local_slopes,
        window: None,
        note: BOX_DIMENSION_CAVEAT.into(),
    })
}

/// `Σ diam(K_j)^s` over the squares of a cover.
pub fn s_content(cover: &SquareCover, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::OutOfRange { value: s, range: "(0, 2]" });
    }
    Ok(fsum(cover.squares.iter().map(|q| pow(sqrt(2.0) * q.side, s))))
}
