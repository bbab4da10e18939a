use packlab_core::dimension::*;
use packlab_core::generate::{gen_apollonian, gen_bounded_curvature_packing, gen_counterexample_convex, gen_sierpinski};
use packlab_core::geometry::{CurveDescriptor, Packing, PackingMeta, Point, Rect, Region};
use packlab_core::sweep::{Square, SquareCover};
use packlab_core::Error;
use proptest::prelude::*;

const LOG2_3: f64 = 1.584_962_500_721_156;

fn empty(domain: Rect) -> Packing {
    Packing::new(domain, Vec::new(), PackingMeta::new("test"))
}

fn ols(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[test]
fn empty_packing_sets_every_cell() {
    let r = rasterize_residual(&empty(Rect::unit()), 64).unwrap();
    assert_eq!(r.count(), 64 * 64);
    assert_eq!(r.band_fraction, 0.0);
}

#[test]
fn single_disk_matches_cellwise_oracle() {
    let n = 64;
    let p = Packing::new(Rect::unit(), vec![Region::circle(0.5, 0.5, 0.5).unwrap()], PackingMeta::new("disk"));
    let r = rasterize_residual(&p, n).unwrap();
    let h = 1.0 / n as f64;
    let mut mismatches = 0;
    for j in 0..n {
        for i in 0..n {
            // A closed cell lies in the open disk iff its farthest corner does.
            let dx = ((i as f64 * h - 0.5).abs()).max(((i + 1) as f64 * h - 0.5).abs());
            let dy = ((j as f64 * h - 0.5).abs()).max(((j + 1) as f64 * h - 0.5).abs());
            let inside = dx * dx + dy * dy < 0.25;
            if r.bits.get(i, j) == inside {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0);
    // Every set cell meets the boundary circle or lies in a corner outside it.
    assert!(r.count() < 4 * n as u64 + (n * n) as u64 / 4);
}

#[test]
fn refinement_keeps_a_set_child() {
    let p = gen_apollonian(200.0, 0.5).unwrap();
    for res in [32usize, 64, 128] {
        let coarse = rasterize_residual(&p, res).unwrap();
        let fine = rasterize_residual(&p, 2 * res).unwrap();
        assert!(fine.count() <= 4 * coarse.count() * 4);
        let pooled = fine.bits.pool();
        assert_eq!(coarse.bits.count_and(&pooled), coarse.count(), "resolution {res}");
    }
}

#[test]
fn raster_errors() {
    let p = empty(Rect::unit());
    assert!(rasterize_residual(&p, 100).is_err());
    assert!(rasterize_residual(&p, 1 << 15).is_err());
    assert!(matches!(rasterize_residual_with_cap(&p, 1024, 1000), Err(Error::MemoryGuard { .. })));
}

#[test]
fn full_window_counts_powers_of_four() {
    let r = rasterize_residual(&empty(Rect::unit()), 256).unwrap();
    let scales: Vec<f64> = (0..=8).map(|k| 0.5f64.powi(k)).collect();
    for (k, (_, n)) in box_count(&r, &scales).unwrap().into_iter().enumerate() {
        assert_eq!(n, 4u64.pow(k as u32));
    }
    assert!(matches!(box_count(&r, &[1.0 / 512.0]), Err(Error::ScaleBelowCell { .. })));
    assert!(box_count(&r, &[0.3]).is_err());
}

#[test]
fn horizontal_segment_is_dimension_one() {
    let y = 1.0 / 3.0;
    let slab = |y0: f64, y1: f64| {
        Region::new(CurveDescriptor::polygon(vec![
            Point::new(-1.0, y0),
            Point::new(2.0, y0),
            Point::new(2.0, y1),
            Point::new(-1.0, y1),
        ]))
        .unwrap()
    };
    let p = Packing::new(Rect::unit(), vec![slab(-1.0, y), slab(y, 2.0)], PackingMeta::new("segment"));
    let r = rasterize_residual(&p, 512).unwrap();
    let scales: Vec<f64> = (1..=9).map(|k| 0.5f64.powi(k)).collect();
    for (d, n) in box_count(&r, &scales).unwrap() {
        assert_eq!(n as f64, (1.0 / d).round(), "delta {d}");
    }
    let fit = dimension_fit(&box_count(&r, &scales).unwrap()).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-12);
}

/// Box counts of the depth-`depth` Sierpinski residual (closed upright triangles of
/// side `2^-depth`), from dense point samples of those triangles.
fn gasket_oracle(depth: u32, k: u32) -> u64 {
    let mut tris = vec![(Point::new(0.0, 0.0), 1.0)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(tris.len() * 3);
        for (p, s) in tris {
            let h = s / 2.0;
            next.push((p, h));
            next.push((Point::new(p.x + h, p.y), h));
            next.push((Point::new(p.x + h / 2.0, p.y + h * 3f64.sqrt() / 2.0), h));
        }
        tris = next;
    }
    let n = 1usize << k;
    let mut hit = vec![false; n * n];
    let m = 24;
    for (p, s) in tris {
        for a in 0..=m {
            for b in 0..=(m - a) {
                let (u, v) = (a as f64 / m as f64, b as f64 / m as f64);
                let q = Point::new(p.x + s * (u + v / 2.0), p.y + s * v * 3f64.sqrt() / 2.0);
                let (i, j) = (((q.x * n as f64) as usize).min(n - 1), ((q.y * n as f64) as usize).min(n - 1));
                hit[j * n + i] = true;
            }
        }
    }
    hit.iter().filter(|&&h| h).count() as u64
}

#[test]
fn sierpinski_counts_scale_like_three_to_the_k() {
    let p = gen_sierpinski(9).unwrap();
    let r = rasterize_residual(&p, 2048).unwrap();
    let scales: Vec<f64> = (3..=8).map(|k| 0.5f64.powi(k)).collect();
    let counts = box_count(&r, &scales).unwrap();
    let c = counts
        .iter()
        .enumerate()
        .map(|(i, &(_, n))| (n as f64 / 3f64.powi(i as i32 + 3)).ln())
        .sum::<f64>()
        / counts.len() as f64;
    let c = c.exp();
    for (i, &(_, n)) in counts.iter().enumerate() {
        let k = i as u32 + 3;
        let model = c * 3f64.powi(k as i32);
        assert!((n as f64 / model - 1.0).abs() < 0.10, "k {k}: {n} vs {model}");
        let oracle = gasket_oracle(9, k) as f64;
        assert!((n as f64 / oracle - 1.0).abs() < 0.03, "k {k}: {n} vs oracle {oracle}");
    }
    let fit = dimension_fit(&counts).unwrap();
    assert!((fit.slope - LOG2_3).abs() < 0.05, "slope {}", fit.slope);
    assert!(fit.r2 >= 0.999);
}

#[test]
fn fit_examples() {
    let exact: Vec<(f64, u64)> = (1..=8).map(|k| (0.5f64.powi(k), 3u64.pow(k as u32))).collect();
    let fit = dimension_fit(&exact).unwrap();
    assert!((fit.slope - LOG2_3).abs() < 1e-9);
    assert!((fit.r2 - 1.0).abs() < 1e-12);
    assert!(fit.local_slopes.iter().all(|s| (s - LOG2_3).abs() < 1e-9));

    let four: Vec<(f64, u64)> = (1..=8).map(|k| (0.5f64.powi(k), 4u64.pow(k as u32))).collect();
    assert!((dimension_fit(&four).unwrap().slope - 2.0).abs() < 1e-9);

    let noisy: Vec<(f64, u64)> = (1..=10)
        .map(|k| (0.5f64.powi(k), (3f64.powi(k) * (1.0 + 0.05 * (k as f64).sin())).round() as u64))
        .collect();
    let fit = dimension_fit(&noisy).unwrap();
    let xs: Vec<f64> = noisy.iter().map(|(d, _)| (1.0 / d).ln()).collect();
    let ys: Vec<f64> = noisy.iter().map(|(_, n)| (*n as f64).ln()).collect();
    assert!((fit.slope - ols(&xs, &ys)).abs() < 1e-12);
    assert!((fit.slope - LOG2_3).abs() < 0.02);

    assert!(dimension_fit(&exact[..3]).is_err());
    assert!(dimension_fit(&[(0.5, 3), (0.45, 4), (0.4, 5), (0.35, 6)]).is_err());
    assert!(dimension_fit(&[(0.5, 3), (0.25, 0), (0.125, 5), (0.0625, 6)]).is_err());
}

#[test]
fn s_content_examples() {
    let unit = SquareCover::new(vec![Square::new(0.0, 0.0, 1.0)]).unwrap();
    assert!((s_content(&unit, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    for n in [4usize, 16, 64] {
        let seg = SquareCover::new((0..n).map(|i| Square::new(i as f64 / n as f64, 0.0, 1.0 / n as f64)).collect()).unwrap();
        assert!((s_content(&seg, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let expected = n as f64 * (2f64.sqrt() / n as f64).powf(1.5);
        assert!((s_content(&seg, 1.5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 2f64.powf(0.75) / (n as f64).sqrt()).abs() < 1e-12);
    }
    assert!(s_content(&unit, 0.0).is_err());
    assert!(s_content(&unit, 2.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn s_content_decreases_in_s(sides in prop::collection::vec(0.001f64..0.7, 1..40), s in 0.1f64..1.9, ds in 0.001f64..0.1) {
        let cover = SquareCover::new(sides.iter().map(|&l| Square::new(0.0, 0.0, l)).collect()).unwrap();
        prop_assert!(s_content(&cover, s + ds).unwrap() < s_content(&cover, s).unwrap());
    }
}

fn circles(diams: impl Iterator<Item = f64>) -> Packing {
    let regions = diams.map(|d| Region::circle(0.5, 0.5, d / 2.0).unwrap()).collect();
    Packing::new(Rect::unit(), regions, PackingMeta::new("synthetic"))
}

fn s_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.05).collect()
}

#[test]
fn exponent_of_geometric_multiplicities() {
    // Σ 3^k 2^{-ks} converges iff s > log2 3.
    let p = circles((0..=9).flat_map(|k| std::iter::repeat_n(0.5f64.powi(k), 3usize.pow(k as u32))));
    let e = packing_exponent(&p, &s_grid()).unwrap();
    let est = e.estimate.expect("confident estimate");
    assert!((est - LOG2_3).abs() < 0.02, "estimate {est}");
    assert!(e.bracket.0 <= est && est <= e.bracket.1);
    let (lo, hi) = e.grid_bracket.unwrap();
    assert!(lo <= est && est < hi && hi - lo <= 0.05 + 1e-12);
}

#[test]
fn exponent_of_single_multiplicities_is_near_zero() {
    let p = circles((0..200).map(|k| 0.5f64.powi(k)));
    let e = packing_exponent(&p, &s_grid()).unwrap();
    let est = e.estimate.unwrap();
    assert!(est > 0.0 && est < 0.05, "estimate {est}");
    assert!(e.bracket.1 < 0.05);
    assert_eq!(e.grid_bracket, None);
    assert!(e.table.iter().all(|&(_, b)| b < 0.0));
}

#[test]
fn exponent_low_confidence_on_small_packings() {
    let p = circles((0..50).map(|k| 1.0 / (k as f64 + 1.0)));
    let e = packing_exponent(&p, &s_grid()).unwrap();
    assert!(e.low_confidence);
    assert_eq!(e.estimate, None);
    assert!(packing_exponent(&p, &[]).is_err());
}

#[test]
fn apollonian_exponent_near_known_value() {
    for cap in [2000.0, 5000.0] {
        let p = gen_apollonian(cap, 0.5).unwrap();
        let e = packing_exponent(&p, &s_grid()).unwrap();
        let est = e.estimate.unwrap();
        assert!((est - 1.30568).abs() < 0.03, "estimate {est}");
        assert!(e.bracket.0 <= 1.315 && e.bracket.1 >= 1.300, "bracket {:?}", e.bracket);
    }
}

fn shifted(p: &Packing, d: f64) -> Packing {
    let mut q = p.clone();
    q.domain = p.domain.translated(-d, -d);
    q
}

#[test]
fn grid_shift_robustness() {
    for p in [gen_sierpinski(8).unwrap(), gen_apollonian(500.0, 0.5).unwrap()] {
        let base = p.clone();
        let r = rasterize_residual(&base, 1024).unwrap();
        for k in 4..=8 {
            let delta = 0.5f64.powi(k);
            let n0 = box_count(&r, &[delta]).unwrap()[0].1 as f64;
            let rs = rasterize_residual(&shifted(&base, delta / 3.0), 1024).unwrap();
            let n1 = box_count(&rs, &[delta]).unwrap()[0].1 as f64;
            assert!((n0.ln() - n1.ln()).abs() < 0.1, "delta {delta}: {n0} vs {n1}");
        }
    }
}

fn fitted_slope(p: &Packing, resolution: usize) -> f64 {
    let r = rasterize_residual(p, resolution).unwrap();
    dimension_fit(&box_count(&r, &default_scales(&r)).unwrap()).unwrap().slope
}

#[test]
fn dimension_sandwich_for_generated_packings() {
    let (cex, _) = gen_counterexample_convex(Rect::unit(), &[0.02, 0.005, 0.00125], 3, 4).unwrap();
    let cases = [
        gen_sierpinski(8).unwrap(),
        gen_apollonian(500.0, 0.5).unwrap(),
        gen_bounded_curvature_packing(Rect::unit(), 4.0, 200, 3).unwrap(),
        cex,
    ];
    for p in &cases {
        let s = fitted_slope(p, 1024);
        assert!((0.95..=2.0).contains(&s), "{}: slope {s}", p.meta.generator);
    }
}

#[test]
fn bounded_curvature_packings_exceed_one() {
    for seed in [1u64, 2] {
        let p = gen_bounded_curvature_packing(Rect::unit(), 2.0, 500, seed).unwrap();
        assert!(p.len() >= 500);
        let s = fitted_slope(&p, 1024);
        assert!(s >= 1.02, "seed {seed}: slope {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]
    #[test]
    fn box_counts_monotone_in_scale(seed in 0u64..1000) {
        let p = gen_bounded_curvature_packing(Rect::unit(), 3.0, 40, seed).unwrap();
        let r = rasterize_residual(&p, 256).unwrap();
        let scales: Vec<f64> = (0..=8).map(|k| 0.5f64.powi(k)).collect();
        let c = box_count(&r, &scales).unwrap();
        for w in c.windows(2) {
            prop_assert!(w[0].1 <= w[1].1);
        }
    }
}
