use packlab_core::geometry::{sample_curve, CurveDescriptor, CurveSamples, Packing, PackingMeta, Point, Rect, Region};
use packlab_core::verify::*;
use packlab_core::Error;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::f64::consts::PI;

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Area of the intersection of two disks.
fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let m = r1.min(r2);
        return PI * m * m;
    }
    let a1 = r1 * r1 * ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
    let a2 = r2 * r2 * ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).sqrt();
    a1 + a2 - 0.5 * k
}

fn mc_area(region: &Region, p: Point, r: f64, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut hits = 0usize;
    for _ in 0..n {
        let q = Point::new(p.x + (2.0 * uniform(rng) - 1.0) * r, p.y + (2.0 * uniform(rng) - 1.0) * r);
        if q.dist(p) < r && region.contains(q) {
            hits += 1;
        }
    }
    4.0 * r * r * hits as f64 / n as f64
}

#[test]
fn circle_chord_arc_matches_oracle() {
    // oracle: the ratio θ / (2 sin(θ/2)) is maximised over (0, π] at θ = π
    let oracle = (1..=100_000)
        .map(|i| {
            let th = PI * i as f64 / 100_000.0;
            th / (2.0 * (th / 2.0).sin())
        })
        .fold(0.0, f64::max);
    assert!((oracle - PI / 2.0).abs() < 1e-12);
    let s = sample_curve(&CurveDescriptor::circle(0.0, 0.0, 1.0), 2048).unwrap();
    let r = chord_arc_ratio(&s, 10_000_000).unwrap();
    assert!(r.has_flag("exhaustive"));
    let l = r.get("L_emp");
    assert!((l - oracle).abs() / oracle < 0.005, "{l}");
    assert!(l >= 1.0);
    assert!(r.pass);
}

#[test]
fn stratified_search_agrees_with_exhaustive() {
    let d = CurveDescriptor::ellipse(0.0, 0.0, 3.0, 1.0, 0.4);
    let s = sample_curve(&d, 1024).unwrap();
    let full = chord_arc_ratio(&s, 10_000_000).unwrap().get("L_emp");
    let strat = chord_arc_ratio(&s, 10_000).unwrap();
    assert!(strat.has_flag("stratified"));
    assert!((strat.get("L_emp") - full).abs() / full < 1e-3);
}

#[test]
fn witnesses_reproduce_extreme() {
    let s = sample_curve(&CurveDescriptor::lune(1.0), 512).unwrap();
    let r = chord_arc_ratio(&s, 1_000_000).unwrap();
    let w = &r.witnesses[0];
    let (i, j) = (w.params[0] as usize, w.params[1] as usize);
    let arc = packlab_core::geometry::arc_length(&s, i, j).unwrap();
    assert_eq!(arc / s.points[i].dist(s.points[j]), r.get("L_emp"));
}

#[test]
fn lune_family_matches_closed_form() {
    let grid = [0.0, 0.5, 1.0, 1.5, 1.9];
    let mut prev = 0.0;
    for c in grid {
        let r = chord_arc_audit(&CurveDescriptor::lune(c), 2048, 1_000_000).unwrap();
        let l = r.get("L_emp");
        // oracle: shorter arc between the arc midpoints, computed from the two circular arcs
        let half_angle = (c / 2.0).acos();
        let oracle = 2.0 * half_angle / (2.0 - c);
        assert!((l - oracle).abs() / oracle < 0.01, "c = {c}: {l} vs {oracle}");
        assert!((lune_ratio(c).unwrap() - oracle).abs() < 1e-12);
        assert!(l > prev);
        prev = l;
    }
    assert!((lune_ratio(1.9).unwrap() - 6.3512).abs() < 1e-4);
}

#[test]
fn lune_ratio_domain_and_growth() {
    assert!(matches!(lune_ratio(2.0), Err(Error::OutOfRange { .. })));
    assert!(lune_ratio(-0.1).is_err());
    let mut prev = 0.0;
    for i in 0..200 {
        let v = lune_ratio(i as f64 * 0.00995).unwrap();
        assert!(v > prev);
        prev = v;
    }
    assert!(lune_ratio(2.0 - 1e-9).unwrap() > 6e4);
}

#[test]
fn theoretical_constant_examples() {
    let c = theoretical_chord_arc(0.1).unwrap();
    let delta = 0.01 / (32.0 * PI);
    assert!((c.delta - delta).abs() < 1e-18);
    assert!((c.delta - 9.947e-5).abs() < 1e-8);
    let raw = delta.sin().min(0.1 / (16.0 * PI));
    // cos(π/2 − δ) loses ~1e-16 absolute to the rounding of π/2 − δ
    assert!((c.raw_constant - raw).abs() < 1e-11 * raw);
    assert!((c.l - 10053.0).abs() < 1.0, "{}", c.l);
    let mut prev = f64::INFINITY;
    for i in 1..=1000 {
        let k = 2.0 * PI * i as f64 / 1000.0;
        let c = theoretical_chord_arc(k).unwrap();
        assert!(c.l <= prev && c.l >= 1.0);
        prev = c.l;
    }
    assert!(theoretical_chord_arc(-1.0).is_err());
    assert!(theoretical_chord_arc(2.0 * PI + 1e-9).is_err());
}

#[test]
fn empirical_never_exceeds_proof_constant() {
    let descs = [
        CurveDescriptor::circle(0.0, 0.0, 1.0),
        CurveDescriptor::ellipse(0.0, 0.0, 1.5, 1.0, 0.0),
        CurveDescriptor::ellipse(0.0, 0.0, 3.0, 1.0, 0.3),
        CurveDescriptor::lune(0.5),
        CurveDescriptor::lune(1.5),
    ];
    for d in descs {
        let p = packlab_core::geometry::curvature_profile(&d, 1024).unwrap();
        let bound = theoretical_chord_arc(p.k).unwrap().l;
        let l = chord_arc_audit(&d, 1024, 1_000_000).unwrap().get("L_emp");
        assert!(l <= bound * 1.01, "{d:?}: {l} > {bound}");
    }
}

#[test]
fn chord_arc_scale_invariant() {
    let d = CurveDescriptor::ellipse(0.3, -0.2, 2.0, 1.0, 0.7);
    let a = chord_arc_ratio(&sample_curve(&d, 512).unwrap(), 1_000_000).unwrap().get("L_emp");
    let b = chord_arc_ratio(&sample_curve(&d.scaled(7.3), 512).unwrap(), 1_000_000).unwrap().get("L_emp");
    assert!((a - b).abs() / a < 1e-9);
}

#[test]
fn non_convex_rejected() {
    let pts: Vec<Point> = (0..64)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 64.0;
            let r = 1.0 + 0.3 * (3.0 * t).cos();
            Point::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let s = CurveSamples::from_points(pts).unwrap();
    assert!(matches!(chord_arc_ratio(&s, 100_000), Err(Error::NotConvex)));
}

#[test]
fn lemma22_circle() {
    let r = lemma22_audit(&CurveDescriptor::circle(0.0, 0.0, 1.0), 512, 180).unwrap();
    assert!(r.pass);
    assert!((r.bound["k"] - 2.0 * PI).abs() < 1e-9);
    // oracle: 1 − cos θ ≥ θ²/(2π) on (0, π], ratio minimised at θ = π
    let oracle = (1..=256).map(|i| PI * i as f64 / 256.0).map(|t| 2.0 * PI * (1.0 - t.cos()) / (t * t)).fold(f64::INFINITY, f64::min);
    assert!((oracle - 4.0 / PI).abs() < 1e-12);
    assert!((r.get("ratio_i") - oracle).abs() < 1e-4, "{}", r.get("ratio_i"));
    assert!((r.get("ratio_ii") - 4.0 / PI).abs() < 1e-9);
}

#[test]
fn lemma22_ellipses_and_superellipses() {
    for aspect in [1.5, 2.0, 3.0] {
        let r = lemma22_audit(&CurveDescriptor::ellipse(1.0, 2.0, aspect, 1.0, 0.2), 512, 180).unwrap();
        assert!(r.pass, "aspect {aspect}: {:?}", r.measured);
        assert!(r.get("ratio_i") >= 1.0 && r.get("ratio_ii") >= 1.0);
    }
    for p in [2.0, 3.0, 4.0] {
        let d = CurveDescriptor::Superellipse { cx: 0.0, cy: 0.0, a: 1.0, b: 1.0, p };
        let r = lemma22_audit(&d, 512, 180).unwrap();
        assert!(r.pass);
        assert_eq!(r.has_flag("hypothesis-violated"), p != 2.0);
    }
}

#[test]
fn lemma22_flat_sides_flagged() {
    let d = CurveDescriptor::SmoothenedSquare { cx: 0.0, cy: 0.0, side: 1.0, alpha: 0.2, bulge: None };
    let r = lemma22_audit(&d, 256, 90).unwrap();
    assert!(r.has_flag("hypothesis-violated"));
    assert!(r.pass);
    assert!(r.get("tangent_raw_min") >= 0.0);
    assert!(matches!(lemma22_audit(&CurveDescriptor::polygon(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]), 64, 8), Err(Error::UnsupportedKind(_))));
}

#[test]
fn disk_area_matches_lens_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let disk = Region::circle(0.0, 0.0, 1.0).unwrap();
    for _ in 0..200 {
        let p = Point::new(4.0 * uniform(&mut rng) - 2.0, 4.0 * uniform(&mut rng) - 2.0);
        let r = 0.05 + 2.0 * uniform(&mut rng);
        let got = disk_region_area(&disk, p, r, 2000);
        let want = lens_area(1.0, r, p.norm());
        assert!((got - want).abs() < 1e-3 * r * r, "{p:?} {r}: {got} vs {want}");
    }
}

#[test]
fn ahlfors_unit_disk() {
    let disk = Region::circle(0.0, 0.0, 1.0).unwrap();
    let r = ahlfors_constant(&disk, 64, 16, 100_000).unwrap();
    let m = r.get("M_emp");
    // oracle: same boundary points and radii, analytic lens areas
    let oracle = (1..=16)
        .map(|j| 2.0 * (j as f64 / 16.0).powi(2))
        .map(|rad| lens_area(1.0, rad, 1.0) / (rad * rad))
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - PI / 4.0).abs() < 1e-12);
    assert!((m - oracle).abs() < 0.01, "{m}");
    assert!((m - PI / 4.0).abs() < 0.02);
    assert!((r.get("r_at_min") - 2.0).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn ahlfors_unit_square_matches_monte_carlo() {
    let sq = Region::new(CurveDescriptor::polygon(vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ]))
    .unwrap();
    let r = ahlfors_constant(&sq, 64, 16, 100_000).unwrap();
    let m = r.get("M_emp");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let diam = 2f64.sqrt();
    let mut oracle = f64::INFINITY;
    for i in 0..32 {
        let p = sq.point_at(i as f64 / 32.0);
        for j in 1..=12 {
            let rad = diam * j as f64 / 12.0;
            oracle = oracle.min(mc_area(&sq, p, rad, 40_000, &mut rng) / (rad * rad));
        }
    }
    assert!((m - oracle).abs() < 0.02, "{m} vs {oracle}");
    assert!((m - 0.5).abs() < 0.01, "{m}");
    assert!(r.pass);
}

#[test]
fn ahlfors_scale_invariant_and_degenerate() {
    let e = Region::new(CurveDescriptor::ellipse(0.0, 0.0, 2.0, 1.0, 0.3)).unwrap();
    let a = ahlfors_constant(&e, 16, 8, 10_000).unwrap().get("M_emp");
    let b = ahlfors_constant(&e.scaled(7.3).unwrap(), 16, 8, 10_000).unwrap().get("M_emp");
    assert!((a - b).abs() / a < 1e-9);
    let tiny = Region::circle(0.0, 0.0, 1e-11).unwrap();
    assert!(matches!(ahlfors_constant(&tiny, 16, 8, 10_000), Err(Error::Degenerate(_))));
}

#[test]
fn ahlfors_lunes_degrade() {
    let mut prev = f64::INFINITY;
    for c in [0.0, 0.5, 1.0, 1.5, 1.9] {
        let r = Region::new(CurveDescriptor::lune(c)).unwrap();
        let m = ahlfors_constant(&r, 64, 16, 100_000).unwrap().get("M_emp");
        assert!(m < prev, "c = {c}: {m}");
        prev = m;
    }
}

#[test]
fn tangent_disks_meet_once() {
    let a = Region::circle(0.0, 0.0, 1.0).unwrap();
    let b = Region::circle(2.0, 0.0, 1.0).unwrap();
    let pts = boundary_intersections(&a, &b, 1e-9).unwrap();
    assert_eq!(pts.len(), 1);
    assert!(pts[0].dist(Point::new(1.0, 0.0)) < 1e-12);
    let c = Region::circle(3.0, 0.0, 0.5).unwrap();
    assert!(boundary_intersections(&a, &c, 1e-9).unwrap().is_empty());
    let d = Region::circle(1.5, 0.0, 1.0).unwrap();
    assert!(matches!(boundary_intersections(&a, &d, 1e-9), Err(Error::NotAPacking(_))));
}

#[test]
fn tangent_ellipses_meet_once() {
    let a = Region::new(CurveDescriptor::ellipse(0.0, 0.0, 2.0, 1.0, 0.0)).unwrap();
    let b = Region::new(CurveDescriptor::ellipse(0.0, 2.5, 1.0, 1.5, 0.0)).unwrap();
    let pts = boundary_intersections(&a, &b, 1e-9).unwrap();
    assert_eq!(pts.len(), 1);
    assert!(pts[0].dist(Point::new(0.0, 1.0)) < 1e-4, "{pts:?}");
}

#[test]
fn squares_sharing_a_side_meet_along_it() {
    let sq = |cx| CurveDescriptor::SmoothenedSquare { cx, cy: 0.0, side: 1.0, alpha: 0.1, bulge: None };
    let a = Region::new(sq(0.0)).unwrap();
    let b = Region::new(sq(1.0)).unwrap();
    let pts = boundary_intersections(&a, &b, 1e-9).unwrap();
    assert!(pts.len() > 1);
    for p in &pts {
        assert!((p.x - 0.5).abs() < 1e-9 && p.y.abs() <= 0.4 + 1e-3);
    }
    assert!(!strictly_convex(&a));
}

fn disk_row(n: usize) -> Packing {
    // disks of radius 2^-k tangent to the x-axis from above, laid side by side per scale
    let mut regions = Vec::new();
    let mut k = 0;
    while regions.len() < n {
        k += 1;
        let r = 0.5f64.powi(k);
        let count = 1usize << (k - 1);
        for j in 0..count {
            regions.push(Region::circle((2 * j + 1) as f64 * r, r, r).unwrap());
        }
    }
    regions.truncate(n);
    Packing::new(Rect::new(0.0, 0.0, 1.0, 1.0), regions, PackingMeta::new("test"))
}

#[test]
fn counting_matches_brute_force() {
    let packing = disk_row(63);
    let (a, b) = (Point::new(0.0, 0.01), Point::new(1.0, 0.01));
    let probe = Probe::Segment(a, b);
    let mut prev = usize::MAX;
    for c in [0.01, 0.05, 0.1, 0.5, 1.0] {
        let r = counting_audit(&packing, &probe, c, Some(PI / 4.0)).unwrap();
        let oracle = packing
            .regions
            .iter()
            .filter(|d| {
                let (ctr, rad) = d.as_circle().unwrap();
                let t = (ctr.x - a.x).clamp(0.0, 1.0);
                Point::new(t, a.y).dist(ctr) < rad && 2.0 * rad >= c
            })
            .count();
        assert_eq!(r.get("count") as usize, oracle, "c = {c}");
        assert!(r.pass);
        assert!(r.get("count") <= r.bound["count_bound"]);
        assert!(oracle <= prev);
        prev = oracle;
    }
    let r = counting_audit(&packing, &probe, 10.0, Some(PI / 4.0)).unwrap();
    assert_eq!(r.get("count"), 0.0);
}

#[test]
fn counting_measures_ahlfors_when_absent() {
    let packing = disk_row(7);
    let probe = Probe::Region(Region::circle(0.5, -0.1, 0.2).unwrap());
    let r = counting_audit(&packing, &probe, 0.1, None).unwrap();
    assert_eq!(r.get("shape_classes"), 1.0);
    assert!((r.bound["M"] - PI / 4.0).abs() < 0.02);
    assert!(r.pass);
}

#[test]
fn segment_sum_geometric_family() {
    let scales = 10;
    let packing = disk_row((1 << scales) - 1);
    let seg = (Point::new(0.0, 0.0), Point::new(1.0, 0.0));
    let s_values = [1.1, 1.25, 1.5, 1.75, 2.0];
    let r = segment_sum_audit(&packing, seg, 1.0, &s_values).unwrap();
    assert_eq!(r.get("family_size"), ((1 << scales) - 1) as f64);
    let table = r.table.as_ref().unwrap();
    for (row, &s) in table.rows.iter().zip(&s_values) {
        // oracle: 2^{s-1} Σ_{k=1..K} q^k with q = 2^{1-s}
        let q = 2f64.powf(1.0 - s);
        let oracle = 2f64.powf(s - 1.0) * q * (1.0 - q.powi(scales)) / (1.0 - q);
        assert!((row[1] - oracle).abs() / oracle < 1e-12, "s = {s}: {} vs {oracle}", row[1]);
    }
    assert!(r.pass, "{:?}", r.measured);

    let scaled = Packing::new(
        Rect::new(0.0, 0.0, 7.3, 7.3),
        packing.regions.iter().map(|d| d.scaled(7.3).unwrap()).collect(),
        PackingMeta::new("test"),
    );
    let seg2 = (Point::new(0.0, 0.0), Point::new(7.3, 0.0));
    let r2 = segment_sum_audit(&scaled, seg2, 1.0, &s_values).unwrap();
    for (a, b) in table.rows.iter().zip(&r2.table.as_ref().unwrap().rows) {
        assert!((a[2] - b[2]).abs() / a[2] < 1e-9);
    }
}

#[test]
fn segment_sum_single_disk_and_empty() {
    let p = disk_row(1);
    let r = segment_sum_audit(&p, (Point::new(0.0, 0.0), Point::new(1.0, 0.0)), 1.0, &[1.5, 1.75, 2.0]).unwrap();
    assert!((r.get("K_emp_max") - 1.0).abs() < 1e-15);
    assert!(r.pass);
    let far = segment_sum_audit(&p, (Point::new(0.0, 5.0), Point::new(1.0, 5.0)), 1.0, &[1.5]).unwrap();
    assert!(far.pass && far.has_flag("vacuous: no region satisfies the hypotheses"));
    assert!(segment_sum_audit(&p, (Point::new(0.0, 0.0), Point::new(1.0, 0.0)), 1.0, &[1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chord_arc_at_least_one(a in 1.0f64..4.0, b in 0.3f64..1.0, angle in 0.0f64..3.0) {
        let s = sample_curve(&CurveDescriptor::ellipse(0.0, 0.0, a, b, angle), 128).unwrap();
        let r = chord_arc_ratio(&s, 100_000).unwrap();
        prop_assert!(r.get("L_emp") >= 1.0);
    }

    #[test]
    fn ellipse_area_sweep_matches_exact(a in 0.5f64..3.0, b in 0.5f64..3.0, angle in 0.0f64..3.0) {
        let e = Region::new(CurveDescriptor::ellipse(0.0, 0.0, a, b, angle)).unwrap();
        let big = 10.0 * a.max(b);
        let got = disk_region_area(&e, Point::new(0.0, 0.0), big, 4000);
        prop_assert!((got - PI * a * b).abs() < 1e-4 * PI * a * b);
    }
}
