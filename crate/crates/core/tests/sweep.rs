use packlab_core::generate::{gen_apollonian, gen_bounded_curvature_packing};
use packlab_core::geometry::{Packing, PackingMeta, Point, Rect, Region};
use packlab_core::sweep::*;
use packlab_core::Error;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::f64::consts::{PI, TAU};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn disks(list: &[(f64, f64, f64)]) -> Packing {
    let regions = list.iter().map(|&(x, y, r)| Region::circle(x, y, r).unwrap()).collect();
    Packing::new(Rect::unit(), regions, PackingMeta::new("test"))
}

fn random_cover(rng: &mut ChaCha8Rng, count: usize) -> SquareCover {
    let squares = (0..count)
        .map(|_| {
            let side = 0.02 + 0.2 * uniform(rng);
            Square::new(uniform(rng) * (1.0 - side), uniform(rng) * (1.0 - side), side)
        })
        .collect();
    SquareCover::new(squares).unwrap()
}

/// Sum of `len^e` over the union of open intervals, by an endpoint sweep with a depth counter.
fn union_power_sum(iv: &[(f64, f64)], e: f64) -> f64 {
    let mut ev: Vec<(f64, i32)> = Vec::new();
    for &(a, b) in iv {
        ev.push((a, 1));
        ev.push((b, -1));
    }
    // At equal coordinates close before opening, so touching intervals stay apart.
    ev.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
    let (mut depth, mut start, mut total) = (0, 0.0, 0.0);
    for (y, d) in ev {
        if depth == 0 && d == 1 {
            start = y;
        }
        depth += d;
        if depth == 0 && d == -1 {
            total += (y - start).powf(e);
        }
    }
    total
}

#[test]
fn line_components_examples() {
    let empty = SquareCover::default();
    assert!(line_components(0.5, &empty, &[]).is_empty());

    let two = SquareCover::new(vec![Square::new(0.0, 0.0, 0.5), Square::new(0.2, 0.3, 0.5)]).unwrap();
    assert_eq!(line_components(0.3, &two, &[]), vec![(0.0, 0.8)]);
    // Only the first square reaches x = 0.1.
    assert_eq!(line_components(0.1, &two, &[]), vec![(0.0, 0.5)]);

    let touching = SquareCover::new(vec![Square::new(0.0, 0.0, 0.5), Square::new(0.0, 0.5, 0.5)]).unwrap();
    assert_eq!(line_components(0.25, &touching, &[]), vec![(0.0, 0.5), (0.5, 1.0)]);

    let disk = Region::circle(0.5, 0.5, 0.25).unwrap();
    let c = line_components(0.5, &empty, &[disk]);
    assert_eq!(c.len(), 1);
    assert!((c[0].0 - 0.25).abs() < 1e-12 && (c[0].1 - 0.75).abs() < 1e-12);
}

#[test]
fn single_disk_integral_is_area_at_s_two() {
    let p = disks(&[(0.5, 0.5, 0.5)]);
    let g = compute_gm(&p, &SquareCover::default(), 0, 2.0, 1024).unwrap();
    assert!((g.integral - PI / 4.0).abs() < 1e-3, "{}", g.integral);
    let gn = compute_gm(&p, &SquareCover::default(), 1, 2.0, 1024).unwrap();
    assert_eq!(gn.integral, 0.0);
}

#[test]
fn gm_rejects_bad_input() {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let c = SquareCover::default();
    assert!(matches!(compute_gm(&p, &c, 0, 1.0, 1024), Err(Error::OutOfRange { .. })));
    assert!(matches!(compute_gm(&p, &c, 0, 1.5, 16), Err(Error::OutOfRange { .. })));
    assert!(matches!(compute_gm(&p, &c, 2, 1.5, 1024), Err(Error::IndexOutOfRange { .. })));
    let unsorted = disks(&[(0.2, 0.2, 0.1), (0.7, 0.7, 0.2)]);
    assert!(matches!(compute_gm(&unsorted, &c, 0, 1.5, 1024), Err(Error::Unsorted(_))));
}

#[test]
fn gm_dominates_next_region_area() {
    for seed in 0..50 {
        let p = gen_bounded_curvature_packing(Rect::unit(), 6.0, 6, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cover = random_cover(&mut rng, 10);
        let all = compute_gm_all(&p, &cover, 1.5, 512).unwrap();
        for (m, (g, r)) in all.iter().zip(&p.regions).enumerate() {
            let area = r.area();
            assert!(g.integral >= area * (1.0 - 1e-3), "seed {seed} m {m}: {} < {area}", g.integral);
        }
    }
}

#[test]
fn cover_bound_on_unit_square_is_tight() {
    let p = disks(&[]);
    let cover = SquareCover::new(vec![Square::new(0.0, 0.0, 1.0)]).unwrap();
    let g = compute_gm(&p, &cover, 0, 1.5, 512).unwrap();
    assert!((g.integral - 1.0).abs() < 1e-12);
    let rep = cover_bound_audit(&g, &cover).unwrap();
    assert!(rep.pass);
    assert!((rep.get("integral") - rep.get("side_sum")).abs() < 1e-12);
}

#[test]
fn cover_bound_on_random_covers_matches_oracle() {
    let p = disks(&[]);
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let cover = random_cover(&mut rng, 100);
        for s in [1.1, 1.5] {
            let g = compute_gm(&p, &cover, 0, s, 256).unwrap();
            for (x, v) in g.xs.iter().zip(&g.values) {
                let iv: Vec<(f64, f64)> = cover
                    .squares
                    .iter()
                    .filter(|q| q.x < *x && *x < q.x + q.side)
                    .map(|q| (q.y, q.y + q.side))
                    .collect();
                let want = union_power_sum(&iv, s - 1.0);
                assert!((v - want).abs() <= 1e-12 * (1.0 + want), "x {x}: {v} vs {want}");
            }
            assert!(cover_bound_audit(&g, &cover).unwrap().pass, "seed {seed} s {s}");
        }
    }
}

#[test]
fn cover_bound_rejects_wrong_profile() {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let cover = SquareCover::new(vec![Square::new(0.0, 0.0, 1.0)]).unwrap();
    let g0 = compute_gm(&p, &cover, 0, 1.5, 512).unwrap();
    assert!(matches!(cover_bound_audit(&g0, &cover), Err(Error::Mismatch(_))));
    let g1 = compute_gm(&p, &cover, 1, 1.5, 512).unwrap();
    let other = SquareCover::new(vec![Square::new(0.0, 0.0, 0.9)]).unwrap();
    assert!(matches!(cover_bound_audit(&g1, &other), Err(Error::Mismatch(_))));
}

#[test]
fn differences_telescope() {
    let p = gen_apollonian(60.0, 0.5).unwrap().prefix(12);
    let cover = dyadic_cover(&p, 5, 0.1).unwrap();
    let rep = main_estimate_audit(&p, &cover, 1.05, 512).unwrap();
    assert!(rep.get("telescoping_error") < 1e-9);
    let rows = &rep.table.as_ref().unwrap().rows;
    assert_eq!(rows.len(), p.len());
}

#[test]
fn basic_difference_lower_bound_on_random_instances() {
    for seed in 0..50 {
        let p = gen_bounded_curvature_packing(Rect::unit(), 6.0, 5, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let cover = random_cover(&mut rng, 15);
        for m in 1..=p.len() {
            let rep = basic_difference_audit(&p, &cover, m, 1.3, 256).unwrap();
            let tol = rep.bound["margin_tolerance"];
            assert!(rep.get("min_margin_ii") >= -tol, "seed {seed} m {m}: {}", rep.get("min_margin_ii"));
            assert!(rep.get("max_case_i_error") <= 1e-9);
            assert!(rep.pass, "seed {seed} m {m}");
        }
    }
}

#[test]
fn region_inside_one_square_is_case_one() {
    let p = disks(&[(0.5, 0.5, 0.1)]);
    let cover = SquareCover::new(vec![Square::new(0.3, 0.3, 0.4)]).unwrap();
    let rep = basic_difference_audit(&p, &cover, 1, 1.5, 512).unwrap();
    assert!(rep.get("lines_case_i") > 0.0);
    assert_eq!(rep.get("lines_case_iii"), 0.0);
    assert!(rep.get("max_case_i_error") <= 1e-12);
    assert!(rep.pass);
}

#[test]
fn disk_between_two_squares_splits_lines() {
    // Chord (0.3, 0.7) at x = 0.5; the squares hold the ends for |x - 0.5| < sqrt(0.03).
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let cover = SquareCover::new(vec![Square::new(0.3, 0.0, 0.4), Square::new(0.3, 0.6, 0.4)]).unwrap();
    let rep = basic_difference_audit(&p, &cover, 1, 1.5, 1024).unwrap();
    assert!(rep.get("lines_case_iii") > 0.0);
    assert!(rep.get("min_margin_iii") > 0.0);
    assert!(rep.pass);

    let g0 = compute_gm(&p, &cover, 0, 1.5, 1024).unwrap();
    let g1 = compute_gm(&p, &cover, 1, 1.5, 1024).unwrap();
    let want = 2.0 * 0.4f64.sqrt() - 1.0;
    let half = 0.03f64.sqrt();
    let mut seen = 0;
    for i in 0..g0.xs.len() {
        if (g0.xs[i] - 0.5).abs() < half - 1e-6 {
            assert!((g1.values[i] - g0.values[i] - want).abs() < 1e-12);
            seen += 1;
        }
    }
    assert!(seen > 100);
}

#[test]
fn dyadic_cover_covers_residual() {
    let p = gen_apollonian(40.0, 0.5).unwrap();
    let c = dyadic_cover(&p, 6, 0.1).unwrap();
    assert!(c.uncovered_point(&p, 256).is_none());
    let coarse = dyadic_cover(&p, 3, 0.1).unwrap();
    assert!(coarse.len() < c.len());
    assert!(dyadic_cover(&p, 13, 0.1).is_err());
    assert!(dyadic_cover(&p, 4, 0.0).is_err());
}

fn isolated() -> (Packing, Region) {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let b = p.regions[0].clone();
    (p, b)
}

fn diagonal_pair() -> Packing {
    let off = 0.4 / 2f64.sqrt();
    disks(&[(0.35, 0.35, 0.2), (0.35 + off, 0.35 + off, 0.2)])
}

#[test]
fn circumscribing_rect_touches_disk() {
    let (_, b) = isolated();
    let (r, z) = circumscribing_rect(&b);
    assert!((r.x0 - 0.3).abs() < 1e-12 && (r.y1 - 0.7).abs() < 1e-12);
    let want = [(0.5, 0.3), (0.7, 0.5), (0.5, 0.7), (0.3, 0.5)];
    for (p, w) in z.iter().zip(want) {
        assert!(p.dist(Point::new(w.0, w.1)) < 1e-9);
    }
}

#[test]
fn isolated_disk_keeps_rectangle() {
    let (p, b) = isolated();
    let (poly, refined) = circumscribe_and_refine(&b, &p, 0.02).unwrap();
    assert_eq!(poly.len(), 4);
    assert_eq!(poly.tangency_points().len(), 4);
    assert!(poly.provenance.iter().all(|e| matches!(e, EdgeSource::Rect(_))));
    assert!(poly.support_defect(&b) < 1e-9);
    assert!(poly.contains_polygon(&refined, 1e-12));
    // Frame pieces sit in the corners and cut them off.
    assert!(refined.len() > 4);
    assert!(refined.support_defect(&b) < 1e-9);
}

#[test]
fn tangent_neighbour_adds_an_edge() {
    let p = diagonal_pair();
    let b = p.regions[0].clone();
    let (poly, refined) = circumscribe_and_refine(&b, &p, 0.02).unwrap();
    assert_eq!(poly.len(), 5);
    assert!(poly.provenance.contains(&EdgeSource::Region(1)));
    let z = poly.tangency_points();
    assert_eq!(z.len(), 5);
    let contact = Point::new(0.35 + 0.2 / 2f64.sqrt(), 0.35 + 0.2 / 2f64.sqrt());
    assert!(z.iter().any(|q| q.dist(contact) < 1e-6));
    let (r, _) = circumscribing_rect(&b);
    let rect = disks(&[]);
    let (outer, _) = circumscribe_and_refine(&b, &rect, 0.02).unwrap();
    assert!((outer.vertices[0].x - r.x0).abs() < 1e-12);
    assert!(outer.contains_polygon(&poly, 1e-12));
    assert!(poly.contains_polygon(&refined, 1e-12));
    assert!(poly.support_defect(&b) < 1e-6);
}

#[test]
fn smaller_neighbours_do_not_cut() {
    let off = 0.3 / 2f64.sqrt();
    let p = disks(&[(0.4, 0.4, 0.2), (0.4 + off, 0.4 + off, 0.1)]);
    let (poly, _) = circumscribe_and_refine(&p.regions[0], &p, 0.02).unwrap();
    assert_eq!(poly.len(), 4);
}

#[test]
fn infeasible_lambda_is_rejected() {
    let (p, b) = isolated();
    let t = lambda_threshold(&b);
    assert!(matches!(circumscribe_and_refine(&b, &p, t), Err(Error::InfeasibleLambda { .. })));
    assert!(matches!(circumscribe_and_refine(&b, &p, 0.0), Err(Error::InfeasibleLambda { .. })));
    assert!(circumscribe_and_refine(&b, &p, 0.5 * t).is_ok());
}

#[test]
fn good_estimate_on_disk_in_square_matches_oracle() {
    let (p, b) = isolated();
    let (poly, _) = circumscribe_and_refine(&b, &p, 0.05).unwrap();
    let (lambda, grid) = (0.05, 2048);
    let len = TAU * 0.2;
    let rep = good_estimate_audit(&poly, &b, 5.0, lambda, 1.5, grid).unwrap();
    let mut want = f64::INFINITY;
    for i in 0..grid {
        let x = 0.3 + (i as f64 + 0.5) / grid as f64 * 0.4;
        if [0.3, 0.5, 0.7].iter().any(|z: &f64| (x - z).abs() < lambda * len + 1e-9 * len) {
            continue;
        }
        let t = x - 0.5;
        want = want.min((0.2 - (0.04 - t * t).sqrt()) / len);
    }
    assert!((rep.get("min_gap_ratio") - want).abs() < 1e-9, "{} vs {want}", rep.get("min_gap_ratio"));
    assert!(rep.get("min_gap_ratio") >= rep.bound["ratio_bound"]);
    // At s = 1.5 the second estimate fails on this disk; it holds once s is close to 1.
    assert!(!rep.pass && rep.get("min_margin_ii") < 0.0);
    let s0 = rep.get("empirical_s0");
    assert!(s0 > 1.05 && s0 < 1.5);
    assert!(good_estimate_audit(&poly, &b, 5.0, lambda, 1.05, grid).unwrap().pass);

    let loose = good_estimate_audit_with(&poly, &b, 5.0, lambda, 1.5, grid, false).unwrap();
    assert!(loose.get("min_gap_ratio") < 1e-12);
    assert!(!loose.pass);
}

#[test]
fn good_estimate_near_s_one() {
    let r = 1.0 / TAU;
    let p = disks(&[(0.5, 0.5, r)]);
    let b = p.regions[0].clone();
    let (poly, _) = circumscribe_and_refine(&b, &p, 0.01).unwrap();
    let rep = good_estimate_audit(&poly, &b, TAU, 0.01, 1.01, 1024).unwrap();
    assert!(rep.pass);
    assert!(rep.get("min_margin_ii") >= 0.0);
    assert!(rep.get("empirical_s0") >= 1.01);
}

#[test]
fn good_estimate_vacuous_when_strips_cover_everything() {
    let (p, b) = isolated();
    let (poly, _) = circumscribe_and_refine(&b, &p, 0.05).unwrap();
    let rep = good_estimate_audit(&poly, &b, 5.0, 0.9, 1.5, 256).unwrap();
    assert!(rep.pass && rep.flags.iter().any(|f| f.starts_with("vacuous")));
}

#[test]
fn midpoint_constant_for_disk() {
    let b = Region::circle(0.5, 0.5, 0.2).unwrap();
    let len = TAU * 0.2;
    let grid = 1024;
    for lambda in [0.01, 0.02, 0.05] {
        let (c, z1) = midpoint_constant(&b, lambda, grid).unwrap().unwrap();
        assert!(b.contains(z1));
        assert!((z1.y - 0.5).abs() < 1e-12);
        let mut want = f64::INFINITY;
        for i in 0..grid {
            let x = 0.3 + (i as f64 + 0.5) / grid as f64 * 0.4;
            if [0.3, 0.5, 0.7].iter().any(|z: &f64| (x - z).abs() < lambda * len + 1e-9 * len) {
                continue;
            }
            want = want.min((0.2 - (x - 0.5f64).abs()) / (lambda * lambda * len));
        }
        assert!((c - want).abs() < 1e-6 * want, "{c} vs {want}");
        assert!((c * lambda - 1.0).abs() < 0.05, "c1 {c} at {lambda}");
    }
}

#[test]
fn midpoint_constant_is_scale_invariant() {
    let b = Region::circle(0.5, 0.5, 0.2).unwrap();
    let big = b.scaled(3.0).unwrap();
    let (c, _) = midpoint_constant(&b, 0.03, 512).unwrap().unwrap();
    let (c3, _) = midpoint_constant(&big, 0.03, 512).unwrap().unwrap();
    assert!((c - c3).abs() < 1e-9 * c);
}

#[test]
fn midpoint_audit_examples() {
    let b = Region::circle(0.0, 0.0, 1.0).unwrap();
    let rep = midpoint_audit(&b, &[0.01, 0.02, 0.05, 0.1], 512).unwrap();
    assert!(rep.pass);
    assert!(rep.get("c1_min") > 0.0);
    assert!(midpoint_constant(&b, 1.5, 64).is_err());
}

#[test]
fn contained_stage_has_zero_difference() {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let cover = SquareCover::new(vec![Square::new(-0.1, -0.1, 1.2)]).unwrap();
    let rep = main_estimate_audit(&p, &cover, 1.05, 512).unwrap();
    let row = &rep.table.as_ref().unwrap().rows[0];
    assert_eq!(row[3], 0.0);
    assert_eq!(row[6], 1.0);
    assert_eq!(row[2], 0.0);
    assert!(rep.pass);
}

#[test]
fn small_squares_give_first_case_with_growth() {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let cover = dyadic_cover(&p, 6, 0.1).unwrap();
    let rep = main_estimate_audit(&p, &cover, 1.05, 512).unwrap();
    let row = &rep.table.as_ref().unwrap().rows[0];
    assert_eq!(row[4], 1.0);
    assert!(row[3] > 0.0);
    assert_eq!(rep.get("c0_emp"), 0.0);
    assert!(rep.pass);
}

#[test]
fn main_estimate_needs_a_real_cover() {
    let p = disks(&[(0.5, 0.5, 0.2)]);
    let cover = SquareCover::new(vec![Square::new(0.0, 0.0, 0.5)]).unwrap();
    assert!(matches!(main_estimate_audit(&p, &cover, 1.05, 512), Err(Error::CoverMissesResidual(_))));
    let full = SquareCover::new(vec![Square::new(0.0, 0.0, 1.0)]).unwrap();
    assert!(matches!(main_estimate_audit(&p, &full, 1.5, 512), Err(Error::OutOfRange { .. })));
}

#[test]
fn main_estimate_stable_across_dyadic_covers() {
    let p = gen_apollonian(200.0, 0.5).unwrap().prefix(30);
    let covers: Vec<SquareCover> = [5, 6, 7].iter().map(|&l| dyadic_cover(&p, l, 0.1).unwrap()).collect();
    let rep = main_estimate_stability(&p, &covers, 1.05, 512).unwrap();
    assert!(rep.pass, "spread {} ratio {}", rep.get("c0_spread"), rep.get("side_sum_min_ratio"));
}

#[test]
fn main_estimate_chain_near_s_one() {
    let p = gen_apollonian(100.0, 0.5).unwrap().prefix(15);
    let cover = dyadic_cover(&p, 6, 0.1).unwrap();
    let rep = main_estimate_audit(&p, &cover, 1.01, 512).unwrap();
    assert!(rep.pass);
    assert!(rep.get("c0_emp").is_finite());
    assert!(rep.get("integral_gn") <= rep.get("side_sum") * (1.0 + 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cover_only_profile_is_bounded_by_side_sum(seed in 0u64..10_000, s in 1.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cover = random_cover(&mut rng, 30);
        let g = compute_gm(&disks(&[]), &cover, 0, s, 256).unwrap();
        prop_assert!(cover_bound_audit(&g, &cover).unwrap().pass);
    }

    #[test]
    fn components_are_disjoint_and_sorted(seed in 0u64..10_000, x in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cover = random_cover(&mut rng, 40);
        let c = line_components(x, &cover, &[]);
        for w in c.windows(2) {
            prop_assert!(w[0].1 <= w[1].0);
        }
        for (a, b) in c {
            prop_assert!(b > a);
        }
    }
}
