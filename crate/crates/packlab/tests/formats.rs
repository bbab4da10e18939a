use std::path::Path;

use packlab::json::{load_packing, packing_to_bytes, parse_packing, save_packing, FormatError, LoadOptions};
use packlab::svg::{export_svg, SvgOptions};
use packlab_core::generate::{gen_apollonian, gen_bounded_curvature_packing, gen_lune_curve, gen_sierpinski};
use packlab_core::geometry::{Packing, PackingMeta, Rect, Region};

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Curvature of the fourth circle tangent to three, from the Descartes relation.
fn fourth_curvatures(k1: f64, k2: f64, k3: f64) -> (f64, f64) {
    let root = 2.0 * (k1 * k2 + k2 * k3 + k3 * k1).sqrt();
    (k1 + k2 + k3 + root, k1 + k2 + k3 - root)
}

#[test]
fn round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let mut lune = Packing::new(
        Rect::new(-1.0, -1.0, 2.0, 1.0),
        vec![Region::new(gen_lune_curve(0.7).unwrap()).unwrap()],
        PackingMeta::new("lune"),
    );
    lune.meta.seed = Some(9);
    let cases = [
        gen_apollonian(200.0, 0.5).unwrap(),
        gen_sierpinski(4).unwrap(),
        gen_bounded_curvature_packing(Rect::unit(), 5.0, 40, 11).unwrap(),
        lune,
    ];
    for (i, p) in cases.iter().enumerate() {
        let path = dir.path().join(format!("p{i}.json"));
        let d1 = save_packing(p, &path).unwrap();
        let back = load_packing(&path, LoadOptions::default()).unwrap();
        assert!(back.warnings.is_empty(), "{:?}", back.warnings);
        assert_eq!(&back.packing, p);
        let d2 = save_packing(&back.packing, &dir.path().join("again.json")).unwrap();
        assert_eq!(d1, d2);
    }
}

#[test]
fn floats_survive_seventeen_digits() {
    let awkward = [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-9, 5e-324, 1.7976931348623157e308, -2.5e-7];
    for &r in &awkward[..3] {
        let p = Packing::new(Rect::new(0.0, 0.0, 1.0, 1.0), vec![Region::circle(0.5, 0.5, r).unwrap()], PackingMeta::new("t"));
        let bytes = packing_to_bytes(&p).unwrap();
        let back = parse_packing(std::str::from_utf8(&bytes).unwrap(), LoadOptions::default()).unwrap().packing;
        assert_eq!(back.regions[0].as_circle().unwrap().1.to_bits(), r.to_bits());
    }
    for v in awkward {
        let text = packlab::json::to_json_bytes(&v).unwrap();
        let back: f64 = serde_json::from_slice(&text).unwrap();
        assert_eq!(back.to_bits(), v.to_bits());
    }
}

const GOOD: &str = r#"{
  "version": 1,
  "domain": {"x0": 0, "y0": 0, "x1": 1, "y1": 1},
  "regions": [
    {"kind": "circle", "cx": 0.5, "cy": 0.5, "r": 0.25}
  ],
  "meta": {"generator": "hand"}
}"#;

#[test]
fn nan_radius_names_the_field() {
    let text = GOOD.replace("\"r\": 0.25", "\"r\": NaN");
    match parse_packing(&text, LoadOptions::default()).unwrap_err() {
        FormatError::NonFinite { field, line, .. } => {
            assert_eq!(field, "r");
            assert_eq!(line, 5);
        }
        e => panic!("unexpected {e:?}"),
    }
    let text = GOOD.replace("\"r\": 0.25", "\"r\": null");
    assert!(matches!(parse_packing(&text, LoadOptions::default()), Err(FormatError::NonFinite { .. })));
    let text = GOOD.replace("\"r\": 0.25", "\"r\": 1e400");
    assert!(matches!(parse_packing(&text, LoadOptions::default()), Err(FormatError::NonFinite { .. })));
}

#[test]
fn unknown_kind_is_rejected() {
    let text = GOOD.replace("\"circle\"", "\"blob\"");
    match parse_packing(&text, LoadOptions::default()).unwrap_err() {
        FormatError::UnknownKind { kind, line, .. } => {
            assert_eq!(kind, "blob");
            assert_eq!(line, 5);
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn version_mismatch_is_rejected() {
    let text = GOOD.replace("\"version\": 1", "\"version\": 2");
    match parse_packing(&text, LoadOptions::default()).unwrap_err() {
        FormatError::Version { found, line } => {
            assert_eq!(found, "2");
            assert_eq!(line, 2);
        }
        e => panic!("unexpected {e:?}"),
    }
    let text = GOOD.replace("\"version\": 1,", "");
    assert!(parse_packing(&text, LoadOptions::default()).is_err());
}

#[test]
fn unknown_keys_and_order_warn() {
    let text = GOOD.replace("\"meta\"", "\"colour\": \"red\",\n  \"meta\"");
    let loaded = parse_packing(&text, LoadOptions::default()).unwrap();
    assert_eq!(loaded.warnings.len(), 1);
    assert!(loaded.warnings[0].contains("colour"));

    let two = GOOD.replace(
        "\"r\": 0.25}",
        "\"r\": 0.1},\n    {\"kind\": \"circle\", \"cx\": 0.2, \"cy\": 0.2, \"r\": 0.15}",
    );
    let loaded = parse_packing(&two, LoadOptions::default()).unwrap();
    assert_eq!(loaded.warnings.len(), 1);
    assert_eq!(loaded.packing.regions[0].as_circle().unwrap().1, 0.1);
    let sorted = parse_packing(&two, LoadOptions { resort: true }).unwrap();
    assert!(sorted.warnings.is_empty());
    assert_eq!(sorted.packing.regions[0].as_circle().unwrap().1, 0.15);
}

#[test]
fn apollonian_seed_fixture() {
    let p = load_packing(&fixture("apollonian_seed.json"), LoadOptions::default()).unwrap().packing;
    let (oc, or) = p.outer.as_ref().unwrap().as_circle().unwrap();
    let mut circles = vec![(oc, -or)];
    circles.extend(p.regions.iter().map(|r| r.as_circle().unwrap()));
    let mut k: Vec<f64> = circles.iter().map(|c| 1.0 / c.1).collect();
    k.sort_by(f64::total_cmp);
    let want = [-1.0, 2.0, 2.0, 3.0];
    for (a, b) in k.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{k:?}");
    }
    let (plus, minus) = fourth_curvatures(-1.0, 2.0, 2.0);
    assert!((plus - 3.0).abs() < 1e-12 && (minus - 3.0).abs() < 1e-12);
    // pairwise tangency: centre distance equals |r_i ± r_j|
    for i in 0..4 {
        for j in i + 1..4 {
            let (ci, ri) = circles[i];
            let (cj, rj) = circles[j];
            let d = ci.dist(cj);
            let want = if ri < 0.0 || rj < 0.0 { (ri.abs() - rj.abs()).abs() } else { ri + rj };
            assert!((d - want).abs() < 1e-12, "{i} {j}");
        }
    }
    // the generator starts from the same configuration
    let g = gen_apollonian(3.0, 1.0).unwrap();
    let mut gk: Vec<f64> = g.regions.iter().take(3).map(|r| 1.0 / r.as_circle().unwrap().1).collect();
    gk.sort_by(f64::total_cmp);
    assert_eq!(gk.len(), 3);
    for (a, b) in gk.iter().zip(&want[1..]) {
        assert!((a - b).abs() < 1e-12, "{gk:?}");
    }
}

#[test]
fn svg_elements_and_determinism() {
    let s = gen_sierpinski(3).unwrap();
    let svg = export_svg(&s, &SvgOptions::default()).unwrap();
    assert_eq!(svg.matches("<path").count(), 13);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg, export_svg(&s, &SvgOptions::default()).unwrap());

    let a = gen_apollonian(100.0, 0.5).unwrap();
    let svg = export_svg(&a, &SvgOptions::default()).unwrap();
    assert_eq!(svg.matches("<path").count(), 0);
    // one circle per region plus the outer boundary
    assert_eq!(svg.matches("<circle").count(), a.len() + 1);

    let empty = Packing::new(Rect::unit(), vec![], PackingMeta::new("none"));
    assert!(export_svg(&empty, &SvgOptions::default()).is_err());
}
