//! SVG scenes of packings, covers and circumscribing polygons.

use std::fmt::Write;

use packlab_core::dimension::ResidualRaster;
use packlab_core::geometry::{CurveDescriptor, Packing, Point, Region};
use packlab_core::sweep::{Polygon, SquareCover};
use packlab_core::{Error, Result};

const RESIDUAL_FILL: &str = "#1f2933";
const REGION_FILL: &str = "#f5f7fa";
const OUTSIDE_FILL: &str = "#ffffff";
const CURVE_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgOptions<'a> {
    pub cover: Option<&'a SquareCover>,
    pub polygon: Option<&'a Polygon>,
    pub raster_overlay: Option<&'a ResidualRaster>,
}

fn path_data(points: &[Point]) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, p.x, p.y);
    }
    d.push_str(" Z");
    d
}

fn points_attr(points: &[Point]) -> String {
    points.iter().map(|p| format!("{},{}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn boundary_points(r: &Region) -> Vec<Point> {
    match r.boundary() {
        CurveDescriptor::Polyline { .. } => r.polygon_vertices().unwrap_or_default(),
        _ => r.samples(CURVE_SAMPLES).points,
    }
}

fn region_element(out: &mut String, r: &Region) {
    if let Some((c, rad)) = r.as_circle() {
        let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", c.x, c.y, rad);
    } else {
        let _ = writeln!(out, "<path d=\"{}\"/>", path_data(&boundary_points(r)));
    }
}

/// Regions are drawn light on a dark residual background; the view box is the domain
/// with the y axis pointing up. Element order follows region order, so equal inputs
/// give identical documents.
pub fn export_svg(packing: &Packing, opts: &SvgOptions) -> Result<String> {
    if packing.is_empty() {
        return Err(Error::InvalidArgument("cannot export an empty packing".into()));
    }
    let d = packing.domain;
    let (w, h) = (d.width(), d.height());
    let px = 800.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        px,
        px * h / w,
        d.x0,
        -d.y1,
        w,
        h
    );
    let stroke = 1e-3 * w.max(h);
    let _ = writeln!(s, "<g transform=\"scale(1,-1)\" stroke-width=\"{stroke}\">");
    match &packing.outer {
        Some(outer) => {
            let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{w}\" height=\"{h}\" fill=\"{OUTSIDE_FILL}\"/>", d.x0, d.y0);
            if let Some((c, rad)) = outer.as_circle() {
                let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{RESIDUAL_FILL}\"/>", c.x, c.y, rad);
            } else {
                let _ = writeln!(s, "<polygon points=\"{}\" fill=\"{RESIDUAL_FILL}\"/>", points_attr(&boundary_points(outer)));
            }
        }
        None => {
            let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{w}\" height=\"{h}\" fill=\"{RESIDUAL_FILL}\"/>", d.x0, d.y0);
        }
    }

    let _ = writeln!(s, "<g fill=\"{REGION_FILL}\" stroke=\"none\">");
    for r in &packing.regions {
        region_element(&mut s, r);
    }
    s.push_str("</g>\n");

    if let Some(raster) = opts.raster_overlay {
        let cell = raster.cell();
        let n = raster.resolution;
        let _ = writeln!(s, "<g fill=\"#e4572e\" fill-opacity=\"0.35\" stroke=\"none\">");
        for j in 0..n {
            let mut i = 0;
            while i < n {
                if !raster.bits.get(i, j) {
                    i += 1;
                    continue;
                }
                let start = i;
                while i < n && raster.bits.get(i, j) {
                    i += 1;
                }
                let _ = writeln!(
                    s,
                    "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                    raster.window.x0 + start as f64 * cell,
                    raster.window.y0 + j as f64 * cell,
                    (i - start) as f64 * cell,
                    cell
                );
            }
        }
        s.push_str("</g>\n");
    }

    if let Some(cover) = opts.cover {
        let _ = writeln!(s, "<g fill=\"none\" stroke=\"#3a86ff\">");
        for q in &cover.squares {
            let _ = writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>", q.x, q.y, q.side, q.side);
        }
        s.push_str("</g>\n");
    }

    if let Some(poly) = opts.polygon {
        let _ = writeln!(s, "<polygon points=\"{}\" fill=\"none\" stroke=\"#d62828\"/>", points_attr(&poly.vertices));
        let _ = writeln!(s, "<g fill=\"#d62828\" stroke=\"none\">");
        for z in poly.tangency_points() {
            let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>", z.x, z.y, 3.0 * stroke);
        }
        s.push_str("</g>\n");
    }

    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
