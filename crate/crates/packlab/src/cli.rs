//! Command-line surface. Every run records a [`RunManifest`] next to its outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use packlab_core::dimension::{
    box_count, default_scales, dimension_fit, packing_exponent, rasterize_residual, BOX_DIMENSION_CAVEAT,
};
use packlab_core::generate::{
    gen_apollonian, gen_bounded_curvature_packing, gen_counterexample_convex, gen_counterexample_strict,
    gen_lune_curve, gen_sierpinski,
};
use packlab_core::geometry::{Packing, PackingMeta, ParamValue, Point, Rect, Region};
use packlab_core::sweep::{
    basic_difference_audit, circumscribe_and_refine, compute_gm, cover_bound_audit, dyadic_cover,
    good_estimate_audit, lambda_threshold, main_estimate_audit, SquareCover,
};
use packlab_core::verify::{
    ahlfors_constant, chord_arc_audit, counting_audit, intersections_audit, lemma22_audit, segment_sum_audit,
    theoretical_chord_arc, AuditReport, Probe,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::json::{load_cover, load_packing, save_json, save_packing, write_file, FormatError, LoadOptions};
use crate::manifest::{digest_file, FileDigest, ReplayOutcome, RunManifest};
use crate::svg::{export_svg, SvgOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error(transparent)]
    Core(#[from] packlab_core::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Parser, Debug)]
#[command(name = "packlab", version, about = "Convex packings, residual dimension and curvature-estimate audits")]
struct Cli {
    /// Where to write the run manifest (default: `<first output>.manifest.json`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a packing.
    Gen(GenArgs),
    /// Audit curves or a whole packing.
    Verify(VerifyArgs),
    /// Box counting or packing exponent of the residual set.
    Dim(DimArgs),
    /// Sweep-functional audits over a square cover.
    Audit(AuditArgs),
    /// Build a square cover of the residual set.
    Cover(CoverArgs),
    /// Export a scene.
    Export(ExportArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GenKind {
    Apollonian,
    Sierpinski,
    Lune,
    Bounded,
    CexConvex,
    CexStrict,
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    max_curvature: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    outer_radius: f64,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long = "s-seq", value_delimiter = ',')]
    s_seq: Option<Vec<f64>>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Cover ledger of the counterexamples (default: `<out>` with `.ledger.json`).
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VerifyKind {
    ChordArc,
    Lemma22,
    Ahlfors,
    Counting,
    SegmentSum,
    Intersections,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    kind: VerifyKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Curvature constant for the theoretical chord-arc bound (default: measured).
    #[arg(long)]
    k: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Region index for the single-curve audits.
    #[arg(long, default_value_t = 0)]
    region: usize,
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    #[arg(long)]
    report: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DimKind {
    Box,
    Exponent,
}

#[derive(Args, Debug, Serialize)]
struct DimArgs {
    kind: DimKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1024)]
    resolution: usize,
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    /// Exponent grid of s values (default 0.05, 0.10, …, 2.00).
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
    /// Fit summary as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AuditKind {
    Gm,
    CoverBound,
    BasicDiff,
    Polygon,
    MainEstimate,
}

#[derive(Args, Debug, Serialize)]
struct AuditArgs {
    kind: AuditKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    cover: Option<PathBuf>,
    #[arg(long, default_value_t = 1.05)]
    s: f64,
    /// Stage (g_m, basic-diff) or 1-based region (polygon).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    grid: usize,
    /// Strip parameter of the polygon audit (default: half the feasibility threshold).
    #[arg(long)]
    lambda: Option<f64>,
    /// Use only the first N regions.
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    report: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CoverKind {
    Dyadic,
}

#[derive(Args, Debug, Serialize)]
struct CoverArgs {
    kind: CoverKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 6)]
    level: u32,
    #[arg(long, default_value_t = 0.1)]
    enlarge: f64,
    #[arg(long)]
    prefix: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ExportKind {
    Svg,
}

#[derive(Args, Debug, Serialize)]
struct ExportArgs {
    kind: ExportKind,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Draw the refined circumscribing polygon of region `--m`.
    #[arg(long)]
    polygon: bool,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long)]
    lambda: Option<f64>,
    /// Overlay the residual raster at this resolution.
    #[arg(long)]
    raster: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ReplayArgs {
    manifest_file: PathBuf,
    /// Directory receiving the replayed outputs.
    #[arg(long)]
    dir: PathBuf,
}

/// What one invocation did.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub manifest: Option<RunManifest>,
    pub manifest_path: Option<PathBuf>,
    pub replay: Option<ReplayOutcome>,
    /// One-line human summary.
    pub summary: String,
}

struct Outcome {
    command: String,
    params: Value,
    seed: Option<u64>,
    inputs: Vec<(&'static str, PathBuf)>,
    outputs: Vec<(&'static str, PathBuf)>,
    summary: String,
}

/// Sizes the global rayon pool from `PACKLAB_THREADS` (unset or 0 leaves the default).
pub fn configure_threads() {
    let n = std::env::var("PACKLAB_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    if n > 0 {
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Runs one command; `args` excludes the program name.
pub fn run(args: &[String]) -> Result<RunResult, CliError> {
    configure_threads();
    let cli = Cli::try_parse_from(std::iter::once("packlab".to_string()).chain(args.iter().cloned()))?;
    if let Command::Replay(r) = &cli.command {
        return replay(r);
    }
    let start = Instant::now();
    let out = match &cli.command {
        Command::Gen(a) => gen(a)?,
        Command::Verify(a) => verify(a)?,
        Command::Dim(a) => dim(a)?,
        Command::Audit(a) => audit(a)?,
        Command::Cover(a) => cover(a)?,
        Command::Export(a) => export(a)?,
        Command::Replay(_) => unreachable!(),
    };
    let digests = |list: &[(&str, PathBuf)]| -> Result<Vec<FileDigest>, FormatError> {
        list.iter().map(|(flag, p)| digest_file(flag, p)).collect()
    };
    let manifest = RunManifest {
        command: out.command,
        args: args.to_vec(),
        params: out.params,
        seed: out.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: digests(&out.inputs)?,
        outputs: digests(&out.outputs)?,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    let path = match (&cli.manifest, out.outputs.first()) {
        (Some(p), _) => p.clone(),
        (None, Some((_, p))) => sibling(p, "manifest.json"),
        (None, None) => return Err(CliError::Invalid("command produced no output".into())),
    };
    save_json(&manifest, &path)?;
    Ok(RunResult { manifest: Some(manifest), manifest_path: Some(path), replay: None, summary: out.summary })
}

/// `dir/file.json` → `dir/file.<ext>`.
fn sibling(p: &Path, ext: &str) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn load(path: &Path, prefix: Option<usize>) -> Result<Packing, CliError> {
    let loaded = load_packing(path, LoadOptions::default())?;
    let p = loaded.packing;
    Ok(match prefix {
        Some(n) => p.prefix(n),
        None => p,
    })
}

fn region_at(p: &Packing, i: usize) -> Result<&Region, CliError> {
    p.regions
        .get(i)
        .ok_or_else(|| CliError::Invalid(format!("region {i} out of range for {} regions", p.len())))
}

fn gen(a: &GenArgs) -> Result<Outcome, CliError> {
    let mut outputs = vec![("--out", a.out.clone())];
    let ledger_path = a.ledger.clone().unwrap_or_else(|| a.out.with_extension("ledger.json"));
    let (mut packing, ledger, params) = match a.kind {
        GenKind::Apollonian => {
            let mc = a.max_curvature.unwrap_or(100.0);
            let p = gen_apollonian(mc, a.outer_radius)?;
            (p, None, json!({"max_curvature": mc, "outer_radius": a.outer_radius}))
        }
        GenKind::Sierpinski => {
            let depth = a.depth.unwrap_or(6);
            (gen_sierpinski(depth)?, None, json!({ "depth": depth }))
        }
        GenKind::Lune => {
            let c = a.c.unwrap_or(1.0);
            let region = Region::new(gen_lune_curve(c)?)?;
            let b = region.bbox();
            let pad = 0.05 * b.width().max(b.height());
            let domain = Rect::new(b.x0 - pad, b.y0 - pad, b.x1 + pad, b.y1 + pad);
            let meta = PackingMeta::new("lune").with("c", ParamValue::Num(c));
            (Packing::new(domain, vec![region], meta), None, json!({ "c": c }))
        }
        GenKind::Bounded => {
            let k = a.k.unwrap_or(4.0);
            let p = gen_bounded_curvature_packing(Rect::unit(), k, a.count, a.seed)?;
            (p, None, json!({"k": k, "count": a.count}))
        }
        GenKind::CexConvex => {
            let eps = a.eps.clone().unwrap_or_else(|| vec![0.08, 0.02, 0.005]);
            let (levels, grid) = (a.levels.unwrap_or(3), a.grid.unwrap_or(4));
            let (p, l) = gen_counterexample_convex(Rect::unit(), &eps, levels, grid)?;
            (p, Some(l), json!({"eps": eps, "levels": levels, "grid": grid}))
        }
        GenKind::CexStrict => {
            let eps = a.eps.clone().unwrap_or_else(|| vec![0.5, 0.25, 0.125]);
            let s_seq = a.s_seq.clone().unwrap_or_else(|| vec![1.5, 1.4, 1.3]);
            let (levels, grid) = (a.levels.unwrap_or(3), a.grid.unwrap_or(2));
            let (p, l) = gen_counterexample_strict(Rect::unit(), &s_seq, &eps, levels, grid)?;
            (p, Some(l), json!({"eps": eps, "s_seq": s_seq, "levels": levels, "grid": grid}))
        }
    };
    packing.meta.seed = Some(a.seed);
    save_packing(&packing, &a.out)?;
    if let Some(l) = &ledger {
        save_json(l, &ledger_path)?;
        outputs.push(("--ledger", ledger_path));
    }
    let kind = serde_json::to_value(a.kind).unwrap_or(Value::Null);
    Ok(Outcome {
        command: format!("gen {}", kind.as_str().unwrap_or_default()),
        params,
        seed: Some(a.seed),
        inputs: Vec::new(),
        outputs,
        summary: format!("{} regions written to {}", packing.len(), a.out.display()),
    })
}

fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let packing = load(&a.input, None)?;
    let s_values = a.s.clone().unwrap_or_else(|| vec![1.1, 1.25, 1.5, 1.75, 2.0]);
    let rep: AuditReport = match a.kind {
        VerifyKind::ChordArc => {
            let r = region_at(&packing, a.region)?;
            let mut rep = chord_arc_audit(r.boundary(), a.samples, 1_000_000)?;
            let k = a.k.unwrap_or_else(|| r.curvature_bound());
            if k > 0.0 && k <= std::f64::consts::TAU {
                let t = theoretical_chord_arc(k)?;
                rep.bound("k", k).bound("L_theory", t.l);
                if rep.get("L_emp") > t.l {
                    rep.flag("empirical constant exceeds the curvature bound");
                }
            }
            rep
        }
        VerifyKind::Lemma22 => lemma22_audit(region_at(&packing, a.region)?.boundary(), a.samples, 180)?,
        VerifyKind::Ahlfors => ahlfors_constant(region_at(&packing, a.region)?, 64, 16, 100_000)?,
        VerifyKind::Counting => {
            let probe = Probe::Region(region_at(&packing, a.region)?.clone());
            counting_audit(&packing, &probe, a.c, None)?
        }
        VerifyKind::SegmentSum => {
            let d = packing.domain;
            let y = 0.5 * (d.y0 + d.y1);
            segment_sum_audit(&packing, (Point::new(d.x0, y), Point::new(d.x1, y)), a.c, &s_values)?
        }
        VerifyKind::Intersections => intersections_audit(&packing, 1e-9)?,
    };
    save_json(&rep, &a.report)?;
    let kind = serde_json::to_value(a.kind).unwrap_or(Value::Null);
    Ok(Outcome {
        command: format!("verify {}", kind.as_str().unwrap_or_default()),
        params: json!({"k": a.k, "c": a.c, "s": s_values, "region": a.region, "samples": a.samples}),
        seed: packing.meta.seed,
        inputs: vec![("--in", a.input.clone())],
        outputs: vec![("--report", a.report.clone())],
        summary: format!("{}: {}", rep.name, if rep.pass { "pass" } else { "FAIL" }),
    })
}

fn default_s_grid() -> Vec<f64> {
    (1..=40).map(|i| i as f64 * 0.05).collect()
}

fn dim(a: &DimArgs) -> Result<Outcome, CliError> {
    let packing = load(&a.input, None)?;
    let mut outputs = vec![("--out", a.out.clone())];
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Invalid(format!("csv: {e}"));
    let (summary, report, params) = match a.kind {
        DimKind::Box => {
            let raster = rasterize_residual(&packing, a.resolution)?;
            let scales = a.scales.clone().unwrap_or_else(|| default_scales(&raster));
            let counts = box_count(&raster, &scales)?;
            w.write_record(["delta", "count", "log_inv_delta", "log_count"]).map_err(csv_err)?;
            for &(d, n) in &counts {
                let row = [d.to_string(), n.to_string(), (1.0 / d).ln().to_string(), (n as f64).ln().to_string()];
                w.write_record(&row).map_err(csv_err)?;
            }
            let fit = dimension_fit(&counts)?;
            let summary = format!("box slope {:.4} (r2 {:.5}) over {} scales", fit.slope, fit.r2, counts.len());
            let report = json!({"fit": fit, "band_fraction": raster.band_fraction, "caveat": BOX_DIMENSION_CAVEAT});
            (summary, report, json!({"resolution": a.resolution, "scales": scales}))
        }
        DimKind::Exponent => {
            let grid = a.s.clone().unwrap_or_else(default_s_grid);
            let est = packing_exponent(&packing, &grid)?;
            w.write_record(["s", "beta"]).map_err(csv_err)?;
            for &(s, b) in &est.table {
                w.write_record(&[s.to_string(), b.to_string()]).map_err(csv_err)?;
            }
            let summary = match est.estimate {
                Some(e) => format!("exponent {e:.4} in [{:.4}, {:.4}]", est.bracket.0, est.bracket.1),
                None => format!("exponent: low confidence ({})", est.flags.join("; ")),
            };
            (summary, json!(est), json!({ "s": grid }))
        }
    };
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    write_file(&a.out, &bytes)?;
    if let Some(r) = &a.report {
        save_json(&report, r)?;
        outputs.push(("--report", r.clone()));
    }
    let kind = serde_json::to_value(a.kind).unwrap_or(Value::Null);
    Ok(Outcome {
        command: format!("dim {}", kind.as_str().unwrap_or_default()),
        params,
        seed: packing.meta.seed,
        inputs: vec![("--in", a.input.clone())],
        outputs,
        summary,
    })
}

fn audit(a: &AuditArgs) -> Result<Outcome, CliError> {
    let packing = load(&a.input, a.prefix)?;
    let mut inputs = vec![("--in", a.input.clone())];
    let need_cover = || -> Result<SquareCover, CliError> {
        let p = a.cover.as_ref().ok_or_else(|| CliError::Invalid("this audit needs --cover".into()))?;
        Ok(load_cover(p)?)
    };
    if !matches!(a.kind, AuditKind::Polygon) {
        if let Some(c) = &a.cover {
            inputs.push(("--cover", c.clone()));
        }
    }
    let (doc, summary): (Value, String) = match a.kind {
        AuditKind::Gm => {
            let cover = need_cover()?;
            let m = a.m.unwrap_or(0);
            let g = compute_gm(&packing, &cover, m, a.s, a.grid)?;
            let summary = format!("integral of g_{m} = {:.6e}", g.integral);
            (json!(g), summary)
        }
        AuditKind::CoverBound => {
            let cover = need_cover()?;
            let g = compute_gm(&packing, &cover, packing.len(), a.s, a.grid)?;
            let rep = cover_bound_audit(&g, &cover)?;
            let summary = format!("{}: {}", rep.name, verdict(&rep));
            (json!(rep), summary)
        }
        AuditKind::BasicDiff => {
            let cover = need_cover()?;
            let rep = basic_difference_audit(&packing, &cover, a.m.unwrap_or(1), a.s, a.grid)?;
            let summary = format!("{}: {}", rep.name, verdict(&rep));
            (json!(rep), summary)
        }
        AuditKind::Polygon => {
            let m = a.m.unwrap_or(1);
            if m == 0 {
                return Err(CliError::Invalid("--m is 1-based for the polygon audit".into()));
            }
            let b = region_at(&packing, m - 1)?;
            let threshold = lambda_threshold(b);
            let lambda = a.lambda.unwrap_or(0.5 * threshold);
            let (p, pt) = circumscribe_and_refine(b, &packing, lambda)?;
            let rep = good_estimate_audit(&pt, b, b.curvature_bound(), lambda, a.s, a.grid)?;
            let summary = format!("{}: {} ({} edges)", rep.name, verdict(&rep), pt.len());
            let doc = json!({
                "m": m,
                "lambda": lambda,
                "lambda_threshold": threshold,
                "polygon": p,
                "refined": pt,
                "good_estimate": rep,
            });
            (doc, summary)
        }
        AuditKind::MainEstimate => {
            let cover = need_cover()?;
            let rep = main_estimate_audit(&packing, &cover, a.s, a.grid)?;
            let summary = format!("{}: {} (c0_emp {:.4e})", rep.name, verdict(&rep), rep.get("c0_emp"));
            (json!(rep), summary)
        }
    };
    save_json(&doc, &a.report)?;
    let kind = serde_json::to_value(a.kind).unwrap_or(Value::Null);
    Ok(Outcome {
        command: format!("audit {}", kind.as_str().unwrap_or_default()),
        params: json!({"s": a.s, "m": a.m, "grid": a.grid, "lambda": a.lambda, "prefix": a.prefix}),
        seed: packing.meta.seed,
        inputs,
        outputs: vec![("--report", a.report.clone())],
        summary,
    })
}

fn verdict(rep: &AuditReport) -> &'static str {
    if rep.pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn cover(a: &CoverArgs) -> Result<Outcome, CliError> {
    let packing = load(&a.input, a.prefix)?;
    let c = dyadic_cover(&packing, a.level, a.enlarge)?;
    save_json(&c, &a.out)?;
    Ok(Outcome {
        command: "cover dyadic".into(),
        params: json!({"level": a.level, "enlarge": a.enlarge, "prefix": a.prefix}),
        seed: packing.meta.seed,
        inputs: vec![("--in", a.input.clone())],
        outputs: vec![("--out", a.out.clone())],
        summary: format!("{} squares written to {}", c.len(), a.out.display()),
    })
}

fn export(a: &ExportArgs) -> Result<Outcome, CliError> {
    let packing = load(&a.input, None)?;
    let mut inputs = vec![("--in", a.input.clone())];
    let cover = match &a.cover {
        Some(p) => {
            inputs.push(("--cover", p.clone()));
            Some(load_cover(p)?)
        }
        None => None,
    };
    let polygon = if a.polygon {
        if a.m == 0 {
            return Err(CliError::Invalid("--m is 1-based".into()));
        }
        let b = region_at(&packing, a.m - 1)?;
        let lambda = a.lambda.unwrap_or(0.5 * lambda_threshold(b));
        Some(circumscribe_and_refine(b, &packing, lambda)?.1)
    } else {
        None
    };
    let raster = a.raster.map(|n| rasterize_residual(&packing, n)).transpose()?;
    let opts = SvgOptions { cover: cover.as_ref(), polygon: polygon.as_ref(), raster_overlay: raster.as_ref() };
    let svg = export_svg(&packing, &opts)?;
    write_file(&a.out, svg.as_bytes())?;
    Ok(Outcome {
        command: "export svg".into(),
        params: json!({"polygon": a.polygon, "m": a.m, "lambda": a.lambda, "raster": a.raster}),
        seed: packing.meta.seed,
        inputs,
        outputs: vec![("--out", a.out.clone())],
        summary: format!("svg written to {}", a.out.display()),
    })
}

fn replay(r: &ReplayArgs) -> Result<RunResult, CliError> {
    let m = RunManifest::load(&r.manifest_file)?;
    std::fs::create_dir_all(&r.dir).map_err(|source| FormatError::Io { path: r.dir.clone(), source })?;
    let mut inputs_unchanged = true;
    for i in &m.inputs {
        let now = digest_file(&i.flag, Path::new(&i.path))?;
        if now.sha256 != i.sha256 {
            log::warn!("input {} changed since the recorded run", i.path);
            inputs_unchanged = false;
        }
    }
    let mut args = m.redirected_args(&r.dir);
    if !args.iter().any(|a| a == "--manifest" || a.starts_with("--manifest=")) {
        args.push("--manifest".into());
        args.push(r.dir.join("replay.manifest.json").to_string_lossy().into_owned());
    }
    let rerun = run(&args)?;
    let new = rerun.manifest.ok_or_else(|| CliError::Invalid("replayed run wrote no manifest".into()))?;
    let outputs = m
        .outputs
        .iter()
        .map(|o| {
            let same = new.outputs.iter().find(|n| n.flag == o.flag);
            let path = same.map(|n| n.path.clone()).unwrap_or_default();
            (o.flag.clone(), o.path.clone(), path, same.is_some_and(|n| n.sha256 == o.sha256))
        })
        .collect();
    let outcome = ReplayOutcome { inputs_unchanged, outputs };
    let summary = format!(
        "replay of `{}`: {}",
        m.command,
        if outcome.identical() { "byte-identical" } else { "outputs differ" }
    );
    Ok(RunResult { manifest: Some(new), manifest_path: rerun.manifest_path, replay: Some(outcome), summary })
}
