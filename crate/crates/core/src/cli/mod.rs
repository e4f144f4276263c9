//! The `msurf` command line: grid evaluation, classification, Frenet data,
//! curvature ellipses, integrability checks, reconstruction and round trips.
//!
//! Every flag can also be set through an `MSURF_`-prefixed environment variable.
//! Exit codes: 0 success, 1 output failure, 2 invalid input or domain,
//! 3 failed numerical diagnostic.

pub mod output;
pub mod source;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bonnet::{
    check_integrability, reconstruct, round_trip, ClosedFormFields, GridFields, InvariantFields, Perturbed,
    ReconstructOptions, SurfaceFields, DEFAULT_GATE, DRIFT_ABORT, QUOTIENT_DENOMINATOR_TOL,
};
use crate::error::GeomError;
use crate::frenet::{allied_and_chen, consistency, frenet_grid, EightFunctions, ARC_STEP};
use crate::invariants::{analyze_jet_with, curvature_ellipse, indicatrix, predicates, DEFAULT_CLASSIFY_TOL};
use crate::lorentz::{inner, Frame4, MinkVector, DEFAULT_CAUSAL_TOL};

use output::{Document, Format, Grid, Meta, Record};
use source::{parse_point, parse_range, resolve, validate_on, Source};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },
    #[error("cannot write {path}: {msg}")]
    Output { path: PathBuf, msg: String },
}

impl CliError {
    pub(crate) fn file(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            msg: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Geom(e) if e.is_numerical() => 3,
            CliError::Geom(_) | CliError::Input { .. } => 2,
            CliError::Output { .. } => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "msurf", version, about = "Invariants and Bonnet-type reconstruction of spacelike surfaces in Minkowski 4-space")]
pub struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, env = "MSURF_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First and second fundamental forms, k, kappa, K and H on a grid.
    Invariants(GridJob),
    /// Point classes and characterization predicates on a grid.
    Classify(GridJob),
    /// The Frenet-type frame and its eight functions on a grid.
    Frenet(FrenetJob),
    /// Sampled ellipse of normal curvature at one point.
    Ellipse(EllipseJob),
    /// Integrability residuals of a set of invariant functions.
    Check(CheckJob),
    /// Rebuild a surface from invariant functions and initial data.
    Reconstruct(ReconstructJob),
    /// Extract the invariants of a surface, rebuild it and report the error.
    Roundtrip(RoundtripJob),
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    /// m1, m2, de-sitter, hyperbolic-sphere, plane, graph, helix-cylinder,
    /// tangent-developable, expr or file.
    #[arg(long, env = "MSURF_SURFACE")]
    pub surface: Option<String>,
    /// Meridian function f(u) of m1/m2.
    #[arg(long, env = "MSURF_F", allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Meridian function g(u) of m1/m2.
    #[arg(long, env = "MSURF_G", allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, env = "MSURF_ALPHA", default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, env = "MSURF_BETA", default_value_t = 1.0)]
    pub beta: f64,
    /// Coordinate expressions in u and v of an inline surface.
    #[arg(long, env = "MSURF_X1", allow_hyphen_values = true)]
    pub x1: Option<String>,
    #[arg(long, env = "MSURF_X2", allow_hyphen_values = true)]
    pub x2: Option<String>,
    #[arg(long, env = "MSURF_X3", allow_hyphen_values = true)]
    pub x3: Option<String>,
    #[arg(long, env = "MSURF_X4", allow_hyphen_values = true)]
    pub x4: Option<String>,
    /// CSV of a sampled surface with columns u, v, x1, x2, x3, x4.
    #[arg(long, env = "MSURF_GRID_FILE")]
    pub grid_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// u-range as start:stop:count.
    #[arg(long, env = "MSURF_U", allow_hyphen_values = true)]
    pub u: Option<String>,
    /// v-range as start:stop:count.
    #[arg(long, env = "MSURF_V", allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Nodes per axis when a range defaults to the surface's domain.
    #[arg(long, env = "MSURF_COUNT", default_value_t = 50)]
    pub count: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (standard output when absent).
    #[arg(long, short, env = "MSURF_OUT")]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the file extension by default.
    #[arg(long, value_enum, env = "MSURF_FORMAT")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Relative tolerance of point classification and the predicates.
    #[arg(long, env = "MSURF_TOL", default_value_t = DEFAULT_CLASSIFY_TOL)]
    pub tol: f64,
    /// |lambda| at or below which a point counts as Chen.
    #[arg(long, env = "MSURF_CHEN_TOL", default_value_t = 1e-10)]
    pub chen_tol: f64,
    /// Largest integrability residual accepted.
    #[arg(long, env = "MSURF_GATE", default_value_t = DEFAULT_GATE)]
    pub gate: f64,
}

impl TolArgs {
    fn to_json(&self) -> Value {
        json!({
            "classify": self.tol,
            "causal": DEFAULT_CAUSAL_TOL,
            "chen": self.chen_tol,
            "integrability_gate": self.gate,
            "quotient_denominator": QUOTIENT_DENOMINATOR_TOL,
            "frenet_arc_step": ARC_STEP,
            "drift_abort": DRIFT_ABORT,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridJob {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FrenetJob {
    #[command(flatten)]
    pub job: GridJob,
    /// Also write the eight functions (and the metric) as a fields file.
    #[arg(long, env = "MSURF_FIELDS_OUT")]
    pub fields_out: Option<PathBuf>,
    /// Also write the frame and point at the first node as an initial-data file.
    #[arg(long, env = "MSURF_INIT_OUT")]
    pub init_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EllipseJob {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Parameter point as u,v.
    #[arg(long, env = "MSURF_AT", allow_hyphen_values = true)]
    pub at: String,
    /// Samples along the ellipse.
    #[arg(long, env = "MSURF_POINTS", default_value_t = 72)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CheckJob {
    #[command(flatten)]
    pub job: GridJob,
    /// Fields file to check instead of a surface.
    #[arg(long, env = "MSURF_FIELDS")]
    pub fields: Option<PathBuf>,
    /// Add a constant to one function, e.g. nu1=0.1 (repeatable).
    #[arg(long, env = "MSURF_PERTURB", value_delimiter = ';', allow_hyphen_values = true)]
    pub perturb: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ReconstructJob {
    /// Fields file (JSON).
    #[arg(long, env = "MSURF_FIELDS")]
    pub fields: PathBuf,
    /// Initial frame and point (JSON).
    #[arg(long, env = "MSURF_INIT")]
    pub init: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Check integrability on every n-th node per axis; 0 skips the gate.
    #[arg(long, env = "MSURF_CHECK_STRIDE", default_value_t = 1)]
    pub check_stride: usize,
    /// Include the frame at each node.
    #[arg(long, env = "MSURF_WITH_FRAMES")]
    pub with_frames: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RoundtripJob {
    #[command(flatten)]
    pub job: GridJob,
    #[arg(long, env = "MSURF_CHECK_STRIDE", default_value_t = 1)]
    pub check_stride: usize,
}

/// Initial data of a reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitFile {
    /// Parameter point the data belongs to; the first grid node when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<(f64, f64)>,
    pub point: MinkVector,
    /// `(x, y, b, l)`.
    pub frame: Frame4,
}

struct Ctx {
    command: &'static str,
    argv: Vec<String>,
}

impl Ctx {
    fn document(&self, tol: &TolArgs, us: &[f64], vs: &[f64], records: Vec<Record>, summary: Option<Value>) -> Document {
        Document {
            meta: Meta {
                tool: "msurf",
                version: env!("CARGO_PKG_VERSION"),
                command: self.command.into(),
                command_line: self.argv.clone(),
                tolerances: tol.to_json(),
            },
            grid: Grid {
                u: us.to_vec(),
                v: vs.to_vec(),
            },
            records,
            summary,
        }
    }
}

fn write(doc: &Document, out: &OutputArgs) -> CliResult<()> {
    let format = out
        .format
        .unwrap_or_else(|| out.out.as_deref().map_or(Format::Json, Format::from_path));
    write_bytes(out.out.as_deref(), &doc.render(format))
}

fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Output {
            path: p.to_path_buf(),
            msg: e.to_string(),
        }),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Output {
            path: "<stdout>".into(),
            msg: e.to_string(),
        }),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    write_bytes(Some(path), &bytes)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::file(path, e))
}

fn obj(v: Value) -> Record {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are objects"),
    }
}

/// Evaluate `f` at every node in parallel, keeping row-major order.
fn per_node<F>(us: &[f64], vs: &[f64], f: F) -> CliResult<Vec<Record>>
where
    F: Fn(usize, usize, f64, f64) -> crate::Result<Record> + Sync,
{
    let nv = vs.len();
    Ok((0..us.len() * nv)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nv, idx % nv);
            f(i, j, us[i], vs[j])
        })
        .collect::<crate::Result<Vec<_>>>()?)
}

fn job_source(job: &GridJob, margin: usize) -> CliResult<(Source, Vec<f64>, Vec<f64>)> {
    let mut src = resolve(&job.surface)?;
    let (us, vs) = src.axes(job.grid.u.as_deref(), job.grid.v.as_deref(), job.grid.count, margin)?;
    validate_on(&mut src, &us, &vs)?;
    Ok((src, us, vs))
}

fn cmd_invariants(ctx: &Ctx, job: &GridJob) -> CliResult<()> {
    let (src, us, vs) = job_source(job, 2)?;
    let s = src.immersion();
    let records = per_node(&us, &vs, |i, j, u, v| {
        let r = analyze_jet_with(&s.jet(u, v)?, job.tol.tol)?.report;
        Ok(obj(json!({
            "i": i, "j": j, "u": u, "v": v,
            "E": r.first.e, "F": r.first.f, "G": r.first.g, "W": r.first.w,
            "L": r.second.l, "M": r.second.m, "N": r.second.n,
            "k": r.k, "kappa": r.kappa, "K": r.gauss,
            "H": r.h, "h_class": r.h_class,
            "nu1p": r.nu1p, "nu2p": r.nu2p,
            "point_class": r.point_class,
        })))
    })?;
    write(&ctx.document(&job.tol, &us, &vs, records, Some(json!({"surface": src.name()}))), &job.output)
}

fn cmd_classify(ctx: &Ctx, job: &GridJob) -> CliResult<()> {
    let (src, us, vs) = job_source(job, 2)?;
    let s = src.immersion();
    let records = per_node(&us, &vs, |i, j, u, v| {
        let r = analyze_jet_with(&s.jet(u, v)?, job.tol.tol)?.report;
        let p = predicates(&r);
        let shape = indicatrix(&r).ok().map(|c| c.shape);
        Ok(obj(json!({
            "i": i, "j": j, "u": u, "v": v,
            "k": r.k, "kappa": r.kappa,
            "point_class": r.point_class,
            "h_class": r.h_class,
            "is_minimal": p.is_minimal,
            "is_flat_normal_connection": p.is_flat_normal_connection,
            "is_umbilical_free": p.is_umbilical_free,
            "indicatrix": shape,
        })))
    })?;
    let mut counts = serde_json::Map::new();
    for r in &records {
        let c = r["point_class"].as_str().unwrap_or("?").to_string();
        let n = counts.get(&c).and_then(Value::as_u64).unwrap_or(0);
        counts.insert(c, json!(n + 1));
    }
    let summary = json!({"surface": src.name(), "point_classes": counts});
    write(&ctx.document(&job.tol, &us, &vs, records, Some(summary)), &job.output)
}

fn cmd_frenet(ctx: &Ctx, fj: &FrenetJob) -> CliResult<()> {
    let job = &fj.job;
    let (src, us, vs) = job_source(job, 4)?;
    let s = src.immersion();
    let fds = frenet_grid(s, &us, &vs, src.frenet_steps())?;
    let nv = vs.len();
    let records = per_node(&us, &vs, |i, j, u, v| {
        let fd = &fds[i * nv + j];
        let r = analyze_jet_with(&s.jet(u, v)?, job.tol.tol)?.report;
        let (allied, is_chen) = allied_and_chen(fd, job.tol.chen_tol);
        let f = fd.functions();
        let mut rec = obj(json!({"i": i, "j": j, "u": u, "v": v, "h_case": fd.h_case}));
        for (name, x) in EightFunctions::NAMES.iter().zip(f.to_array()) {
            rec.insert(name.to_string(), json!(x));
        }
        rec.extend(obj(json!({
            "x": fd.x, "y": fd.y, "b": fd.b, "l": fd.l,
            "allied": allied, "is_chen": is_chen,
            "consistency": consistency(fd, &r).max(),
        })));
        Ok(rec)
    })?;
    if let Some(p) = &fj.fields_out {
        let metric: Vec<(f64, f64)> = per_node(&us, &vs, |_, _, u, v| {
            let j = s.jet(u, v)?;
            Ok(obj(json!({"e": inner(&j.z_u, &j.z_u).sqrt(), "g": inner(&j.z_v, &j.z_v).sqrt()})))
        })?
        .iter()
        .map(|r| (r["e"].as_f64().unwrap_or(f64::NAN), r["g"].as_f64().unwrap_or(f64::NAN)))
        .collect();
        let grid = GridFields {
            us: us.clone(),
            vs: vs.clone(),
            h_case: fds[0].h_case,
            tables: std::array::from_fn(|k| fds.iter().map(|fd| fd.functions().to_array()[k]).collect()),
            sqrt_e: Some(metric.iter().map(|m| m.0).collect()),
            sqrt_g: Some(metric.iter().map(|m| m.1).collect()),
        };
        write_json(p, &grid.to_file())?;
    }
    if let Some(p) = &fj.init_out {
        let init = InitFile {
            base: Some((us[0], vs[0])),
            point: s.jet(us[0], vs[0])?.z,
            frame: fds[0].frame(),
        };
        write_json(p, &init)?;
    }
    write(&ctx.document(&job.tol, &us, &vs, records, Some(json!({"surface": src.name()}))), &job.output)
}

fn cmd_ellipse(ctx: &Ctx, ej: &EllipseJob) -> CliResult<()> {
    let src = resolve(&ej.surface)?;
    let (u, v) = parse_point(&ej.at)?;
    let mut src = src;
    validate_on(&mut src, &[u], &[v])?;
    if ej.points < 3 {
        return Err(GeomError::Invalid("--points must be at least 3".into()).into());
    }
    let pa = analyze_jet_with(&src.immersion().jet(u, v)?, ej.tol.tol)?;
    let e = curvature_ellipse(&pa.tensor, &pa.report.first, &pa.frame, ej.points);
    let records = (0..ej.points)
        .map(|s| {
            obj(json!({
                "s": s, "psi": e.psi[s],
                "n1": e.coords[s][0], "n2": e.coords[s][1],
                "z": e.ambient[s],
            }))
        })
        .collect();
    let summary = json!({
        "surface": src.name(),
        "at": [u, v],
        "shape": e.shape,
        "center": e.center,
        "axes": e.axes,
        "singular_values": e.singular_values,
        "collinear_with_h": e.collinear_with_h,
        "H": pa.report.h,
        "point_class": pa.report.point_class,
        "indicatrix": indicatrix(&pa.report).ok(),
        "normal_frame": [pa.frame.n1, pa.frame.n2],
    });
    write(&ctx.document(&ej.tol, &[u], &[v], records, Some(summary)), &ej.output)
}

fn parse_perturbation(items: &[String]) -> CliResult<Option<EightFunctions>> {
    if items.is_empty() {
        return Ok(None);
    }
    let mut off = [0.0; 8];
    for it in items {
        let bad = || GeomError::Invalid(format!("perturbation `{it}` is not name=value"));
        let (name, value) = it.split_once('=').ok_or_else(bad)?;
        let k = EightFunctions::NAMES
            .iter()
            .position(|n| *n == name.trim())
            .ok_or_else(|| GeomError::Invalid(format!("unknown function `{name}` (expected one of {:?})", EightFunctions::NAMES)))?;
        off[k] += value.trim().parse::<f64>().map_err(|_| bad())?;
    }
    Ok(Some(EightFunctions::from_array(off)))
}

fn cmd_check(ctx: &Ctx, cj: &CheckJob) -> CliResult<()> {
    let job = &cj.job;
    let offset = parse_perturbation(&cj.perturb)?;
    let src;
    let surface_fields;
    let closed;
    let grid;
    let (fields, us, vs, origin): (&dyn InvariantFields, Vec<f64>, Vec<f64>, String) = if let Some(p) = &cj.fields {
        grid = GridFields::from_file(&read_json(p)?)?;
        let us = job.grid.u.as_deref().map(parse_range).transpose()?.unwrap_or_else(|| grid.us.clone());
        let vs = job.grid.v.as_deref().map(parse_range).transpose()?.unwrap_or_else(|| grid.vs.clone());
        (&grid, us, vs, p.display().to_string())
    } else {
        let (s, us, vs) = job_source(job, 4)?;
        src = s;
        if let Some(spec) = src.rotational() {
            closed = ClosedFormFields::new(spec.clone());
            (&closed, us, vs, format!("{} closed forms", src.name()))
        } else {
            let sf = SurfaceFields::with_steps(src.immersion(), (us[0], vs[0]), src.frenet_steps())?;
            if sf.steps.is_some() {
                // Off-node values do not exist: check the interpolant of the nodes.
                grid = GridFields::tabulate(&sf, &us, &vs)?;
                (&grid, us, vs, format!("{} frenet extraction, interpolated", src.name()))
            } else {
                surface_fields = sf;
                (&surface_fields, us, vs, format!("{} frenet extraction", src.name()))
            }
        }
    };
    let perturbed;
    let fields: &dyn InvariantFields = match offset {
        Some(offset) => {
            perturbed = Perturbed { inner: fields, offset };
            &perturbed
        }
        None => fields,
    };
    let report = check_integrability(fields, &us, &vs)?;
    let records = report
        .conditions
        .iter()
        .map(|c| obj(json!({"condition": c.name, "max": c.max, "u": c.at.0, "v": c.at.1})))
        .collect();
    let passed = report.max <= job.tol.gate;
    let summary = json!({
        "fields": origin,
        "h_case": report.h_case,
        "perturbation": offset,
        "max": report.max,
        "worst": report.worst,
        "at": report.at,
        "quotient_discrepancy": report.quotient_discrepancy,
        "samples": report.samples,
        "gate": job.tol.gate,
        "passed": passed,
    });
    write(&ctx.document(&job.tol, &us, &vs, records, Some(summary)), &job.output)?;
    report.enforce(job.tol.gate)?;
    Ok(())
}

fn node_index(xs: &[f64], x: f64, axis: &str) -> CliResult<usize> {
    xs.iter()
        .position(|&t| (t - x).abs() <= 1e-9 * (1.0 + x.abs()))
        .ok_or_else(|| GeomError::Invalid(format!("base {axis} = {x} is not a node of the grid")).into())
}

fn cmd_reconstruct(ctx: &Ctx, rj: &ReconstructJob) -> CliResult<()> {
    let grid = GridFields::from_file(&read_json(&rj.fields)?)?;
    let init: InitFile = read_json(&rj.init)?;
    let us = rj.grid.u.as_deref().map(parse_range).transpose()?.unwrap_or_else(|| grid.us.clone());
    let vs = rj.grid.v.as_deref().map(parse_range).transpose()?.unwrap_or_else(|| grid.vs.clone());
    let base = match init.base {
        Some((u, v)) => (node_index(&us, u, "u")?, node_index(&vs, v, "v")?),
        None => (0, 0),
    };
    let opts = ReconstructOptions {
        gate: rj.tol.gate,
        check_stride: rj.check_stride,
    };
    let (rec, report) = reconstruct(&grid, &us, &vs, base, init.frame, init.point, &opts)?;
    let records = per_node(&us, &vs, |i, j, u, v| {
        let mut r = obj(json!({"i": i, "j": j, "u": u, "v": v, "z": rec.position(i, j)}));
        if rj.with_frames {
            let f = rec.frame(i, j).0;
            r.extend(obj(json!({"x": f[0], "y": f[1], "b": f[2], "l": f[3]})));
        }
        Ok(r)
    })?;
    let summary = json!({
        "fields": rj.fields.display().to_string(),
        "h_case": grid.h_case,
        "base": [us[base.0], vs[base.1]],
        "diagnostics": rec.diagnostics,
        "integrability": report,
    });
    write(&ctx.document(&rj.tol, &us, &vs, records, Some(summary)), &rj.output)
}

fn cmd_roundtrip(ctx: &Ctx, rt: &RoundtripJob) -> CliResult<()> {
    let job = &rt.job;
    let (src, us, vs) = job_source(job, 4)?;
    if src.frenet_steps().is_some() {
        return Err(GeomError::Invalid("roundtrip needs a surface that can be evaluated off the grid".into()).into());
    }
    let opts = ReconstructOptions {
        gate: job.tol.gate,
        check_stride: rt.check_stride,
    };
    let r = round_trip(src.immersion(), &us, &vs, &opts)?;
    let d = &r.diagnostics;
    let records = vec![obj(json!({
        "max_position_error": r.max_position_error,
        "max_frame_error": r.max_frame_error,
        "h_case": r.h_case,
        "max_step_drift": d.max_step_drift,
        "max_orthonormality_drift": d.max_orthonormality_drift,
        "path_frame_residual": d.path_frame_residual,
        "path_position_residual": d.path_position_residual,
        "max_integrability_residual": d.max_integrability_residual,
    }))];
    let summary = json!({"surface": src.name(), "report": r});
    write(&ctx.document(&job.tol, &us, &vs, records, Some(summary)), &job.output)
}

/// Run a parsed command line.
pub fn run(cli: Cli, argv: Vec<String>) -> CliResult<()> {
    if let Some(n) = cli.jobs {
        // Only the first configuration of the global pool takes effect.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let command = match &cli.command {
        Command::Invariants(_) => "invariants",
        Command::Classify(_) => "classify",
        Command::Frenet(_) => "frenet",
        Command::Ellipse(_) => "ellipse",
        Command::Check(_) => "check",
        Command::Reconstruct(_) => "reconstruct",
        Command::Roundtrip(_) => "roundtrip",
    };
    let ctx = Ctx { command, argv };
    match &cli.command {
        Command::Invariants(j) => cmd_invariants(&ctx, j),
        Command::Classify(j) => cmd_classify(&ctx, j),
        Command::Frenet(j) => cmd_frenet(&ctx, j),
        Command::Ellipse(j) => cmd_ellipse(&ctx, j),
        Command::Check(j) => cmd_check(&ctx, j),
        Command::Reconstruct(j) => cmd_reconstruct(&ctx, j),
        Command::Roundtrip(j) => cmd_roundtrip(&ctx, j),
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let argv = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match run(cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("msurf: {e}");
            e.exit_code()
        }
    }
}
