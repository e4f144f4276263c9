//! Surface sources and parameter grids of a job.

use std::path::Path;

use crate::catalog::{degenerate_surface, RotationalSurfaceSpec, Variant};
use crate::error::{GeomError, Result};
use crate::lorentz::MinkVector;
use crate::surface::{Immersion, SampledSurface, SurfaceSpec};

use super::SurfaceArgs;

/// Names accepted by `--surface` besides `m1`, `m2`, `expr` and `file`.
pub const NAMED: [&str; 6] = [
    "de-sitter",
    "hyperbolic-sphere",
    "plane",
    "graph",
    "helix-cylinder",
    "tangent-developable",
];

pub enum Source {
    Rotational {
        spec: RotationalSurfaceSpec,
        surface: SurfaceSpec,
        /// Whether `spec`'s domain is a declared one rather than a placeholder.
        declared: bool,
    },
    Expr {
        spec: SurfaceSpec,
        domain: Option<((f64, f64), (f64, f64))>,
    },
    Sampled(SampledSurface),
}

impl Source {
    pub fn immersion(&self) -> &dyn Immersion {
        match self {
            Source::Rotational { surface, .. } => surface,
            Source::Expr { spec, .. } => spec,
            Source::Sampled(s) => s,
        }
    }

    pub fn rotational(&self) -> Option<&RotationalSurfaceSpec> {
        match self {
            Source::Rotational { spec, .. } => Some(spec),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Source::Rotational { surface: s, .. } | Source::Expr { spec: s, .. } => s.name.clone(),
            Source::Sampled(_) => "file".into(),
        }
    }

    /// Finite-difference steps the Frenet stencil must use, if constrained.
    pub fn frenet_steps(&self) -> Option<(f64, f64)> {
        match self {
            Source::Sampled(s) => Some((s.hu, s.hv)),
            _ => None,
        }
    }

    fn domain(&self) -> Option<((f64, f64), (f64, f64))> {
        match self {
            Source::Rotational { spec, declared, .. } => declared.then_some((spec.u_domain, spec.v_domain)),
            Source::Expr { domain, .. } => *domain,
            Source::Sampled(s) => Some((
                (s.u0, s.u0 + (s.nu - 1) as f64 * s.hu),
                (s.v0, s.v0 + (s.nv - 1) as f64 * s.hv),
            )),
        }
    }

    /// Grid axes of the job: explicit ranges, or the declared domain.
    ///
    /// On a sampled surface the default keeps `margin` nodes away from every
    /// edge: 2 for jets, 4 for Frenet data whose stencil reaches neighbouring jets.
    pub fn axes(
        &self,
        u: Option<&str>,
        v: Option<&str>,
        default_count: usize,
        margin: usize,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let domain = self.domain();
        if let Source::Sampled(s) = self {
            let pick = |r: Option<&str>, x0: f64, h: f64, n: usize| -> Result<Vec<f64>> {
                match r {
                    Some(r) => parse_range(r),
                    None if n > 2 * margin => Ok((margin..n - margin).map(|i| x0 + i as f64 * h).collect()),
                    None => Err(GeomError::Invalid(format!(
                        "sampled grid needs more than {} nodes per axis",
                        2 * margin
                    ))),
                }
            };
            return Ok((pick(u, s.u0, s.hu, s.nu)?, pick(v, s.v0, s.hv, s.nv)?));
        }
        let axis = |r: Option<&str>, d: Option<(f64, f64)>, name: &str| -> Result<Vec<f64>> {
            match (r, d) {
                (Some(r), d) => {
                    let xs = parse_range(r)?;
                    if let Some((lo, hi)) = d {
                        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
                        if xs.iter().any(|&x| x < lo - slack || x > hi + slack) {
                            return Err(GeomError::Invalid(format!(
                                "--{name} range leaves the declared domain [{lo}, {hi}]"
                            )));
                        }
                    }
                    Ok(xs)
                }
                (None, Some((lo, hi))) => Ok(linspace(lo, hi, default_count)),
                (None, None) => Err(GeomError::Invalid(format!("--{name} start:stop:count is required for this surface"))),
            }
        };
        Ok((axis(u, domain.map(|d| d.0), "u")?, axis(v, domain.map(|d| d.1), "v")?))
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// `start:stop:count` with `count ≥ 2`.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = || GeomError::Invalid(format!("range `{text}` is not start:stop:count"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n < 2 {
        return Err(GeomError::Invalid(format!("range `{text}` needs a count of at least 2")));
    }
    if !(a.is_finite() && b.is_finite()) || !(b > a) {
        return Err(GeomError::Invalid(format!("range `{text}` must have start < stop")));
    }
    Ok(linspace(a, b, n))
}

/// `u,v`.
pub fn parse_point(text: &str) -> Result<(f64, f64)> {
    let bad = || GeomError::Invalid(format!("point `{text}` is not u,v"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Rows `u, v, x1..x4` of a sampled surface.
pub fn read_samples(path: &Path) -> std::result::Result<SampledSurface, super::CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| super::CliError::file(path, e))?;
    let headers = rdr.headers().map_err(|e| super::CliError::file(path, e))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| GeomError::Invalid(format!("{}: missing column `{name}`", path.display())))
    };
    let idx = [col("u")?, col("v")?, col("x1")?, col("x2")?, col("x3")?, col("x4")?];
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| super::CliError::file(path, e))?;
        let mut x = [0.0; 6];
        for (k, &c) in idx.iter().enumerate() {
            x[k] = rec.get(c).and_then(|s| s.parse().ok()).ok_or_else(|| {
                GeomError::Invalid(format!("{}: row {} column {} is not a number", path.display(), line + 2, c + 1))
            })?;
        }
        rows.push((x[0], x[1], MinkVector([x[2], x[3], x[4], x[5]])));
    }
    Ok(SampledSurface::from_rows(&rows)?)
}

pub fn resolve(a: &SurfaceArgs) -> std::result::Result<Source, super::CliError> {
    let name = match (&a.surface, &a.grid_file, &a.x1) {
        (Some(s), _, _) => s.clone(),
        (None, Some(_), _) => "file".into(),
        (None, None, Some(_)) => "expr".into(),
        (None, None, None) => {
            return Err(GeomError::Invalid("no surface given: use --surface, --grid-file or --x1..--x4".into()).into())
        }
    };
    let rotational = |variant| -> Result<Source> {
        let (Some(f), Some(g)) = (&a.f, &a.g) else {
            return Err(GeomError::Invalid(format!("--surface {name} needs --f and --g")));
        };
        let spec = RotationalSurfaceSpec::new(variant, f, g, a.alpha, a.beta)?;
        Ok(Source::Rotational {
            surface: spec.coordinates(),
            spec,
            declared: false,
        })
    };
    let src = match name.as_str() {
        "m1" => rotational(Variant::M1)?,
        "m2" => rotational(Variant::M2)?,
        "de-sitter" | "hyperbolic-sphere" => {
            let spec = if name == "de-sitter" {
                RotationalSurfaceSpec::de_sitter()
            } else {
                RotationalSurfaceSpec::hyperbolic_sphere()
            };
            Source::Rotational {
                surface: spec.immersion()?,
                spec,
                declared: true,
            }
        }
        "expr" => {
            let (Some(x1), Some(x2), Some(x3), Some(x4)) = (&a.x1, &a.x2, &a.x3, &a.x4) else {
                return Err(GeomError::Invalid("--surface expr needs --x1 --x2 --x3 --x4".into()).into());
            };
            Source::Expr {
                spec: SurfaceSpec::parse("expr", [x1, x2, x3, x4])?,
                domain: None,
            }
        }
        "file" => {
            let Some(p) = &a.grid_file else {
                return Err(GeomError::Invalid("--surface file needs --grid-file".into()).into());
            };
            Source::Sampled(read_samples(p)?)
        }
        other => match degenerate_surface(other) {
            Some(ns) => Source::Expr {
                spec: ns.spec,
                domain: Some((ns.u_domain, ns.v_domain)),
            },
            None => {
                return Err(GeomError::Invalid(format!(
                    "unknown surface `{other}` (m1, m2, expr, file, {})",
                    NAMED.join(", ")
                ))
                .into())
            }
        },
    };
    Ok(src)
}

/// Restrict a rotational source to the job's u-range and validate it there.
pub fn validate_on(src: &mut Source, us: &[f64], vs: &[f64]) -> Result<()> {
    if let Source::Rotational { spec, .. } = src {
        let (lo, hi) = (us[0], us[us.len() - 1]);
        let checked = spec.clone().with_domain((lo, hi), (vs[0], vs[vs.len() - 1]));
        if hi > lo {
            checked.validate()?;
        } else {
            for (name, value) in checked.constraint_values(lo)? {
                if !(value > 0.0) {
                    return Err(GeomError::Constraint {
                        constraint: name,
                        u: lo,
                        value,
                    });
                }
            }
        }
        *spec = checked;
    }
    Ok(())
}
