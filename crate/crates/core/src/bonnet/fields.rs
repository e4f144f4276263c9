//! Sources of the eight invariant functions.

use serde::{Deserialize, Serialize};

use crate::catalog::{closed_form_frenet, closed_form_frenet_with_du, RotationalSurfaceSpec, Variant};
use crate::error::{GeomError, Result};
use crate::frenet::{frenet_at, EightFunctions, HCase};
use crate::lorentz::inner;
use crate::surface::Immersion;

/// Step of the default finite-difference partials of a field.
pub const PARTIAL_STEP: f64 = 5e-3;

/// `√E, √G` with the two cross partials the compatibility pair needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub sqrt_e: f64,
    pub sqrt_g: f64,
    pub sqrt_e_v: f64,
    pub sqrt_g_u: f64,
}

/// Eight scalar fields over a parameter rectangle.
pub trait InvariantFields: Sync {
    fn h_case(&self) -> HCase;

    fn value(&self, u: f64, v: f64) -> Result<EightFunctions>;

    /// `(∂_u, ∂_v)` of every field; 5-point differences unless overridden.
    fn partials(&self, u: f64, v: f64) -> Result<(EightFunctions, EightFunctions)> {
        let h = PARTIAL_STEP;
        let mut du = [0.0; 8];
        let mut dv = [0.0; 8];
        for (s, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
            let a = self.value(u + s * h, v)?.to_array();
            let b = self.value(u, v + s * h)?.to_array();
            for k in 0..8 {
                du[k] += w * a[k] / (12.0 * h);
                dv[k] += w * b[k] / (12.0 * h);
            }
        }
        Ok((EightFunctions::from_array(du), EightFunctions::from_array(dv)))
    }

    /// An externally known metric, used where the quotients degenerate.
    fn supplied_metric(&self, _u: f64, _v: f64) -> Result<Option<MetricSample>> {
        Ok(None)
    }
}

impl<T: InvariantFields + ?Sized> InvariantFields for &T {
    fn h_case(&self) -> HCase {
        (**self).h_case()
    }
    fn value(&self, u: f64, v: f64) -> Result<EightFunctions> {
        (**self).value(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> Result<(EightFunctions, EightFunctions)> {
        (**self).partials(u, v)
    }
    fn supplied_metric(&self, u: f64, v: f64) -> Result<Option<MetricSample>> {
        (**self).supplied_metric(u, v)
    }
}

/// The published closed forms of a rotational surface, with analytic partials.
#[derive(Clone, Debug)]
pub struct ClosedFormFields {
    pub spec: RotationalSurfaceSpec,
    pub supply_metric: bool,
}

impl ClosedFormFields {
    pub fn new(spec: RotationalSurfaceSpec) -> Self {
        ClosedFormFields {
            spec,
            supply_metric: true,
        }
    }

    pub fn without_metric(spec: RotationalSurfaceSpec) -> Self {
        ClosedFormFields {
            spec,
            supply_metric: false,
        }
    }
}

impl InvariantFields for ClosedFormFields {
    fn h_case(&self) -> HCase {
        match self.spec.variant {
            Variant::M1 => HCase::SpacelikeH,
            Variant::M2 => HCase::TimelikeH,
        }
    }

    fn value(&self, u: f64, _v: f64) -> Result<EightFunctions> {
        closed_form_frenet(&self.spec, u)
    }

    fn partials(&self, u: f64, _v: f64) -> Result<(EightFunctions, EightFunctions)> {
        let (_, du) = closed_form_frenet_with_du(&self.spec, u)?;
        Ok((du, EightFunctions::default()))
    }

    fn supplied_metric(&self, u: f64, _v: f64) -> Result<Option<MetricSample>> {
        if !self.supply_metric {
            return Ok(None);
        }
        let ((sqrt_e, sqrt_g), (_, sqrt_g_u)) = self.spec.metric_with_du(u)?;
        Ok(Some(MetricSample {
            sqrt_e,
            sqrt_g,
            sqrt_e_v: 0.0,
            sqrt_g_u,
        }))
    }
}

/// Fields extracted from a surface by the forward pipeline.
///
/// The metric is supplied from the surface's first fundamental form.
pub struct SurfaceFields<'a> {
    pub surface: &'a dyn Immersion,
    pub h_case: HCase,
    /// `(ε_b, ε_l)` applied to every extracted record.
    pub gauge: (f64, f64),
    pub steps: Option<(f64, f64)>,
}

impl<'a> SurfaceFields<'a> {
    /// Fix the causal case from the Frenet data at `reference`.
    pub fn new(surface: &'a dyn Immersion, reference: (f64, f64)) -> Result<Self> {
        Self::with_steps(surface, reference, None)
    }

    /// As [`SurfaceFields::new`] with fixed frame-derivative steps (grid spacing of a sampled surface).
    pub fn with_steps(surface: &'a dyn Immersion, reference: (f64, f64), steps: Option<(f64, f64)>) -> Result<Self> {
        let fd = frenet_at(surface, reference, steps)?;
        Ok(SurfaceFields {
            surface,
            h_case: fd.h_case,
            gauge: (1.0, 1.0),
            steps,
        })
    }
}

impl InvariantFields for SurfaceFields<'_> {
    fn h_case(&self) -> HCase {
        self.h_case
    }

    fn value(&self, u: f64, v: f64) -> Result<EightFunctions> {
        let fd = frenet_at(self.surface, (u, v), self.steps)?;
        if fd.h_case != self.h_case {
            return Err(GeomError::Invalid(format!(
                "mean curvature changes causal type at ({u}, {v})"
            )));
        }
        Ok(fd.functions().regauge(self.h_case, self.gauge.0, self.gauge.1))
    }

    fn supplied_metric(&self, u: f64, v: f64) -> Result<Option<MetricSample>> {
        let j = self.surface.jet(u, v)?;
        let sqrt_e = inner(&j.z_u, &j.z_u).sqrt();
        let sqrt_g = inner(&j.z_v, &j.z_v).sqrt();
        Ok(Some(MetricSample {
            sqrt_e,
            sqrt_g,
            sqrt_e_v: inner(&j.z_uv, &j.z_u) / sqrt_e,
            sqrt_g_u: inner(&j.z_uv, &j.z_v) / sqrt_g,
        }))
    }
}

/// Adds constants to some fields of another source.
pub struct Perturbed<F> {
    pub inner: F,
    pub offset: EightFunctions,
}

impl<F: InvariantFields> InvariantFields for Perturbed<F> {
    fn h_case(&self) -> HCase {
        self.inner.h_case()
    }
    fn value(&self, u: f64, v: f64) -> Result<EightFunctions> {
        let a = self.inner.value(u, v)?.to_array();
        let b = self.offset.to_array();
        Ok(EightFunctions::from_array(std::array::from_fn(|k| a[k] + b[k])))
    }
    fn partials(&self, u: f64, v: f64) -> Result<(EightFunctions, EightFunctions)> {
        self.inner.partials(u, v)
    }
    fn supplied_metric(&self, u: f64, v: f64) -> Result<Option<MetricSample>> {
        self.inner.supplied_metric(u, v)
    }
}

/// Tabulated fields, interpolated by local bicubic (4×4 Lagrange) patches.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFields {
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub h_case: HCase,
    /// Row-major `[i * nv + j]` tables in [`EightFunctions::NAMES`] order.
    pub tables: [Vec<f64>; 8],
    pub sqrt_e: Option<Vec<f64>>,
    pub sqrt_g: Option<Vec<f64>>,
}

/// Index of the first of four stencil nodes and the Lagrange weights and
/// their derivatives at `x`.
fn cubic_weights(xs: &[f64], x: f64) -> (usize, [f64; 4], [f64; 4]) {
    let n = xs.len();
    let k = xs.partition_point(|&t| t <= x).clamp(2, n - 2) - 2;
    let t = [xs[k], xs[k + 1], xs[k + 2], xs[k + 3]];
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for a in 0..4 {
        let mut denom = 1.0;
        let mut prod = 1.0;
        for b in 0..4 {
            if b != a {
                denom *= t[a] - t[b];
                prod *= x - t[b];
            }
        }
        w[a] = prod / denom;
        let mut d = 0.0;
        for skip in 0..4 {
            if skip == a {
                continue;
            }
            let mut p = 1.0;
            for b in 0..4 {
                if b != a && b != skip {
                    p *= x - t[b];
                }
            }
            d += p;
        }
        dw[a] = d / denom;
    }
    (k, w, dw)
}

/// Serialized form of [`GridFields`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldsFile {
    pub h_case: HCase,
    pub grid: AxisPair,
    /// One `nu × nv` table per function, keyed by [`EightFunctions::NAMES`].
    pub fields: std::collections::BTreeMap<String, Vec<Vec<f64>>>,
    #[serde(rename = "sqrtE", default, skip_serializing_if = "Option::is_none")]
    pub sqrt_e: Option<Vec<Vec<f64>>>,
    #[serde(rename = "sqrtG", default, skip_serializing_if = "Option::is_none")]
    pub sqrt_g: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxisPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GridFields {
    /// Tabulate another source on a grid, including its supplied metric if any.
    pub fn tabulate(fields: &dyn InvariantFields, us: &[f64], vs: &[f64]) -> Result<Self> {
        use rayon::prelude::*;
        let nv = vs.len();
        let rows: Vec<(EightFunctions, Option<MetricSample>)> = (0..us.len() * nv)
            .into_par_iter()
            .map(|idx| {
                let (u, v) = (us[idx / nv], vs[idx % nv]);
                Ok((fields.value(u, v)?, fields.supplied_metric(u, v)?))
            })
            .collect::<Result<_>>()?;
        let tables = std::array::from_fn(|k| rows.iter().map(|r| r.0.to_array()[k]).collect());
        let metric: Option<Vec<MetricSample>> = rows.iter().map(|r| r.1).collect();
        Ok(GridFields {
            us: us.to_vec(),
            vs: vs.to_vec(),
            h_case: fields.h_case(),
            tables,
            sqrt_e: metric.as_ref().map(|m| m.iter().map(|s| s.sqrt_e).collect()),
            sqrt_g: metric.as_ref().map(|m| m.iter().map(|s| s.sqrt_g).collect()),
        })
    }

    pub fn to_file(&self) -> FieldsFile {
        let nv = self.vs.len();
        let table = |t: &Vec<f64>| t.chunks(nv).map(|r| r.to_vec()).collect::<Vec<_>>();
        FieldsFile {
            h_case: self.h_case,
            grid: AxisPair {
                u: self.us.clone(),
                v: self.vs.clone(),
            },
            fields: EightFunctions::NAMES
                .iter()
                .zip(&self.tables)
                .map(|(n, t)| (n.to_string(), table(t)))
                .collect(),
            sqrt_e: self.sqrt_e.as_ref().map(table),
            sqrt_g: self.sqrt_g.as_ref().map(table),
        }
    }

    pub fn from_file(file: &FieldsFile) -> Result<Self> {
        let (nu, nv) = (file.grid.u.len(), file.grid.v.len());
        if nu < 4 || nv < 4 {
            return Err(GeomError::Invalid("fields grid needs at least 4 nodes per axis".into()));
        }
        for axis in [&file.grid.u, &file.grid.v] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(GeomError::Invalid("fields grid axes must be strictly increasing".into()));
            }
        }
        let flatten = |name: &str, t: &Vec<Vec<f64>>| -> Result<Vec<f64>> {
            if t.len() != nu || t.iter().any(|r| r.len() != nv) {
                return Err(GeomError::Invalid(format!("table `{name}` is not {nu} x {nv}")));
            }
            Ok(t.concat())
        };
        let mut tables: [Vec<f64>; 8] = Default::default();
        for (k, name) in EightFunctions::NAMES.iter().enumerate() {
            let t = file
                .fields
                .get(*name)
                .ok_or_else(|| GeomError::Invalid(format!("missing field `{name}`")))?;
            tables[k] = flatten(name, t)?;
        }
        Ok(GridFields {
            us: file.grid.u.clone(),
            vs: file.grid.v.clone(),
            h_case: file.h_case,
            tables,
            sqrt_e: file.sqrt_e.as_ref().map(|t| flatten("sqrtE", t)).transpose()?,
            sqrt_g: file.sqrt_g.as_ref().map(|t| flatten("sqrtG", t)).transpose()?,
        })
    }

    fn check_inside(&self, u: f64, v: f64) -> Result<()> {
        let inside = |xs: &[f64], x: f64| {
            let pad = 1e-9 * (xs[xs.len() - 1] - xs[0]);
            x >= xs[0] - pad && x <= xs[xs.len() - 1] + pad
        };
        if inside(&self.us, u) && inside(&self.vs, v) {
            Ok(())
        } else {
            Err(GeomError::Invalid(format!("({u}, {v}) is outside the fields grid")))
        }
    }

    /// Value, `∂_u` and `∂_v` of one table.
    fn interpolate(&self, t: &[f64], u: f64, v: f64) -> [f64; 3] {
        let nv = self.vs.len();
        let (iu, wu, dwu) = cubic_weights(&self.us, u);
        let (iv, wv, dwv) = cubic_weights(&self.vs, v);
        let mut out = [0.0; 3];
        for a in 0..4 {
            for b in 0..4 {
                let x = t[(iu + a) * nv + iv + b];
                out[0] += wu[a] * wv[b] * x;
                out[1] += dwu[a] * wv[b] * x;
                out[2] += wu[a] * dwv[b] * x;
            }
        }
        out
    }
}

impl InvariantFields for GridFields {
    fn h_case(&self) -> HCase {
        self.h_case
    }

    fn value(&self, u: f64, v: f64) -> Result<EightFunctions> {
        self.check_inside(u, v)?;
        Ok(EightFunctions::from_array(std::array::from_fn(|k| {
            self.interpolate(&self.tables[k], u, v)[0]
        })))
    }

    fn partials(&self, u: f64, v: f64) -> Result<(EightFunctions, EightFunctions)> {
        self.check_inside(u, v)?;
        let all: [[f64; 3]; 8] = std::array::from_fn(|k| self.interpolate(&self.tables[k], u, v));
        Ok((
            EightFunctions::from_array(all.map(|a| a[1])),
            EightFunctions::from_array(all.map(|a| a[2])),
        ))
    }

    fn supplied_metric(&self, u: f64, v: f64) -> Result<Option<MetricSample>> {
        match (&self.sqrt_e, &self.sqrt_g) {
            (Some(e), Some(g)) => {
                self.check_inside(u, v)?;
                let e = self.interpolate(e, u, v);
                let g = self.interpolate(g, u, v);
                Ok(Some(MetricSample {
                    sqrt_e: e[0],
                    sqrt_g: g[0],
                    sqrt_e_v: e[2],
                    sqrt_g_u: g[1],
                }))
            }
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_weights_reproduce_cubics() {
        let xs = [0.0, 0.3, 0.5, 0.9, 1.4, 2.0];
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let dp = |x: f64| -2.0 + 1.5 * x * x;
        for x in [0.1, 0.7, 1.2, 1.9] {
            let (k, w, dw) = cubic_weights(&xs, x);
            let val: f64 = (0..4).map(|a| w[a] * p(xs[k + a])).sum();
            let der: f64 = (0..4).map(|a| dw[a] * p(xs[k + a])).sum();
            assert!((val - p(x)).abs() < 1e-12 && (der - dp(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn grid_fields_round_trip_through_file() {
        let spec = RotationalSurfaceSpec::de_sitter();
        let cf = ClosedFormFields::new(spec);
        let us: Vec<f64> = (0..41).map(|i| 0.1 + 0.01 * i as f64).collect();
        let vs: Vec<f64> = (0..6).map(|j| 0.1 * j as f64).collect();
        let g = GridFields::tabulate(&cf, &us, &vs).unwrap();
        let json = serde_json::to_string(&g.to_file()).unwrap();
        let back = GridFields::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, g);
        let a = back.value(0.311, 0.23).unwrap();
        let b = cf.value(0.311, 0.23).unwrap();
        let err = a.to_array().iter().zip(b.to_array()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let (du, _) = back.partials(0.311, 0.23).unwrap();
        let (du0, _) = cf.partials(0.311, 0.23).unwrap();
        assert!((du.mu - du0.mu).abs() < 1e-4);
        assert!(back.value(2.0, 0.0).is_err());
    }
}
