//! Immersions `z(u, v)` and their second-order jets.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::{self, FunctionExpr};
use crate::jet::{Jet2, Scalar2Jet, SurfaceJet2};
use crate::lorentz::MinkVector;

/// Anything that yields a second-order jet at a parameter point.
pub trait Immersion: Sync {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet2>;
}

/// An immersion given by four coordinate expressions in `u` and `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub name: String,
    pub coords: [FunctionExpr; 4],
}

impl SurfaceSpec {
    pub fn new(name: impl Into<String>, coords: [FunctionExpr; 4]) -> Self {
        SurfaceSpec {
            name: name.into(),
            coords,
        }
    }

    pub fn parse(name: impl Into<String>, coords: [&str; 4]) -> Result<Self> {
        let mut out = Vec::with_capacity(4);
        for c in coords {
            out.push(expr::parse(c)?);
        }
        let coords: [FunctionExpr; 4] = out.try_into().expect("four coordinates");
        Ok(SurfaceSpec::new(name, coords))
    }

    pub fn plane() -> Self {
        SurfaceSpec::parse("plane", ["u", "v", "0", "0"]).expect("literal")
    }

    pub fn position(&self, u: f64, v: f64) -> Result<MinkVector> {
        let mut p = [0.0; 4];
        for (k, c) in self.coords.iter().enumerate() {
            p[k] = c.eval(u, v)?;
        }
        Ok(MinkVector(p))
    }
}

/// Apply `lift` to each coordinate expression.
pub fn surface_jet(surface: &SurfaceSpec, at: (f64, f64)) -> Result<SurfaceJet2> {
    let mut jets = [Scalar2Jet::default(); 4];
    for (k, c) in surface.coords.iter().enumerate() {
        jets[k] = c.lift(at.0, at.1)?;
    }
    Ok(SurfaceJet2::from_components(at, &jets))
}

impl Immersion for SurfaceSpec {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet2> {
        surface_jet(self, (u, v))
    }
}

/// A native closure over jet arithmetic.
pub struct FnSurface<F>(pub F);

impl<F> Immersion for FnSurface<F>
where
    F: Fn(Scalar2Jet, Scalar2Jet) -> [Scalar2Jet; 4] + Sync,
{
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet2> {
        let c = (self.0)(Jet2::u(u), Jet2::v(v));
        let j = SurfaceJet2::from_components((u, v), &c);
        if [j.z, j.z_u, j.z_v, j.z_uu, j.z_uv, j.z_vv]
            .iter()
            .all(MinkVector::is_finite)
        {
            Ok(j)
        } else {
            Err(crate::expr::DomainError::NonFinite { u, v }.into())
        }
    }
}

/// Positions sampled on a uniform rectangular grid, indexed `[i][j]` with `i` along `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSurface {
    pub u0: f64,
    pub v0: f64,
    pub hu: f64,
    pub hv: f64,
    pub nu: usize,
    pub nv: usize,
    pub points: Vec<MinkVector>,
}

impl SampledSurface {
    /// Sample an immersion's positions.
    pub fn sample(
        s: &SurfaceSpec,
        (u0, hu, nu): (f64, f64, usize),
        (v0, hv, nv): (f64, f64, usize),
    ) -> Result<Self> {
        let mut points = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                points.push(s.position(u0 + i as f64 * hu, v0 + j as f64 * hv)?);
            }
        }
        Ok(SampledSurface {
            u0,
            v0,
            hu,
            hv,
            nu,
            nv,
            points,
        })
    }

    /// Build from scattered `(u, v, x)` rows that fill a uniform grid.
    pub fn from_rows(rows: &[(f64, f64, MinkVector)]) -> Result<Self> {
        let mut us: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut vs: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let axis = |xs: &mut Vec<f64>| {
            xs.sort_by(f64::total_cmp);
            xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        };
        axis(&mut us);
        axis(&mut vs);
        let (nu, nv) = (us.len(), vs.len());
        if nu < 2 || nv < 2 || nu * nv != rows.len() {
            return Err(GeomError::Invalid(format!(
                "sampled grid is not rectangular ({} rows for {nu} x {nv} nodes)",
                rows.len()
            )));
        }
        let hu = (us[nu - 1] - us[0]) / (nu - 1) as f64;
        let hv = (vs[nv - 1] - vs[0]) / (nv - 1) as f64;
        let mut grid = SampledSurface {
            u0: us[0],
            v0: vs[0],
            hu,
            hv,
            nu,
            nv,
            points: vec![MinkVector::ZERO; nu * nv],
        };
        let mut seen = vec![false; nu * nv];
        for &(u, v, x) in rows {
            let (i, j) = grid
                .node_of(u, v)
                .ok_or_else(|| GeomError::Invalid(format!("row ({u}, {v}) is off the uniform grid")))?;
            seen[i * nv + j] = true;
            grid.points[i * nv + j] = x;
        }
        if seen.iter().any(|s| !s) {
            return Err(GeomError::Invalid("sampled grid has duplicate rows".into()));
        }
        Ok(grid)
    }

    pub fn at(&self, i: usize, j: usize) -> MinkVector {
        self.points[i * self.nv + j]
    }

    pub fn param(&self, i: usize, j: usize) -> (f64, f64) {
        (self.u0 + i as f64 * self.hu, self.v0 + j as f64 * self.hv)
    }

    /// Grid index of a parameter point, if it is a node.
    pub fn node_of(&self, u: f64, v: f64) -> Option<(usize, usize)> {
        let fi = (u - self.u0) / self.hu;
        let fj = (v - self.v0) / self.hv;
        let (ri, rj) = (fi.round(), fj.round());
        let close = (fi - ri).abs() < 1e-6 && (fj - rj).abs() < 1e-6;
        if !close || ri < 0.0 || rj < 0.0 {
            return None;
        }
        let (i, j) = (ri as usize, rj as usize);
        (i < self.nu && j < self.nv).then_some((i, j))
    }
}

/// Default finite-difference step for a parameter of the given magnitude.
pub fn default_step(scale: f64) -> f64 {
    f64::EPSILON.powf(0.25) * scale.abs().max(1.0)
}

const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Jet at node `(i, j)` from 5-point central stencils.
///
/// Truncation error is O(h^4). The mixed partial is one tensor-product
/// stencil, so it is symmetric by construction.
pub fn jet_from_samples(grid: &SampledSurface, (i, j): (usize, usize), (hu, hv): (f64, f64)) -> Result<SurfaceJet2> {
    if i < 2 || j < 2 || i + 2 >= grid.nu || j + 2 >= grid.nv {
        return Err(GeomError::NearBoundary { i, j });
    }
    let p = |a: isize, b: isize| grid.at((i as isize + a) as usize, (j as isize + b) as usize);
    let mut z_u = MinkVector::ZERO;
    let mut z_v = MinkVector::ZERO;
    let mut z_uu = MinkVector::ZERO;
    let mut z_vv = MinkVector::ZERO;
    let mut z_uv = MinkVector::ZERO;
    for (a, (&c1, &c2)) in D1.iter().zip(D2.iter()).enumerate() {
        let s = a as isize - 2;
        z_u += c1 * p(s, 0);
        z_v += c1 * p(0, s);
        z_uu += c2 * p(s, 0);
        z_vv += c2 * p(0, s);
        for (b, &d1) in D1.iter().enumerate() {
            let t = b as isize - 2;
            if c1 != 0.0 && d1 != 0.0 {
                z_uv += (c1 * d1) * p(s, t);
            }
        }
    }
    Ok(SurfaceJet2 {
        at: grid.param(i, j),
        z: p(0, 0),
        z_u: z_u.scale(1.0 / (12.0 * hu)),
        z_v: z_v.scale(1.0 / (12.0 * hv)),
        z_uu: z_uu.scale(1.0 / (12.0 * hu * hu)),
        z_uv: z_uv.scale(1.0 / (144.0 * hu * hv)),
        z_vv: z_vv.scale(1.0 / (12.0 * hv * hv)),
    })
}

impl Immersion for SampledSurface {
    fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet2> {
        let node = self.node_of(u, v).ok_or(GeomError::OffGrid { u, v })?;
        jet_from_samples(self, node, (self.hu, self.hv))
    }
}
