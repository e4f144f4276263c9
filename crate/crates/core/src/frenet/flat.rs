//! Surfaces made of flat points: the hyperplane / developable dichotomy.

use serde::{Deserialize, Serialize};

use super::{ARC_STEP, D1};
use crate::error::{GeomError, Result};
use crate::forms::NormalFrame;
use crate::invariants::{analyze_jet, orthonormal_tangents, sigma_orthonormal, PointClass};
use crate::lorentz::{inner, orientation_det, MinkVector};
use crate::surface::Immersion;

/// `|β₁|, |β₂|` below this count as zero.
pub const BETA_ZERO_TOL: f64 = 1e-7;

/// Euclidean size of `σ` below which it counts as zero (a planar point).
const SIGMA_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FlatBranch {
    HyperplaneCandidate {
        normal: MinkVector,
        max_normal_deviation: f64,
    },
    DevelopableCandidate {
        zero_curvature_residual: f64,
    },
}

/// Frame functions at one flat point, in the frame `{x, y, n, l}` or `{x, y, b, n}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatNode {
    pub at: (f64, f64),
    pub n_timelike: bool,
    pub nu1: f64,
    pub nu2: f64,
    pub lambda: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// The normal orthogonal to `σ`; constant on the hyperplane branch.
    pub partner: MinkVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatScan {
    pub branch: FlatBranch,
    pub nodes: Vec<FlatNode>,
    pub max_beta: f64,
    /// `max |ν₁β₂ − λβ₁|, max |−λβ₂ + ν₂β₁|`.
    pub coupling_residuals: [f64; 2],
}

struct LocalFrame {
    /// `(b, l)`; `σ` lies along `b` when `n_timelike` is false, along `l` otherwise.
    normals: [MinkVector; 2],
    n_timelike: bool,
    sigma: [MinkVector; 3],
    dirs: [(f64, f64); 2],
    sqrt_eg: (f64, f64),
}

fn local_frame(surface: &dyn Immersion, u: f64, v: f64, reference: Option<&LocalFrame>) -> Result<LocalFrame> {
    let jet = surface.jet(u, v)?;
    let pa = analyze_jet(&jet)?;
    if pa.report.point_class != PointClass::Flat {
        return Err(GeomError::Invalid(format!(
            "({u}, {v}) is not a flat point (k = {:.3e}, kappa = {:.3e})",
            pa.report.k, pa.report.kappa
        )));
    }
    let ff = pa.report.first;
    let (x, y) = orthonormal_tangents(&jet)?;
    let sigma = sigma_orthonormal(&pa.tensor, &ff, &pa.frame);
    let big = sigma
        .iter()
        .copied()
        .max_by(|a, b| a.euclid_norm().total_cmp(&b.euclid_norm()))
        .unwrap_or(MinkVector::ZERO);
    let nf: NormalFrame = pa.frame;
    let (mut b, mut l, n_timelike) = if big.euclid_norm() < SIGMA_ZERO_TOL {
        (nf.n1, nf.n2, false)
    } else {
        let [c1, c2] = nf.coords(&big);
        let norm = (c1 * c1 - c2 * c2).abs().sqrt();
        let (c1, c2) = (c1 / norm, c2 / norm);
        let n = nf.vector([c1, c2]);
        let partner = nf.vector([c2, c1]);
        if c1.abs() >= c2.abs() {
            (n, partner, false)
        } else {
            (partner, n, true)
        }
    };
    if orientation_det(&x, &y, &b, &l) <= 0.0 {
        if n_timelike {
            b = -b;
        } else {
            l = -l;
        }
    }
    if let Some(r) = reference {
        let e = |a: &MinkVector, c: &MinkVector| (0..4).map(|k| a[k] * c[k]).sum::<f64>();
        if e(&b, &r.normals[0]) < 0.0 {
            b = -b;
        }
        if e(&l, &r.normals[1]) < 0.0 {
            l = -l;
        }
    }
    let sqe = ff.e.sqrt();
    Ok(LocalFrame {
        normals: [b, l],
        n_timelike,
        sigma,
        dirs: [(1.0 / sqe, 0.0), (-ff.f / (sqe * ff.w), sqe / ff.w)],
        sqrt_eg: (sqe, ff.g.sqrt()),
    })
}

fn flat_node(surface: &dyn Immersion, at: (f64, f64), steps: Option<(f64, f64)>) -> Result<FlatNode> {
    let c = local_frame(surface, at.0, at.1, None)?;
    let (hu, hv) = steps.unwrap_or((ARC_STEP / c.sqrt_eg.0, ARC_STEP / c.sqrt_eg.1));
    let mut db = [MinkVector::ZERO; 2];
    for (k, &w) in D1.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let s = k as f64 - 2.0;
        for (dir, h) in [(0usize, hu), (1usize, hv)] {
            let p = if dir == 0 { (at.0 + s * h, at.1) } else { (at.0, at.1 + s * h) };
            let nb = local_frame(surface, p.0, p.1, Some(&c))?;
            db[dir] += (w / (12.0 * h)) * nb.normals[0];
        }
    }
    let along = |(a, b): (f64, f64)| a * db[0] + b * db[1];
    let [b, l] = c.normals;
    let n = if c.n_timelike { l } else { b };
    let [sxx, sxy, syy] = c.sigma;
    Ok(FlatNode {
        at,
        n_timelike: c.n_timelike,
        nu1: inner(&sxx, &n),
        nu2: inner(&syy, &n),
        lambda: inner(&sxy, &n),
        beta1: inner(&along(c.dirs[0]), &l),
        beta2: inner(&along(c.dirs[1]), &l),
        partner: if c.n_timelike { b } else { l },
    })
}

/// Scan a grid of flat points and report which branch of the dichotomy the data supports.
pub fn flat_point_scan(surface: &dyn Immersion, us: &[f64], vs: &[f64], steps: Option<(f64, f64)>) -> Result<FlatScan> {
    let mut nodes = Vec::with_capacity(us.len() * vs.len());
    for &u in us {
        for &v in vs {
            nodes.push(flat_node(surface, (u, v), steps)?);
        }
    }
    let first = nodes.first().ok_or_else(|| GeomError::Invalid("empty grid".into()))?;
    let reference = first.partner;
    let mut max_beta = 0.0f64;
    let mut deviation = 0.0f64;
    let mut curvature = 0.0f64;
    let mut coupling = [0.0f64; 2];
    for nd in &nodes {
        max_beta = max_beta.max(nd.beta1.abs()).max(nd.beta2.abs());
        let aligned = if inner(&nd.partner, &reference) * inner(&reference, &reference) < 0.0 {
            -nd.partner
        } else {
            nd.partner
        };
        deviation = deviation.max(aligned.max_abs_diff(&reference));
        curvature = curvature.max((nd.nu1 * nd.nu2 - nd.lambda * nd.lambda).abs());
        coupling[0] = coupling[0].max((nd.nu1 * nd.beta2 - nd.lambda * nd.beta1).abs());
        coupling[1] = coupling[1].max((-nd.lambda * nd.beta2 + nd.nu2 * nd.beta1).abs());
    }
    let branch = if max_beta <= BETA_ZERO_TOL {
        FlatBranch::HyperplaneCandidate {
            normal: reference,
            max_normal_deviation: deviation,
        }
    } else {
        FlatBranch::DevelopableCandidate {
            zero_curvature_residual: curvature,
        }
    };
    Ok(FlatScan {
        branch,
        nodes,
        max_beta,
        coupling_residuals: coupling,
    })
}
