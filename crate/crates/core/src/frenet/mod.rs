//! The geometric frame `{x, y, b, l}` and its eight invariant functions.

pub mod flat;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::forms::NormalFrame;
use crate::invariants::{
    analyze_jet, orthogonal_direction, predicates, principal_tangents, sigma_of, InvariantReport, PointClass,
    Principal, TangentDirection,
};
use crate::jet::SurfaceJet2;
use crate::lorentz::{causal_class, inner, orientation_det, CausalClass, Frame4, MinkVector, DEFAULT_CAUSAL_TOL};
use crate::surface::Immersion;

/// Arc-length step of the frame-field difference stencils.
pub const ARC_STEP: f64 = 1e-4;

pub(crate) const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HCase {
    SpacelikeH,
    TimelikeH,
}

impl HCase {
    /// `+1` for spacelike `H`, `-1` for timelike `H`.
    pub fn sign(self) -> f64 {
        match self {
            HCase::SpacelikeH => 1.0,
            HCase::TimelikeH => -1.0,
        }
    }
}

/// `γ₁, γ₂, ν₁, ν₂, λ, μ, β₁, β₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EightFunctions {
    pub gamma1: f64,
    pub gamma2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub lambda: f64,
    pub mu: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl EightFunctions {
    pub const NAMES: [&'static str; 8] = ["gamma1", "gamma2", "nu1", "nu2", "lambda", "mu", "beta1", "beta2"];

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.gamma1,
            self.gamma2,
            self.nu1,
            self.nu2,
            self.lambda,
            self.mu,
            self.beta1,
            self.beta2,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        EightFunctions {
            gamma1: a[0],
            gamma2: a[1],
            nu1: a[2],
            nu2: a[3],
            lambda: a[4],
            mu: a[5],
            beta1: a[6],
            beta2: a[7],
        }
    }

    /// Flip `b` by `eps_b` and `l` by `eps_l`.
    pub fn regauge(&self, case: HCase, eps_b: f64, eps_l: f64) -> Self {
        let (along_h, across) = match case {
            HCase::SpacelikeH => (eps_b, eps_l),
            HCase::TimelikeH => (eps_l, eps_b),
        };
        EightFunctions {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            nu1: along_h * self.nu1,
            nu2: along_h * self.nu2,
            lambda: along_h * self.lambda,
            mu: across * self.mu,
            beta1: eps_b * eps_l * self.beta1,
            beta2: eps_b * eps_l * self.beta2,
        }
    }

    /// Matrices `Kx`, `Ky` with `∇'_x Z = Kx Z`, `∇'_y Z = Ky Z` for `Z = (x, y, b, l)`.
    pub fn structure_matrices(&self, case: HCase) -> ([[f64; 4]; 4], [[f64; 4]; 4]) {
        let EightFunctions {
            gamma1: g1,
            gamma2: g2,
            nu1: n1,
            nu2: n2,
            lambda: la,
            mu,
            beta1: b1,
            beta2: b2,
        } = *self;
        match case {
            HCase::SpacelikeH => (
                [
                    [0.0, g1, n1, 0.0],
                    [-g1, 0.0, la, -mu],
                    [-n1, -la, 0.0, -b1],
                    [0.0, -mu, -b1, 0.0],
                ],
                [
                    [0.0, -g2, la, -mu],
                    [g2, 0.0, n2, 0.0],
                    [-la, -n2, 0.0, -b2],
                    [-mu, 0.0, -b2, 0.0],
                ],
            ),
            HCase::TimelikeH => (
                [
                    [0.0, g1, 0.0, -n1],
                    [-g1, 0.0, mu, -la],
                    [0.0, -mu, 0.0, -b1],
                    [-n1, -la, -b1, 0.0],
                ],
                [
                    [0.0, -g2, mu, -la],
                    [g2, 0.0, 0.0, -n2],
                    [-mu, 0.0, 0.0, -b2],
                    [-la, -n2, -b2, 0.0],
                ],
            ),
        }
    }
}

/// The pointwise part of the frame: everything except `γ` and `β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointFrame {
    pub frame: Frame4,
    pub xdir: TangentDirection,
    pub ydir: TangentDirection,
    pub nu1: f64,
    pub nu2: f64,
    pub lambda: f64,
    pub mu: f64,
    pub h_case: HCase,
}

/// Build `{x, y, b, l}` at a jet.
///
/// `x` is the principal tangent most aligned with `z_u`, or with `prefer`
/// when given; `y = X^⊥`.
pub fn point_frame(jet: &SurfaceJet2, prefer: Option<&MinkVector>) -> Result<PointFrame> {
    let pa = analyze_jet(jet)?;
    point_frame_from(jet, &pa.report, &pa.frame, &pa.tensor, prefer)
}

fn point_frame_from(
    jet: &SurfaceJet2,
    report: &InvariantReport,
    nf: &NormalFrame,
    tensor: &crate::forms::SecondTensor,
    prefer: Option<&MinkVector>,
) -> Result<PointFrame> {
    let (u, v) = jet.at;
    let ff = &report.first;
    if report.point_class == PointClass::Flat {
        return Err(GeomError::FlatPoint { what: "Frenet frame" });
    }
    if predicates(report).is_minimal {
        return Err(GeomError::MinimalPoint { u, v });
    }
    let xdir = match principal_tangents(&report.second, ff) {
        Principal::Pair([d1, d2]) => match prefer {
            Some(p) => {
                let a1 = inner(&d1.ambient(jet), p).abs();
                let a2 = inner(&d2.ambient(jet), p).abs();
                if a2 > a1 {
                    d2
                } else {
                    d1
                }
            }
            None => d1,
        },
        Principal::All => return Err(GeomError::MinimalPoint { u, v }),
    };
    let ydir = orthogonal_direction(&xdir, ff);
    let x = xdir.ambient(jet);
    let y = ydir.ambient(jet);
    let sxx = sigma_of(tensor, nf, &xdir, &xdir);
    let sxy = sigma_of(tensor, nf, &xdir, &ydir);
    let syy = sigma_of(tensor, nf, &ydir, &ydir);
    let h = 0.5 * (sxx + syy);
    let class = causal_class(&h, DEFAULT_CAUSAL_TOL).map_err(|_| GeomError::MinimalPoint { u, v })?;
    let hn = h.norm_sq().abs().sqrt();
    let [h1, h2] = nf.coords(&h.scale(1.0 / hn));
    let partner = nf.vector([h2, h1]);
    let (b, l, h_case) = match class {
        CausalClass::Spacelike => (h.scale(1.0 / hn), partner, HCase::SpacelikeH),
        CausalClass::Timelike => (partner, h.scale(-1.0 / hn), HCase::TimelikeH),
        CausalClass::Lightlike => return Err(GeomError::LightlikeMeanCurvature { u, v }),
    };
    let (b, l) = match h_case {
        HCase::SpacelikeH if orientation_det(&x, &y, &b, &l) <= 0.0 => (b, -l),
        HCase::TimelikeH if orientation_det(&x, &y, &b, &l) <= 0.0 => (-b, l),
        _ => (b, l),
    };
    let (nu1, nu2, lambda, mu) = match h_case {
        HCase::SpacelikeH => (inner(&sxx, &b), inner(&syy, &b), inner(&sxy, &b), inner(&sxy, &l)),
        HCase::TimelikeH => (inner(&sxx, &l), inner(&syy, &l), inner(&sxy, &l), inner(&sxy, &b)),
    };
    let gap = report.kappa * report.kappa - report.k;
    if mu.abs() <= report.tol && gap > report.tol {
        return Err(GeomError::MuInconsistent { u, v, mu });
    }
    Ok(PointFrame {
        frame: Frame4([x, y, b, l]),
        xdir,
        ydir,
        nu1,
        nu2,
        lambda,
        mu,
        h_case,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub at: (f64, f64),
    pub x: MinkVector,
    pub y: MinkVector,
    pub b: MinkVector,
    pub l: MinkVector,
    pub nu1: f64,
    pub nu2: f64,
    pub lambda: f64,
    pub mu: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub h_case: HCase,
}

impl FrenetData {
    pub fn frame(&self) -> Frame4 {
        Frame4([self.x, self.y, self.b, self.l])
    }

    pub fn functions(&self) -> EightFunctions {
        EightFunctions {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            nu1: self.nu1,
            nu2: self.nu2,
            lambda: self.lambda,
            mu: self.mu,
            beta1: self.beta1,
            beta2: self.beta2,
        }
    }

    /// Replace `b` by `eps_b b` and `l` by `eps_l l`, transforming the functions to match.
    pub fn regauge(&self, eps_b: f64, eps_l: f64) -> FrenetData {
        let f = self.functions().regauge(self.h_case, eps_b, eps_l);
        FrenetData {
            b: eps_b * self.b,
            l: eps_l * self.l,
            nu1: f.nu1,
            nu2: f.nu2,
            lambda: f.lambda,
            mu: f.mu,
            beta1: f.beta1,
            beta2: f.beta2,
            ..*self
        }
    }

    /// Mean curvature vector rebuilt from the frame functions.
    pub fn mean_curvature(&self) -> MinkVector {
        let s = 0.5 * (self.nu1 + self.nu2);
        match self.h_case {
            HCase::SpacelikeH => s * self.b,
            HCase::TimelikeH => -s * self.l,
        }
    }
}

/// Frame derivatives along `x` and `y`, rows in slot order `(x, y, b, l)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameDerivatives {
    pub along_x: [MinkVector; 4],
    pub along_y: [MinkVector; 4],
}

fn align_to(f: &mut Frame4, reference: &Frame4) {
    for k in 0..4 {
        let d: f64 = (0..4).map(|c| f.0[k][c] * reference.0[k][c]).sum();
        if d < 0.0 {
            f.0[k] = -f.0[k];
        }
    }
}

/// Frenet data at `at`, with `γ`, `β` from 5-point differences of the frame field.
///
/// `steps` are the parameter steps of the stencil; by default they give an
/// arc-length step of about [`ARC_STEP`] in each coordinate direction.
pub fn frenet_at(surface: &dyn Immersion, at: (f64, f64), steps: Option<(f64, f64)>) -> Result<FrenetData> {
    frenet_with_derivatives(surface, at, steps).map(|(fd, _)| fd)
}

pub fn frenet_with_derivatives(
    surface: &dyn Immersion,
    at: (f64, f64),
    steps: Option<(f64, f64)>,
) -> Result<(FrenetData, FrameDerivatives)> {
    let jet = surface.jet(at.0, at.1)?;
    let pa = analyze_jet(&jet)?;
    let pf = point_frame_from(&jet, &pa.report, &pa.frame, &pa.tensor, None)?;
    let (hu, hv) = steps.unwrap_or((ARC_STEP / pa.report.first.e.sqrt(), ARC_STEP / pa.report.first.g.sqrt()));
    let x0 = pf.frame.0[0];
    let mut du = [MinkVector::ZERO; 4];
    let mut dv = [MinkVector::ZERO; 4];
    for (k, &c) in D1.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let s = k as f64 - 2.0;
        for (dir, acc, h) in [(0usize, &mut du, hu), (1usize, &mut dv, hv)] {
            let p = if dir == 0 { (at.0 + s * h, at.1) } else { (at.0, at.1 + s * h) };
            let nb = point_frame(&surface.jet(p.0, p.1)?, Some(&x0))?;
            if nb.h_case != pf.h_case {
                return Err(GeomError::Invalid(format!(
                    "mean curvature changes causal type within the difference stencil at {p:?}"
                )));
            }
            let mut f = nb.frame;
            align_to(&mut f, &pf.frame);
            for slot in 0..4 {
                acc[slot] += (c / (12.0 * h)) * f.0[slot];
            }
        }
    }
    let dir_derivative = |d: &TangentDirection| -> [MinkVector; 4] {
        std::array::from_fn(|s| d.lambda * du[s] + d.mu * dv[s])
    };
    let along_x = dir_derivative(&pf.xdir);
    let along_y = dir_derivative(&pf.ydir);
    let [x, y, b, l] = pf.frame.0;
    let fd = FrenetData {
        at,
        x,
        y,
        b,
        l,
        nu1: pf.nu1,
        nu2: pf.nu2,
        lambda: pf.lambda,
        mu: pf.mu,
        beta1: inner(&along_x[2], &l),
        beta2: inner(&along_y[2], &l),
        gamma1: inner(&along_x[0], &y),
        gamma2: inner(&along_y[1], &x),
        h_case: pf.h_case,
    };
    Ok((fd, FrameDerivatives { along_x, along_y }))
}

/// Largest deviation between measured frame derivatives and the structure equations.
pub fn structure_residual(fd: &FrenetData, d: &FrameDerivatives) -> f64 {
    let (kx, ky) = fd.functions().structure_matrices(fd.h_case);
    let frame = fd.frame();
    let mut worst = 0.0f64;
    for s in 0..4 {
        let px = frame.combine(kx[s]);
        let py = frame.combine(ky[s]);
        worst = worst.max(px.max_abs_diff(&d.along_x[s]));
        worst = worst.max(py.max_abs_diff(&d.along_y[s]));
    }
    worst
}

/// Frenet data over a row-major grid; refuses a change of causal type of `H`.
pub fn frenet_grid(surface: &dyn Immersion, us: &[f64], vs: &[f64], steps: Option<(f64, f64)>) -> Result<Vec<FrenetData>> {
    let nv = vs.len();
    let out: Vec<FrenetData> = (0..us.len() * nv)
        .into_par_iter()
        .map(|idx| frenet_at(surface, (us[idx / nv], vs[idx % nv]), steps))
        .collect::<Result<_>>()?;
    let case0 = out.first().map(|f| f.h_case);
    if let Some(bad) = out.iter().position(|f| Some(f.h_case) != case0) {
        let (i1, j1) = (bad / nv, bad % nv);
        let (i0, j0) = if j1 > 0 { (i1, j1 - 1) } else { (i1.saturating_sub(1), j1) };
        return Err(GeomError::CausalChange { i0, j0, i1, j1 });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub k_residual: f64,
    pub kappa_residual: f64,
    pub gauss_residual: f64,
    pub h_norm_residual: f64,
    pub h_norm: f64,
}

impl Consistency {
    pub fn max(&self) -> f64 {
        self.k_residual
            .abs()
            .max(self.kappa_residual.abs())
            .max(self.gauss_residual.abs())
            .max(self.h_norm_residual.abs())
    }
}

/// Compare the frame functions against independently computed `k`, `ϰ`, `K`, `|H|`.
///
/// For timelike `H` the normal curvature relation is `ϰ = -(ν₁ - ν₂)μ`.
pub fn consistency(fd: &FrenetData, report: &InvariantReport) -> Consistency {
    let s = fd.h_case.sign();
    let (n1, n2, la, mu) = (fd.nu1, fd.nu2, fd.lambda, fd.mu);
    let h_norm = report.h.norm_sq().abs().sqrt();
    Consistency {
        k_residual: report.k + 4.0 * n1 * n2 * mu * mu,
        kappa_residual: report.kappa - s * (n1 - n2) * mu,
        gauss_residual: report.gauss - s * (n1 * n2 - la * la + mu * mu),
        h_norm_residual: h_norm - (report.kappa * report.kappa - report.k).max(0.0).sqrt() / (2.0 * mu.abs()),
        h_norm,
    }
}

/// Allied mean curvature vector and the Chen criterion `|λ| ≤ tol`.
pub fn allied_and_chen(fd: &FrenetData, tol: f64) -> (MinkVector, bool) {
    let c = 0.5 * (fd.nu1 + fd.nu2) * fd.lambda * fd.mu;
    let a = match fd.h_case {
        HCase::SpacelikeH => c * fd.l,
        HCase::TimelikeH => c * fd.b,
    };
    (a, fd.lambda.abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::analyze;
    use crate::surface::SurfaceSpec;

    fn de_sitter() -> SurfaceSpec {
        SurfaceSpec::parse(
            "m1",
            ["cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)*cosh(v)", "sin(u)*sinh(v)"],
        )
        .unwrap()
    }

    fn hyperbolic_sphere() -> SurfaceSpec {
        SurfaceSpec::parse(
            "m2",
            ["sinh(u)*cos(v)", "sinh(u)*sin(v)", "cosh(u)*sinh(v)", "cosh(u)*cosh(v)"],
        )
        .unwrap()
    }

    #[test]
    fn de_sitter_frame_at_origin() {
        let s = de_sitter();
        let (fd, d) = frenet_with_derivatives(&s, (0.0, 0.2), None).unwrap();
        assert_eq!(fd.h_case, HCase::SpacelikeH);
        assert!(fd.frame().orthonormality_drift() < 1e-12);
        assert!(fd.frame().det() > 0.0);
        // geometric gauge: b along H
        assert!((fd.nu1 - 1.0).abs() < 1e-12 && (fd.nu2 - 1.0).abs() < 1e-12);
        assert!((fd.mu.abs() - 1.0).abs() < 1e-12);
        for g in [fd.gamma1, fd.gamma2, fd.lambda, fd.beta1, fd.beta2] {
            assert!(g.abs() < 1e-9, "{fd:?}");
        }
        assert!(structure_residual(&fd, &d) < 1e-8);
        let r = analyze(&s, 0.0, 0.2).unwrap().report;
        let c = consistency(&fd, &r);
        assert!(c.max() < 1e-9, "{c:?}");
        assert!((c.h_norm - 1.0).abs() < 1e-12);
        let (a, chen) = allied_and_chen(&fd, 1e-10);
        assert!(chen && a.euclid_norm() < 1e-10);
    }

    #[test]
    fn generic_points_satisfy_structure_equations() {
        for (s, at) in [(de_sitter(), (0.3, 0.4)), (hyperbolic_sphere(), (0.5, -0.3))] {
            let (fd, d) = frenet_with_derivatives(&s, at, None).unwrap();
            assert!(structure_residual(&fd, &d) < 1e-7, "{}", structure_residual(&fd, &d));
            let r = analyze(&s, at.0, at.1).unwrap().report;
            assert!(consistency(&fd, &r).max() < 1e-9, "{:?}", consistency(&fd, &r));
        }
    }

    #[test]
    fn hyperbolic_sphere_is_timelike_case() {
        let s = hyperbolic_sphere();
        let fd = frenet_at(&s, (0.0, 0.0), None).unwrap();
        assert_eq!(fd.h_case, HCase::TimelikeH);
        assert!(fd.frame().det() > 0.0);
        let r = analyze(&s, 0.0, 0.0).unwrap().report;
        let c = consistency(&fd, &r);
        assert!(c.max() < 1e-9, "{c:?}");
        assert!((r.gauss + 2.0).abs() < 1e-12);
        assert!(allied_and_chen(&fd, 1e-10).1);
    }

    #[test]
    fn plane_and_minimal_points_are_errors() {
        let err = frenet_at(&SurfaceSpec::plane(), (0.0, 0.0), None).unwrap_err();
        assert!(matches!(err, GeomError::FlatPoint { .. }));
    }

    #[test]
    fn synthetic_non_chen() {
        let s = de_sitter();
        let mut fd = frenet_at(&s, (0.2, 0.0), None).unwrap();
        fd.lambda = 0.5;
        let (a, chen) = allied_and_chen(&fd, 1e-10);
        assert!(!chen && a.euclid_norm() > 0.0);
    }

    #[test]
    fn regauge_preserves_structure_equations() {
        let s = hyperbolic_sphere();
        let (fd, d) = frenet_with_derivatives(&s, (0.4, 0.1), None).unwrap();
        for (eb, el) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let g = fd.regauge(eb, el);
            let mut dd = d;
            dd.along_x[2] = eb * d.along_x[2];
            dd.along_y[2] = eb * d.along_y[2];
            dd.along_x[3] = el * d.along_x[3];
            dd.along_y[3] = el * d.along_y[3];
            assert!(structure_residual(&g, &dd) < 1e-7);
        }
    }
}
