//! Pointwise invariants: L, M, N, normal curvature, k, ϰ, H, K,
//! principal and asymptotic tangents, indicatrix and curvature ellipse.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::FunctionExpr;
use crate::forms::{first_form, normal_frame, second_tensor, tangent_basis, FirstForm, NormalFrame, SecondTensor};
use crate::jet::SurfaceJet2;
use crate::lorentz::{causal_class, inner, CausalClass, MinkVector, DEFAULT_CAUSAL_TOL};
use crate::surface::Immersion;

/// Default classification tolerance, relative to `max(|L|, |M|, |N|, 1)`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-9;

/// Singular value ratio below which the curvature ellipse is a segment.
pub const ELLIPSE_SEGMENT_RATIO: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondForm {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl SecondForm {
    /// `II(λ, μ) = Lλ² + 2Mλμ + Nμ²`.
    pub fn quad(&self, lambda: f64, mu: f64) -> f64 {
        self.l * lambda * lambda + 2.0 * self.m * lambda * mu + self.n * mu * mu
    }

    pub fn scale(&self) -> f64 {
        self.l.abs().max(self.m.abs()).max(self.n.abs()).max(1.0)
    }
}

pub fn second_form(t: &SecondTensor, ff: &FirstForm) -> SecondForm {
    let delta1 = t.c11_1 * t.c12_2 - t.c12_1 * t.c11_2;
    let delta2 = t.c11_1 * t.c22_2 - t.c22_1 * t.c11_2;
    let delta3 = t.c12_1 * t.c22_2 - t.c22_1 * t.c12_2;
    SecondForm {
        delta1,
        delta2,
        delta3,
        l: 2.0 * delta1 / ff.w,
        m: delta2 / ff.w,
        n: 2.0 * delta3 / ff.w,
    }
}

/// A tangent direction `λ z_u + μ z_v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentDirection {
    pub lambda: f64,
    pub mu: f64,
}

impl TangentDirection {
    pub fn new(lambda: f64, mu: f64) -> Self {
        TangentDirection { lambda, mu }
    }

    /// Rescale to unit length with `λ > 0`, or `μ > 0` when `λ = 0`.
    pub fn normalized(&self, ff: &FirstForm) -> Self {
        let len = ff.quad(self.lambda, self.mu).sqrt();
        let sign = if self.lambda > 0.0 || (self.lambda == 0.0 && self.mu > 0.0) {
            1.0
        } else {
            -1.0
        };
        TangentDirection::new(sign * self.lambda / len, sign * self.mu / len)
    }

    pub fn ambient(&self, jet: &SurfaceJet2) -> MinkVector {
        self.lambda * jet.z_u + self.mu * jet.z_v
    }
}

pub fn zeta(g1: &TangentDirection, g2: &TangentDirection, sf: &SecondForm, ff: &FirstForm) -> f64 {
    // Grouped so that swapping g1 and g2 gives bit-identical results.
    let num = sf.l * (g1.lambda * g2.lambda)
        + sf.m * (g1.lambda * g2.mu + g1.mu * g2.lambda)
        + sf.n * (g1.mu * g2.mu);
    num / (ff.quad(g1.lambda, g1.mu).sqrt() * ff.quad(g2.lambda, g2.mu).sqrt())
}

pub fn normal_curvature(g: &TangentDirection, sf: &SecondForm, ff: &FirstForm) -> f64 {
    sf.quad(g.lambda, g.mu) / ff.quad(g.lambda, g.mu)
}

pub fn geodesic_torsion(g: &TangentDirection, sf: &SecondForm, ff: &FirstForm) -> f64 {
    let (a, b, c) = principal_coeffs(sf, ff);
    let (l, m) = (g.lambda, g.mu);
    (a * l * l + b * l * m + c * m * m) / (ff.w * ff.quad(l, m))
}

fn principal_coeffs(sf: &SecondForm, ff: &FirstForm) -> (f64, f64, f64) {
    (
        ff.e * sf.m - ff.f * sf.l,
        ff.e * sf.n - ff.g * sf.l,
        ff.f * sf.n - ff.g * sf.m,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weingarten {
    pub gamma11: f64,
    pub gamma12: f64,
    pub gamma21: f64,
    pub gamma22: f64,
    pub k: f64,
    pub kappa: f64,
    /// Roots of `ν² + 2ϰν + k = 0`.
    pub char_roots: (f64, f64),
}

pub fn weingarten(sf: &SecondForm, ff: &FirstForm) -> Weingarten {
    let w2 = ff.w * ff.w;
    let gamma11 = (ff.f * sf.m - ff.g * sf.l) / w2;
    let gamma12 = (ff.f * sf.l - ff.e * sf.m) / w2;
    let gamma21 = (ff.f * sf.n - ff.g * sf.m) / w2;
    let gamma22 = (ff.f * sf.m - ff.e * sf.n) / w2;
    let k = (sf.l * sf.n - sf.m * sf.m) / w2;
    let kappa = (ff.e * sf.n + ff.g * sf.l - 2.0 * ff.f * sf.m) / (2.0 * w2);
    let r = (kappa * kappa - k).max(0.0).sqrt();
    Weingarten {
        gamma11,
        gamma12,
        gamma21,
        gamma22,
        k,
        kappa,
        char_roots: (-kappa - r, -kappa + r),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    Flat,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn classify_point(k: f64, kappa: f64, tol: f64) -> PointClass {
    if k > tol {
        PointClass::Elliptic
    } else if k < -tol {
        PointClass::Hyperbolic
    } else if kappa.abs() > tol {
        PointClass::Parabolic
    } else {
        PointClass::Flat
    }
}

/// Roots of `aλ² + bλμ + cμ²` in projective form.
fn projective_roots(a: f64, b: f64, c: f64, tol: f64) -> Roots {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale <= tol {
        return Roots::All;
    }
    let d = b * b - 4.0 * a * c;
    if d.abs() <= tol * scale {
        let r = if a.abs() >= c.abs() { (-b, 2.0 * a) } else { (2.0 * c, -b) };
        return Roots::One(r);
    }
    if d < 0.0 {
        return Roots::None;
    }
    let sb = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sb * d.sqrt());
    Roots::Two((q, a), (c, q))
}

enum Roots {
    All,
    None,
    One((f64, f64)),
    Two((f64, f64), (f64, f64)),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Principal {
    /// Two distinct, I-orthogonal principal tangents.
    Pair([TangentDirection; 2]),
    /// Every tangent is principal (flat or minimal point).
    All,
}

/// Principal tangents, the `u`-aligned one first.
pub fn principal_tangents(sf: &SecondForm, ff: &FirstForm) -> Principal {
    let (a, b, c) = principal_coeffs(sf, ff);
    let tol = DEFAULT_CLASSIFY_TOL * sf.scale() * ff.e.max(ff.g).max(ff.f.abs());
    match projective_roots(a, b, c, tol) {
        Roots::Two(r1, r2) => {
            let d1 = TangentDirection::new(r1.0, r1.1).normalized(ff);
            let d2 = TangentDirection::new(r2.0, r2.1).normalized(ff);
            let align = |d: &TangentDirection| ff.bilinear((d.lambda, d.mu), (1.0, 0.0)).abs();
            if align(&d2) > align(&d1) {
                Principal::Pair([d2, d1])
            } else {
                Principal::Pair([d1, d2])
            }
        }
        // The discriminant is a non-negative multiple of ϰ² - k, so a repeated
        // root only occurs numerically on the degenerate locus.
        _ => Principal::All,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Asymptotic {
    None,
    One(TangentDirection),
    Two([TangentDirection; 2]),
    WholePlane,
}

pub fn asymptotic_tangents(sf: &SecondForm, ff: &FirstForm) -> Asymptotic {
    let tol = DEFAULT_CLASSIFY_TOL * sf.scale();
    match projective_roots(sf.l, 2.0 * sf.m, sf.n, tol) {
        Roots::All => Asymptotic::WholePlane,
        Roots::None => Asymptotic::None,
        Roots::One(r) => Asymptotic::One(TangentDirection::new(r.0, r.1).normalized(ff)),
        Roots::Two(r1, r2) => Asymptotic::Two([
            TangentDirection::new(r1.0, r1.1).normalized(ff),
            TangentDirection::new(r2.0, r2.1).normalized(ff),
        ]),
    }
}

/// `X^⊥` for `X = λ z_u + μ z_v`, with `{X, X^⊥}` positively oriented.
pub fn orthogonal_direction(g: &TangentDirection, ff: &FirstForm) -> TangentDirection {
    TangentDirection::new(
        -(ff.f * g.lambda + ff.g * g.mu) / ff.w,
        (ff.e * g.lambda + ff.f * g.mu) / ff.w,
    )
}

/// `σ(x,x)`, `σ(x,y)`, `σ(y,y)` for the orthonormal pair of [`tangent_basis`].
pub fn sigma_orthonormal(t: &SecondTensor, ff: &FirstForm, frame: &NormalFrame) -> [MinkVector; 3] {
    let s11 = t.sigma(frame, (1, 1));
    let s12 = t.sigma(frame, (1, 2));
    let s22 = t.sigma(frame, (2, 2));
    let r = ff.f / ff.e;
    let sxx = s11.scale(1.0 / ff.e);
    let sxy = (s12 - r * s11).scale(1.0 / ff.w);
    let syy = (s22 - (2.0 * r) * s12 + (r * r) * s11).scale(ff.e / (ff.w * ff.w));
    [sxx, sxy, syy]
}

/// `σ(X, Y)` for arbitrary tangent directions.
pub fn sigma_of(t: &SecondTensor, frame: &NormalFrame, a: &TangentDirection, b: &TangentDirection) -> MinkVector {
    let s11 = t.sigma(frame, (1, 1));
    let s12 = t.sigma(frame, (1, 2));
    let s22 = t.sigma(frame, (2, 2));
    (a.lambda * b.lambda) * s11 + (a.lambda * b.mu + a.mu * b.lambda) * s12 + (a.mu * b.mu) * s22
}

pub fn mean_curvature(t: &SecondTensor, ff: &FirstForm, frame: &NormalFrame) -> (MinkVector, Option<CausalClass>) {
    let s11 = t.sigma(frame, (1, 1));
    let s12 = t.sigma(frame, (1, 2));
    let s22 = t.sigma(frame, (2, 2));
    let h = (ff.g * s11 - (2.0 * ff.f) * s12 + ff.e * s22).scale(0.5 / (ff.w * ff.w));
    let class = causal_class(&h, DEFAULT_CAUSAL_TOL).ok();
    (h, class)
}

pub fn gauss_curvature(t: &SecondTensor, ff: &FirstForm, frame: &NormalFrame) -> f64 {
    let [sxx, sxy, syy] = sigma_orthonormal(t, ff, frame);
    inner(&sxx, &syy) - inner(&sxy, &sxy)
}

/// `<(A2 A1 - A1 A2) x, y>` for the shape operators of `n1` and `n2`.
pub fn normal_connection_commutator(t: &SecondTensor, ff: &FirstForm, frame: &NormalFrame) -> f64 {
    let [sxx, sxy, syy] = sigma_orthonormal(t, ff, frame);
    let shape = |n: &MinkVector| {
        [
            [inner(&sxx, n), inner(&sxy, n)],
            [inner(&sxy, n), inner(&syy, n)],
        ]
    };
    let a1 = shape(&frame.n1);
    let a2 = shape(&frame.n2);
    let mul = |p: [[f64; 2]; 2], q: [[f64; 2]; 2]| {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = p[i][0] * q[0][j] + p[i][1] * q[1][j];
            }
        }
        r
    };
    let c21 = mul(a2, a1);
    let c12 = mul(a1, a2);
    // Column 0 holds the image of x; its y-component is row 1.
    c21[1][0] - c12[1][0]
}

/// Every pointwise quantity at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub at: (f64, f64),
    pub first: FirstForm,
    pub second: SecondForm,
    pub k: f64,
    pub kappa: f64,
    #[serde(rename = "K")]
    pub gauss: f64,
    #[serde(rename = "H")]
    pub h: MinkVector,
    pub h_class: Option<CausalClass>,
    pub nu1p: f64,
    pub nu2p: f64,
    pub point_class: PointClass,
    pub tol: f64,
}

/// Jet, forms and report at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointAnalysis {
    pub jet: SurfaceJet2,
    pub frame: NormalFrame,
    pub tensor: SecondTensor,
    pub report: InvariantReport,
}

pub fn analyze_jet(jet: &SurfaceJet2) -> Result<PointAnalysis> {
    analyze_jet_with(jet, DEFAULT_CLASSIFY_TOL)
}

pub fn analyze_jet_with(jet: &SurfaceJet2, rel_tol: f64) -> Result<PointAnalysis> {
    let ff = first_form(jet)?;
    let frame = normal_frame(jet)?;
    let tensor = second_tensor(jet, &frame);
    let report = report_from(jet.at, &ff, &tensor, &frame, rel_tol);
    Ok(PointAnalysis {
        jet: *jet,
        frame,
        tensor,
        report,
    })
}

pub fn analyze(surface: &dyn Immersion, u: f64, v: f64) -> Result<PointAnalysis> {
    analyze_jet(&surface.jet(u, v)?)
}

pub fn report_from(
    at: (f64, f64),
    ff: &FirstForm,
    tensor: &SecondTensor,
    frame: &NormalFrame,
    rel_tol: f64,
) -> InvariantReport {
    let sf = second_form(tensor, ff);
    let wg = weingarten(&sf, ff);
    let tol = rel_tol * sf.scale();
    let (h, h_class) = mean_curvature(tensor, ff, frame);
    let (nu1p, nu2p) = match principal_tangents(&sf, ff) {
        Principal::Pair([d1, d2]) => (normal_curvature(&d1, &sf, ff), normal_curvature(&d2, &sf, ff)),
        Principal::All => (wg.kappa, wg.kappa),
    };
    InvariantReport {
        at,
        first: *ff,
        second: sf,
        k: wg.k,
        kappa: wg.kappa,
        gauss: gauss_curvature(tensor, ff, frame),
        h,
        h_class,
        nu1p,
        nu2p,
        point_class: classify_point(wg.k, wg.kappa, tol),
        tol,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndicatrixShape {
    Ellipse,
    Hyperbola,
    ParallelLines,
    Circle,
    RectangularHyperbola,
}

/// `χ: ν′X² + ν″Y² = ε` in principal coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicatrixSpec {
    pub nu1p: f64,
    pub nu2p: f64,
    pub eps: f64,
    pub shape: IndicatrixShape,
}

pub fn indicatrix(report: &InvariantReport) -> Result<IndicatrixSpec> {
    if report.point_class == PointClass::Flat {
        return Err(GeomError::FlatPoint { what: "indicatrix" });
    }
    let (a, b, tol) = (report.nu1p, report.nu2p, report.tol);
    let shape = if (a - b).abs() <= tol {
        IndicatrixShape::Circle
    } else if (a + b).abs() <= tol {
        IndicatrixShape::RectangularHyperbola
    } else {
        match report.point_class {
            PointClass::Elliptic => IndicatrixShape::Ellipse,
            PointClass::Hyperbolic => IndicatrixShape::Hyperbola,
            _ => IndicatrixShape::ParallelLines,
        }
    };
    let dominant = if a.abs() >= b.abs() { a } else { b };
    Ok(IndicatrixSpec {
        nu1p: a,
        nu2p: b,
        eps: if dominant < 0.0 { -1.0 } else { 1.0 },
        shape,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipseShape {
    NonDegenerate,
    LineSegment,
    Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseSample {
    /// Centre, in `(n1, n2)` coordinates.
    pub center: [f64; 2],
    /// Conjugate semi-diameters `(σ(x,x) - σ(y,y))/2` and `σ(x,y)`.
    pub axes: [[f64; 2]; 2],
    pub psi: Vec<f64>,
    pub coords: Vec<[f64; 2]>,
    pub ambient: Vec<MinkVector>,
    pub shape: EllipseShape,
    /// Only meaningful for a segment: its direction is parallel to `H`.
    pub collinear_with_h: bool,
    pub singular_values: [f64; 2],
}

fn singular_values(m: [[f64; 2]; 2]) -> [f64; 2] {
    let [[a, b], [c, d]] = m;
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    let hi = ((s + disc) / 2.0).sqrt();
    let lo = if hi > 0.0 { det.abs() / hi } else { 0.0 };
    [hi, lo]
}

pub fn curvature_ellipse(t: &SecondTensor, ff: &FirstForm, frame: &NormalFrame, n_samples: usize) -> EllipseSample {
    let [sxx, sxy, syy] = sigma_orthonormal(t, ff, frame);
    let (h, _) = mean_curvature(t, ff, frame);
    let c = frame.coords(&h);
    let p = frame.coords(&(0.5 * (sxx - syy)));
    let q = frame.coords(&sxy);
    let sv = singular_values([[p[0], q[0]], [p[1], q[1]]]);
    let scale = sv[0].max(c[0].abs()).max(c[1].abs()).max(1.0);
    let shape = if sv[0] <= 1e-12 * scale {
        EllipseShape::Point
    } else if sv[1] < ELLIPSE_SEGMENT_RATIO * sv[0] {
        EllipseShape::LineSegment
    } else {
        EllipseShape::NonDegenerate
    };
    let collinear_with_h = shape == EllipseShape::LineSegment && {
        let dir = if p[0].hypot(p[1]) >= q[0].hypot(q[1]) { p } else { q };
        let cross = dir[0] * c[1] - dir[1] * c[0];
        let hn = c[0].hypot(c[1]);
        hn > 0.0 && cross.abs() <= ELLIPSE_SEGMENT_RATIO * dir[0].hypot(dir[1]) * hn
    };
    let mut psi = Vec::with_capacity(n_samples);
    let mut coords = Vec::with_capacity(n_samples);
    let mut ambient = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let a = std::f64::consts::PI * s as f64 / n_samples as f64;
        let (s2, c2) = (2.0 * a).sin_cos();
        let pt = [c[0] + c2 * p[0] + s2 * q[0], c[1] + c2 * p[1] + s2 * q[1]];
        psi.push(a);
        coords.push(pt);
        ambient.push(frame.vector(pt));
    }
    EllipseSample {
        center: c,
        axes: [p, q],
        psi,
        coords,
        ambient,
        shape,
        collinear_with_h,
        singular_values: sv,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub is_minimal: bool,
    pub is_flat_normal_connection: bool,
    pub is_umbilical_free: bool,
}

/// Minimal and umbilical points coincide for spacelike surfaces, so
/// `is_umbilical_free` is the negation of `is_minimal`.
pub fn predicates(report: &InvariantReport) -> Predicates {
    let (k, kappa, tol) = (report.k, report.kappa, report.tol);
    let is_minimal = kappa * kappa - k <= tol * (kappa * kappa).max(1.0);
    Predicates {
        is_minimal,
        is_flat_normal_connection: kappa.abs() <= tol,
        is_umbilical_free: !is_minimal,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReparamCheck {
    pub zeta_old: f64,
    pub zeta_new: f64,
    pub sign: f64,
}

/// Recompute ζ after the change `u = U(ū, v̄)`, `v = V(ū, v̄)`.
///
/// The expressions use `u` and `v` for the new parameters `ū`, `v̄`; the
/// directions `g1`, `g2` are given in the new parameters too. The contract
/// is `zeta_new = sign * zeta_old` with `sign = sign J`.
pub fn reparametrize_check(
    surface: &dyn Immersion,
    change: (&FunctionExpr, &FunctionExpr),
    g1: &TangentDirection,
    g2: &TangentDirection,
    at: (f64, f64),
) -> Result<ReparamCheck> {
    let cu = change.0.lift(at.0, at.1)?;
    let cv = change.1.lift(at.0, at.1)?;
    let jac = cu.du * cv.dv - cu.dv * cv.du;
    if jac.abs() <= 1e-12 * (cu.du.abs() + cu.dv.abs() + 1.0) * (cv.du.abs() + cv.dv.abs() + 1.0) {
        return Err(GeomError::SingularChange { u: at.0, v: at.1 });
    }
    let old = surface.jet(cu.val, cv.val)?;
    let new = old.reparametrize(at, &cu, &cv);
    let push = |g: &TangentDirection| {
        TangentDirection::new(cu.du * g.lambda + cu.dv * g.mu, cv.du * g.lambda + cv.dv * g.mu)
    };
    // The normal frame is held fixed, as in the transformation law; only the
    // tangent orientation may reverse.
    let fr = normal_frame(&old)?;
    let zeta_at = |jet: &SurfaceJet2, a: &TangentDirection, b: &TangentDirection| -> Result<f64> {
        let ff = first_form(jet)?;
        let sf = second_form(&second_tensor(jet, &fr), &ff);
        Ok(zeta(a, b, &sf, &ff))
    };
    Ok(ReparamCheck {
        zeta_old: zeta_at(&old, &push(g1), &push(g2))?,
        zeta_new: zeta_at(&new, g1, g2)?,
        sign: jac.signum(),
    })
}

/// Orthonormal tangent pair at a jet, re-exported for callers that need `x, y`.
pub fn orthonormal_tangents(jet: &SurfaceJet2) -> Result<(MinkVector, MinkVector)> {
    let ff = first_form(jet)?;
    Ok(tangent_basis(jet, &ff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
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

    fn pa(s: &SurfaceSpec, u: f64, v: f64) -> PointAnalysis {
        analyze(s, u, v).unwrap()
    }

    #[test]
    fn plane_is_flat() {
        let a = pa(&SurfaceSpec::plane(), 0.3, -0.2);
        let r = &a.report;
        assert_eq!((r.second.l, r.second.m, r.second.n), (0.0, 0.0, 0.0));
        assert_eq!(r.point_class, PointClass::Flat);
        assert_eq!(r.h, MinkVector::ZERO);
        assert_eq!(r.gauss, 0.0);
        assert!(matches!(
            asymptotic_tangents(&r.second, &r.first),
            Asymptotic::WholePlane
        ));
        assert!(indicatrix(r).is_err());
        let p = predicates(r);
        assert!(p.is_minimal && p.is_flat_normal_connection);
        let g = TangentDirection::new(0.3, 0.8);
        assert_eq!(zeta(&g, &g, &r.second, &r.first), 0.0);
    }

    #[test]
    fn de_sitter_at_origin() {
        let a = pa(&de_sitter(), 0.0, 0.0);
        let r = &a.report;
        // positive orientation reverses the published sign of L and N
        assert!((r.second.l.abs() - 2.0).abs() < 1e-12);
        assert!(r.second.m.abs() < 1e-12);
        assert!((r.second.n + r.second.l).abs() < 1e-12);
        assert!((r.k + 4.0).abs() < 1e-12);
        assert!(r.kappa.abs() < 1e-12);
        assert!((r.gauss - 2.0).abs() < 1e-12);
        assert_eq!(r.point_class, PointClass::Hyperbolic);
        let x = TangentDirection::new(1.0, 0.0);
        let y = TangentDirection::new(0.0, 1.0);
        assert!((zeta(&x, &x, &r.second, &r.first).abs() - 2.0).abs() < 1e-12);
        assert!(zeta(&x, &y, &r.second, &r.first).abs() < 1e-12);
        assert!((normal_curvature(&y, &r.second, &r.first) + normal_curvature(&x, &r.second, &r.first)).abs() < 1e-12);
        assert!(geodesic_torsion(&x, &r.second, &r.first).abs() < 1e-12);
        match asymptotic_tangents(&r.second, &r.first) {
            Asymptotic::Two([d1, d2]) => {
                assert!((d1.lambda.abs() - d1.mu.abs()).abs() < 1e-12);
                assert!((d1.lambda * d2.mu + d1.mu * d2.lambda).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match principal_tangents(&r.second, &r.first) {
            Principal::Pair([d1, d2]) => {
                assert!((d1.lambda - 1.0).abs() < 1e-12 && d1.mu.abs() < 1e-12);
                assert!(d2.lambda.abs() < 1e-12 && (d2.mu - 1.0).abs() < 1e-12);
            }
            Principal::All => panic!("distinct principal tangents expected"),
        }
        let ind = indicatrix(r).unwrap();
        assert_eq!(ind.shape, IndicatrixShape::RectangularHyperbola);
        let p = predicates(r);
        assert!(p.is_flat_normal_connection && !p.is_minimal && p.is_umbilical_free);
        assert!(normal_connection_commutator(&a.tensor, &r.first, &a.frame).abs() < 1e-12);
        let el = curvature_ellipse(&a.tensor, &r.first, &a.frame, 16);
        assert_eq!(el.shape, EllipseShape::LineSegment);
        assert!(!el.collinear_with_h);
        assert_eq!(r.h_class, Some(CausalClass::Spacelike));
    }

    #[test]
    fn hyperbolic_sphere_at_origin() {
        let r = pa(&hyperbolic_sphere(), 0.0, 0.3).report;
        assert!((r.k + 4.0).abs() < 1e-12);
        assert!(r.kappa.abs() < 1e-12);
        assert!((r.gauss + 2.0).abs() < 1e-12);
        assert_eq!(r.h_class, Some(CausalClass::Timelike));
    }

    #[test]
    fn parabolic_example() {
        let s = SurfaceSpec::parse(
            "m1",
            ["(u+2)*cos(v)", "(u+2)*sin(v)", "u*cosh(v)", "u*sinh(v)"],
        )
        .unwrap();
        let r = pa(&s, 0.0, 0.0).report;
        assert!(r.k.abs() < 1e-14);
        assert!((r.kappa.abs() - 0.125).abs() < 1e-14);
        assert!((r.gauss - 0.125).abs() < 1e-14);
        assert_eq!(r.point_class, PointClass::Parabolic);
        assert!(!predicates(&r).is_minimal);
        assert_eq!(indicatrix(&r).unwrap().shape, IndicatrixShape::ParallelLines);
        assert!(matches!(asymptotic_tangents(&r.second, &r.first), Asymptotic::One(_)));
    }

    #[test]
    fn circle_indicatrix_for_minimal_input() {
        let mut r = pa(&de_sitter(), 0.2, 0.0).report;
        r.nu1p = 0.7;
        r.nu2p = 0.7;
        r.k = 0.49;
        r.kappa = 0.7;
        r.point_class = PointClass::Elliptic;
        assert_eq!(indicatrix(&r).unwrap().shape, IndicatrixShape::Circle);
        assert!(predicates(&r).is_minimal);
    }

    #[test]
    fn weingarten_roots_and_principal_curvatures() {
        let s = SurfaceSpec::parse(
            "g",
            ["u", "v", "u*u + 0.3*u*v", "0.5*v*v - 0.2*u*u*v"],
        )
        .unwrap();
        let r = pa(&s, 0.4, 0.3).report;
        let w = weingarten(&r.second, &r.first);
        assert!((r.nu1p * r.nu2p - r.k).abs() < 1e-9);
        assert!(((r.nu1p + r.nu2p) / 2.0 - r.kappa).abs() < 1e-9);
        let (a, b) = w.char_roots;
        assert!((a * b - r.k).abs() < 1e-9 && (a + b + 2.0 * r.kappa).abs() < 1e-9);
        assert!((-w.gamma11 - w.gamma22 - 2.0 * r.kappa).abs() < 1e-9);
        assert!((w.gamma11 * w.gamma22 - w.gamma12 * w.gamma21 - r.k).abs() < 1e-9);
    }

    #[test]
    fn reparametrization_examples() {
        let s = de_sitter();
        let g1 = TangentDirection::new(1.0, 0.2);
        let g2 = TangentDirection::new(-0.3, 1.0);
        let id = reparametrize_check(&s, (&parse("u").unwrap(), &parse("v").unwrap()), &g1, &g2, (0.2, 0.1)).unwrap();
        assert_eq!(id.sign, 1.0);
        assert!((id.zeta_new - id.zeta_old).abs() < 1e-12);
        let sw = reparametrize_check(&s, (&parse("v").unwrap(), &parse("u").unwrap()), &g1, &g2, (0.1, 0.2)).unwrap();
        assert_eq!(sw.sign, -1.0);
        assert!((sw.zeta_new + sw.zeta_old).abs() < 1e-12, "{sw:?}");
        assert!(sw.zeta_old.abs() > 1e-3);
        let err = reparametrize_check(&s, (&parse("u+v").unwrap(), &parse("2*u+2*v").unwrap()), &g1, &g2, (0.1, 0.1));
        assert!(matches!(err, Err(GeomError::SingularChange { .. })));
    }
}
