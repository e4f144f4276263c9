//! Built-in surfaces: the two rotational families with closed-form invariants,
//! flat test surfaces, and a seeded generator of random valid rotational specs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::{BinOp, FunctionExpr, Func};
use crate::forms::NormalFrame;
use crate::frenet::EightFunctions;
use crate::jet::{Dual, Jet2, Scalar};
use crate::lorentz::{Frame4, MinkVector};
use crate::surface::SurfaceSpec;

/// Which of the two rotational families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `(f cos αv, f sin αv, g cosh βv, g sinh βv)`, spacelike `H`.
    M1,
    /// `(f cos αv, f sin αv, g sinh βv, g cosh βv)`, timelike `H`.
    M2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationalSurfaceSpec {
    pub variant: Variant,
    pub f: FunctionExpr,
    pub g: FunctionExpr,
    pub alpha: f64,
    pub beta: f64,
    pub u_domain: (f64, f64),
    pub v_domain: (f64, f64),
}

/// `(h, h', h'', h''')` of a meridian function at `u`.
pub fn meridian_derivatives(h: &FunctionExpr, u: f64) -> Result<[f64; 4]> {
    let j: Jet2<Dual> = h.eval_with(Jet2::u(Dual::var(u)), Jet2::constant(Dual::cst(0.0)), (u, 0.0))?;
    Ok([j.val.re, j.du.re, j.duu.re, j.duu.eps])
}

/// Number of u-samples used when validating the family inequalities.
const CONSTRAINT_SAMPLES: usize = 201;

impl RotationalSurfaceSpec {
    pub fn new(variant: Variant, f: &str, g: &str, alpha: f64, beta: f64) -> Result<Self> {
        Ok(RotationalSurfaceSpec {
            variant,
            f: crate::expr::parse_meridian(f)?,
            g: crate::expr::parse_meridian(g)?,
            alpha,
            beta,
            u_domain: (0.0, 1.0),
            v_domain: (0.0, 1.0),
        })
    }

    pub fn with_domain(mut self, u: (f64, f64), v: (f64, f64)) -> Self {
        self.u_domain = u;
        self.v_domain = v;
        self
    }

    /// The De Sitter example: `f = cos u`, `g = sin u`, `α = β = 1`.
    pub fn de_sitter() -> Self {
        Self::new(Variant::M1, "cos(u)", "sin(u)", 1.0, 1.0)
            .expect("static expression")
            .with_domain((0.05, 0.7), (0.0, 1.0))
    }

    /// The hyperbolic-sphere example: `f = sinh u`, `g = cosh u`, `α = β = 1`.
    pub fn hyperbolic_sphere() -> Self {
        Self::new(Variant::M2, "sinh(u)", "cosh(u)", 1.0, 1.0)
            .expect("static expression")
            .with_domain((0.05, 1.0), (0.0, 1.0))
    }

    /// The two family inequalities at `u`, as `(name, value)` pairs that must be positive.
    pub fn constraint_values(&self, u: f64) -> Result<[(&'static str, f64); 2]> {
        let [f, f1, ..] = meridian_derivatives(&self.f, u)?;
        let [g, g1, ..] = meridian_derivatives(&self.g, u)?;
        let (a2, b2) = (self.alpha * self.alpha, self.beta * self.beta);
        Ok(match self.variant {
            Variant::M1 => [
                ("alpha^2 f^2 - beta^2 g^2 > 0", a2 * f * f - b2 * g * g),
                ("f'^2 + g'^2 > 0", f1 * f1 + g1 * g1),
            ],
            Variant::M2 => [
                ("f'^2 - g'^2 > 0", f1 * f1 - g1 * g1),
                ("alpha^2 f^2 + beta^2 g^2 > 0", a2 * f * f + b2 * g * g),
            ],
        })
    }

    /// Check the family inequalities (with `margin`) on a uniform sample of the u-interval.
    pub fn validate_with_margin(&self, margin: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(GeomError::Invalid("alpha and beta must be positive".into()));
        }
        let (a, b) = self.u_domain;
        for i in 0..CONSTRAINT_SAMPLES {
            let u = a + (b - a) * i as f64 / (CONSTRAINT_SAMPLES - 1) as f64;
            for (constraint, value) in self.constraint_values(u)? {
                if !(value > margin) {
                    return Err(GeomError::Constraint { constraint, u, value });
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_margin(0.0)
    }

    /// The four coordinate expressions, after validating the spec on its u-interval.
    pub fn immersion(&self) -> Result<SurfaceSpec> {
        self.validate()?;
        Ok(self.coordinates())
    }

    /// The four coordinate expressions without validation.
    pub fn coordinates(&self) -> SurfaceSpec {
        let scaled = |c: f64| FunctionExpr::bin(BinOp::Mul, FunctionExpr::num(c), FunctionExpr::v());
        let times = |h: &FunctionExpr, f: Func, c: f64| {
            FunctionExpr::bin(BinOp::Mul, h.clone(), FunctionExpr::call(f, scaled(c)))
        };
        let (a, b) = (self.alpha, self.beta);
        let coords = match self.variant {
            Variant::M1 => [
                times(&self.f, Func::Cos, a),
                times(&self.f, Func::Sin, a),
                times(&self.g, Func::Cosh, b),
                times(&self.g, Func::Sinh, b),
            ],
            Variant::M2 => [
                times(&self.f, Func::Cos, a),
                times(&self.f, Func::Sin, a),
                times(&self.g, Func::Sinh, b),
                times(&self.g, Func::Cosh, b),
            ],
        };
        let name = match self.variant {
            Variant::M1 => "m1",
            Variant::M2 => "m2",
        };
        SurfaceSpec::new(name, coords)
    }

    fn meridian_pair(&self, u: f64) -> Result<([f64; 4], [f64; 4])> {
        Ok((meridian_derivatives(&self.f, u)?, meridian_derivatives(&self.g, u)?))
    }

    /// `(√E, √G)` at `u`.
    pub fn metric(&self, u: f64) -> Result<(f64, f64)> {
        let (fd, gd) = self.meridian_pair(u)?;
        let q = Quantities::new(self.variant, [fd[0], fd[1], fd[2]], [gd[0], gd[1], gd[2]], self.alpha, self.beta);
        if !(q.e > 0.0 && q.g > 0.0) {
            return Err(GeomError::MetricPositivity { what: "closed-form metric", u, v: 0.0 });
        }
        Ok((q.e.sqrt(), q.g.sqrt()))
    }

    /// `((√E, √G), (∂_u √E, ∂_u √G))` at `u`.
    pub fn metric_with_du(&self, u: f64) -> Result<((f64, f64), (f64, f64))> {
        let (fd, gd) = self.meridian_pair(u)?;
        let lift = |h: [f64; 4]| [Dual::new(h[0], h[1]), Dual::new(h[1], h[2]), Dual::new(h[2], h[3])];
        let q = Quantities::new(self.variant, lift(fd), lift(gd), self.alpha, self.beta);
        if !(q.e.re > 0.0 && q.g.re > 0.0) {
            return Err(GeomError::MetricPositivity { what: "closed-form metric", u, v: 0.0 });
        }
        let (se, sg) = (q.e.sqrt(), q.g.sqrt());
        Ok(((se.re, sg.re), (se.eps, sg.eps)))
    }

    /// The published normal frame `(n1, n2)` at `(u, v)`.
    pub fn published_normal_frame(&self, u: f64, v: f64) -> Result<NormalFrame> {
        let (fd, gd) = self.meridian_pair(u)?;
        let [f, f1, ..] = fd;
        let [g, g1, ..] = gd;
        let (a, b) = (self.alpha, self.beta);
        let (ca, sa, cb, sb) = ((a * v).cos(), (a * v).sin(), (b * v).cosh(), (b * v).sinh());
        Ok(match self.variant {
            Variant::M1 => {
                let se = (f1 * f1 + g1 * g1).sqrt();
                let sg = (a * a * f * f - b * b * g * g).sqrt();
                NormalFrame {
                    n1: MinkVector::new(g1 * ca, g1 * sa, -f1 * cb, -f1 * sb).scale(1.0 / se),
                    n2: MinkVector::new(-b * g * sa, b * g * ca, a * f * sb, a * f * cb).scale(1.0 / sg),
                }
            }
            Variant::M2 => {
                let se = (f1 * f1 - g1 * g1).sqrt();
                let sg = (a * a * f * f + b * b * g * g).sqrt();
                NormalFrame {
                    n1: MinkVector::new(b * g * sa, -b * g * ca, a * f * cb, a * f * sb).scale(1.0 / sg),
                    n2: MinkVector::new(g1 * ca, g1 * sa, f1 * sb, f1 * cb).scale(1.0 / se),
                }
            }
        })
    }

    /// `{z_u/√E, z_v/√G, n1, n2}`: the frame the published Frenet tables refer to.
    pub fn published_frame(&self, u: f64, v: f64) -> Result<Frame4> {
        let (fd, gd) = self.meridian_pair(u)?;
        let [f, f1, ..] = fd;
        let [g, g1, ..] = gd;
        let (a, b) = (self.alpha, self.beta);
        let (ca, sa, cb, sb) = ((a * v).cos(), (a * v).sin(), (b * v).cosh(), (b * v).sinh());
        let (se, sg) = self.metric(u)?;
        let (zu, zv) = match self.variant {
            Variant::M1 => (
                MinkVector::new(f1 * ca, f1 * sa, g1 * cb, g1 * sb),
                MinkVector::new(-a * f * sa, a * f * ca, b * g * sb, b * g * cb),
            ),
            Variant::M2 => (
                MinkVector::new(f1 * ca, f1 * sa, g1 * sb, g1 * cb),
                MinkVector::new(-a * f * sa, a * f * ca, b * g * cb, b * g * sb),
            ),
        };
        let nf = self.published_normal_frame(u, v)?;
        Ok(Frame4([zu.scale(1.0 / se), zv.scale(1.0 / sg), nf.n1, nf.n2]))
    }

    /// Sign of the orientation of the published frame; `L, M, N, ϰ` of a
    /// positively oriented frame equal this sign times the published values.
    pub fn orientation_sign(&self, u: f64) -> Result<f64> {
        Ok(self.published_frame(u, 0.0)?.det().signum())
    }
}

/// The shorthand quantities of the closed forms.
struct Quantities<T> {
    e: T,
    g: T,
    /// `g f' − f g'`
    p: T,
    /// `g' f'' − f' g''`
    q: T,
    /// `α² f g' + β² g f'`
    r: T,
    f: [T; 3],
    gm: [T; 3],
}

impl<T: Scalar> Quantities<T> {
    fn new(variant: Variant, f: [T; 3], g: [T; 3], alpha: f64, beta: f64) -> Self {
        let (a2, b2) = (T::cst(alpha * alpha), T::cst(beta * beta));
        let (e, gg) = match variant {
            Variant::M1 => (f[1] * f[1] + g[1] * g[1], a2 * f[0] * f[0] - b2 * g[0] * g[0]),
            Variant::M2 => (f[1] * f[1] - g[1] * g[1], a2 * f[0] * f[0] + b2 * g[0] * g[0]),
        };
        Quantities {
            e,
            g: gg,
            p: g[0] * f[1] - f[0] * g[1],
            q: g[1] * f[2] - f[1] * g[2],
            r: a2 * f[0] * g[1] + b2 * g[0] * f[1],
            f,
            gm: g,
        }
    }
}

fn closed_invariants<T: Scalar>(variant: Variant, q: &Quantities<T>, alpha: f64, beta: f64) -> [T; 3] {
    let ab = T::cst(alpha * beta);
    let ab2 = ab * ab;
    let (e, g) = (q.e, q.g);
    let k = T::cst(4.0) * ab2 * q.p * q.p * q.q * q.r / (e * e * e * g * g * g);
    let kappa = ab * q.p * (g * q.q + e * q.r) / (e * e * g * g);
    let gauss = match variant {
        Variant::M1 => (-(g * q.r * q.q) + ab2 * e * q.p * q.p) / (e * e * g * g),
        Variant::M2 => (g * q.r * q.q - ab2 * e * q.p * q.p) / (e * e * g * g),
    };
    [k, kappa, gauss]
}

fn closed_frenet<T: Scalar>(variant: Variant, q: &Quantities<T>, alpha: f64, beta: f64) -> [T; 8] {
    let (a2, b2, ab) = (T::cst(alpha * alpha), T::cst(beta * beta), T::cst(alpha * beta));
    let [f, f1, _] = q.f;
    let [g, g1, _] = q.gm;
    let se = q.e.sqrt();
    let d = se * q.g;
    let z = T::cst(0.0);
    let nu1 = q.q / (q.e * se);
    let nu2 = -(q.r / d);
    match variant {
        Variant::M1 => [
            z,
            -((a2 * f * f1 - b2 * g * g1) / d),
            nu1,
            nu2,
            z,
            ab * q.p / d,
            z,
            ab * (f * f1 + g * g1) / d,
        ],
        Variant::M2 => [
            z,
            -((a2 * f * f1 + b2 * g * g1) / d),
            nu1,
            nu2,
            z,
            -(ab * q.p) / d,
            z,
            ab * (g * g1 - f * f1) / d,
        ],
    }
}

/// `(k, ϰ, K)` from the published closed forms (published frame orientation).
pub fn closed_form_invariants(spec: &RotationalSurfaceSpec, u: f64) -> Result<(f64, f64, f64)> {
    let (fd, gd) = spec.meridian_pair(u)?;
    let q = Quantities::new(spec.variant, [fd[0], fd[1], fd[2]], [gd[0], gd[1], gd[2]], spec.alpha, spec.beta);
    if q.e.abs() < 1e-300 || q.g.abs() < 1e-300 {
        return Err(GeomError::DegenerateDenominator {
            what: "closed-form invariants",
            u,
            v: 0.0,
        });
    }
    let [k, kappa, gauss] = closed_invariants(spec.variant, &q, spec.alpha, spec.beta);
    Ok((k, kappa, gauss))
}

/// The eight functions from the published tables, in the published `(n1, n2)` gauge.
pub fn closed_form_frenet(spec: &RotationalSurfaceSpec, u: f64) -> Result<EightFunctions> {
    closed_form_frenet_with_du(spec, u).map(|(f, _)| f)
}

/// The eight functions and their u-derivatives (they do not depend on `v`).
pub fn closed_form_frenet_with_du(spec: &RotationalSurfaceSpec, u: f64) -> Result<(EightFunctions, EightFunctions)> {
    let (fd, gd) = spec.meridian_pair(u)?;
    let lift = |h: [f64; 4]| [Dual::new(h[0], h[1]), Dual::new(h[1], h[2]), Dual::new(h[2], h[3])];
    let q = Quantities::new(spec.variant, lift(fd), lift(gd), spec.alpha, spec.beta);
    if !(q.e.re > 0.0 && q.g.re > 0.0) {
        return Err(GeomError::MetricPositivity {
            what: "closed-form Frenet functions",
            u,
            v: 0.0,
        });
    }
    let vals = closed_frenet(spec.variant, &q, spec.alpha, spec.beta);
    if (vals[2].re + vals[3].re).abs() <= 1e-12 {
        return Err(GeomError::MinimalPoint { u, v: 0.0 });
    }
    Ok((
        EightFunctions::from_array(vals.map(|d| d.re)),
        EightFunctions::from_array(vals.map(|d| d.eps)),
    ))
}

/// A named surface with a suggested parameter domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSurface {
    pub spec: SurfaceSpec,
    pub u_domain: (f64, f64),
    pub v_domain: (f64, f64),
}

/// Surfaces made entirely of flat points.
pub fn degenerate_surfaces() -> Vec<NamedSurface> {
    let mk = |name: &str, c: [&str; 4], u: (f64, f64), v: (f64, f64)| NamedSurface {
        spec: SurfaceSpec::parse(name, c).expect("static expression"),
        u_domain: u,
        v_domain: v,
    };
    vec![
        mk("plane", ["u", "v", "0", "0"], (-1.0, 1.0), (-1.0, 1.0)),
        mk("graph", ["u", "v", "u^2 + v^2", "0"], (-0.5, 0.5), (-0.5, 0.5)),
        mk("helix-cylinder", ["u", "cos(v)", "sin(v)", "0.5*v"], (-0.5, 0.5), (0.0, 1.0)),
        // c(v) + u c'(v) for the spacelike curve c = (cos v, sin v, 0.3 v^2, 0.5 v)
        mk(
            "tangent-developable",
            ["cos(v) - u*sin(v)", "sin(v) + u*cos(v)", "0.3*v^2 + 0.6*u*v", "0.5*v + 0.5*u"],
            (0.5, 1.0),
            (0.0, 1.0),
        ),
    ]
}

pub fn degenerate_surface(name: &str) -> Option<NamedSurface> {
    degenerate_surfaces().into_iter().find(|s| s.spec.name == name)
}

fn random_meridian<R: Rng>(rng: &mut R, variant: Variant, which_f: bool) -> String {
    let c = |rng: &mut R, lo: f64, hi: f64| rng.gen_range(lo..hi);
    match (variant, which_f) {
        (Variant::M1, true) => match rng.gen_range(0..3) {
            0 => format!("{} + ({})*u + ({})*u^2", c(rng, 1.5, 3.0), c(rng, -0.5, 0.5), c(rng, -0.4, 0.4)),
            1 => format!("{} + ({})*sin(u + ({}))", c(rng, 1.5, 3.0), c(rng, -0.6, 0.6), c(rng, -1.0, 1.0)),
            _ => format!("{}*exp(({})*u)", c(rng, 1.5, 3.0), c(rng, -0.5, 0.5)),
        },
        (Variant::M1, false) => match rng.gen_range(0..3) {
            0 => format!("{} + ({})*u + ({})*u^2", c(rng, -0.6, 0.6), c(rng, 0.3, 1.2), c(rng, -0.4, 0.4)),
            1 => format!("{} + ({})*cos(u)", c(rng, -0.5, 0.5), c(rng, -1.0, 1.0)),
            _ => format!("({})*sinh(u + ({}))", c(rng, 0.3, 1.0), c(rng, 0.1, 0.8)),
        },
        (Variant::M2, true) => match rng.gen_range(0..3) {
            0 => format!("{} + ({})*u + ({})*u^2", c(rng, 0.2, 1.5), c(rng, 1.0, 2.0), c(rng, -0.3, 0.3)),
            1 => format!("({})*sinh(u + ({}))", c(rng, 1.0, 2.0), c(rng, 0.1, 0.6)),
            _ => format!("({})*u + ({})*cos(u)", c(rng, 1.2, 2.0), c(rng, 0.2, 1.0)),
        },
        (Variant::M2, false) => match rng.gen_range(0..3) {
            0 => format!("{} + ({})*u + ({})*u^2", c(rng, 0.3, 1.5), c(rng, -0.6, 0.6), c(rng, -0.3, 0.3)),
            1 => format!("({})*cosh(u)", c(rng, 0.3, 1.5)),
            _ => format!("{} + ({})*sin(u)", c(rng, 0.3, 1.5), c(rng, -0.5, 0.5)),
        },
    }
}

/// Margin applied to the family inequalities by [`random_spec`].
pub const RANDOM_SPEC_MARGIN: f64 = 1e-3;

/// Rejection-sample a valid rotational spec on `u_domain`.
///
/// Besides the family inequalities (with [`RANDOM_SPEC_MARGIN`]) the sample
/// keeps `|μ|`, `|ν₁ + ν₂|` and `|ν₁ − ν₂|` above a fixed floor, so the
/// geometric frame is well defined on the whole interval.
pub fn random_spec<R: Rng>(rng: &mut R, variant: Variant, u_domain: (f64, f64)) -> RotationalSurfaceSpec {
    loop {
        let f = random_meridian(rng, variant, true);
        let g = random_meridian(rng, variant, false);
        let alpha = rng.gen_range(0.5..1.5);
        let beta = rng.gen_range(0.5..1.5);
        let Ok(spec) = RotationalSurfaceSpec::new(variant, &f, &g, alpha, beta) else {
            continue;
        };
        let spec = spec.with_domain(u_domain, (0.0, 1.0));
        if spec.validate_with_margin(RANDOM_SPEC_MARGIN).is_err() {
            continue;
        }
        let healthy = (0..=40).all(|i| {
            let u = u_domain.0 + (u_domain.1 - u_domain.0) * i as f64 / 40.0;
            match closed_form_frenet(&spec, u) {
                Ok(e) => {
                    e.mu.abs() > 0.05
                        && (e.nu1 + e.nu2).abs() > 0.05
                        && (e.nu1 - e.nu2).abs() > 0.05
                        && e.to_array().iter().all(|x| x.abs() < 50.0)
                }
                Err(_) => false,
            }
        });
        if healthy {
            return spec;
        }
    }
}
