//! Forward-mode second-order differentiation.
//!
//! [`Jet2`] carries a value together with its first and second partials in
//! two parameters `(u, v)` and propagates them through arithmetic with the
//! second-order Leibniz rules. It is generic over its slot type, so a
//! `Jet2<Dual>` also tracks one extra derivative where third-order data is
//! needed (the closed-form invariant fields use this).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::lorentz::MinkVector;

/// The arithmetic the expression evaluator and the closed-form formulas need.
pub trait Scalar:
    Copy
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(c: f64) -> Self;
    /// The plain value, used for domain checks.
    fn re(&self) -> f64;
    /// True when every derivative slot is exactly zero.
    fn is_const(&self) -> bool;
    /// Apply a scalar function given its value and first two derivatives at `re()`.
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self;

    fn sin(self) -> Self {
        let x = self.re();
        self.chain(x.sin(), x.cos(), -x.sin())
    }
    fn cos(self) -> Self {
        let x = self.re();
        self.chain(x.cos(), -x.sin(), -x.cos())
    }
    fn sinh(self) -> Self {
        let x = self.re();
        self.chain(x.sinh(), x.cosh(), x.sinh())
    }
    fn cosh(self) -> Self {
        let x = self.re();
        self.chain(x.cosh(), x.sinh(), x.cosh())
    }
    fn exp(self) -> Self {
        let e = self.re().exp();
        self.chain(e, e, e)
    }
    /// Natural logarithm; caller guarantees `re() > 0`.
    fn ln(self) -> Self {
        let x = self.re();
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    /// Square root; caller guarantees `re() > 0`.
    fn sqrt(self) -> Self {
        let x = self.re();
        let s = x.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * x))
    }
    /// Real power with constant exponent; caller guarantees `re() > 0`.
    fn powf(self, p: f64) -> Self {
        let x = self.re();
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }
    /// Integer power by repeated multiplication.
    fn powi(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::cst(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if n < 0 {
            Self::cst(1.0) / acc
        } else {
            acc
        }
    }
    fn square(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn cst(c: f64) -> Self {
        c
    }
    fn re(&self) -> f64 {
        *self
    }
    fn is_const(&self) -> bool {
        true
    }
    fn chain(self, f0: f64, _f1: f64, _f2: f64) -> Self {
        f0
    }
}

/// First-order dual number `re + eps·d`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }
    pub fn var(re: f64) -> Self {
        Dual { re, eps: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}
impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.eps * o.re + self.re * o.eps)
    }
}
impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}
impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl Scalar for Dual {
    fn cst(c: f64) -> Self {
        Dual::new(c, 0.0)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn is_const(&self) -> bool {
        self.eps == 0.0
    }
    fn chain(self, f0: f64, f1: f64, _f2: f64) -> Self {
        Dual::new(f0, f1 * self.eps)
    }
}

/// Value plus first and second partials in `(u, v)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2<T = f64> {
    pub val: T,
    pub du: T,
    pub dv: T,
    pub duu: T,
    pub duv: T,
    pub dvv: T,
}

/// The scalar jet over plain reals.
pub type Scalar2Jet = Jet2<f64>;

impl<T: Scalar> Jet2<T> {
    pub fn constant(c: T) -> Self {
        let z = T::cst(0.0);
        Jet2 {
            val: c,
            du: z,
            dv: z,
            duu: z,
            duv: z,
            dvv: z,
        }
    }

    /// The coordinate `u` seeded at `at`.
    pub fn u(at: T) -> Self {
        Jet2 {
            du: T::cst(1.0),
            ..Self::constant(at)
        }
    }

    /// The coordinate `v` seeded at `at`.
    pub fn v(at: T) -> Self {
        Jet2 {
            dv: T::cst(1.0),
            ..Self::constant(at)
        }
    }

    fn map_slots(self, f: impl Fn(T) -> T) -> Self {
        Jet2 {
            val: f(self.val),
            du: f(self.du),
            dv: f(self.dv),
            duu: f(self.duu),
            duv: f(self.duv),
            dvv: f(self.dvv),
        }
    }

    /// Compose with a scalar function whose value and derivatives at `val`
    /// are given in the slot type.
    pub fn compose(self, f0: T, f1: T, f2: T) -> Self {
        Jet2 {
            val: f0,
            du: f1 * self.du,
            dv: f1 * self.dv,
            duu: f2 * self.du * self.du + f1 * self.duu,
            duv: f2 * self.du * self.dv + f1 * self.duv,
            dvv: f2 * self.dv * self.dv + f1 * self.dvv,
        }
    }

    /// Apply a univariate function through the slot type's own arithmetic.
    fn lift_unary(self, f: impl Fn(T) -> (T, T, T)) -> Self {
        let (f0, f1, f2) = f(self.val);
        self.compose(f0, f1, f2)
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Jet2 {
            val: self.val + o.val,
            du: self.du + o.du,
            dv: self.dv + o.dv,
            duu: self.duu + o.duu,
            duv: self.duv + o.duv,
            dvv: self.dvv + o.dvv,
        }
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Jet2 {
            val: self.val - o.val,
            du: self.du - o.du,
            dv: self.dv - o.dv,
            duu: self.duu - o.duu,
            duv: self.duv - o.duv,
            dvv: self.dvv - o.dvv,
        }
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, g: Self) -> Self {
        let f = self;
        Jet2 {
            val: f.val * g.val,
            du: f.du * g.val + f.val * g.du,
            dv: f.dv * g.val + f.val * g.dv,
            duu: f.duu * g.val + f.du * g.du + f.du * g.du + f.val * g.duu,
            duv: f.duv * g.val + f.du * g.dv + f.dv * g.du + f.val * g.duv,
            dvv: f.dvv * g.val + f.dv * g.dv + f.dv * g.dv + f.val * g.dvv,
        }
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Self;
    fn div(self, g: Self) -> Self {
        let one = T::cst(1.0);
        let two = T::cst(2.0);
        let r = one / g.val;
        let recip = g.compose(r, -(r * r), two * r * r * r);
        self * recip
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map_slots(|x| -x)
    }
}

impl<T: Scalar> Scalar for Jet2<T> {
    fn cst(c: f64) -> Self {
        Jet2::constant(T::cst(c))
    }
    fn re(&self) -> f64 {
        self.val.re()
    }
    fn is_const(&self) -> bool {
        self.val.is_const()
            && [self.du, self.dv, self.duu, self.duv, self.dvv]
                .iter()
                .all(|d| d.re() == 0.0 && d.is_const())
    }
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        // Only valid when the slot type carries no derivatives of its own;
        // the named functions below route through the slot type instead.
        self.compose(T::cst(f0), T::cst(f1), T::cst(f2))
    }
    fn sin(self) -> Self {
        self.lift_unary(|x| (x.sin(), x.cos(), -x.sin()))
    }
    fn cos(self) -> Self {
        self.lift_unary(|x| (x.cos(), -x.sin(), -x.cos()))
    }
    fn sinh(self) -> Self {
        self.lift_unary(|x| (x.sinh(), x.cosh(), x.sinh()))
    }
    fn cosh(self) -> Self {
        self.lift_unary(|x| (x.cosh(), x.sinh(), x.cosh()))
    }
    fn exp(self) -> Self {
        self.lift_unary(|x| {
            let e = x.exp();
            (e, e, e)
        })
    }
    fn ln(self) -> Self {
        self.lift_unary(|x| {
            let r = T::cst(1.0) / x;
            (x.ln(), r, -(r * r))
        })
    }
    fn sqrt(self) -> Self {
        self.lift_unary(|x| {
            let s = x.sqrt();
            let d1 = T::cst(0.5) / s;
            (s, d1, -(T::cst(0.5) * d1 / x))
        })
    }
    fn powf(self, p: f64) -> Self {
        self.lift_unary(|x| {
            (
                x.powf(p),
                T::cst(p) * x.powf(p - 1.0),
                T::cst(p * (p - 1.0)) * x.powf(p - 2.0),
            )
        })
    }
}

/// Position and all partials up to second order of an immersion at `(u, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceJet2 {
    pub at: (f64, f64),
    pub z: MinkVector,
    pub z_u: MinkVector,
    pub z_v: MinkVector,
    pub z_uu: MinkVector,
    pub z_uv: MinkVector,
    pub z_vv: MinkVector,
}

impl SurfaceJet2 {
    /// Assemble from four coordinate jets.
    pub fn from_components(at: (f64, f64), c: &[Scalar2Jet; 4]) -> Self {
        let pick = |f: fn(&Scalar2Jet) -> f64| MinkVector(std::array::from_fn(|i| f(&c[i])));
        SurfaceJet2 {
            at,
            z: pick(|j| j.val),
            z_u: pick(|j| j.du),
            z_v: pick(|j| j.dv),
            z_uu: pick(|j| j.duu),
            z_uv: pick(|j| j.duv),
            z_vv: pick(|j| j.dvv),
        }
    }

    /// Jet of `z(U(s,t), V(s,t))` given jets of the change of parameters in `(s,t)`.
    pub fn reparametrize(&self, new_at: (f64, f64), cu: &Scalar2Jet, cv: &Scalar2Jet) -> Self {
        let (us, ut, vs, vt) = (cu.du, cu.dv, cv.du, cv.dv);
        let lin = |a: f64, b: f64| a * self.z_u + b * self.z_v;
        let quad = |a1: f64, b1: f64, a2: f64, b2: f64| {
            (a1 * a2) * self.z_uu + (a1 * b2 + b1 * a2) * self.z_uv + (b1 * b2) * self.z_vv
        };
        SurfaceJet2 {
            at: new_at,
            z: self.z,
            z_u: lin(us, vs),
            z_v: lin(ut, vt),
            z_uu: quad(us, vs, us, vs) + lin(cu.duu, cv.duu),
            z_uv: quad(us, vs, ut, vt) + lin(cu.duv, cv.duv),
            z_vv: quad(ut, vt, ut, vt) + lin(cu.dvv, cv.dvv),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> (f64, f64) {
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        (d1, d2)
    }

    #[test]
    fn bilinear_product() {
        let j = Jet2::u(2.0) * Jet2::v(3.0);
        assert_eq!((j.val, j.du, j.dv), (6.0, 3.0, 2.0));
        assert_eq!((j.duu, j.duv, j.dvv), (0.0, 1.0, 0.0));
    }

    #[test]
    fn cosine_taylor() {
        let j = Jet2::u(0.0).cos();
        assert_eq!(j.val, 1.0);
        assert_eq!(j.du, 0.0);
        assert_eq!(j.duu, -1.0);
    }

    #[test]
    fn sinh_cosh_against_differences() {
        let x = 0.5;
        let j = Jet2::u(x).sinh() * Jet2::u(x).cosh();
        assert!((j.du - 1.0f64.cosh()).abs() < 1e-14);
        let (d1, _) = central(|t| t.sinh() * t.cosh(), x, 1e-5);
        assert!((j.du - d1).abs() < 1e-8);
    }

    #[test]
    fn constant_and_coordinate_slots() {
        let c = Scalar2Jet::constant(4.0);
        assert!(c.is_const());
        let u = Scalar2Jet::u(1.5);
        assert_eq!((u.du, u.dv, u.duu, u.duv, u.dvv), (1.0, 0.0, 0.0, 0.0, 0.0));
        assert!(!u.is_const());
    }

    #[test]
    fn quotient_rule_second_order() {
        // f = u / (1 + v^2) at (0.3, 0.7)
        let (u0, v0) = (0.3, 0.7);
        let one = Scalar2Jet::constant(1.0);
        let j = Jet2::u(u0) / (one + Jet2::v(v0) * Jet2::v(v0));
        let d = 1.0 + v0 * v0;
        assert!((j.dv - (-2.0 * u0 * v0 / (d * d))).abs() < 1e-14);
        assert!((j.duv - (-2.0 * v0 / (d * d))).abs() < 1e-14);
        let expected_vv = u0 * (6.0 * v0 * v0 - 2.0) / (d * d * d);
        assert!((j.dvv - expected_vv).abs() < 1e-13);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Scalar2Jet::u(1.3);
        let p = x.powi(3);
        let q = x * x * x;
        assert!((p.duu - q.duu).abs() < 1e-13);
        let r = x.powi(-2);
        assert!((r.du - (-2.0 / 1.3f64.powi(3))).abs() < 1e-13);
    }

    #[test]
    fn nested_jet_gives_third_derivative() {
        // d^3/du^3 sin(u) = -cos(u)
        let x = 0.4;
        let j: Jet2<Dual> = Jet2::u(Dual::var(x)).sin();
        assert!((j.duu.eps - (-x.cos())).abs() < 1e-14);
        assert!((j.val.eps - x.cos()).abs() < 1e-14);
        let k: Jet2<Dual> = Jet2::u(Dual::var(x)).sqrt().ln();
        // ln sqrt u = ln(u)/2, third derivative 1/u^3
        assert!((k.duu.eps - 1.0 / (x * x * x)).abs() < 1e-12);
    }

    #[test]
    fn reparametrized_jet_matches_direct() {
        // z(u,v) = (u^2, u v, sin v, 0), change u = s + t^2, v = 2 s - t
        let (s, t) = (0.3, -0.4);
        let comp = |u: Scalar2Jet, v: Scalar2Jet| [u * u, u * v, v.sin(), Scalar2Jet::constant(0.0)];
        let cu = Jet2::u(s) + Jet2::v(t) * Jet2::v(t);
        let cv = Scalar2Jet::constant(2.0) * Jet2::u(s) - Jet2::v(t);
        let direct = SurfaceJet2::from_components((s, t), &comp(cu, cv));
        let base = SurfaceJet2::from_components(
            (cu.val, cv.val),
            &comp(Jet2::u(cu.val), Jet2::v(cv.val)),
        );
        let re = base.reparametrize((s, t), &cu, &cv);
        for (a, b) in [
            (re.z_u, direct.z_u),
            (re.z_v, direct.z_v),
            (re.z_uu, direct.z_uu),
            (re.z_uv, direct.z_uv),
            (re.z_vv, direct.z_vv),
        ] {
            assert!(a.max_abs_diff(&b) < 1e-13);
        }
    }
}
