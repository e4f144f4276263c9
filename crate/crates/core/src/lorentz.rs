//! Linear algebra in Minkowski 4-space with signature (+,+,+,-).
//!
//! Components are taken in a fixed orthonormal basis `e1..e4`, with `e4`
//! the timelike direction. Every other module inherits this convention.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance below which `<v,v>` counts as zero.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-10;

/// Metric signature as a diagonal.
pub const ETA: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LorentzError {
    #[error("zero vector has no causal class")]
    ZeroVector,
    #[error("normal pair is not Lorentz-orthonormal (residual {residual:.3e})")]
    NotOrthonormal { residual: f64 },
}

/// A vector of Minkowski 4-space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinkVector(pub [f64; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CausalClass::Spacelike => "Spacelike",
            CausalClass::Timelike => "Timelike",
            CausalClass::Lightlike => "Lightlike",
        };
        f.write_str(s)
    }
}

impl MinkVector {
    pub const ZERO: MinkVector = MinkVector([0.0; 4]);

    pub const fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Self {
        MinkVector([c1, c2, c3, c4])
    }

    /// Basis vector `e_i` for `i` in `1..=4`.
    pub fn basis(i: usize) -> Self {
        assert!((1..=4).contains(&i), "basis index must be in 1..=4");
        let mut c = [0.0; 4];
        c[i - 1] = 1.0;
        MinkVector(c)
    }

    pub fn inner(&self, other: &MinkVector) -> f64 {
        inner(self, other)
    }

    /// `<v,v>`; may be negative.
    pub fn norm_sq(&self) -> f64 {
        inner(self, self)
    }

    pub fn euclid_norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.euclid_norm_sq().sqrt()
    }

    /// Largest absolute component difference.
    pub fn max_abs_diff(&self, other: &MinkVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        MinkVector(self.0.map(|c| c * s))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for MinkVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for MinkVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for MinkVector {
    type Output = MinkVector;
    fn add(self, rhs: MinkVector) -> MinkVector {
        MinkVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl AddAssign for MinkVector {
    fn add_assign(&mut self, rhs: MinkVector) {
        for i in 0..4 {
            self.0[i] += rhs.0[i];
        }
    }
}

impl Sub for MinkVector {
    type Output = MinkVector;
    fn sub(self, rhs: MinkVector) -> MinkVector {
        MinkVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl SubAssign for MinkVector {
    fn sub_assign(&mut self, rhs: MinkVector) {
        for i in 0..4 {
            self.0[i] -= rhs.0[i];
        }
    }
}

impl Neg for MinkVector {
    type Output = MinkVector;
    fn neg(self) -> MinkVector {
        MinkVector(self.0.map(|c| -c))
    }
}

impl Mul<MinkVector> for f64 {
    type Output = MinkVector;
    fn mul(self, rhs: MinkVector) -> MinkVector {
        rhs.scale(self)
    }
}

impl Mul<f64> for MinkVector {
    type Output = MinkVector;
    fn mul(self, rhs: f64) -> MinkVector {
        self.scale(rhs)
    }
}

/// Minkowski inner product `a1 b1 + a2 b2 + a3 b3 - a4 b4`.
pub fn inner(a: &MinkVector, b: &MinkVector) -> f64 {
    a.0[0] * b.0[0] + a.0[1] * b.0[1] + a.0[2] * b.0[2] - a.0[3] * b.0[3]
}

/// Causal type of `v`. Values with `|<v,v>| <= tol * |v|_euclid^2` are lightlike.
pub fn causal_class(v: &MinkVector, tol: f64) -> Result<CausalClass, LorentzError> {
    let e2 = v.euclid_norm_sq();
    if e2 == 0.0 {
        return Err(LorentzError::ZeroVector);
    }
    let q = v.norm_sq();
    Ok(if q.abs() <= tol * e2 {
        CausalClass::Lightlike
    } else if q > 0.0 {
        CausalClass::Spacelike
    } else {
        CausalClass::Timelike
    })
}

/// Determinant of the 4x4 matrix whose rows are `a, b, c, d`.
///
/// The rows are put in a canonical order first, so permuting the arguments
/// changes the result by exactly the sign of the permutation.
pub fn orientation_det(a: &MinkVector, b: &MinkVector, c: &MinkVector, d: &MinkVector) -> f64 {
    let mut rows = [a.0, b.0, c.0, d.0];
    let key = |r: &[f64; 4], s: &[f64; 4]| {
        r.iter()
            .zip(s)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    let mut sign = 1.0;
    for i in 1..4 {
        let mut j = i;
        while j > 0 && key(&rows[j - 1], &rows[j]).is_gt() {
            rows.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if (1..4).any(|i| key(&rows[i - 1], &rows[i]).is_eq()) {
        return 0.0;
    }
    sign * det4(&rows)
}

pub(crate) fn det4(m: &[[f64; 4]; 4]) -> f64 {
    // Laplace expansion over 2x2 minors of the first two rows.
    let s0 = m[0][0] * m[1][1] - m[1][0] * m[0][1];
    let s1 = m[0][0] * m[1][2] - m[1][0] * m[0][2];
    let s2 = m[0][0] * m[1][3] - m[1][0] * m[0][3];
    let s3 = m[0][1] * m[1][2] - m[1][1] * m[0][2];
    let s4 = m[0][1] * m[1][3] - m[1][1] * m[0][3];
    let s5 = m[0][2] * m[1][3] - m[1][2] * m[0][3];

    let c5 = m[2][2] * m[3][3] - m[3][2] * m[2][3];
    let c4 = m[2][1] * m[3][3] - m[3][1] * m[2][3];
    let c3 = m[2][1] * m[3][2] - m[3][1] * m[2][2];
    let c2 = m[2][0] * m[3][3] - m[3][0] * m[2][3];
    let c1 = m[2][0] * m[3][2] - m[3][0] * m[2][2];
    let c0 = m[2][0] * m[3][1] - m[3][0] * m[2][1];

    s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
}

/// Residual of the Lorentz-orthonormality conditions for a normal pair.
pub fn lorentz_pair_residual(n1: &MinkVector, n2: &MinkVector) -> f64 {
    (n1.norm_sq() - 1.0)
        .abs()
        .max((n2.norm_sq() + 1.0).abs())
        .max(inner(n1, n2).abs())
}

/// Coordinates of `a` in the Lorentz-orthonormal pair `{n1, n2}`.
pub fn lorentz_coords(a: &MinkVector, n1: &MinkVector, n2: &MinkVector) -> (f64, f64) {
    (inner(a, n1), -inner(a, n2))
}

/// Oriented area `a¹b² - a²b¹` of the parallelogram spanned by `a, b` in the
/// Lorentz plane `span{n1, n2}`.
pub fn lorentz_plane_area(
    a: &MinkVector,
    b: &MinkVector,
    n1: &MinkVector,
    n2: &MinkVector,
) -> Result<f64, LorentzError> {
    let residual = lorentz_pair_residual(n1, n2);
    if residual > 1e-9 {
        return Err(LorentzError::NotOrthonormal { residual });
    }
    let (a1, a2) = lorentz_coords(a, n1, n2);
    let (b1, b2) = lorentz_coords(b, n1, n2);
    Ok(a1 * b2 - a2 * b1)
}

/// An ordered Lorentz-orthonormal frame, rows in ambient coordinates.
/// Slot 3 is the timelike one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame4(pub [MinkVector; 4]);

impl Frame4 {
    pub fn identity() -> Self {
        Frame4([
            MinkVector::basis(1),
            MinkVector::basis(2),
            MinkVector::basis(3),
            MinkVector::basis(4),
        ])
    }

    pub fn det(&self) -> f64 {
        orientation_det(&self.0[0], &self.0[1], &self.0[2], &self.0[3])
    }

    /// Largest deviation of the Gram matrix from `diag(1,1,1,-1)`.
    pub fn orthonormality_drift(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in i..4 {
                let target = if i == j { ETA[i] } else { 0.0 };
                worst = worst.max((inner(&self.0[i], &self.0[j]) - target).abs());
            }
        }
        worst
    }

    /// Minkowski Gram-Schmidt in slot order, the timelike slot last.
    pub fn reorthonormalize(&self) -> Frame4 {
        let mut out = self.0;
        for i in 0..4 {
            let mut v = self.0[i];
            for j in 0..i {
                let e = out[j];
                v -= (inner(&v, &e) / ETA[j]) * e;
            }
            let q = v.norm_sq() * ETA[i];
            out[i] = v.scale(1.0 / q.abs().sqrt());
        }
        Frame4(out)
    }

    /// Largest componentwise difference between corresponding vectors.
    pub fn max_abs_diff(&self, other: &Frame4) -> f64 {
        (0..4)
            .map(|i| self.0[i].max_abs_diff(&other.0[i]))
            .fold(0.0, f64::max)
    }

    /// Ambient coordinates of the frame-coordinate vector `w`.
    pub fn combine(&self, w: [f64; 4]) -> MinkVector {
        let mut out = MinkVector::ZERO;
        for (k, c) in w.iter().enumerate() {
            out += *c * self.0[k];
        }
        out
    }
}

/// A Lorentz transformation together with a translation, acting on points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion {
    pub linear: [[f64; 4]; 4],
    pub translation: MinkVector,
}

impl Motion {
    /// The unique motion taking frame `from` at `from_point` onto frame `to` at `to_point`.
    ///
    /// Both frames must be Lorentz-orthonormal with the same slot signature,
    /// so the linear part is `to^T · η · from · η`.
    pub fn between(from: &Frame4, from_point: &MinkVector, to: &Frame4, to_point: &MinkVector) -> Self {
        let mut linear = [[0.0; 4]; 4];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..4 {
                    s += to.0[k][i] * ETA[k] * from.0[k][j] * ETA[j];
                }
                *entry = s;
            }
        }
        let mut m = Motion {
            linear,
            translation: MinkVector::ZERO,
        };
        m.translation = *to_point - m.apply_linear(from_point);
        m
    }

    pub fn apply_linear(&self, v: &MinkVector) -> MinkVector {
        MinkVector(std::array::from_fn(|i| {
            (0..4).map(|j| self.linear[i][j] * v.0[j]).sum()
        }))
    }

    pub fn apply_point(&self, p: &MinkVector) -> MinkVector {
        self.apply_linear(p) + self.translation
    }

    pub fn apply_frame(&self, f: &Frame4) -> Frame4 {
        Frame4(f.0.map(|v| self.apply_linear(&v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> MinkVector {
        MinkVector::basis(i)
    }

    #[test]
    fn inner_signature() {
        assert_eq!(inner(&e(1), &e(1)), 1.0);
        assert_eq!(inner(&e(4), &e(4)), -1.0);
        let v = MinkVector::new(1.0, 0.0, 0.0, 2.0);
        assert_eq!(inner(&v, &v), -3.0);
    }

    #[test]
    fn causal_classes() {
        let tol = DEFAULT_CAUSAL_TOL;
        assert_eq!(causal_class(&e(1), tol).unwrap(), CausalClass::Spacelike);
        assert_eq!(causal_class(&e(4), tol).unwrap(), CausalClass::Timelike);
        let null = MinkVector::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(causal_class(&null, tol).unwrap(), CausalClass::Lightlike);
        assert_eq!(
            causal_class(&MinkVector::ZERO, tol),
            Err(LorentzError::ZeroVector)
        );
        assert_eq!(
            LorentzError::ZeroVector.to_string(),
            "zero vector has no causal class"
        );
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_det(&e(1), &e(2), &e(3), &e(4)), 1.0);
        assert_eq!(orientation_det(&e(2), &e(1), &e(3), &e(4)), -1.0);
        assert_eq!(orientation_det(&e(1), &e(2), &e(3), &e(4).scale(2.0)), 2.0);
    }

    #[test]
    fn det4_matches_cofactor_expansion() {
        let m = [
            [2.0, -1.0, 0.5, 3.0],
            [0.0, 1.5, -2.0, 1.0],
            [4.0, 0.0, 1.0, -1.0],
            [1.0, 2.0, 0.0, 0.5],
        ];
        fn det3(a: [[f64; 3]; 3]) -> f64 {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        let mut expected = 0.0;
        for col in 0..4 {
            let mut minor = [[0.0; 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for c in 0..4 {
                    if c != col {
                        minor[r - 1][cc] = m[r][c];
                        cc += 1;
                    }
                }
            }
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            expected += sign * m[0][col] * det3(minor);
        }
        assert!((det4(&m) - expected).abs() < 1e-12);
    }

    #[test]
    fn plane_area_examples() {
        let (n1, n2) = (e(3), e(4));
        assert_eq!(lorentz_plane_area(&n1, &n2, &n1, &n2).unwrap(), 1.0);
        assert_eq!(lorentz_plane_area(&n2, &n1, &n1, &n2).unwrap(), -1.0);
        let a = 2.0 * n1 + n2;
        let b = n1 + n2;
        assert!((lorentz_plane_area(&a, &b, &n1, &n2).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            lorentz_plane_area(&a, &b, &n1, &n1),
            Err(LorentzError::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn reorthonormalize_restores_frame() {
        let mut f = Frame4::identity();
        f.0[0][1] += 1e-4;
        f.0[3][0] += 2e-4;
        let g = f.reorthonormalize();
        assert!(g.orthonormality_drift() < 1e-14);
        assert!(g.det() > 0.0);
    }

    #[test]
    fn motion_maps_frame_and_point() {
        let th: f64 = 0.7;
        let from = Frame4::identity();
        let to = Frame4([
            MinkVector::new(th.cosh(), 0.0, 0.0, th.sinh()),
            e(2),
            e(3),
            MinkVector::new(th.sinh(), 0.0, 0.0, th.cosh()),
        ]);
        let p = MinkVector::new(1.0, 2.0, 3.0, 4.0);
        let q = MinkVector::new(-1.0, 0.5, 0.0, 2.0);
        let m = Motion::between(&from, &p, &to, &q);
        assert!(m.apply_frame(&from).max_abs_diff(&to) < 1e-14);
        assert!(m.apply_point(&p).max_abs_diff(&q) < 1e-14);
    }
}
