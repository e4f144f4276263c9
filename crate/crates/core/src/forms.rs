//! First fundamental form, normal frame and second fundamental tensor.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::SurfaceJet2;
use crate::lorentz::{inner, orientation_det, MinkVector};

/// Normalization denominators below this mean the normal plane is degenerate.
pub const NORMAL_DEGENERACY_TOL: f64 = 1e-8;

/// The (e3, e4) seed pair is kept unless its worst denominator drops below this.
const PREFERRED_SEED_FLOOR: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub w: f64,
}

impl FirstForm {
    /// `I(λ, μ) = Eλ² + 2Fλμ + Gμ²`.
    pub fn quad(&self, lambda: f64, mu: f64) -> f64 {
        self.e * lambda * lambda + 2.0 * self.f * lambda * mu + self.g * mu * mu
    }

    pub fn bilinear(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        self.e * a.0 * b.0 + self.f * (a.0 * b.1 + a.1 * b.0) + self.g * a.1 * b.1
    }
}

pub fn first_form(jet: &SurfaceJet2) -> Result<FirstForm> {
    let e = jet.z_u.norm_sq();
    let f = inner(&jet.z_u, &jet.z_v);
    let g = jet.z_v.norm_sq();
    let w2 = e * g - f * f;
    let scale = jet.z_u.euclid_norm_sq() * jet.z_v.euclid_norm_sq();
    if !(e > 0.0 && w2 > 1e-14 * scale) {
        let (u, v) = jet.at;
        return Err(GeomError::NotSpacelike { u, v });
    }
    Ok(FirstForm {
        e,
        f,
        g,
        w: w2.sqrt(),
    })
}

/// A Lorentz-orthonormal normal pair, `n1` spacelike and `n2` timelike.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFrame {
    pub n1: MinkVector,
    pub n2: MinkVector,
}

impl NormalFrame {
    /// `n1' = ε'(cosh θ n1 + sinh θ n2)`, `n2' = ε'(sinh θ n1 + cosh θ n2)`.
    ///
    /// Orientation of `{z_u, z_v, n1, n2}` is preserved for both signs of `ε'`.
    pub fn rotated(&self, theta: f64, eps: f64) -> NormalFrame {
        let (c, s) = (theta.cosh(), theta.sinh());
        NormalFrame {
            n1: eps * (c * self.n1 + s * self.n2),
            n2: eps * (s * self.n1 + c * self.n2),
        }
    }

    /// Coordinates `(a¹, a²)` with `a = a¹ n1 + a² n2`.
    pub fn coords(&self, a: &MinkVector) -> [f64; 2] {
        [inner(a, &self.n1), -inner(a, &self.n2)]
    }

    pub fn vector(&self, c: [f64; 2]) -> MinkVector {
        c[0] * self.n1 + c[1] * self.n2
    }

    pub fn flipped(&self) -> NormalFrame {
        NormalFrame {
            n1: -self.n1,
            n2: -self.n2,
        }
    }
}

/// Orthonormal basis of the tangent plane: `z_u/√E` and its Gram-Schmidt partner.
pub fn tangent_basis(jet: &SurfaceJet2, ff: &FirstForm) -> (MinkVector, MinkVector) {
    let se = ff.e.sqrt();
    let x = jet.z_u.scale(1.0 / se);
    let y = (jet.z_v - (ff.f / ff.e) * jet.z_u).scale(se / ff.w);
    (x, y)
}

struct Candidate {
    worst: f64,
    n1: MinkVector,
    n2: MinkVector,
}

fn seed_candidate(p: &dyn Fn(MinkVector) -> MinkVector, space: usize, time: usize) -> Option<Candidate> {
    let t = p(MinkVector::basis(time));
    let q1 = t.norm_sq();
    if q1 >= 0.0 {
        return None;
    }
    let n2 = t.scale(1.0 / (-q1).sqrt());
    let s = p(MinkVector::basis(space));
    let s = s + inner(&s, &n2) * n2;
    let q2 = s.norm_sq();
    if q2 <= 0.0 {
        return None;
    }
    Some(Candidate {
        worst: (-q1).min(q2),
        n1: s.scale(1.0 / q2.sqrt()),
        n2,
    })
}

/// Deterministic positively oriented normal frame at a jet.
///
/// Seeds `(e3, e4)` go through Minkowski Gram-Schmidt against the tangent
/// plane; other basis pairs are only used when that pair is poorly
/// conditioned. `n2` is made future pointing, then `n1` is flipped if the
/// quadruple `{z_u, z_v, n1, n2}` is negatively oriented.
pub fn normal_frame(jet: &SurfaceJet2) -> Result<NormalFrame> {
    let ff = first_form(jet)?;
    let (x, y) = tangent_basis(jet, &ff);
    let project = move |s: MinkVector| s - inner(&s, &x) * x - inner(&s, &y) * y;
    let mut best = seed_candidate(&project, 3, 4);
    if best.as_ref().is_none_or(|c| c.worst < PREFERRED_SEED_FLOOR) {
        for time in (1..=4).rev() {
            for space in 1..=4 {
                if space == time {
                    continue;
                }
                if let Some(c) = seed_candidate(&project, space, time) {
                    if best.as_ref().is_none_or(|b| c.worst > b.worst) {
                        best = Some(c);
                    }
                }
            }
        }
    }
    let (u, v) = jet.at;
    let c = match best {
        Some(c) if c.worst >= NORMAL_DEGENERACY_TOL => c,
        _ => return Err(GeomError::DegenerateNormal { u, v }),
    };
    let mut n1 = c.n1;
    let mut n2 = c.n2;
    if n2[3] < 0.0 {
        n2 = -n2;
    }
    if orientation_det(&jet.z_u, &jet.z_v, &n1, &n2) <= 0.0 {
        n1 = -n1;
    }
    Ok(NormalFrame { n1, n2 })
}

/// Coefficients `c_ij^k = <z_ij, n_k>`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SecondTensor {
    pub c11_1: f64,
    pub c11_2: f64,
    pub c12_1: f64,
    pub c12_2: f64,
    pub c22_1: f64,
    pub c22_2: f64,
}

impl SecondTensor {
    /// `σ(z_i, z_j)` in `(n1, n2)` coordinates, `ij` in `{11, 12, 22}`.
    pub fn sigma_coords(&self, ij: (usize, usize)) -> [f64; 2] {
        match ij {
            (1, 1) => [self.c11_1, -self.c11_2],
            (1, 2) | (2, 1) => [self.c12_1, -self.c12_2],
            (2, 2) => [self.c22_1, -self.c22_2],
            _ => panic!("sigma index must be 1 or 2"),
        }
    }

    pub fn sigma(&self, frame: &NormalFrame, ij: (usize, usize)) -> MinkVector {
        frame.vector(self.sigma_coords(ij))
    }

    /// Coefficients with respect to a rotated frame, from the rotation law.
    pub fn rotated(&self, theta: f64, eps: f64) -> SecondTensor {
        let (c, s) = (theta.cosh(), theta.sinh());
        let r = |a: f64, b: f64| (eps * (c * a + s * b), eps * (s * a + c * b));
        let (c11_1, c11_2) = r(self.c11_1, self.c11_2);
        let (c12_1, c12_2) = r(self.c12_1, self.c12_2);
        let (c22_1, c22_2) = r(self.c22_1, self.c22_2);
        SecondTensor {
            c11_1,
            c11_2,
            c12_1,
            c12_2,
            c22_1,
            c22_2,
        }
    }
}

pub fn second_tensor(jet: &SurfaceJet2, frame: &NormalFrame) -> SecondTensor {
    SecondTensor {
        c11_1: inner(&jet.z_uu, &frame.n1),
        c11_2: inner(&jet.z_uu, &frame.n2),
        c12_1: inner(&jet.z_uv, &frame.n1),
        c12_2: inner(&jet.z_uv, &frame.n2),
        c22_1: inner(&jet.z_vv, &frame.n1),
        c22_2: inner(&jet.z_vv, &frame.n2),
    }
}

/// Propagate frame signs over a row-major `nu x nv` grid from node `(0, 0)`.
///
/// The `v`-line at `i = 0` is swept first, then every `u`-line. A frame whose
/// `n1` has negative inner product with its predecessor is replaced by its
/// negative (both vectors flip, so orientation is kept). Runs sequentially.
pub fn align_frame_signs(frames: &mut [NormalFrame], nu: usize, nv: usize) {
    assert_eq!(frames.len(), nu * nv, "grid shape mismatch");
    for j in 1..nv {
        if inner(&frames[j].n1, &frames[j - 1].n1) < 0.0 {
            frames[j] = frames[j].flipped();
        }
    }
    for i in 1..nu {
        for j in 0..nv {
            let prev = frames[(i - 1) * nv + j];
            let cur = &mut frames[i * nv + j];
            if inner(&cur.n1, &prev.n1) < 0.0 {
                *cur = cur.flipped();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{surface_jet, SurfaceSpec};

    fn de_sitter() -> SurfaceSpec {
        SurfaceSpec::parse(
            "m1",
            ["cos(u)*cos(v)", "cos(u)*sin(v)", "sin(u)*cosh(v)", "sin(u)*sinh(v)"],
        )
        .unwrap()
    }

    #[test]
    fn plane_forms() {
        let j = surface_jet(&SurfaceSpec::plane(), (1.0, 2.0)).unwrap();
        let ff = first_form(&j).unwrap();
        assert_eq!((ff.e, ff.f, ff.g, ff.w), (1.0, 0.0, 1.0, 1.0));
        let fr = normal_frame(&j).unwrap();
        assert_eq!(fr.n1, MinkVector::basis(3));
        assert_eq!(fr.n2, MinkVector::basis(4));
        assert_eq!(second_tensor(&j, &fr), SecondTensor::default());
    }

    #[test]
    fn timelike_tangent_is_rejected() {
        let s = SurfaceSpec::parse("t", ["u", "0", "0", "v"]).unwrap();
        let j = surface_jet(&s, (0.0, 0.0)).unwrap();
        assert!(matches!(first_form(&j), Err(GeomError::NotSpacelike { .. })));
    }

    #[test]
    fn frame_invariants_on_de_sitter() {
        let s = de_sitter();
        for (u, v) in [(0.1, 0.0), (0.3, 0.7), (-0.4, -1.2), (0.6, 2.0)] {
            let j = surface_jet(&s, (u, v)).unwrap();
            let fr = normal_frame(&j).unwrap();
            assert!((fr.n1.norm_sq() - 1.0).abs() < 1e-12);
            assert!((fr.n2.norm_sq() + 1.0).abs() < 1e-12);
            for t in [j.z_u, j.z_v] {
                assert!(inner(&fr.n1, &t).abs() < 1e-12);
                assert!(inner(&fr.n2, &t).abs() < 1e-12);
            }
            assert!(inner(&fr.n1, &fr.n2).abs() < 1e-12);
            assert!(orientation_det(&j.z_u, &j.z_v, &fr.n1, &fr.n2) > 0.0);
        }
    }

    #[test]
    fn tangential_completeness() {
        let s = de_sitter();
        let j = surface_jet(&s, (0.35, 0.4)).unwrap();
        let ff = first_form(&j).unwrap();
        let fr = normal_frame(&j).unwrap();
        let t = second_tensor(&j, &fr);
        let (x, y) = tangent_basis(&j, &ff);
        for (d, ij) in [(j.z_uu, (1, 1)), (j.z_uv, (1, 2)), (j.z_vv, (2, 2))] {
            let tangential = inner(&d, &x) * x + inner(&d, &y) * y;
            let r = d - tangential - t.sigma(&fr, ij);
            assert!(r.euclid_norm() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn rotation_law_matches_recomputation() {
        let j = surface_jet(&de_sitter(), (0.2, 0.3)).unwrap();
        let fr = normal_frame(&j).unwrap();
        let t = second_tensor(&j, &fr);
        for (theta, eps) in [(0.0, 1.0), (0.7, 1.0), (-1.3, -1.0)] {
            let direct = second_tensor(&j, &fr.rotated(theta, eps));
            let law = t.rotated(theta, eps);
            for (a, b) in [
                (direct.c11_1, law.c11_1),
                (direct.c11_2, law.c11_2),
                (direct.c12_1, law.c12_1),
                (direct.c12_2, law.c12_2),
                (direct.c22_1, law.c22_1),
                (direct.c22_2, law.c22_2),
            ] {
                assert!((a - b).abs() < 1e-10);
            }
            // old coefficients in terms of new ones
            let (c, s) = (theta.cosh(), theta.sinh());
            assert!((t.c11_1 - eps * (c * law.c11_1 - s * law.c11_2)).abs() < 1e-10);
        }
    }

    #[test]
    fn alignment_removes_sign_flips() {
        let s = de_sitter();
        let (nu, nv) = (4, 5);
        let mut frames = Vec::new();
        for i in 0..nu {
            for j in 0..nv {
                let jet = surface_jet(&s, (0.1 + 0.05 * i as f64, 0.1 * j as f64)).unwrap();
                let f = normal_frame(&jet).unwrap();
                frames.push(if (i + j) % 2 == 1 { f.flipped() } else { f });
            }
        }
        align_frame_signs(&mut frames, nu, nv);
        for i in 0..nu {
            for j in 0..nv {
                if j > 0 {
                    assert!(inner(&frames[i * nv + j].n1, &frames[i * nv + j - 1].n1) > 0.0);
                }
                if i > 0 {
                    assert!(inner(&frames[i * nv + j].n1, &frames[(i - 1) * nv + j].n1) > 0.0);
                }
            }
        }
    }
}
