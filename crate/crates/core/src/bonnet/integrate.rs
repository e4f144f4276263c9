//! RK4 integration of the frame system and the position system.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::{InvariantFields, SurfaceFields};
use super::{check_integrability, metric_values, IntegrabilityReport, DEFAULT_GATE};
use crate::error::{GeomError, Result};
use crate::frenet::{frenet_grid, HCase};
use crate::lorentz::{Frame4, MinkVector, Motion};
use crate::surface::Immersion;

/// Orthonormality drift of a single step above which integration aborts.
pub const DRIFT_ABORT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructOptions {
    /// Largest integrability residual accepted before integrating.
    pub gate: f64,
    /// Evaluate the residuals on every `check_stride`-th node per axis; 0 skips the check.
    pub check_stride: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            gate: DEFAULT_GATE,
            check_stride: 1,
        }
    }
}

/// Right-hand side of the combined frame and position system at one point,
/// along one parameter direction.
#[derive(Clone, Copy, Debug)]
struct Rhs {
    m: [[f64; 4]; 4],
    /// `√E` along u, `√G` along v.
    speed: f64,
    /// 0 for x (the u-direction), 1 for y (the v-direction).
    slot: usize,
}

fn rhs(fields: &dyn InvariantFields, case: HCase, u: f64, v: f64, slot: usize) -> Result<Rhs> {
    let f = fields.value(u, v)?;
    let (se, sg) = metric_values(fields, u, v)?;
    let (kx, ky) = f.structure_matrices(case);
    let (k, speed) = if slot == 0 { (kx, se) } else { (ky, sg) };
    Ok(Rhs {
        m: k.map(|r| r.map(|x| speed * x)),
        speed,
        slot,
    })
}

fn apply(r: &Rhs, z: &Frame4) -> ([MinkVector; 4], MinkVector) {
    (std::array::from_fn(|s| z.combine(r.m[s])), r.speed * z.0[r.slot])
}

fn axpy(z: &Frame4, h: f64, k: &[MinkVector; 4]) -> Frame4 {
    Frame4(std::array::from_fn(|s| z.0[s] + h * k[s]))
}

/// One classical RK4 step; returns the new frame before re-projection and the position increment.
fn rk4_step(z: &Frame4, h: f64, r0: &Rhs, rm: &Rhs, r1: &Rhs) -> (Frame4, MinkVector) {
    let (k1, p1) = apply(r0, z);
    let (k2, p2) = apply(rm, &axpy(z, 0.5 * h, &k1));
    let (k3, p3) = apply(rm, &axpy(z, 0.5 * h, &k2));
    let (k4, p4) = apply(r1, &axpy(z, h, &k3));
    let next = Frame4(std::array::from_fn(|s| {
        z.0[s] + (h / 6.0) * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s])
    }));
    (next, (h / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4))
}

/// Coefficients at nodes and at the midpoints of grid edges.
struct Coefficients {
    node: Vec<[Rhs; 2]>,
    /// `[i * nv + j]`: midpoint between nodes `(i, j)` and `(i + 1, j)`.
    mid_u: Vec<Rhs>,
    /// `[i * (nv - 1) + j]`: midpoint between nodes `(i, j)` and `(i, j + 1)`.
    mid_v: Vec<Rhs>,
}

fn coefficients(fields: &dyn InvariantFields, us: &[f64], vs: &[f64]) -> Result<Coefficients> {
    let case = fields.h_case();
    let (nu, nv) = (us.len(), vs.len());
    let node = (0..nu * nv)
        .into_par_iter()
        .map(|idx| {
            let (u, v) = (us[idx / nv], vs[idx % nv]);
            Ok([rhs(fields, case, u, v, 0)?, rhs(fields, case, u, v, 1)?])
        })
        .collect::<Result<Vec<_>>>()?;
    let mid_u = (0..nu.saturating_sub(1) * nv)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nv, idx % nv);
            rhs(fields, case, 0.5 * (us[i] + us[i + 1]), vs[j], 0)
        })
        .collect::<Result<Vec<_>>>()?;
    let mid_v = (0..nu * nv.saturating_sub(1))
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / (nv - 1), idx % (nv - 1));
            rhs(fields, case, us[i], 0.5 * (vs[j] + vs[j + 1]), 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Coefficients { node, mid_u, mid_v })
}

/// The integrated frame field and the position increments along the traversal.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameGrid {
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub base: (usize, usize),
    pub frames: Vec<Frame4>,
    /// Position increment of the step that reached each node (zero at the base).
    pub increments: Vec<MinkVector>,
    /// Largest drift from orthonormality before a re-projection.
    pub max_step_drift: f64,
    /// Largest drift remaining after re-projection.
    pub max_orthonormality_drift: f64,
    /// Frame and position gaps at the far corner between the two path orders.
    pub path_frame_residual: f64,
    pub path_position_residual: f64,
}

struct Walker<'a> {
    c: &'a Coefficients,
    us: &'a [f64],
    vs: &'a [f64],
}

impl Walker<'_> {
    fn nv(&self) -> usize {
        self.vs.len()
    }

    /// Step from node `from` to the neighbouring node `to`.
    fn step(&self, z: &Frame4, from: (usize, usize), to: (usize, usize)) -> Result<(Frame4, MinkVector, f64, f64)> {
        let nv = self.nv();
        let (r0, rm, r1, h) = if from.1 == to.1 {
            let i = from.0.min(to.0);
            (
                &self.c.node[from.0 * nv + from.1][0],
                &self.c.mid_u[i * nv + from.1],
                &self.c.node[to.0 * nv + to.1][0],
                self.us[to.0] - self.us[from.0],
            )
        } else {
            let j = from.1.min(to.1);
            (
                &self.c.node[from.0 * nv + from.1][1],
                &self.c.mid_v[from.0 * (nv - 1) + j],
                &self.c.node[to.0 * nv + to.1][1],
                self.vs[to.1] - self.vs[from.1],
            )
        };
        let (raw, dz) = rk4_step(z, h, r0, rm, r1);
        let drift = raw.orthonormality_drift();
        if !(drift <= DRIFT_ABORT) {
            return Err(GeomError::Drift {
                drift,
                u: self.us[to.0],
                v: self.vs[to.1],
            });
        }
        let fixed = raw.reorthonormalize();
        Ok((fixed, dz, drift, fixed.orthonormality_drift()))
    }

    /// Walk `path` from its first node; returns the last frame and the summed position increment.
    fn walk(&self, z0: &Frame4, path: &[(usize, usize)]) -> Result<(Frame4, MinkVector)> {
        let mut z = *z0;
        let mut p = MinkVector::ZERO;
        for w in path.windows(2) {
            let (nz, dz, _, _) = self.step(&z, w[0], w[1])?;
            z = nz;
            p += dz;
        }
        Ok((z, p))
    }
}

fn line(from: usize, to: usize) -> Vec<usize> {
    if from <= to {
        (from..=to).collect()
    } else {
        (to..=from).rev().collect()
    }
}

/// Integrate `Z_v = BZ` along the base u-line, then `Z_u = AZ` along every v = const line.
pub fn integrate_frame(
    fields: &dyn InvariantFields,
    us: &[f64],
    vs: &[f64],
    base: (usize, usize),
    init: Frame4,
) -> Result<FrameGrid> {
    let (nu, nv) = (us.len(), vs.len());
    if nu == 0 || nv == 0 || base.0 >= nu || base.1 >= nv {
        return Err(GeomError::Invalid("base node outside the grid".into()));
    }
    for axis in [us, vs] {
        if axis.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeomError::Invalid("grid axes must be strictly increasing".into()));
        }
    }
    let c = coefficients(fields, us, vs)?;
    let walker = Walker { c: &c, us, vs };
    let mut frames = vec![init; nu * nv];
    let mut increments = vec![MinkVector::ZERO; nu * nv];
    let mut max_step = 0.0f64;
    let mut max_after = 0.0f64;
    // base u-line, both directions from the base node
    for dir in [line(base.1, nv - 1), line(base.1, 0)] {
        for w in dir.windows(2) {
            let (from, to) = ((base.0, w[0]), (base.0, w[1]));
            let (z, dz, d0, d1) = walker.step(&frames[from.0 * nv + from.1], from, to)?;
            frames[to.0 * nv + to.1] = z;
            increments[to.0 * nv + to.1] = dz;
            max_step = max_step.max(d0);
            max_after = max_after.max(d1);
        }
    }
    // each v = const line starting from the base u-line
    type Column = Vec<(usize, Frame4, MinkVector, f64, f64)>;
    let columns: Vec<Column> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::with_capacity(nu);
            for dir in [line(base.0, nu - 1), line(base.0, 0)] {
                let mut z = frames[base.0 * nv + j];
                for w in dir.windows(2) {
                    let (nz, dz, d0, d1) = walker.step(&z, (w[0], j), (w[1], j))?;
                    out.push((w[1], nz, dz, d0, d1));
                    z = nz;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    for (j, col) in columns.into_iter().enumerate() {
        for (i, z, dz, d0, d1) in col {
            frames[i * nv + j] = z;
            increments[i * nv + j] = dz;
            max_step = max_step.max(d0);
            max_after = max_after.max(d1);
        }
    }
    // the other path order to the far corner
    let far = (
        if base.0 * 2 < nu { nu - 1 } else { 0 },
        if base.1 * 2 < nv { nv - 1 } else { 0 },
    );
    let mut path: Vec<(usize, usize)> = line(base.0, far.0).into_iter().map(|i| (i, base.1)).collect();
    path.extend(line(base.1, far.1).into_iter().skip(1).map(|j| (far.0, j)));
    let (z_alt, p_alt) = walker.walk(&init, &path)?;
    let mut main_path: Vec<(usize, usize)> = line(base.1, far.1).into_iter().map(|j| (base.0, j)).collect();
    main_path.extend(line(base.0, far.0).into_iter().skip(1).map(|i| (i, far.1)));
    let p_main: MinkVector = main_path
        .iter()
        .skip(1)
        .fold(MinkVector::ZERO, |acc, &(i, j)| acc + increments[i * nv + j]);
    Ok(FrameGrid {
        us: us.to_vec(),
        vs: vs.to_vec(),
        base,
        path_frame_residual: z_alt.max_abs_diff(&frames[far.0 * nv + far.1]),
        path_position_residual: p_alt.max_abs_diff(&p_main),
        frames,
        increments,
        max_step_drift: max_step,
        max_orthonormality_drift: max_after,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_step_drift: f64,
    pub max_orthonormality_drift: f64,
    pub path_frame_residual: f64,
    pub path_position_residual: f64,
    pub max_integrability_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub us: Vec<f64>,
    pub vs: Vec<f64>,
    pub base: (usize, usize),
    /// Row-major `[i * nv + j]`.
    pub positions: Vec<MinkVector>,
    pub frames: Vec<Frame4>,
    pub diagnostics: Diagnostics,
}

impl ReconstructionResult {
    pub fn position(&self, i: usize, j: usize) -> MinkVector {
        self.positions[i * self.vs.len() + j]
    }

    pub fn frame(&self, i: usize, j: usize) -> Frame4 {
        self.frames[i * self.vs.len() + j]
    }

    /// Move the result by the motion taking its base frame and point onto the given ones.
    pub fn aligned_to(&self, frame: &Frame4, point: &MinkVector) -> ReconstructionResult {
        let k = self.base.0 * self.vs.len() + self.base.1;
        let m = Motion::between(&self.frames[k], &self.positions[k], frame, point);
        ReconstructionResult {
            positions: self.positions.iter().map(|p| m.apply_point(p)).collect(),
            frames: self.frames.iter().map(|f| m.apply_frame(f)).collect(),
            ..self.clone()
        }
    }
}

/// Sum the position increments along the traversal used by [`integrate_frame`].
pub fn integrate_position(frames: &FrameGrid, init: MinkVector) -> ReconstructionResult {
    let (nu, nv) = (frames.us.len(), frames.vs.len());
    let base = frames.base;
    let mut positions = vec![init; nu * nv];
    for dir in [line(base.1, nv - 1), line(base.1, 0)] {
        for w in dir.windows(2) {
            positions[base.0 * nv + w[1]] = positions[base.0 * nv + w[0]] + frames.increments[base.0 * nv + w[1]];
        }
    }
    for j in 0..nv {
        for dir in [line(base.0, nu - 1), line(base.0, 0)] {
            for w in dir.windows(2) {
                positions[w[1] * nv + j] = positions[w[0] * nv + j] + frames.increments[w[1] * nv + j];
            }
        }
    }
    ReconstructionResult {
        us: frames.us.clone(),
        vs: frames.vs.clone(),
        base,
        positions,
        frames: frames.frames.clone(),
        diagnostics: Diagnostics {
            max_step_drift: frames.max_step_drift,
            max_orthonormality_drift: frames.max_orthonormality_drift,
            path_frame_residual: frames.path_frame_residual,
            path_position_residual: frames.path_position_residual,
            max_integrability_residual: None,
        },
    }
}

fn strided(xs: &[f64], stride: usize) -> Vec<f64> {
    let mut out: Vec<f64> = xs.iter().copied().step_by(stride).collect();
    if let Some(&last) = xs.last() {
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

/// Gate on the integrability residuals, then integrate frame and position.
pub fn reconstruct(
    fields: &dyn InvariantFields,
    us: &[f64],
    vs: &[f64],
    base: (usize, usize),
    init_frame: Frame4,
    init_point: MinkVector,
    opts: &ReconstructOptions,
) -> Result<(ReconstructionResult, Option<IntegrabilityReport>)> {
    let report = if opts.check_stride > 0 {
        let r = check_integrability(fields, &strided(us, opts.check_stride), &strided(vs, opts.check_stride))?;
        r.enforce(opts.gate)?;
        Some(r)
    } else {
        None
    };
    let fg = integrate_frame(fields, us, vs, base, init_frame)?;
    let mut out = integrate_position(&fg, init_point);
    out.diagnostics.max_integrability_residual = report.as_ref().map(|r| r.max);
    Ok((out, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub max_position_error: f64,
    pub max_frame_error: f64,
    pub h_case: HCase,
    pub diagnostics: Diagnostics,
    pub integrability: Option<IntegrabilityReport>,
}

/// Extract the eight functions from `surface`, rebuild it from the base node's
/// frame and point, and compare against the original on the grid.
pub fn round_trip(surface: &dyn Immersion, us: &[f64], vs: &[f64], opts: &ReconstructOptions) -> Result<RoundTripReport> {
    let forward = frenet_grid(surface, us, vs, None)?;
    let base = (0usize, 0usize);
    let fields = SurfaceFields::new(surface, (us[0], vs[0]))?;
    let init_frame = forward[0].frame();
    let init_point = surface.jet(us[0], vs[0])?.z;
    let (rec, report) = reconstruct(&fields, us, vs, base, init_frame, init_point, opts)?;
    let rec = rec.aligned_to(&init_frame, &init_point);
    let nv = vs.len();
    let mut pos = 0.0f64;
    let mut fr = 0.0f64;
    for (idx, fd) in forward.iter().enumerate() {
        let (i, j) = (idx / nv, idx % nv);
        let z = surface.jet(us[i], vs[j])?.z;
        pos = pos.max(rec.position(i, j).max_abs_diff(&z));
        fr = fr.max(rec.frame(i, j).max_abs_diff(&fd.frame()));
    }
    Ok(RoundTripReport {
        max_position_error: pos,
        max_frame_error: fr,
        h_case: fields.h_case,
        diagnostics: rec.diagnostics,
        integrability: report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bonnet::ClosedFormFields;
    use crate::catalog::RotationalSurfaceSpec;
    use crate::frenet::EightFunctions;

    fn axis(a: f64, h: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + h * i as f64).collect()
    }

    #[test]
    fn single_curvature_assembles_rotation_block() {
        let f = EightFunctions {
            nu1: 1.0,
            ..Default::default()
        };
        let (kx, _) = f.structure_matrices(HCase::SpacelikeH);
        let z = Frame4::identity();
        let r = Rhs {
            m: kx.map(|r| r.map(|x| 2.0 * x)),
            speed: 2.0,
            slot: 0,
        };
        let (k, p) = apply(&r, &z);
        assert_eq!(k[0], 2.0 * z.0[2]);
        assert_eq!(k[2], -2.0 * z.0[0]);
        assert_eq!(k[1], MinkVector::ZERO);
        assert_eq!(k[3], MinkVector::ZERO);
        assert_eq!(p, 2.0 * z.0[0]);
    }

    #[test]
    fn closed_forms_rebuild_the_immersion() {
        for spec in [RotationalSurfaceSpec::de_sitter(), RotationalSurfaceSpec::hyperbolic_sphere()] {
            let imm = spec.immersion().unwrap();
            let us = axis(0.1, 0.02, 21);
            let vs = axis(0.0, 0.02, 21);
            let init = spec.published_frame(us[0], vs[0]).unwrap();
            let p0 = imm.position(us[0], vs[0]).unwrap();
            let f = ClosedFormFields::new(spec.clone());
            let (rec, rep) = reconstruct(&f, &us, &vs, (0, 0), init, p0, &ReconstructOptions::default()).unwrap();
            assert!(rep.unwrap().max < 1e-9);
            assert_eq!(rec.position(0, 0), p0);
            assert_eq!(rec.frame(0, 0), init);
            let mut worst = 0.0f64;
            for i in 0..us.len() {
                for j in 0..vs.len() {
                    worst = worst.max(rec.position(i, j).max_abs_diff(&imm.position(us[i], vs[j]).unwrap()));
                    let fr = spec.published_frame(us[i], vs[j]).unwrap();
                    worst = worst.max(rec.frame(i, j).max_abs_diff(&fr));
                }
            }
            assert!(worst < 1e-7, "{worst}");
            assert!(rec.diagnostics.path_position_residual < 1e-7);
        }
    }

    #[test]
    fn single_node_grid_is_identity() {
        let f = ClosedFormFields::new(RotationalSurfaceSpec::de_sitter());
        let init = Frame4::identity();
        let p = MinkVector::new(1.0, 2.0, 3.0, 4.0);
        let opts = ReconstructOptions {
            check_stride: 0,
            ..Default::default()
        };
        let (rec, _) = reconstruct(&f, &[0.2], &[0.0], (0, 0), init, p, &opts).unwrap();
        assert_eq!(rec.positions, vec![p]);
    }

    #[test]
    fn self_round_trip_small_patch() {
        let spec = RotationalSurfaceSpec::hyperbolic_sphere();
        let imm = spec.immersion().unwrap();
        let r = round_trip(&imm, &axis(0.2, 0.02, 11), &axis(0.0, 0.02, 11), &ReconstructOptions::default()).unwrap();
        assert!(r.max_position_error < 1e-7, "{r:?}");
        assert!(r.max_frame_error < 1e-7, "{r:?}");
    }
}
