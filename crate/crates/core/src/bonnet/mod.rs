//! Reconstruction of a surface from its eight invariant functions.
//!
//! The fields determine `√E` and `√G` through two quotients, must satisfy a
//! Gauss-Codazzi-Ricci type system, and then the frame `Z = (x, y, b, l)`
//! solves `Z_u = A Z`, `Z_v = B Z` while the position solves
//! `z_u = √E x`, `z_v = √G y`.

pub mod fields;
pub mod integrate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use fields::{ClosedFormFields, GridFields, InvariantFields, MetricSample, Perturbed, SurfaceFields};
pub use integrate::{
    integrate_frame, Diagnostics, DRIFT_ABORT, integrate_position, reconstruct, round_trip, FrameGrid, ReconstructOptions, ReconstructionResult,
    RoundTripReport,
};

use crate::error::{GeomError, Result};
use crate::frenet::{EightFunctions, HCase};

/// Denominators of the metric quotients below this are degenerate.
pub const QUOTIENT_DENOMINATOR_TOL: f64 = 1e-10;

/// Default gate on integrability residuals before integrating.
pub const DEFAULT_GATE: f64 = 1e-4;

/// `2μγ₂ + ν₁β₂ − λβ₁` and `2μγ₁ − λβ₂ + ν₂β₁`.
pub fn quotient_denominators(f: &EightFunctions) -> (f64, f64) {
    (
        2.0 * f.mu * f.gamma2 + f.nu1 * f.beta2 - f.lambda * f.beta1,
        2.0 * f.mu * f.gamma1 - f.lambda * f.beta2 + f.nu2 * f.beta1,
    )
}

/// The metric at one point and where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedMetric {
    pub metric: MetricSample,
    /// `μ_u / (2μγ₂ + ν₁β₂ − λβ₁)` where the denominator is not degenerate.
    pub quotient_e: Option<f64>,
    /// `μ_v / (2μγ₁ − λβ₂ + ν₂β₁)` where the denominator is not degenerate.
    pub quotient_g: Option<f64>,
    /// True when the metric values were supplied rather than derived.
    pub supplied: bool,
}

fn quotients(fields: &dyn InvariantFields, u: f64, v: f64) -> Result<(Option<f64>, Option<f64>)> {
    let f = fields.value(u, v)?;
    let (du, dv) = fields.partials(u, v)?;
    let (d1, d2) = quotient_denominators(&f);
    let q = |num: f64, den: f64| (den.abs() > QUOTIENT_DENOMINATOR_TOL).then(|| num / den);
    Ok((q(du.mu, d1), q(dv.mu, d2)))
}

fn derived_value(q: Option<f64>, what: &'static str, u: f64, v: f64) -> Result<f64> {
    let x = q.ok_or(GeomError::DegenerateDenominator { what, u, v })?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(GeomError::MetricPositivity { what, u, v })
    }
}

/// `√E` and `√G` at `(u, v)`.
///
/// A supplied metric wins; the quotients are then kept for comparison.
/// Without one, a degenerate denominator or a non-positive quotient is an error.
pub fn derive_metric(fields: &dyn InvariantFields, u: f64, v: f64) -> Result<DerivedMetric> {
    let (quotient_e, quotient_g) = quotients(fields, u, v)?;
    if let Some(metric) = fields.supplied_metric(u, v)? {
        return Ok(DerivedMetric {
            metric,
            quotient_e,
            quotient_g,
            supplied: true,
        });
    }
    let sqrt_e = derived_value(quotient_e, "sqrt(E) quotient", u, v)?;
    let sqrt_g = derived_value(quotient_g, "sqrt(G) quotient", u, v)?;
    let h = fields::PARTIAL_STEP;
    let mut sqrt_e_v = 0.0;
    let mut sqrt_g_u = 0.0;
    for (s, w) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
        sqrt_e_v += w * derived_value(quotients(fields, u, v + s * h)?.0, "sqrt(E) quotient", u, v + s * h)? / (12.0 * h);
        sqrt_g_u += w * derived_value(quotients(fields, u + s * h, v)?.1, "sqrt(G) quotient", u + s * h, v)? / (12.0 * h);
    }
    Ok(DerivedMetric {
        metric: MetricSample {
            sqrt_e,
            sqrt_g,
            sqrt_e_v,
            sqrt_g_u,
        },
        quotient_e,
        quotient_g,
        supplied: false,
    })
}

/// Metric values only, without the cross partials.
pub(crate) fn metric_values(fields: &dyn InvariantFields, u: f64, v: f64) -> Result<(f64, f64)> {
    if let Some(m) = fields.supplied_metric(u, v)? {
        return Ok((m.sqrt_e, m.sqrt_g));
    }
    let (qe, qg) = quotients(fields, u, v)?;
    Ok((
        derived_value(qe, "sqrt(E) quotient", u, v)?,
        derived_value(qg, "sqrt(G) quotient", u, v)?,
    ))
}

/// Names of the checked conditions, in report order.
pub const CONDITION_NAMES: [&str; 9] = [
    "gauss", "mu_u", "mu_v", "codazzi_1", "codazzi_2", "ricci", "compat_e", "compat_g", "matrix",
];

/// All residuals at one point, in [`CONDITION_NAMES`] order.
///
/// The first six are the listed system (the Gauss condition and the Ricci
/// condition take their timelike forms for [`HCase::TimelikeH`]); the two
/// `compat` entries are `−γ₁√E√G − (√E)_v` and `−γ₂√E√G − (√G)_u`; `matrix`
/// is the largest entry of `A_v − B_u + AB − BA`.
pub fn residuals_at(case: HCase, f: &EightFunctions, du: &EightFunctions, dv: &EightFunctions, m: &MetricSample) -> [f64; 9] {
    let s = case.sign();
    let (se, sg) = (m.sqrt_e, m.sqrt_g);
    let x = |d: f64| d / se;
    let y = |d: f64| d / sg;
    let EightFunctions {
        gamma1: g1,
        gamma2: g2,
        nu1: n1,
        nu2: n2,
        lambda: la,
        mu,
        beta1: b1,
        beta2: b2,
    } = *f;
    let gauss = s * (n1 * n2 - la * la + mu * mu) - (x(du.gamma2) + y(dv.gamma1) - (g1 * g1 + g2 * g2));
    let mu_u = 2.0 * mu * g2 + n1 * b2 - la * b1 - x(du.mu);
    let mu_v = 2.0 * mu * g1 - la * b2 + n2 * b1 - y(dv.mu);
    let codazzi_1 = 2.0 * la * g2 - mu * b1 - (n1 - n2) * g1 - (x(du.lambda) - y(dv.nu1));
    let codazzi_2 = 2.0 * la * g1 - mu * b2 + (n1 - n2) * g2 - (-x(du.nu2) + y(dv.lambda));
    let ricci = g1 * b1 - g2 * b2 + s * (n1 - n2) * mu - (-x(du.beta2) + y(dv.beta1));
    let compat_e = -g1 * se * sg - m.sqrt_e_v;
    let compat_g = -g2 * se * sg - m.sqrt_g_u;
    let matrix = matrix_residual(case, f, du, dv, m);
    [gauss, mu_u, mu_v, codazzi_1, codazzi_2, ricci, compat_e, compat_g, matrix]
}

type Mat4 = [[f64; 4]; 4];

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn scaled(a: &Mat4, s: f64) -> Mat4 {
    a.map(|r| r.map(|x| s * x))
}

fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

/// `A = √E Kx`, `B = √G Ky` at a point.
pub fn coefficient_matrices(case: HCase, f: &EightFunctions, sqrt_e: f64, sqrt_g: f64) -> (Mat4, Mat4) {
    let (kx, ky) = f.structure_matrices(case);
    (scaled(&kx, sqrt_e), scaled(&ky, sqrt_g))
}

/// Largest entry of `A_v − B_u + AB − BA`.
pub fn matrix_residual(case: HCase, f: &EightFunctions, du: &EightFunctions, dv: &EightFunctions, m: &MetricSample) -> f64 {
    let (kx, ky) = f.structure_matrices(case);
    // the structure matrices are linear in the eight functions
    let (kx_v, _) = dv.structure_matrices(case);
    let (_, ky_u) = du.structure_matrices(case);
    let a = scaled(&kx, m.sqrt_e);
    let b = scaled(&ky, m.sqrt_g);
    let a_v = add(&scaled(&kx, m.sqrt_e_v), &scaled(&kx_v, m.sqrt_e));
    let b_u = add(&scaled(&ky, m.sqrt_g_u), &scaled(&ky_u, m.sqrt_g));
    let ab = mat_mul(&a, &b);
    let ba = mat_mul(&b, &a);
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a_v[i][j] - b_u[i][j] + ab[i][j] - ba[i][j]).abs());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResidual {
    pub name: String,
    pub max: f64,
    pub at: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub h_case: HCase,
    pub conditions: Vec<ConditionResidual>,
    pub max: f64,
    pub worst: String,
    pub at: (f64, f64),
    /// Largest relative gap between a quotient and a supplied metric.
    pub quotient_discrepancy: Option<f64>,
    pub samples: usize,
}

impl IntegrabilityReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResidual> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Error if the largest residual exceeds `gate`.
    pub fn enforce(&self, gate: f64) -> Result<()> {
        if self.max > gate {
            return Err(GeomError::IntegrabilityGate {
                residual: self.max,
                gate,
                condition: self.worst.clone(),
                u: self.at.0,
                v: self.at.1,
            });
        }
        Ok(())
    }
}

/// Evaluate every condition on the grid `us × vs`.
pub fn check_integrability(fields: &dyn InvariantFields, us: &[f64], vs: &[f64]) -> Result<IntegrabilityReport> {
    let case = fields.h_case();
    let nv = vs.len();
    let per_point: Vec<([f64; 9], Option<f64>, (f64, f64))> = (0..us.len() * nv)
        .into_par_iter()
        .map(|idx| {
            let (u, v) = (us[idx / nv], vs[idx % nv]);
            let f = fields.value(u, v)?;
            let (du, dv) = fields.partials(u, v)?;
            let dm = derive_metric(fields, u, v)?;
            let r = residuals_at(case, &f, &du, &dv, &dm.metric);
            let gap = if dm.supplied {
                let rel = |q: Option<f64>, x: f64| q.map(|q| ((q - x) / x).abs());
                match (rel(dm.quotient_e, dm.metric.sqrt_e), rel(dm.quotient_g, dm.metric.sqrt_g)) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                }
            } else {
                None
            };
            Ok((r, gap, (u, v)))
        })
        .collect::<Result<_>>()?;
    let mut conditions: Vec<ConditionResidual> = CONDITION_NAMES
        .iter()
        .map(|n| ConditionResidual {
            name: n.to_string(),
            max: 0.0,
            at: (us.first().copied().unwrap_or(0.0), vs.first().copied().unwrap_or(0.0)),
        })
        .collect();
    let mut discrepancy: Option<f64> = None;
    for (r, gap, at) in &per_point {
        for (c, x) in conditions.iter_mut().zip(r) {
            if !(x.abs() <= c.max) {
                c.max = if x.is_nan() { f64::INFINITY } else { x.abs() };
                c.at = *at;
            }
        }
        if let Some(g) = gap {
            discrepancy = Some(discrepancy.map_or(*g, |d| d.max(*g)));
        }
    }
    let worst = conditions
        .iter()
        .max_by(|a, b| a.max.total_cmp(&b.max))
        .cloned()
        .ok_or_else(|| GeomError::Invalid("empty grid".into()))?;
    Ok(IntegrabilityReport {
        h_case: case,
        max: worst.max,
        worst: worst.name,
        at: worst.at,
        conditions,
        quotient_discrepancy: discrepancy,
        samples: per_point.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{random_spec, RotationalSurfaceSpec, Variant};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn axis(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn closed_forms_satisfy_the_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut specs = vec![RotationalSurfaceSpec::de_sitter(), RotationalSurfaceSpec::hyperbolic_sphere()];
        for variant in [Variant::M1, Variant::M2] {
            specs.push(random_spec(&mut rng, variant, (0.0, 0.5)));
        }
        for spec in specs {
            let (a, b) = spec.u_domain;
            let f = ClosedFormFields::new(spec.clone());
            let r = check_integrability(&f, &axis(a, b, 15), &axis(0.0, 1.0, 3)).unwrap();
            for c in &r.conditions {
                assert!(c.max < 1e-9, "{:?} {} = {}", spec.variant, c.name, c.max);
            }
        }
    }

    #[test]
    fn metric_quotient_matches_first_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for variant in [Variant::M1, Variant::M2] {
            let spec = random_spec(&mut rng, variant, (0.0, 0.5));
            let f = ClosedFormFields::without_metric(spec.clone());
            for u in [0.1, 0.3] {
                let (qe, _) = quotients(&f, u, 0.2).unwrap();
                let (se, _) = spec.metric(u).unwrap();
                assert!((qe.unwrap() - se).abs() < 1e-8);
            }
            // the √G quotient is 0/0 on every rotational surface
            assert!(derive_metric(&f, 0.2, 0.2).is_err());
        }
    }

    #[test]
    fn constant_mu_is_rejected() {
        struct Constant;
        impl InvariantFields for Constant {
            fn h_case(&self) -> HCase {
                HCase::SpacelikeH
            }
            fn value(&self, _: f64, _: f64) -> Result<EightFunctions> {
                Ok(EightFunctions {
                    mu: 1.0,
                    ..Default::default()
                })
            }
        }
        assert!(matches!(
            derive_metric(&Constant, 0.0, 0.0),
            Err(GeomError::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn perturbation_is_flagged() {
        let f = Perturbed {
            inner: ClosedFormFields::new(RotationalSurfaceSpec::de_sitter()),
            offset: EightFunctions {
                nu1: 0.1,
                ..Default::default()
            },
        };
        let r = check_integrability(&f, &axis(0.1, 0.6, 6), &[0.0, 0.5]).unwrap();
        assert!(r.condition("gauss").unwrap().max >= 0.05);
        assert!(matches!(r.enforce(DEFAULT_GATE), Err(GeomError::IntegrabilityGate { .. })));
    }
}
