//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use minksurf::bonnet::{check_integrability, round_trip, ClosedFormFields, ReconstructOptions};
use minksurf::catalog::{
    closed_form_frenet, closed_form_invariants, degenerate_surface, random_spec, RotationalSurfaceSpec, Variant,
};
use minksurf::forms::second_tensor;
use minksurf::frenet::flat::{flat_point_scan, FlatBranch};
use minksurf::frenet::{allied_and_chen, frenet_at};
use minksurf::invariants::{
    analyze, curvature_ellipse, geodesic_torsion, indicatrix, normal_connection_commutator, predicates,
    principal_tangents, reparametrize_check, second_form, EllipseShape, IndicatrixShape, Principal, TangentDirection,
};
use minksurf::{inner, parse};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let o = f();
    (o, t.elapsed())
}

/// (k, ϰ, K) along a u-range against exact formulas, at a spread of v values.
fn sphere_invariants(spec: RotationalSurfaceSpec, range: (f64, f64), exact: impl Fn(f64) -> [f64; 3]) -> Outcome {
    let imm = spec.coordinates();
    let mut worst = 0.0f64;
    for (i, u) in linspace(range.0, range.1, 100).into_iter().enumerate() {
        let v = -0.5 + 0.01 * i as f64;
        let r = analyze(&imm, u, v).expect("point on the declared domain").report;
        let [k, kappa, gauss] = exact(u);
        worst = worst.max(rel(r.k, k)).max(rel(r.kappa, kappa)).max(rel(r.gauss, gauss));
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("max relative error {worst:.2e} (tol 1e-8)"),
    }
}

fn criterion_1() -> Outcome {
    let (mut o, t) = timed(|| {
        sphere_invariants(RotationalSurfaceSpec::de_sitter(), (0.05, 0.7), |u| {
            let c2 = (2.0 * u).cos().powi(2);
            [-4.0 / c2, 0.0, (c2 + 1.0) / c2]
        })
    });
    o.pass &= t < Duration::from_secs(1);
    o.detail += &format!(", {t:.2?} (limit 1 s)");
    o
}

fn criterion_2() -> Outcome {
    sphere_invariants(RotationalSurfaceSpec::hyperbolic_sphere(), (0.05, 1.0), |u| {
        let c2 = (2.0 * u).cosh().powi(2);
        [-4.0 / c2, 0.0, -(c2 + 1.0) / c2]
    })
}

fn criterion_3() -> Outcome {
    let (mut o, t) = timed(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_701);
        let (mut inv, mut fr, mut b2) = (0.0f64, 0.0f64, 0.0f64);
        let mut specs = 0;
        for variant in [Variant::M1, Variant::M2] {
            for _ in 0..25 {
                let s = random_spec(&mut rng, variant, (0.0, 0.5));
                let imm = s.immersion().expect("validated spec");
                specs += 1;
                for u in linspace(0.0, 0.5, 100) {
                    let v = rng.gen_range(-1.0..1.0);
                    let eps = s.orientation_sign(u).unwrap();
                    let (k, kappa, gauss) = closed_form_invariants(&s, u).unwrap();
                    let r = analyze(&imm, u, v).unwrap().report;
                    inv = inv.max(rel(r.k, k)).max(rel(r.kappa, eps * kappa)).max(rel(r.gauss, gauss));
                    let fd = frenet_at(&imm, (u, v), None).unwrap();
                    let published = s.published_frame(u, v).unwrap();
                    let eb = inner(&fd.b, &published.0[2]).signum();
                    let el = -inner(&fd.l, &published.0[3]).signum();
                    let got = fd.regauge(eb, el).functions();
                    let want = closed_form_frenet(&s, u).unwrap();
                    for (a, b) in [
                        (got.gamma1, 0.0),
                        (got.lambda, 0.0),
                        (got.beta1, 0.0),
                        (got.gamma2, want.gamma2),
                        (got.nu1, want.nu1),
                        (got.nu2, want.nu2),
                        (got.mu, want.mu),
                    ] {
                        fr = fr.max(rel(a, b));
                    }
                    b2 = b2.max(rel(got.beta2, want.beta2));
                }
            }
        }
        Outcome {
            pass: inv <= 1e-6 && fr <= 1e-6 && b2 <= 1e-5,
            detail: format!(
                "{specs} specs x 100 points: invariants {inv:.2e}, frenet {fr:.2e} (tol 1e-6), beta2 {b2:.2e} (tol 1e-5)"
            ),
        }
    });
    o.pass &= t < Duration::from_secs(30);
    o.detail += &format!(", {t:.2?} (limit 30 s)");
    o
}

fn criterion_4() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let strategy = common::surface_point();
    let dir = |rng: &mut ChaCha8Rng| {
        let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        TangentDirection::new(t.cos(), t.sin())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 7];
    let mut samples = 0;
    while samples < 1000 {
        let (s, u, v) = strategy.new_tree(&mut runner).unwrap().current();
        let Ok(p) = analyze(&s, u, v) else { continue };
        samples += 1;
        let r = &p.report;
        let (ff, sf) = (&r.first, &r.second);
        let sc = 1f64.max(r.kappa * r.kappa).max(r.k.abs());
        let disc = r.kappa * r.kappa - r.k;
        worst[0] = worst[0].max(-disc / sc);
        let half = (r.nu1p - r.nu2p) / 2.0;
        worst[1] = worst[1].max((disc - half * half).abs() / sc);
        worst[2] = worst[2]
            .max((r.nu1p * r.nu2p - r.k).abs() / sc)
            .max(rel((r.nu1p + r.nu2p) / 2.0, r.kappa));
        // ζ under u = a ū + b v̄ + q ū v̄ + c, v = d ū + e v̄ + f landing on (u, v)
        let a: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
        let jac = a[0] * a[3] - a[1] * a[2];
        if jac.abs() > 0.05 {
            let at = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let q = 0.2 * a[4];
            let c0 = u - a[0] * at.0 - a[1] * at.1 - q * at.0 * at.1;
            let c1 = v - a[2] * at.0 - a[3] * at.1;
            let cu = parse(&format!("({})*u + ({})*v + ({})*u*v + ({})", a[0], a[1], q, c0)).unwrap();
            let cv = parse(&format!("({})*u + ({})*v + ({})", a[2], a[3], c1)).unwrap();
            if let Ok(rc) = reparametrize_check(&s, (&cu, &cv), &dir(&mut rng), &dir(&mut rng), at) {
                worst[3] = worst[3].max(rel(rc.zeta_new, rc.sign * rc.zeta_old));
            }
        }
        let theta = rng.gen_range(-2.0..2.0);
        let eps = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let rotated = second_form(&second_tensor(&p.jet, &p.frame.rotated(theta, eps)), ff);
        worst[4] = worst[4].max(
            [(sf.l, rotated.l), (sf.m, rotated.m), (sf.n, rotated.n)]
                .iter()
                .map(|(x, y)| (x - y).abs() / sf.scale())
                .fold(0.0, f64::max),
        );
        if let Principal::Pair(d) = principal_tangents(sf, ff) {
            for g in &d {
                worst[5] = worst[5].max(geodesic_torsion(g, sf, ff).abs() / sf.scale());
            }
        }
        let c = normal_connection_commutator(&p.tensor, ff, &p.frame);
        worst[6] = worst[6].max(rel(c, r.kappa));
    }
    let limits = [1e-10, 1e-9, 1e-9, 1e-9, 1e-10, 1e-9, 1e-9];
    let names = ["disc", "identity", "k/kappa", "zeta", "LMN gauge", "alpha_g", "commutator"];
    let pass = worst.iter().zip(limits).all(|(w, l)| *w <= l);
    let detail = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n} {w:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome {
        pass,
        detail: format!("{samples} samples: {detail}"),
    }
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut worst_kappa = 0.0f64;
    let mut worst_lambda = 0.0f64;
    for (spec, us) in [
        (RotationalSurfaceSpec::de_sitter(), linspace(0.05, 0.7, 8)),
        (RotationalSurfaceSpec::hyperbolic_sphere(), linspace(0.05, 1.0, 8)),
    ] {
        let imm = spec.coordinates();
        for (i, &u) in us.iter().enumerate() {
            let v = 0.1 * i as f64 - 0.3;
            let p = analyze(&imm, u, v).unwrap();
            let r = &p.report;
            worst_kappa = worst_kappa.max(r.kappa.abs());
            ok &= r.kappa.abs() < 1e-10 && predicates(r).is_flat_normal_connection;
            ok &= indicatrix(r).map(|c| c.shape) == Ok(IndicatrixShape::RectangularHyperbola);
            let e = curvature_ellipse(&p.tensor, &r.first, &p.frame, 36);
            ok &= e.shape == EllipseShape::LineSegment && !e.collinear_with_h;
            let fd = frenet_at(&imm, (u, v), None).unwrap();
            worst_lambda = worst_lambda.max(fd.lambda.abs());
            ok &= allied_and_chen(&fd, 1e-10).1;
        }
    }
    Outcome {
        pass: ok,
        detail: format!(
            "16 points: flat normal connection (max |kappa| {worst_kappa:.1e}), rectangular hyperbola, \
             segment not collinear with H, Chen (max |lambda| {worst_lambda:.1e})"
        ),
    }
}

fn criterion_6() -> Outcome {
    let axis = |a: f64, h: f64, n: usize| -> Vec<f64> { (0..n).map(|i| a + h * i as f64).collect() };
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut coarse_time = Duration::ZERO;
    for (name, spec, u0) in [
        ("M1", RotationalSurfaceSpec::de_sitter(), -0.45),
        ("M2", RotationalSurfaceSpec::hyperbolic_sphere(), 0.1),
    ] {
        let imm = spec.coordinates();
        let opts = ReconstructOptions::default();
        let tc = Instant::now();
        let coarse = round_trip(&imm, &axis(u0, 0.02, 50), &axis(0.0, 0.02, 50), &opts).unwrap();
        coarse_time += tc.elapsed();
        let fine = round_trip(&imm, &axis(u0, 0.01, 99), &axis(0.0, 0.01, 99), &opts).unwrap();
        let ratio = coarse.max_position_error / fine.max_position_error;
        pass &= coarse.max_position_error < 1e-4 && coarse.max_frame_error < 1e-5 && ratio >= 12.0;
        parts.push(format!(
            "{name} position {:.2e}, frame {:.2e}, ratio {ratio:.1}",
            coarse.max_position_error, coarse.max_frame_error
        ));
    }
    pass &= coarse_time < Duration::from_secs(10);
    Outcome {
        pass,
        detail: format!(
            "{}; 50x50 runs {coarse_time:.2?} (limit 10 s), with refinement {:.2?}",
            parts.join("; "),
            t.elapsed()
        ),
    }
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for (spec, us) in [
        (RotationalSurfaceSpec::de_sitter(), linspace(0.05, 0.7, 14)),
        (RotationalSurfaceSpec::hyperbolic_sphere(), linspace(0.05, 1.0, 14)),
    ] {
        let report = check_integrability(&ClosedFormFields::new(spec), &us, &linspace(-0.5, 0.5, 6)).unwrap();
        worst = worst.max(report.max);
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("check.json");
    let argv = [
        "msurf", "check", "--surface", "de-sitter", "--u", "0.1:0.6:11", "--v", "0:0.5:6", "--perturb", "nu1=0.1",
        "--out", out.to_str().unwrap(),
    ];
    let code = minksurf::cli::main_with(argv.iter().map(std::ffi::OsString::from));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let flagged = doc["summary"]["max"].as_f64().unwrap_or(0.0);
    Outcome {
        pass: worst < 1e-6 && flagged >= 0.05 && code == 3,
        detail: format!(
            "closed-form residual {worst:.2e} (tol 1e-6); nu1 + 0.1 gives {flagged:.3} ({}) and exit code {code}",
            doc["summary"]["worst"].as_str().unwrap_or("?")
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["plane", "graph", "tangent-developable", "helix-cylinder"] {
        let ns = degenerate_surface(name).unwrap();
        let us = linspace(ns.u_domain.0, ns.u_domain.1, 5);
        let vs = linspace(ns.v_domain.0, ns.v_domain.1, 5);
        let scan = flat_point_scan(&ns.spec, &us, &vs, None);
        let hyperplane = matches!(name, "plane" | "graph");
        match scan.map(|s| s.branch) {
            Ok(FlatBranch::HyperplaneCandidate { max_normal_deviation, .. }) if hyperplane => {
                pass &= max_normal_deviation < 1e-8;
                parts.push(format!("{name} hyperplane {max_normal_deviation:.1e}"));
            }
            Ok(FlatBranch::DevelopableCandidate { zero_curvature_residual }) if !hyperplane => {
                pass &= zero_curvature_residual < 1e-6;
                parts.push(format!("{name} developable {zero_curvature_residual:.1e}"));
            }
            other => {
                pass = false;
                parts.push(format!("{name} unexpected {other:?}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("De Sitter invariants", criterion_1),
        ("hyperbolic sphere invariants", criterion_2),
        ("random rotational surfaces", criterion_3),
        ("invariant identities", criterion_4),
        ("characterization predicates", criterion_5),
        ("reconstruction round trip", criterion_6),
        ("integrability gate", criterion_7),
        ("flat-point dichotomy", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
