#![allow(dead_code)]

use minksurf::SurfaceSpec;
use proptest::prelude::*;

fn num(x: f64) -> String {
    format!("({x:.12})")
}

/// A random spacelike patch near the origin: a graph `(u, v, p, q)` with small
/// timelike slope, rotated in the `(x1, x2)` plane and boosted along `(x1, x4)`.
pub fn surface() -> impl Strategy<Value = SurfaceSpec> {
    (
        prop::array::uniform5(-1.0..1.0f64),
        prop::array::uniform4(-0.35..0.35f64),
        -std::f64::consts::PI..std::f64::consts::PI,
        -0.8..0.8f64,
    )
        .prop_map(|(a, b, rot, boost)| {
            let p = format!(
                "{}*u^2 + {}*u*v + {}*v^2 + {}*sin(u)*v^2 + {}*u^3",
                num(a[0]),
                num(a[1]),
                num(a[2]),
                num(a[3]),
                num(a[4])
            );
            let q = format!("{}*u^2 + {}*u*v + {}*v^2 + {}*exp(u)*v", num(b[0]), num(b[1]), num(b[2]), num(b[3]));
            let (c, s) = (rot.cos(), rot.sin());
            let x = format!("{}*u - {}*v", num(c), num(s));
            let y = format!("{}*u + {}*v", num(s), num(c));
            let (ch, sh) = (boost.cosh(), boost.sinh());
            let x1 = format!("{}*({x}) + {}*({q})", num(ch), num(sh));
            let x4 = format!("{}*({x}) + {}*({q})", num(sh), num(ch));
            SurfaceSpec::parse("random", [&x1, &y, &p, &x4]).expect("generated expression parses")
        })
}

/// A random surface with a parameter point in `[-0.3, 0.3]²`.
pub fn surface_point() -> impl Strategy<Value = (SurfaceSpec, f64, f64)> {
    (surface(), -0.3..0.3f64, -0.3..0.3f64)
}

/// `|a - b| ≤ tol · max(1, |a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
