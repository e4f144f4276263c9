//! The eight frame functions of the hyperbolic sphere next to their closed forms.

use minksurf::catalog::{closed_form_frenet, RotationalSurfaceSpec};
use minksurf::frenet::{consistency, frenet_at};
use minksurf::invariants::analyze;
use minksurf::inner;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RotationalSurfaceSpec::hyperbolic_sphere();
    let s = spec.immersion()?;
    for u in [0.2, 0.5, 0.8] {
        let fd = frenet_at(&s, (u, 0.4), None)?;
        let check = consistency(&fd, &analyze(&s, u, 0.4)?.report);
        // The closed forms use the published normals; flip b and l to match them.
        let published = spec.published_frame(u, 0.4)?;
        let fd = fd.regauge(inner(&fd.b, &published.0[2]).signum(), -inner(&fd.l, &published.0[3]).signum());
        println!("u = {u} ({:?}, consistency {:.1e})", fd.h_case, check.max());
        let want = closed_form_frenet(&spec, u)?.to_array();
        let names = ["gamma1", "gamma2", "nu1", "nu2", "lambda", "mu", "beta1", "beta2"];
        for ((name, got), want) in names.iter().zip(fd.functions().to_array()).zip(want) {
            println!("  {name:>7} {got:>13.9} {want:>13.9}");
        }
    }
    Ok(())
}
