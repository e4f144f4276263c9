//! Curvature ellipse at a point of a generic surface and of the De Sitter example.

use minksurf::catalog::RotationalSurfaceSpec;
use minksurf::invariants::{analyze, curvature_ellipse};
use minksurf::{Immersion, SurfaceSpec};

fn show(name: &str, s: &dyn Immersion, at: (f64, f64)) -> Result<(), Box<dyn std::error::Error>> {
    let p = analyze(s, at.0, at.1)?;
    let e = curvature_ellipse(&p.tensor, &p.report.first, &p.frame, 12);
    println!(
        "{name}: {:?}, centre ({:.4}, {:.4}), singular values {:.3e} {:.3e}, collinear with H {}",
        e.shape, e.center[0], e.center[1], e.singular_values[0], e.singular_values[1], e.collinear_with_h
    );
    for (psi, c) in e.psi.iter().zip(&e.coords).step_by(3) {
        println!("  psi {psi:.3}: ({:.5}, {:.5})", c[0], c[1]);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let generic = SurfaceSpec::parse("generic", ["u", "v", "u^2 + 0.4*v^2", "0.6*u*v + 0.2*v^2"])?;
    show("generic", &generic, (0.1, 0.2))?;
    show("de sitter", &RotationalSurfaceSpec::de_sitter().immersion()?, (0.3, 0.2))
}
