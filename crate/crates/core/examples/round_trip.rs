//! Rebuild the two catalog spheres from their own invariants and report the error.

use std::time::Instant;

use minksurf::bonnet::{round_trip, ReconstructOptions};
use minksurf::catalog::RotationalSurfaceSpec;

fn axis(a: f64, h: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + h * i as f64).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("de sitter", RotationalSurfaceSpec::de_sitter(), -0.45),
        ("hyperbolic sphere", RotationalSurfaceSpec::hyperbolic_sphere(), 0.1),
    ];
    for (name, spec, u0) in cases {
        let imm = spec.immersion()?;
        let mut errs = Vec::new();
        for (h, n) in [(0.02, 50), (0.01, 99)] {
            let t = Instant::now();
            let r = round_trip(&imm, &axis(u0, h, n), &axis(0.0, h, n), &ReconstructOptions::default())?;
            println!(
                "{name:>18} h={h}: position {:.3e}, frame {:.3e}, path {:.3e}, integrability {:.3e} ({:.2?})",
                r.max_position_error,
                r.max_frame_error,
                r.diagnostics.path_position_residual,
                r.diagnostics.max_integrability_residual.unwrap_or(f64::NAN),
                t.elapsed()
            );
            errs.push(r.max_position_error);
        }
        println!("{name:>18} ratio {:.1}", errs[0] / errs[1]);
    }
    Ok(())
}
