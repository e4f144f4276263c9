//! Integrability residuals of exact fields, and of the same fields with ν₁ shifted.

use minksurf::bonnet::{check_integrability, ClosedFormFields, Perturbed};
use minksurf::catalog::RotationalSurfaceSpec;
use minksurf::frenet::EightFunctions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = RotationalSurfaceSpec::de_sitter();
    let us: Vec<f64> = (0..11).map(|i| 0.1 + 0.05 * i as f64).collect();
    let vs: Vec<f64> = (0..6).map(|j| 0.1 * j as f64).collect();

    let exact = check_integrability(&ClosedFormFields::new(spec.clone()), &us, &vs)?;
    println!("exact fields: max {:.2e} ({})", exact.max, exact.worst);

    let offset = EightFunctions { nu1: 0.1, ..EightFunctions::from_array([0.0; 8]) };
    let shifted = Perturbed { inner: ClosedFormFields::new(spec), offset };
    let report = check_integrability(&shifted, &us, &vs)?;
    for c in &report.conditions {
        println!("  {:>10} {:.3e}", c.name, c.max);
    }
    if let Err(e) = report.enforce(1e-4) {
        println!("gate: {e}");
    }
    Ok(())
}
