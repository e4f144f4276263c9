//! Fundamental forms, k, ϰ and K along a meridian of the De Sitter example.

use minksurf::catalog::RotationalSurfaceSpec;
use minksurf::invariants::analyze;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let surface = RotationalSurfaceSpec::de_sitter().immersion()?;
    println!("{:>6} {:>10} {:>10} {:>12} {:>12} {:>12}", "u", "E", "G", "k", "kappa", "K");
    for i in 0..8 {
        let u = 0.05 + 0.09 * i as f64;
        let r = analyze(&surface, u, 0.3)?.report;
        println!(
            "{u:>6.2} {:>10.5} {:>10.5} {:>12.6} {:>12.2e} {:>12.6}",
            r.first.e, r.first.g, r.k, r.kappa, r.gauss
        );
    }
    Ok(())
}
