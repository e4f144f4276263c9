//! Which branch of the flat-point dichotomy each degenerate surface falls into.

use minksurf::catalog::degenerate_surfaces;
use minksurf::frenet::flat::flat_point_scan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for ns in degenerate_surfaces() {
        let axis = |(a, b): (f64, f64)| (0..5).map(|i| a + (b - a) * i as f64 / 4.0).collect::<Vec<_>>();
        let scan = flat_point_scan(&ns.spec, &axis(ns.u_domain), &axis(ns.v_domain), None)?;
        println!(
            "{:>20}: {:?}, max beta {:.1e}, coupling {:.1e} {:.1e}",
            ns.spec.name, scan.branch, scan.max_beta, scan.coupling_residuals[0], scan.coupling_residuals[1]
        );
    }
    Ok(())
}
