//! Point classes and principal curvatures on a surface given by expressions.

use minksurf::invariants::{analyze, indicatrix, predicates};
use minksurf::SurfaceSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // A graph over a spacelike plane with a small timelike bend.
    let s = SurfaceSpec::parse("bent", ["u", "v", "u^2 - 0.5*v^2", "0.3*u*v"])?;
    for (u, v) in [(0.0, 0.0), (0.2, 0.1), (-0.3, 0.25), (0.4, -0.4)] {
        let r = analyze(&s, u, v)?.report;
        let shape = indicatrix(&r).map(|c| format!("{:?}", c.shape)).unwrap_or_else(|e| e.to_string());
        let p = predicates(&r);
        println!(
            "({u:>5.2}, {v:>5.2}) {:?}: nu' = {:.4}, nu'' = {:.4}, indicatrix {shape}, minimal {}, flat normal connection {}",
            r.point_class, r.nu1p, r.nu2p, p.is_minimal, p.is_flat_normal_connection
        );
    }
    Ok(())
}
