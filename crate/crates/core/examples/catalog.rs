//! Random rotational surfaces of both families, with their closed-form invariants.

use minksurf::catalog::{closed_form_invariants, random_spec, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for variant in [Variant::M1, Variant::M2] {
        for _ in 0..3 {
            let s = random_spec(&mut rng, variant, (0.0, 0.5));
            let (k, kappa, gauss) = closed_form_invariants(&s, 0.25)?;
            let (e, g) = s.metric(0.25)?;
            println!("{variant:?} f = {}, g = {}, alpha = {:.3}, beta = {:.3}", s.f, s.g, s.alpha, s.beta);
            println!("    at u = 0.25: E = {e:.4}, G = {g:.4}, k = {k:.5}, kappa = {kappa:.5}, K = {gauss:.5}");
        }
    }
    Ok(())
}
