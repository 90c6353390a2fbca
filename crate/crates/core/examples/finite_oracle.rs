//! Exhaustive audit of every self-map of small random finite spaces.

use pqmetric::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=6 {
        let space = random_valid_space(&mut rng, n);
        let audit = exhaustive_kannan_audit(&space, 8)?;
        println!(
            "n = {n}: {} maps, {} Kannan, {} violations",
            audit.maps_total,
            audit.kannan_maps.len(),
            audit.violations.len()
        );
        if let Some(k) = audit.kannan_maps.iter().find(|k| k.min_lambda > 0.0) {
            println!("  e.g. {:?} with minimal constant {}", k.table, k.min_lambda);
        }
    }

    let two = load_finite_space(r#"{"points": ["a", "b"], "matrix": [[0, 1], [2, 0]]}"#)?;
    for map in enumerate_self_maps(&two, 8)? {
        println!("{:<10} {:?}", map.name(), min_kannan_constant(&two, &map)?);
    }
    Ok(())
}
