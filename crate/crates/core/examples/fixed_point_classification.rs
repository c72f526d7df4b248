//! Candidate fixed-point rings: closed families against brute-force search.

use equivar::classifier::{
    canonical_key, enumerate_fixed_candidates, theorem_families_fixed, theorem_families_fixed_raw,
};
use equivar::equivariant::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (field, n, m) in [(Field::R, 1, 1), (Field::R, 2, 2), (Field::C, 1, 2), (Field::C, 3, 3)] {
        println!("== F = {field}, n = {n}, m = {m}");
        let raw = theorem_families_fixed_raw(field, n, m)?;
        let passing = raw.iter().filter(|c| c.satisfies_invariants(n)).count();
        println!("family instances: {} ({} pass rank and duality)", raw.len(), passing);
        for c in theorem_families_fixed(field, n, m)? {
            println!("  {:?} {:<28} {}", c.family, c.description, c.presentation);
        }
        if field == Field::R {
            let found = enumerate_fixed_candidates(field, n, m, 4, 4)?;
            println!("search found {}:", found.len());
            for p in &found {
                println!("  {}", canonical_key(p)?);
            }
        }
    }
    Ok(())
}
