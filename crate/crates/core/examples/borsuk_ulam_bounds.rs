//! Index bounds and the Borsuk–Ulam statements they certify.

use equivar::classifier::{clause_differentials, index_bounds, theorem_families_orbit, OrbitClause};
use equivar::equivariant::{fiber_ring, ActionKind, Field};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (Field::R, 3, 1, ActionKind::Swap, OrbitClause::Swap),
        (Field::R, 5, 2, ActionKind::Identity, OrbitClause::BaseDifferential),
        (Field::C, 2, 3, ActionKind::Identity, OrbitClause::SphereDifferential),
        (Field::C, 3, 5, ActionKind::Identity, OrbitClause::SphereDifferential),
    ];
    for (field, n, m, kind, clause) in cases {
        let truncation = field.l() * n + m + 2;
        let fiber = fiber_ring(field, n, m, truncation + 1)?;
        let action = kind.build(&fiber)?;
        let spec = clause_differentials(clause, field, &fiber)?;
        let k = clause.coefficient_count(field, n, m);
        let cand = theorem_families_orbit(field, n, m, clause, &vec![false; k], truncation)?;
        let b = index_bounds(&cand, &spec, &fiber, &action)?;
        println!("{field} n={n} m={m} {clause}: s = {}, i(X) = {}", b.s, b.volovikov);
        println!("  {} <= coind <= ind <= {}", b.coindex_lower, b.index_upper);
        for s in &b.statements {
            println!("  {s}");
        }
    }
    Ok(())
}
