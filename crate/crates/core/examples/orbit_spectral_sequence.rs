//! Running the spectral sequence and checking the orbit-space presentation.

use equivar::classifier::{clause_differentials, theorem_families_orbit, verify_orbit_presentation, OrbitClause};
use equivar::equivariant::{fiber_ring, ActionKind, Field};
use equivar::spectral::{check_free, run_pages};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        (Field::R, 3, 1, ActionKind::Swap, OrbitClause::Swap),
        (Field::R, 3, 5, ActionKind::Identity, OrbitClause::BaseDifferential),
        (Field::C, 2, 3, ActionKind::Identity, OrbitClause::SphereDifferential),
        (Field::R, 3, 2, ActionKind::Shift, OrbitClause::Shift),
    ];
    for (field, n, m, kind, clause) in cases {
        let truncation = field.l() * n + m + 2;
        let fiber = fiber_ring(field, n, m, truncation + 1)?;
        let action = kind.build(&fiber)?;
        let spec = clause_differentials(clause, field, &fiber)?;
        let (pages, nonzero) = run_pages(&fiber, &action, &spec, truncation)?;
        let e_inf = pages.last().expect("at least E2");
        println!("== {field} n={n} m={m} {clause}");
        for r in 2..=spec.max_page().unwrap_or(1) {
            let on_page: Vec<_> = nonzero.iter().filter(|d| d.page == r).collect();
            if let Some(first) = on_page.first() {
                let total: usize = on_page.iter().map(|d| d.rank).sum();
                println!("  d{r}: {} nonzero blocks, total rank {total}, first {:?} -> {:?}", on_page.len(), first.source, first.target);
            }
        }
        println!("  E_inf totals {:?}, free: {}", e_inf.total_ranks(), check_free(e_inf).is_ok());
        let k = clause.coefficient_count(field, n, m);
        let cand = theorem_families_orbit(field, n, m, clause, &vec![false; k], truncation)?;
        let v = verify_orbit_presentation(&cand, e_inf)?;
        println!("  {}", cand.presentation);
        match v.first_mismatch {
            None => println!("  series agrees"),
            Some(j) => println!("  series differs from degree {j}: {:?}", v.presentation_series),
        }
    }
    Ok(())
}
