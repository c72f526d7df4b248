//! E₂ of the Borel fibration for the swap action on RP^3 x S^1.

use equivar::equivariant::{fiber_ring, triviality_verdict, ActionKind, Field};
use equivar::spectral::build_e2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (field, n, m) in [(Field::R, 3, 1), (Field::R, 2, 1), (Field::C, 3, 4)] {
        let verdict = triviality_verdict(field, n, m)?;
        let why = verdict.condition.map_or("no condition applies", |c| c.describe());
        println!("{field} n={n} m={m}: actions {:?} ({why})", verdict.kinds());
    }

    let fiber = fiber_ring(Field::R, 3, 1, 7)?;
    let action = ActionKind::Swap.build(&fiber)?;
    for (x, gx) in action.nontrivial_images() {
        println!("g*({x}) = {gx}");
    }
    let page = build_e2(&fiber, &action, 6)?;
    println!("E2^(p,q), rows q = 4..0:");
    for (q, row) in page.rank_table().iter().enumerate().rev() {
        let cells: Vec<String> = row.iter().map(|r| r.to_string()).collect();
        println!("  q={q}: {}", cells.join(" "));
    }
    println!("column 0 representatives at q = 2:");
    for (_, rep) in page.representatives(0, 2) {
        println!("  {}", fiber.format(&rep));
    }
    Ok(())
}
