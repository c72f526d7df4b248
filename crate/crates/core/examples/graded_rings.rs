//! Presentations, normal forms and Poincaré series.

use equivar::equivariant::{fiber_ring, Field};
use equivar::graded_ring::Presentation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fiber = fiber_ring(Field::C, 2, 3, 7)?;
    println!("H*(CP^2 x S^3) = {fiber}");
    println!("series {:?}, formal dimension {}", fiber.poincare_series(), fiber.formal_dimension()?);

    // the sphere-bundle ring: d² = c²d
    let ring = Presentation::parse(&[("c", 1), ("d", 2)], &["c^3", "d^2 + c^2*d"], 8)?;
    println!("{ring}");
    println!("groebner basis:");
    for g in ring.groebner_basis() {
        println!("  {}", ring.format(g));
    }
    let p = ring.parse_polynomial("d^2 + c*d")?;
    println!("normal form of d^2 + c*d: {}", ring.format(&ring.normal_form(&p)?));
    for q in 0..=5 {
        let basis: Vec<String> = ring.basis(q)?.monomials.iter().map(|m| ring.format_monomial(m)).collect();
        println!("degree {q}: {}", basis.join(" "));
    }
    println!("Poincaré duality: {}", ring.check_poincare_duality()?);
    Ok(())
}
