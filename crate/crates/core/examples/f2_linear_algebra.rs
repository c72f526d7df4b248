//! Rank, kernel, subquotients and coordinates over F₂.

use equivar::f2linalg::{kernel_basis, rank, subquotient_basis, F2Matrix, F2Vector, Span};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // boundary maps of a filled triangle: vertices <- edges <- face
    let d1 = F2Matrix::from_rows(&[vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]);
    let d2 = F2Matrix::from_rows(&[vec![1], vec![1], vec![1]]);
    println!("d1 = {d1:?}");
    println!("rank d1 = {}, rank d2 = {}", rank(&d1), rank(&d2));
    for v in kernel_basis(&d1) {
        println!("cycle: {v:?}");
    }
    let (reps, dim) = subquotient_basis(&d1, &d2)?;
    println!("H1 = ker d1 / im d2 has dimension {dim} ({} representatives)", reps.len());

    let mut span = Span::new(4);
    for bits in [[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0], [0, 0, 0, 1]] {
        let v = F2Vector::from_bits(bits.map(|b| b == 1));
        let grew = span.insert(&v);
        println!("insert {v:?}: {}", if grew { "independent" } else { "dependent" });
    }
    let target = F2Vector::from_support(4, &[0, 2, 3]);
    println!("{target:?} = combination {:?} of inserted vectors", span.coordinates(&target));
    Ok(())
}
