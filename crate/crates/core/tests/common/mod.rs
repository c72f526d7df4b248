//! Golden scenarios and a matrix-only oracle for the spectral engine.
#![allow(dead_code)]

use equivar::equivariant::{fiber_ring, ActionKind, Field, InvolutionAction};
use equivar::graded_ring::{Monomial, Polynomial, Presentation};
use equivar::spectral::DifferentialSpec;

pub struct Golden {
    pub name: &'static str,
    pub field: Field,
    pub n: u32,
    pub m: u32,
    pub kind: ActionKind,
    pub lines: &'static [(u32, &'static str, &'static str)],
    pub truncation: u32,
}

pub struct Setup {
    pub fiber: Presentation,
    pub action: InvolutionAction,
    pub spec: DifferentialSpec,
    pub truncation: u32,
}

impl Golden {
    pub fn setup(&self) -> Setup {
        let fiber = fiber_ring(self.field, self.n, self.m, self.truncation + 1).unwrap();
        let action = self.kind.build(&fiber).unwrap();
        let mut spec = DifferentialSpec::new();
        for &(r, lhs, rhs) in self.lines {
            spec.assign(&fiber, r, lhs, rhs).unwrap();
        }
        Setup {
            fiber,
            action,
            spec,
            truncation: self.truncation,
        }
    }
}

pub fn golden() -> Vec<Golden> {
    use ActionKind::*;
    use Field::*;
    vec![
        Golden { name: "swap R n=3 m=1", field: R, n: 3, m: 1, kind: Swap, lines: &[(3, "a^2", "t^3"), (3, "a*b", "t^3")], truncation: 6 },
        Golden { name: "shift R n=3 m=2", field: R, n: 3, m: 2, kind: Shift, lines: &[(2, "a", "t^2")], truncation: 7 },
        Golden { name: "trivial R n=2 m=2 d3(b)", field: R, n: 2, m: 2, kind: Identity, lines: &[(3, "b", "t^3")], truncation: 6 },
        Golden { name: "trivial R n=3 m=1 d2(a)", field: R, n: 3, m: 1, kind: Identity, lines: &[(2, "a", "t^2")], truncation: 6 },
        Golden { name: "trivial C n=1 m=1 d2(b)", field: C, n: 1, m: 1, kind: Identity, lines: &[(2, "b", "t^2")], truncation: 5 },
        Golden { name: "trivial C n=2 m=3 d4(b)", field: C, n: 2, m: 3, kind: Identity, lines: &[(4, "b", "t^4")], truncation: 8 },
        Golden { name: "zero spec R n=2 m=1", field: R, n: 2, m: 1, kind: Identity, lines: &[], truncation: 5 },
    ]
}

// ---- dense F2 vectors as Vec<u8>, nothing shared with the crate ----

pub type Bits = Vec<u8>;

fn add(a: &mut Bits, b: &Bits) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn is_zero(a: &Bits) -> bool {
    a.iter().all(|&x| x == 0)
}

/// Rank of a list of vectors.
pub fn rank(vectors: &[Bits]) -> usize {
    let mut rows: Vec<Bits> = vectors.to_vec();
    let width = rows.first().map_or(0, |r| r.len());
    let mut rk = 0;
    for col in 0..width {
        let Some(pivot) = (rk..rows.len()).find(|&i| rows[i][col] == 1) else {
            continue;
        };
        rows.swap(rk, pivot);
        let p = rows[rk].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rk && row[col] == 1 {
                add(row, &p);
            }
        }
        rk += 1;
    }
    rk
}

/// Reduced echelon form that remembers how each row was combined.
struct Echelon {
    rows: Vec<(Bits, Bits, usize)>, // reduced vector, combination, pivot
    count: usize,
}

impl Echelon {
    fn new(vectors: &[Bits]) -> Self {
        let count = vectors.len();
        let mut e = Echelon { rows: Vec::new(), count };
        for (i, v) in vectors.iter().enumerate() {
            let mut combo = vec![0; count];
            combo[i] = 1;
            e.absorb(v.clone(), combo);
        }
        e
    }

    fn reduce(&self, mut v: Bits, mut combo: Bits) -> (Bits, Bits) {
        for (row, rc, pivot) in &self.rows {
            if v[*pivot] == 1 {
                add(&mut v, row);
                add(&mut combo, rc);
            }
        }
        (v, combo)
    }

    /// Returns a relation among the inputs when `v` is dependent.
    fn absorb(&mut self, v: Bits, combo: Bits) -> Option<Bits> {
        let (v, combo) = self.reduce(v, combo);
        match v.iter().position(|&x| x == 1) {
            Some(pivot) => {
                for (row, rc, _) in self.rows.iter_mut() {
                    if row[pivot] == 1 {
                        add(row, &v);
                        add(rc, &combo);
                    }
                }
                self.rows.push((v, combo, pivot));
                None
            }
            None => Some(combo),
        }
    }

    fn solve(&self, target: &Bits) -> Option<Bits> {
        let (rest, combo) = self.reduce(target.clone(), vec![0; self.count]);
        is_zero(&rest).then_some(combo)
    }

    fn relations(vectors: &[Bits]) -> Vec<Bits> {
        let count = vectors.len();
        let mut e = Echelon { rows: Vec::new(), count };
        let mut out = Vec::new();
        for (i, v) in vectors.iter().enumerate() {
            let mut combo = vec![0; count];
            combo[i] = 1;
            if let Some(rel) = e.absorb(v.clone(), combo) {
                out.push(rel);
            }
        }
        out
    }
}

fn coords(fiber: &Presentation, p: &Polynomial, q: u32) -> Bits {
    fiber.coordinates(p, q).unwrap().to_bits().into_iter().map(u8::from).collect()
}

/// One fiber degree: `τ = 1 + g*`, its kernel and a complement of its image
/// inside the kernel.
struct Layer {
    dim: usize,
    image: Vec<Bits>,
    kernel: Vec<Bits>,
    complement: Vec<Bits>,
}

fn layer(fiber: &Presentation, action: &InvolutionAction, q: u32) -> Layer {
    let basis = fiber.basis(q).unwrap().monomials.clone();
    let dim = basis.len();
    let tau: Vec<Bits> = basis
        .iter()
        .map(|m| {
            let x = Polynomial::from_monomial(m.clone());
            coords(fiber, &action.apply(&x).unwrap().add(&x), q)
        })
        .collect();
    let image: Vec<Bits> = tau.iter().filter(|v| !is_zero(v)).cloned().collect();
    let kernel: Vec<Bits> = Echelon::relations(&tau)
        .into_iter()
        .map(|combo| {
            let mut v = vec![0; dim];
            for (i, &c) in combo.iter().enumerate() {
                if c == 1 {
                    v[i] ^= 1;
                }
            }
            v
        })
        .collect();
    let mut e = Echelon::new(&image);
    let mut complement = Vec::new();
    for v in &kernel {
        if e.solve(v).is_none() {
            complement.push(v.clone());
            let mut all = image.clone();
            all.extend(complement.iter().cloned());
            e = Echelon::new(&all);
        }
    }
    Layer {
        dim,
        image,
        kernel,
        complement,
    }
}

pub struct OracleResult {
    pub totals: Vec<usize>,
    pub square_zero: bool,
    pub well_defined: bool,
    pub implicit: usize,
}

/// `E_∞` totals through degree `N` for a spec whose differentials all sit
/// on one page: `E_∞ = H(E₂, d_r)` with `d_r` materialised as matrices.
pub fn oracle(s: &Setup) -> OracleResult {
    let fiber = &s.fiber;
    let action = &s.action;
    let n = s.truncation;
    let fdim = fiber.formal_dimension().unwrap();
    let top = (n + 1).min(fdim);
    let pages: Vec<u32> = s.spec.assignments().iter().map(|a| a.page).collect();
    assert!(pages.windows(2).all(|w| w[0] == w[1]), "oracle handles one page");
    let r = pages.first().copied();

    let layers: Vec<Layer> = (0..=top).map(|q| layer(fiber, action, q)).collect();
    let dim_at = |p: u32, q: u32| -> usize {
        if q > top {
            0
        } else if p == 0 {
            layers[q as usize].kernel.len()
        } else {
            layers[q as usize].complement.len()
        }
    };

    let Some(r) = r else {
        let totals = (0..=n)
            .map(|j| (0..=j).map(|p| dim_at(p, j - p)).sum())
            .collect();
        return OracleResult {
            totals,
            square_zero: true,
            well_defined: true,
            implicit: 0,
        };
    };

    // generators with their differentials (fiber part of t^r ⊗ value)
    let nv = fiber.nvars();
    let mut gens: Vec<(Polynomial, Polynomial, u32)> = Vec::new();
    if !action.is_identity() {
        for i in 0..nv {
            let x = Polynomial::from_monomial(Monomial::var(nv, i, 1));
            let norm = fiber.mul(&x, &action.apply(&x).unwrap()).unwrap();
            if !norm.is_zero() {
                gens.push((norm, Polynomial::zero(), 2 * fiber.weights()[i]));
            }
        }
    }
    for a in s.spec.assignments() {
        let x = fiber.normal_form(&Polynomial::from_monomial(a.lhs.clone())).unwrap();
        gens.push((x, a.value.clone(), fiber.monomial_degree(&a.lhs)));
    }
    for i in 0..nv {
        let var = Monomial::var(nv, i, 1);
        let x = Polynomial::from_monomial(var.clone());
        if action.apply(&x).unwrap() == x && !s.spec.assignments().iter().any(|a| a.lhs == var) {
            gens.push((x, Polynomial::zero(), fiber.weights()[i]));
        }
    }

    // all products of generators, by degree, with Leibniz differentials
    let mut products: Vec<Vec<(Polynomial, Polynomial)>> = vec![Vec::new(); top as usize + 1];
    let mut stack: Vec<(usize, Polynomial, Polynomial, u32)> = vec![(0, fiber.one(), Polynomial::zero(), 0)];
    products[0].push((fiber.one(), Polynomial::zero()));
    while let Some((start, x, dx, deg)) = stack.pop() {
        for (i, (g, dg, e)) in gens.iter().enumerate().skip(start) {
            let d = deg + e;
            if d > top {
                continue;
            }
            let y = fiber.mul(&x, g).unwrap();
            let dy = fiber.mul(&dx, g).unwrap().add(&fiber.mul(&x, dg).unwrap());
            if y.is_zero() && dy.is_zero() {
                continue;
            }
            products[d as usize].push((y.clone(), dy.clone()));
            stack.push((i, y, dy, d));
        }
    }

    // invariant classes no product reaches get a zero differential
    let mut implicit = 0;
    for q in 0..=top {
        let vecs: Vec<Bits> = products[q as usize].iter().map(|(x, _)| coords(fiber, x, q)).collect();
        let mut e = Echelon::new(&vecs);
        for k in layers[q as usize].kernel.clone() {
            if e.solve(&k).is_none() {
                implicit += 1;
                let poly = fiber.from_coordinates(q, &equivar::f2linalg::F2Vector::from_bits(k.iter().map(|&b| b == 1)));
                products[q as usize].push((poly, Polynomial::zero()));
                let vecs: Vec<Bits> = products[q as usize].iter().map(|(x, _)| coords(fiber, x, q)).collect();
                e = Echelon::new(&vecs);
            }
        }
    }

    // target coordinates of a fiber class in E₂^{p>0, q'}
    let quotient_coords = |v: &Bits, q: u32| -> Option<Bits> {
        let l = &layers[q as usize];
        let mut all = l.image.clone();
        all.extend(l.complement.iter().cloned());
        let combo = Echelon::new(&all).solve(v)?;
        Some(combo[l.image.len()..].to_vec())
    };

    let mut well_defined = true;
    // matrix of d_r out of (p, q) as columns in target coordinates
    let mut matrices: std::collections::BTreeMap<(u32, u32), Vec<Bits>> = Default::default();
    for q in (r - 1)..=top {
        let tq = q + 1 - r;
        let prods = &products[q as usize];
        let elems: Vec<Bits> = prods.iter().map(|(x, _)| coords(fiber, x, q)).collect();
        let images: Vec<Bits> = prods.iter().map(|(_, d)| coords(fiber, d, tq)).collect();
        let sum_images = |combo: &Bits| -> Bits {
            let mut v = vec![0; layers[tq as usize].dim];
            for (i, &c) in combo.iter().enumerate().take(images.len()) {
                if c == 1 {
                    add(&mut v, &images[i]);
                }
            }
            v
        };
        for p in 0..=(n + 1 - q) {
            let (tp, tq) = (p + r, tq);
            if tp + tq > n + 1 || dim_at(p, q) == 0 {
                continue;
            }
            let mut cols = elems.clone();
            if p > 0 {
                cols.extend(layers[q as usize].image.iter().cloned());
            }
            for rel in Echelon::relations(&cols) {
                if quotient_coords(&sum_images(&rel), tq).is_none_or(|c| !is_zero(&c)) {
                    well_defined = false;
                }
            }
            let e = Echelon::new(&cols);
            let sources = if p == 0 {
                &layers[q as usize].kernel
            } else {
                &layers[q as usize].complement
            };
            let mut matrix = Vec::new();
            for x in sources {
                let combo = e.solve(x).expect("every invariant class is reached");
                match quotient_coords(&sum_images(&combo), tq) {
                    Some(c) => matrix.push(c),
                    None => {
                        well_defined = false;
                        matrix.push(vec![0; dim_at(tp, tq)]);
                    }
                }
            }
            matrices.insert((p, q), matrix);
        }
    }

    let compose_zero = |(p, q): (u32, u32)| -> bool {
        let (Some(first), Some(second)) = (
            matrices.get(&(p, q)),
            matrices.get(&(p + r, q + 1 - r)),
        ) else {
            return true;
        };
        first.iter().all(|col| {
            let mut out = vec![0; second.first().map_or(0, |c| c.len())];
            for (i, &c) in col.iter().enumerate() {
                if c == 1 {
                    add(&mut out, &second[i]);
                }
            }
            is_zero(&out)
        })
    };
    let square_zero = matrices.keys().all(|&k| compose_zero(k));

    let totals = (0..=n)
        .map(|j| {
            (0..=j)
                .map(|p| {
                    let q = j - p;
                    let dim = dim_at(p, q);
                    let out = matrices.get(&(p, q)).map_or(0, |m| rank(m));
                    let inc = if p >= r {
                        matrices.get(&(p - r, q + r - 1)).map_or(0, |m| rank(m))
                    } else {
                        0
                    };
                    dim.saturating_sub(out + inc)
                })
                .sum()
        })
        .collect();
    OracleResult {
        totals,
        square_zero,
        well_defined,
        implicit,
    }
}
