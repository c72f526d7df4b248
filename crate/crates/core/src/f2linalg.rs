//! Exact linear algebra over the two-element field.
//!
//! Everything in the crate that needs a rank, a kernel or a subquotient goes
//! through this module. Matrices are dense and bit-packed by rows; a matrix
//! with `rows × cols` entries represents a linear map from an `cols`-dimensional
//! space to a `rows`-dimensional one, acting on column vectors.
//!
//! Elimination always picks the leftmost available column and, inside it, the
//! topmost available row, so every basis returned here is reproducible.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// `outgoing ∘ incoming ≠ 0`; the index is the first column of `incoming`
    /// whose image is not killed.
    #[error("composition of differentials is nonzero (incoming column {column})")]
    CompositionNonzero { column: usize },
}

/// A dense vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        F2Vector {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector with ones exactly at `support`.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.flip(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    /// Index of the first nonzero entry.
    pub fn leading(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over F₂, stored as rows.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        F2Matrix {
            rows,
            cols,
            data: vec![F2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged row");
                F2Vector::from_bits(r.iter().map(|&x| x & 1 == 1))
            })
            .collect();
        F2Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[F2Vector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.support() {
                m.set(i, j, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &F2Vector {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> F2Vector {
        F2Vector::from_bits((0..self.rows).map(|r| self.get(r, c)))
    }

    pub fn columns(&self) -> Vec<F2Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F2Vector::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.support() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &F2Vector) -> Result<F2Vector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "matrix has {} columns, vector has length {}",
                self.cols,
                v.len()
            )));
        }
        Ok(F2Vector::from_bits(self.data.iter().map(|row| row.dot(v))))
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.support() {
                out.data[r].add_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (F2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..m.cols {
            if next_row == m.rows {
                break;
            }
            let Some(p) = (next_row..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.data.swap(next_row, p);
            let pivot_row = m.data[next_row].clone();
            for r in 0..m.rows {
                if r != next_row && m.get(r, col) {
                    m.data[r].add_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (m, pivots)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

pub fn rank(m: &F2Matrix) -> usize {
    m.rref().1.len()
}

/// Basis of the null space of `m`, one vector per free column in increasing
/// column order.
pub fn kernel_basis(m: &F2Matrix) -> Vec<F2Vector> {
    let (r, pivots) = m.rref();
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = F2Vector::unit(m.cols(), free);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Representatives for `ker(outgoing) / im(incoming)` and its dimension.
///
/// `incoming` maps into the space that `outgoing` maps out of, so
/// `incoming.rows() == outgoing.cols()`.
pub fn subquotient_basis(
    outgoing: &F2Matrix,
    incoming: &F2Matrix,
) -> Result<(Vec<F2Vector>, usize), LinalgError> {
    if incoming.rows() != outgoing.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "incoming has {} rows but outgoing has {} columns",
            incoming.rows(),
            outgoing.cols()
        )));
    }
    let composite = outgoing.mul(incoming)?;
    if let Some(column) = (0..composite.cols()).find(|&c| !composite.column(c).is_zero()) {
        return Err(LinalgError::CompositionNonzero { column });
    }
    let mut span = Span::new(outgoing.cols());
    for c in incoming.columns() {
        span.insert(&c);
    }
    let boundaries = span.dim();
    let kernel = kernel_basis(outgoing);
    let reps: Vec<F2Vector> = kernel.into_iter().filter(|v| span.insert(v)).collect();
    debug_assert_eq!(reps.len() + boundaries, outgoing.cols() - rank(outgoing));
    let dim = reps.len();
    Ok((reps, dim))
}

/// An incrementally built subspace that remembers how each of its echelon
/// rows was combined from the inserted vectors.
///
/// `coordinates` answers "which combination of the inserted vectors gives v?",
/// which is how the spectral-sequence pages convert between bases.
#[derive(Clone, Debug)]
pub struct Span {
    ambient: usize,
    // echelon rows keyed by their leading index, with their combination record
    rows: Vec<(usize, F2Vector, Vec<usize>)>,
    inserted: usize,
}

impl Span {
    pub fn new(ambient: usize) -> Self {
        Span {
            ambient,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn from_vectors(ambient: usize, vectors: &[F2Vector]) -> Self {
        let mut s = Span::new(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered to `insert`, independent or not.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    // Reduce v against the echelon rows; returns residue and the combination
    // (indices of inserted vectors, symmetric-difference semantics).
    fn reduce(&self, v: &F2Vector) -> (F2Vector, Vec<bool>) {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut residue = v.clone();
        let mut combo = vec![false; self.inserted];
        for (lead, row, rc) in &self.rows {
            if residue.get(*lead) {
                residue.add_assign(row);
                for &i in rc {
                    combo[i] ^= true;
                }
            }
        }
        (residue, combo)
    }

    /// Adds `v`; returns whether it enlarged the span. The vector counts as
    /// inserted either way.
    pub fn insert(&mut self, v: &F2Vector) -> bool {
        let (residue, combo) = self.reduce(v);
        let idx = self.inserted;
        self.inserted += 1;
        let Some(lead) = residue.leading() else {
            return false;
        };
        let mut record: Vec<usize> = combo
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        record.push(idx);
        // keep rows fully reduced at their leading positions
        for (_, row, rc) in self.rows.iter_mut() {
            if row.get(lead) {
                row.add_assign(&residue);
                *rc = sym_diff(rc, &record);
            }
        }
        let pos = self.rows.partition_point(|(l, _, _)| *l < lead);
        self.rows.insert(pos, (lead, residue, record));
        true
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Combination of inserted vectors equal to `v`, as a 0/1 vector indexed
    /// by insertion order, or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &F2Vector) -> Option<F2Vector> {
        let (residue, combo) = self.reduce(v);
        residue
            .is_zero()
            .then(|| F2Vector::from_bits(combo))
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a
        .iter()
        .filter(|x| !b.contains(x))
        .chain(b.iter().filter(|x| !a.contains(x)))
        .copied()
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_kernel_size(m: &F2Matrix) -> usize {
        (0u32..1 << m.cols())
            .filter(|&bits| {
                let v = F2Vector::from_bits((0..m.cols()).map(|i| bits >> i & 1 == 1));
                m.mul_vec(&v).unwrap().is_zero()
            })
            .count()
    }

    fn brute_image_size(m: &F2Matrix) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for bits in 0u32..1 << m.cols() {
            let v = F2Vector::from_bits((0..m.cols()).map(|i| bits >> i & 1 == 1));
            seen.insert(m.mul_vec(&v).unwrap());
        }
        seen.len()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&F2Matrix::zeros(0, 0)), 0);
        assert_eq!(rank(&F2Matrix::identity(3)), 3);
        let ones = F2Matrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        // all four vectors: only 00 and 11 are in the kernel, so rank 1
        assert_eq!(brute_kernel_size(&ones), 2);
        assert_eq!(rank(&ones), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&F2Matrix::identity(2)).is_empty());
        assert_eq!(kernel_basis(&F2Matrix::zeros(2, 3)).len(), 3);
        let row = F2Matrix::from_rows(&[vec![1, 1]]);
        assert_eq!(kernel_basis(&row), vec![F2Vector::from_bits([true, true])]);
    }

    #[test]
    fn subquotient_examples() {
        let (_, d) = subquotient_basis(&F2Matrix::zeros(0, 3), &F2Matrix::zeros(3, 0)).unwrap();
        assert_eq!(d, 3);
        let (_, d) = subquotient_basis(&F2Matrix::identity(3), &F2Matrix::zeros(3, 1)).unwrap();
        assert_eq!(d, 0);
        let out = F2Matrix::from_rows(&[vec![1, 1]]);
        let inc = F2Matrix::from_rows(&[vec![1], vec![1]]);
        let (reps, d) = subquotient_basis(&out, &inc).unwrap();
        assert_eq!(d, 0);
        assert!(reps.is_empty());
    }

    #[test]
    fn subquotient_rejects_nonzero_composite() {
        let out = F2Matrix::identity(2);
        let inc = F2Matrix::from_rows(&[vec![0], vec![1]]);
        assert_eq!(
            subquotient_basis(&out, &inc),
            Err(LinalgError::CompositionNonzero { column: 0 })
        );
    }

    #[test]
    fn span_coordinates_recover_combination() {
        let a = F2Vector::from_bits([true, true, false]);
        let b = F2Vector::from_bits([false, true, true]);
        let c = F2Vector::from_bits([true, false, true]);
        let mut s = Span::new(3);
        assert!(s.insert(&a));
        assert!(s.insert(&b));
        assert!(!s.insert(&c));
        let coords = s.coordinates(&c).unwrap();
        assert_eq!(coords.support(), vec![0, 1]);
        assert!(s.coordinates(&F2Vector::unit(3, 0)).is_none());
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = F2Matrix> {
        (0..=max, 0..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, c), r).prop_map(
                move |rows| {
                    if rows.is_empty() {
                        F2Matrix::zeros(0, c)
                    } else {
                        F2Matrix::from_rows(&rows)
                    }
                },
            )
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(9)) {
            let r = rank(&m);
            prop_assert!(r <= m.rows().min(m.cols()));
            let k = kernel_basis(&m);
            prop_assert_eq!(r + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            prop_assert_eq!(Span::from_vectors(m.cols(), &k).dim(), k.len());
        }

        #[test]
        fn subquotient_matches_enumeration(
            out_rows in 0usize..5,
            space in 0usize..11,
            seed in proptest::collection::vec(0u8..2, 0..200),
        ) {
            // build outgoing at random, then an incoming whose columns are
            // random kernel combinations so the pair is a valid complex
            let bit = |i: usize| seed.get(i % seed.len().max(1)).copied().unwrap_or(0);
            let rows: Vec<Vec<u8>> = (0..out_rows)
                .map(|r| (0..space).map(|c| bit(r * 13 + c * 7)).collect())
                .collect();
            let outgoing = if rows.is_empty() { F2Matrix::zeros(0, space) } else { F2Matrix::from_rows(&rows) };
            let kernel = kernel_basis(&outgoing);
            let incoming_cols: Vec<F2Vector> = (0..3)
                .map(|j| {
                    let mut v = F2Vector::zeros(space);
                    for (i, k) in kernel.iter().enumerate() {
                        if bit(j * 31 + i * 5 + 3) == 1 {
                            v.add_assign(k);
                        }
                    }
                    v
                })
                .collect();
            let incoming = F2Matrix::from_columns(space, &incoming_cols);
            let (reps, dim) = subquotient_basis(&outgoing, &incoming).unwrap();
            let ker = brute_kernel_size(&outgoing);
            let im = brute_image_size(&incoming);
            prop_assert_eq!(1usize << dim, ker / im);
            prop_assert_eq!(reps.len(), dim);
        }

        #[test]
        fn deterministic(m in arb_matrix(7)) {
            prop_assert_eq!(kernel_basis(&m), kernel_basis(&m.clone()));
        }
    }
}
