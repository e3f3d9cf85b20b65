//! Dense matrices over F_p with exact Gaussian elimination.

use crate::error::{Error, Result};
use crate::ffalg::fp::Fp;

/// Row-major matrix over F_p. Entries are always reduced. Empty shapes
/// (0 x c, r x 0) are legal; kernels and spans need them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    field: Fp,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

/// Result of reduced-row-echelon elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Multiplicative order of a square matrix, or the fact that none exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixOrder {
    Finite(u128),
    Singular,
}

impl FpMatrix {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix {
            field,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Fp, n: usize) -> FpMatrix {
        let mut m = FpMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds from explicit rows, reducing every entry mod p.
    pub fn from_rows(field: Fp, rows: &[Vec<u32>]) -> Result<FpMatrix> {
        let cols = rows.first().map_or(0, |r| r.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| x % field.modulus()))
            .collect();
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// Builds from signed rows (convenience for tests and constructions).
    pub fn from_rows_i64(field: Fp, rows: &[Vec<i64>]) -> Result<FpMatrix> {
        let reduced: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.reduce_i64(x)).collect())
            .collect();
        FpMatrix::from_rows(field, &reduced)
    }

    #[inline]
    pub fn field(&self) -> Fp {
        self.field
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
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v % self.field.modulus();
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }
    #[inline]
    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn add(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        FpMatrix {
            entries,
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.field.sub(a, b))
            .collect();
        FpMatrix {
            entries,
            ..self.clone()
        }
    }

    pub fn neg(&self) -> FpMatrix {
        let entries = self.entries.iter().map(|&a| self.field.neg(a)).collect();
        FpMatrix {
            entries,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: u32) -> FpMatrix {
        let c = c % self.field.modulus();
        let entries = self.entries.iter().map(|&a| self.field.mul(a, c)).collect();
        FpMatrix {
            entries,
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let p = self.field.modulus() as u64;
        let mut out = FpMatrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                let src = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    let v = out.entries[dst + j] as u64 + a * other.entries[src + j] as u64;
                    out.entries[dst + j] = (v % p) as u32;
                }
            }
        }
        out
    }

    /// Row vector times matrix; the hot path of perp computations.
    pub fn vec_mul(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let p = self.field.modulus() as u64;
        let mut acc = vec![0u64; self.cols];
        for (k, &vk) in v.iter().enumerate() {
            if vk == 0 {
                continue;
            }
            let row = self.row(k);
            for j in 0..self.cols {
                acc[j] += vk as u64 * row[j] as u64;
            }
        }
        acc.iter().map(|&x| (x % p) as u32).collect()
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        let p = self.field.modulus() as u64;
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut acc = 0u64;
                for j in 0..self.cols {
                    acc += row[j] as u64 * v[j] as u64;
                }
                (acc % p) as u32
            })
            .collect()
    }

    pub fn pow(&self, mut exp: u128) -> FpMatrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.field, self.rows);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(field: Fp, parts: &[&FpMatrix]) -> FpMatrix {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut entries = Vec::with_capacity(rows * cols);
        for m in parts {
            assert_eq!(m.cols, cols);
            entries.extend_from_slice(&m.entries);
        }
        FpMatrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    /// Deterministic reduced row echelon form: leftmost pivot, topmost row.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let f = self.field;
        let p = f.modulus() as u64;
        let cols = m.cols;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    m.entries.swap(r * cols + j, pr * cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)) as u64;
            if inv != 1 {
                for j in c..cols {
                    let e = &mut m.entries[r * cols + j];
                    *e = ((*e as u64 * inv) % p) as u32;
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                let fneg = f.neg(factor) as u64;
                for j in c..cols {
                    let v = m.entries[i * cols + j] as u64
                        + fneg * m.entries[r * cols + j] as u64;
                    m.entries[i * cols + j] = (v % p) as u32;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        let mut red = RowReducer::new(self.field, self.cols);
        for i in 0..self.rows {
            red.add_row(self.row(i).to_vec());
        }
        red.rank()
    }

    /// Canonical null-space basis: one vector per free column, in ascending
    /// free-column order; the free coordinate is set to 1.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(matrix.get(i, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Inverse of a square matrix, or None when singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = FpMatrix {
            field: self.field,
            rows: n,
            cols: 2 * n,
            entries: {
                let mut e = Vec::with_capacity(2 * n * n);
                for i in 0..n {
                    e.extend_from_slice(self.row(i));
                    e.extend((0..n).map(|j| u32::from(i == j)));
                }
                e
            },
        };
        let red = aug.rref();
        if red.pivots.iter().take_while(|&&c| c < n).count() < n {
            return None;
        }
        let mut inv = FpMatrix::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.matrix.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

/// Smallest k >= 1 with M^k = I, by iterated multiplication. The cap of
/// p^a - 1 for an a x a matrix is a hard invariant: a regular matrix order
/// always divides the order of GL, and exceeding the field bound means the
/// caller handed in something outside the envelope or the code is wrong.
pub fn matrix_order(m: &FpMatrix) -> Result<MatrixOrder> {
    if !m.is_square() {
        return Err(Error::Dimension("matrix order needs a square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(MatrixOrder::Finite(1));
    }
    if m.rank() < n {
        return Ok(MatrixOrder::Singular);
    }
    let cap = (m.field().modulus() as u128)
        .checked_pow(n as u32)
        .map(|x| x - 1)
        .unwrap_or(u128::MAX);
    let id = FpMatrix::identity(m.field(), n);
    let mut acc = m.clone();
    let mut k: u128 = 1;
    while acc != id {
        acc = acc.mul(m);
        k += 1;
        if k > cap {
            return Err(Error::Internal(format!(
                "matrix order exceeded the p^{n}-1 cap; this is a bug"
            )));
        }
    }
    Ok(MatrixOrder::Finite(k))
}

/// Incremental row-space accumulator. Rows are kept in echelon form (not
/// reduced upwards); adding a row costs one reduction pass. Used where the
/// only question is a rank or a span-membership test, millions of times.
pub struct RowReducer {
    field: Fp,
    cols: usize,
    /// (pivot column, row) sorted by pivot column.
    rows: Vec<(usize, Vec<u32>)>,
}

impl RowReducer {
    pub fn new(field: Fp, cols: usize) -> RowReducer {
        RowReducer {
            field,
            cols,
            rows: Vec::new(),
        }
    }

    /// Reduces `row` against the basis in place; returns its pivot column
    /// if it was independent (and absorbed), None if it reduced to zero.
    pub fn add_row(&mut self, mut row: Vec<u32>) -> Option<usize> {
        debug_assert_eq!(row.len(), self.cols);
        let f = self.field;
        let p = f.modulus() as u64;
        for (pc, basis_row) in &self.rows {
            let factor = row[*pc];
            if factor == 0 {
                continue;
            }
            let fneg = f.neg(factor) as u64;
            for j in *pc..self.cols {
                let v = row[j] as u64 + fneg * basis_row[j] as u64;
                row[j] = (v % p) as u32;
            }
        }
        let pivot = row.iter().position(|&x| x != 0)?;
        let inv = f.inv(row[pivot]) as u64;
        if inv != 1 {
            for x in row.iter_mut().skip(pivot) {
                *x = ((*x as u64 * inv) % p) as u32;
            }
        }
        let pos = self
            .rows
            .binary_search_by_key(&pivot, |(pc, _)| *pc)
            .unwrap_err();
        self.rows.insert(pos, (pivot, row));
        Some(pivot)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// True when the vector lies in the accumulated row space.
    pub fn contains(&self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.cols);
        let f = self.field;
        let p = f.modulus() as u64;
        let mut row = v.to_vec();
        for (pc, basis_row) in &self.rows {
            let factor = row[*pc];
            if factor == 0 {
                continue;
            }
            let fneg = f.neg(factor) as u64;
            for j in *pc..self.cols {
                let x = row[j] as u64 + fneg * basis_row[j] as u64;
                row[j] = (x % p) as u32;
            }
        }
        row.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    /// Independent rank oracle: largest k with a nonzero k x k minor,
    /// determinants by cofactor expansion. Only sane for tiny matrices.
    fn minor_rank_oracle(m: &FpMatrix) -> usize {
        fn det(field: Fp, rows: &[Vec<u32>]) -> u32 {
            let n = rows.len();
            if n == 0 {
                return 1;
            }
            if n == 1 {
                return rows[0][0];
            }
            let mut acc: i64 = 0;
            let p = field.modulus() as i64;
            for (j, &lead) in rows[0].iter().enumerate() {
                if lead == 0 {
                    continue;
                }
                let sub: Vec<Vec<u32>> = rows[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc = (acc + sign * (lead as i64 * det(field, &sub) as i64 % p)) % p;
            }
            field.reduce_i64(acc)
        }

        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = Vec::new();
            for first in 0..=(n - k) {
                for mut rest in combos(n - first - 1, k - 1) {
                    for x in rest.iter_mut() {
                        *x += first + 1;
                    }
                    rest.insert(0, first);
                    out.push(rest);
                }
            }
            out
        }

        for k in (1..=m.rows().min(m.cols())).rev() {
            for rsel in combos(m.rows(), k) {
                for csel in combos(m.cols(), k) {
                    let sub: Vec<Vec<u32>> = rsel
                        .iter()
                        .map(|&i| csel.iter().map(|&j| m.get(i, j)).collect())
                        .collect();
                    if det(m.field(), &sub) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = FpMatrix::identity(f(2), 3);
        let red = id.rref();
        assert_eq!(red.matrix, id);
        assert_eq!(red.pivots, vec![0, 1, 2]);
        assert_eq!(red.rank, 3);
    }

    #[test]
    fn rref_duplicate_rows() {
        let m = FpMatrix::from_rows(f(2), &[vec![1, 1], vec![1, 1]]).unwrap();
        let red = m.rref();
        assert_eq!(
            red.matrix,
            FpMatrix::from_rows(f(2), &[vec![1, 1], vec![0, 0]]).unwrap()
        );
        assert_eq!(red.rank, 1);
    }

    #[test]
    fn rank_matches_minor_oracle_on_random_6x6_over_f3() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40925);
        for _ in 0..25 {
            let rows: Vec<Vec<u32>> = (0..6)
                .map(|_| (0..6).map(|_| rng.random_range(0..3)).collect())
                .collect();
            let m = FpMatrix::from_rows(f(3), &rows).unwrap();
            assert_eq!(m.rank(), minor_rank_oracle(&m));
            assert_eq!(m.rref().rank, minor_rank_oracle(&m));
        }
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        let z = FpMatrix::zeros(f(3), 2, 2);
        assert_eq!(z.kernel(), vec![vec![1, 0], vec![0, 1]]);
        for p in [2u32, 3, 5] {
            assert!(FpMatrix::identity(f(p), 3).kernel().is_empty());
        }
    }

    #[test]
    fn kernel_matches_exhaustive_enumeration_over_f2() {
        let m = FpMatrix::from_rows(f(2), &[vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        let basis = m.kernel();
        assert_eq!(basis, vec![vec![1, 1, 0]]);
        // brute force over all 8 vectors
        let mut solutions = Vec::new();
        for bits in 0..8u32 {
            let v = vec![bits & 1, (bits >> 1) & 1, (bits >> 2) & 1];
            if m.mul_vec(&v).iter().all(|&x| x == 0) && v.iter().any(|&x| x != 0) {
                solutions.push(v);
            }
        }
        assert_eq!(solutions, vec![vec![1, 1, 0]]);
    }

    #[test]
    fn empty_shapes_are_legal() {
        let m = FpMatrix::zeros(f(3), 0, 4);
        assert_eq!(m.rref().rank, 0);
        assert_eq!(m.kernel().len(), 4);
        let m = FpMatrix::zeros(f(3), 4, 0);
        assert_eq!(m.rank(), 0);
        assert!(m.kernel().is_empty());
    }

    #[test]
    fn matrix_order_examples() {
        assert_eq!(
            matrix_order(&FpMatrix::identity(f(5), 3)).unwrap(),
            MatrixOrder::Finite(1)
        );
        // companion of x^2+x+1 over F_2 has order 3 = 2^2 - 1:
        // B = [[0,1],[1,1]], B^2 = [[1,1],[1,0]], B^3 = I.
        let b = FpMatrix::from_rows(f(2), &[vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(matrix_order(&b).unwrap(), MatrixOrder::Finite(3));
        // [2] over F_3: 2^2 = 4 = 1 mod 3.
        let two = FpMatrix::from_rows(f(3), &[vec![2]]).unwrap();
        assert_eq!(matrix_order(&two).unwrap(), MatrixOrder::Finite(2));
        let sing = FpMatrix::from_rows(f(3), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(matrix_order(&sing).unwrap(), MatrixOrder::Singular);
    }

    #[test]
    fn inverse_round_trip() {
        let m = FpMatrix::from_rows(f(7), &[vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), FpMatrix::identity(f(7), 3));
        assert_eq!(inv.mul(&m), FpMatrix::identity(f(7), 3));
        let sing = FpMatrix::from_rows(f(7), &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn row_reducer_agrees_with_rref() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [2u32, 3, 5] {
            for _ in 0..20 {
                let rows: Vec<Vec<u32>> = (0..5)
                    .map(|_| (0..4).map(|_| rng.random_range(0..p)).collect())
                    .collect();
                let m = FpMatrix::from_rows(f(p), &rows).unwrap();
                let mut red = RowReducer::new(f(p), 4);
                for r in &rows {
                    red.add_row(r.clone());
                }
                assert_eq!(red.rank(), m.rref().rank);
                for r in &rows {
                    assert!(red.contains(r));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = [2u32, 3, 5, 7][rng.random_range(0..4)];
            let rows = rng.random_range(1..6usize);
            let cols = rng.random_range(1..6usize);
            let data: Vec<Vec<u32>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(0..p)).collect())
                .collect();
            let m = FpMatrix::from_rows(f(p), &data).unwrap();
            let once = m.rref();
            let twice = once.matrix.rref();
            prop_assert_eq!(&once.matrix, &twice.matrix);
            prop_assert_eq!(once.pivots, twice.pivots);
        }

        #[test]
        fn rank_plus_nullity_is_cols(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let p = [2u32, 3, 5][rng.random_range(0..3)];
            let rows = rng.random_range(0..6usize);
            let cols = rng.random_range(0..6usize);
            let data: Vec<Vec<u32>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.random_range(0..p)).collect())
                .collect();
            let m = FpMatrix::from_rows(f(p), &data).unwrap();
            let kernel = m.kernel();
            prop_assert_eq!(m.rank() + kernel.len(), m.cols());
            // independence + membership of every kernel vector
            let mut red = RowReducer::new(f(p), m.cols());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
                prop_assert!(red.add_row(v.clone()).is_some());
            }
        }
    }
}
