//! Canonical subspaces of F_p^d.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::ffalg::{Fp, FpMatrix, RowReducer};

/// A subspace of F_p^d, stored as its reduced-row-echelon basis with zero
/// rows dropped. The representation is canonical, so equality of subspaces
/// is equality of representations, and the derived ordering
/// (dimension, then row-major basis entries) is the canonical order used
/// everywhere in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: FpMatrix,
    ambient: usize,
}

impl Subspace {
    /// Canonicalizes a spanning set.
    pub fn from_rows(rows: &FpMatrix) -> Subspace {
        let red = rows.rref();
        let basis_rows: Vec<Vec<u32>> = (0..red.rank)
            .map(|i| red.matrix.row(i).to_vec())
            .collect();
        Subspace {
            basis: FpMatrix::from_rows(rows.field(), &basis_rows)
                .map(|m| pad_cols(m, rows.field(), rows.cols()))
                .expect("rows share a length"),
            ambient: rows.cols(),
        }
    }

    /// Wraps a matrix that is already a canonical RREF basis. Callers are
    /// trusted (enumeration streams); debug builds re-check.
    pub(crate) fn from_rref_unchecked(basis: FpMatrix) -> Subspace {
        debug_assert_eq!(basis.rref().matrix, basis);
        debug_assert_eq!(basis.rref().rank, basis.rows());
        let ambient = basis.cols();
        Subspace { basis, ambient }
    }

    pub fn zero(field: Fp, d: usize) -> Subspace {
        Subspace {
            basis: FpMatrix::zeros(field, 0, d),
            ambient: d,
        }
    }

    pub fn full(field: Fp, d: usize) -> Subspace {
        Subspace {
            basis: FpMatrix::identity(field, d),
            ambient: d,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn field(&self) -> Fp {
        self.basis.field()
    }

    pub fn basis(&self) -> &FpMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn reducer(&self) -> RowReducer {
        let mut red = RowReducer::new(self.field(), self.ambient);
        for i in 0..self.dim() {
            red.add_row(self.basis.row(i).to_vec());
        }
        red
    }

    pub fn contains_vec(&self, v: &[u32]) -> bool {
        self.reducer().contains(v)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        if other.dim() > self.dim() {
            return false;
        }
        let red = self.reducer();
        (0..other.dim()).all(|i| red.contains(other.basis.row(i)))
    }

    pub fn ensure_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient || self.field() != other.field() {
            return Err(Error::Ambient(format!(
                "F_{}^{} vs F_{}^{}",
                self.field().modulus(),
                self.ambient,
                other.field().modulus(),
                other.ambient
            )));
        }
        Ok(())
    }

    /// Sum of subspaces (join in the subspace lattice).
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let stacked = FpMatrix::vstack(self.field(), &[&self.basis, &other.basis]);
        Subspace::from_rows(&stacked)
    }

    /// Intersection: coefficient pairs (alpha, beta) with
    /// alpha^T A = beta^T B come from the kernel of [A^T | -B^T].
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        let f = self.field();
        let (ra, rb) = (self.dim(), other.dim());
        let mut joint = FpMatrix::zeros(f, self.ambient, ra + rb);
        for i in 0..self.ambient {
            for k in 0..ra {
                joint.set(i, k, self.basis.get(k, i));
            }
            for k in 0..rb {
                joint.set(i, ra + k, f.neg(other.basis.get(k, i)));
            }
        }
        let coeff_rows: Vec<Vec<u32>> = joint
            .kernel()
            .into_iter()
            .map(|ab| {
                let mut v = vec![0u64; self.ambient];
                for (k, &c) in ab[..ra].iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for (acc, &b) in v.iter_mut().zip(self.basis.row(k)) {
                        *acc += c as u64 * b as u64;
                    }
                }
                v.iter()
                    .map(|&x| (x % f.modulus() as u64) as u32)
                    .collect()
            })
            .collect();
        let rows = FpMatrix::from_rows(f, &coeff_rows)
            .map(|m| pad_cols(m, f, self.ambient))
            .expect("kernel rows share a length");
        Subspace::from_rows(&rows)
    }

}

/// 0-row matrices forget their width under from_rows; restore it.
fn pad_cols(m: FpMatrix, field: Fp, cols: usize) -> FpMatrix {
    if m.rows() == 0 && m.cols() != cols {
        FpMatrix::zeros(field, 0, cols)
    } else {
        m
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    /// Canonical order: dimension first, then row-major basis entries.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.basis.entries().cmp(other.basis.entries()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    fn space(p: u32, rows: &[Vec<u32>], d: usize) -> Subspace {
        if rows.is_empty() {
            return Subspace::zero(fp(p), d);
        }
        Subspace::from_rows(&FpMatrix::from_rows(fp(p), rows).unwrap())
    }

    #[test]
    fn canonical_representation_is_the_equality_test() {
        let a = space(3, &[vec![1, 2, 0], vec![0, 0, 1]], 3);
        let b = space(3, &[vec![2, 4, 2], vec![1, 2, 1], vec![0, 0, 2]], 3);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sum_and_intersection() {
        let a = space(2, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4);
        let b = space(2, &[vec![0, 1, 0, 0], vec![0, 0, 1, 0]], 4);
        let s = a.sum(&b);
        let i = a.intersect(&b);
        assert_eq!(s.dim(), 3);
        assert_eq!(i.dim(), 1);
        assert!(i.contains_vec(&[0, 1, 0, 0]));
        assert!(s.contains(&a) && s.contains(&b));
        assert!(a.contains(&i) && b.contains(&i));
    }

    #[test]
    fn intersection_of_graph_subspaces_is_trivial() {
        // span{(1,0,1,0),(0,1,0,1)} vs span{(1,0,0,1),(0,1,1,1)} over F_2
        let a = space(2, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]], 4);
        let b = space(2, &[vec![1, 0, 0, 1], vec![0, 1, 1, 1]], 4);
        assert_eq!(a.intersect(&b).dim(), 0);
        assert_eq!(a.sum(&b), Subspace::full(fp(2), 4));
    }

    #[test]
    fn canonical_order_sorts_by_dim_then_lex() {
        let z = Subspace::zero(fp(2), 2);
        let e1 = space(2, &[vec![0, 1]], 2);
        let l10 = space(2, &[vec![1, 0]], 2);
        let l11 = space(2, &[vec![1, 1]], 2);
        let v = Subspace::full(fp(2), 2);
        let mut all = vec![v.clone(), l11.clone(), z.clone(), l10.clone(), e1.clone()];
        all.sort();
        assert_eq!(all, vec![z, e1, l10, l11, v]);
    }

}
