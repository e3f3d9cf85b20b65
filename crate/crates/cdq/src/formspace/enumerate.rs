//! Exhaustive enumeration of the subspaces of F_p^d.
//!
//! Subspaces are generated through their canonical RREF bases: pick a
//! dimension k, pick the pivot columns, then run an odometer over the free
//! entries. Each subspace appears exactly once. The public iterator merges
//! the per-pivot-pattern streams so the overall order is canonical
//! (dimension ascending, then row-major lexicographic on the basis matrix);
//! the crate-internal visitor skips the merge for raw scanning speed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::ffalg::{Fp, FpMatrix};
use crate::formspace::Subspace;

/// Gaussian binomial coefficient [d choose k]_p, saturating at u128::MAX.
pub fn gaussian_binomial(p: u32, d: usize, k: usize) -> u128 {
    if k > d {
        return 0;
    }
    let p = p as u128;
    let mut acc: u128 = 1;
    // [d, i+1] = [d, i] * (p^{d-i} - 1) / (p^{i+1} - 1), integral at each step
    for i in 0..k {
        let num = match p.checked_pow((d - i) as u32) {
            Some(x) => x - 1,
            None => return u128::MAX,
        };
        let den = p.pow((i + 1) as u32) - 1;
        acc = match acc.checked_mul(num) {
            Some(x) => x / den,
            None => return u128::MAX,
        };
    }
    acc
}

/// Total number of subspaces of F_p^d (the sum over all dimensions).
pub fn subspace_count(p: u32, d: usize) -> u128 {
    (0..=d).fold(0u128, |acc, k| {
        acc.saturating_add(gaussian_binomial(p, d, k))
    })
}

/// One pivot pattern with an odometer over its free entries.
struct PatternStream {
    field: Fp,
    d: usize,
    pivots: Vec<usize>,
    /// Free coordinates in row-major order: (row, col) with col right of the
    /// row's pivot and not itself a pivot column.
    free: Vec<(usize, usize)>,
    /// Odometer digits aligned with `free`; None once exhausted.
    values: Option<Vec<u32>>,
}

impl PatternStream {
    fn new(field: Fp, d: usize, pivots: Vec<usize>) -> PatternStream {
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; d];
            for &c in &pivots {
                v[c] = true;
            }
            v
        };
        let mut free = Vec::new();
        for (row, &pc) in pivots.iter().enumerate() {
            for (col, &pivot) in is_pivot.iter().enumerate().skip(pc + 1) {
                if !pivot {
                    free.push((row, col));
                }
            }
        }
        let values = Some(vec![0u32; free.len()]);
        PatternStream {
            field,
            d,
            pivots,
            free,
            values,
        }
    }

    fn materialize_into(&self, out: &mut FpMatrix) {
        debug_assert_eq!(out.rows(), self.pivots.len());
        debug_assert_eq!(out.cols(), self.d);
        let values = self.values.as_ref().expect("stream exhausted");
        for i in 0..self.pivots.len() {
            for j in 0..self.d {
                out.set(i, j, 0);
            }
            out.set(i, self.pivots[i], 1);
        }
        for (&(row, col), &v) in self.free.iter().zip(values) {
            out.set(row, col, v);
        }
    }

    /// Advances the odometer (last digit fastest so the per-pattern order is
    /// row-major lexicographic); returns false when exhausted.
    fn advance(&mut self) -> bool {
        let p = self.field.modulus();
        let Some(values) = self.values.as_mut() else {
            return false;
        };
        for digit in values.iter_mut().rev() {
            *digit += 1;
            if *digit < p {
                return true;
            }
            *digit = 0;
        }
        self.values = None;
        false
    }
}

/// All pivot patterns (k-subsets of columns) in lexicographic order.
fn pivot_patterns(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, d: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for c in start..=(d - remaining) {
            current.push(c);
            rec(c + 1, d, k, current, out);
            current.pop();
        }
    }
    if k == 0 {
        out.push(vec![]);
    } else if k <= d {
        rec(0, d, k, &mut current, &mut out);
    }
    out
}

/// Visits every subspace exactly once, grouped by (dimension, pivot
/// pattern), reusing one scratch basis matrix. Fast path for exhaustive
/// scans; the emission order within a dimension is per-pattern, not the
/// merged canonical order.
pub(crate) fn scan_subspaces<F>(field: Fp, d: usize, mut visit: F) -> u128
where
    F: FnMut(&FpMatrix),
{
    let mut count: u128 = 0;
    for k in 0..=d {
        for pivots in pivot_patterns(d, k) {
            let mut stream = PatternStream::new(field, d, pivots);
            let mut scratch = FpMatrix::zeros(field, k, d);
            loop {
                stream.materialize_into(&mut scratch);
                visit(&scratch);
                count += 1;
                if !stream.advance() {
                    break;
                }
            }
        }
    }
    count
}

/// Deterministic stream of all subspaces of F_p^d in canonical order.
pub struct SubspaceIter {
    field: Fp,
    d: usize,
    dim: usize,
    /// Streams for the current dimension plus a heap of (next basis, index).
    streams: Vec<PatternStream>,
    heap: BinaryHeap<Reverse<(Vec<u32>, usize)>>,
}

/// Refuses up front when the total count exceeds `cap`.
pub fn enumerate_subspaces(field: Fp, d: usize, cap: u128) -> Result<SubspaceIter> {
    let total = subspace_count(field.modulus(), d);
    if total > cap {
        return Err(Error::Capacity {
            what: format!("subspace count of F_{}^{}", field.modulus(), d),
            estimated: total,
            cap,
            hint: Some("use assertion mode instead of exhaustive enumeration".into()),
        });
    }
    let mut it = SubspaceIter {
        field,
        d,
        dim: 0,
        streams: Vec::new(),
        heap: BinaryHeap::new(),
    };
    it.load_dimension(0);
    Ok(it)
}

impl SubspaceIter {
    fn load_dimension(&mut self, k: usize) {
        self.dim = k;
        self.streams = pivot_patterns(self.d, k)
            .into_iter()
            .map(|p| PatternStream::new(self.field, self.d, p))
            .collect();
        self.heap = BinaryHeap::new();
        let streams = std::mem::take(&mut self.streams);
        for (idx, stream) in streams.iter().enumerate() {
            let mut scratch = FpMatrix::zeros(self.field, k, self.d);
            stream.materialize_into(&mut scratch);
            self.heap.push(Reverse((scratch.entries().to_vec(), idx)));
        }
        self.streams = streams;
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        loop {
            if let Some(Reverse((entries, idx))) = self.heap.pop() {
                let rows: Vec<Vec<u32>> = entries.chunks(self.d.max(1)).map(<[u32]>::to_vec).collect();
                let basis = if self.dim == 0 {
                    FpMatrix::zeros(self.field, 0, self.d)
                } else {
                    FpMatrix::from_rows(self.field, &rows).expect("uniform chunks")
                };
                // refill from the same stream
                if self.streams[idx].advance() {
                    let mut scratch = FpMatrix::zeros(self.field, self.dim, self.d);
                    self.streams[idx].materialize_into(&mut scratch);
                    self.heap.push(Reverse((scratch.entries().to_vec(), idx)));
                }
                return Some(Subspace::from_rref_unchecked(basis));
            }
            if self.dim == self.d {
                return None;
            }
            let next_dim = self.dim + 1;
            self.load_dimension(next_dim);
        }
    }
}
