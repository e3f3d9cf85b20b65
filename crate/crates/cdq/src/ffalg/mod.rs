//! Exact linear algebra over prime fields: matrices, Gaussian elimination,
//! polynomials, companion matrices, and primitive polynomial search.
//!
//! Everything is immutable after construction and pure, so values can be
//! shared freely across threads.

mod fp;
mod matrix;
mod poly;

pub use fp::{is_prime, Fp, MAX_PRIME};
pub use matrix::{matrix_order, FpMatrix, MatrixOrder, RowReducer, Rref};
pub use poly::{companion_matrix, find_primitive_polynomial, FpPoly, MAX_DEGREE};
