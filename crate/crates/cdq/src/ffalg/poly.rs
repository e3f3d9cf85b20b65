//! Polynomials over F_p, companion matrices, and primitive polynomial search.

use crate::error::{Error, Result};
use crate::ffalg::fp::Fp;
use crate::ffalg::matrix::{matrix_order, FpMatrix, MatrixOrder};

/// Degree cap; everything here is desk-scale.
pub const MAX_DEGREE: usize = 64;

/// Dense polynomial, coefficients low-to-high, trailing zeros trimmed.
/// The empty coefficient vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    field: Fp,
    coeffs: Vec<u32>,
}

impl FpPoly {
    pub fn new(field: Fp, coeffs: Vec<u32>) -> FpPoly {
        let mut coeffs: Vec<u32> = coeffs.iter().map(|&c| c % field.modulus()).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { field, coeffs }
    }

    pub fn zero(field: Fp) -> FpPoly {
        FpPoly {
            field,
            coeffs: vec![],
        }
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        FpPoly::new(f, out)
    }

    /// Remainder of self divided by a nonzero divisor.
    pub fn rem(&self, divisor: &FpPoly) -> FpPoly {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let f = self.field;
        let dd = divisor.degree().unwrap();
        let lead_inv = f.inv(*divisor.coeffs.last().unwrap());
        let mut rem = self.coeffs.clone();
        while rem.len() > dd {
            let k = rem.len() - 1;
            let c = f.mul(rem[k], lead_inv);
            if c != 0 {
                let shift = k - dd;
                for (i, &dc) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = f.sub(rem[shift + i], f.mul(c, dc));
                }
            }
            rem.pop();
        }
        FpPoly::new(f, rem)
    }

    /// Evaluates the polynomial at a square matrix.
    pub fn eval_matrix(&self, m: &FpMatrix) -> FpMatrix {
        assert!(m.is_square());
        let n = m.rows();
        let mut acc = FpMatrix::zeros(m.field(), n, n);
        let mut power = FpMatrix::identity(m.field(), n);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                acc = acc.add(&power.scale(c));
            }
            if i + 1 < self.coeffs.len() {
                power = power.mul(m);
            }
        }
        acc
    }

    /// Trial-division irreducibility test: divide by every monic polynomial
    /// of degree up to half of ours. Fine at desk scale, by design.
    pub fn is_irreducible(&self) -> bool {
        let Some(deg) = self.degree() else {
            return false;
        };
        if deg == 0 {
            return false;
        }
        if deg == 1 {
            return true;
        }
        let f = self.field;
        let p = f.modulus() as u128;
        for dd in 1..=deg / 2 {
            // all monic polynomials of degree dd
            let count = p.pow(dd as u32);
            for idx in 0..count {
                let mut coeffs = Vec::with_capacity(dd + 1);
                let mut rest = idx;
                for _ in 0..dd {
                    coeffs.push((rest % p) as u32);
                    rest /= p;
                }
                coeffs.push(1);
                let divisor = FpPoly::new(f, coeffs);
                if self.rem(&divisor).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            match i {
                0 => write!(out, "{c}")?,
                1 if c == 1 => write!(out, "x")?,
                1 => write!(out, "{c}x")?,
                _ if c == 1 => write!(out, "x^{i}")?,
                _ => write!(out, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Companion (Frobenius) matrix of a monic polynomial
/// x^a - k_{a-1} x^{a-1} - ... - k_1 x - k_0: subdiagonal ones, the k_i
/// down the last column.
pub fn companion_matrix(poly: &FpPoly) -> Result<FpMatrix> {
    let Some(a) = poly.degree() else {
        return Err(Error::InvalidParams(
            "companion matrix of the zero polynomial".into(),
        ));
    };
    if a == 0 {
        return Err(Error::InvalidParams(
            "companion matrix needs degree >= 1".into(),
        ));
    }
    if !poly.is_monic() {
        return Err(Error::InvalidParams(format!(
            "companion matrix needs a monic polynomial, got {poly}"
        )));
    }
    if a > MAX_DEGREE {
        return Err(Error::Envelope(format!(
            "degree {a} exceeds the {MAX_DEGREE} cap"
        )));
    }
    let f = poly.field();
    let mut b = FpMatrix::zeros(f, a, a);
    for i in 0..a {
        // poly = x^a + c_{a-1} x^{a-1} + ... + c_0, so k_i = -c_i
        b.set(i, a - 1, f.neg(poly.coeff(i)));
        if i + 1 < a {
            b.set(i + 1, i, 1);
        }
    }
    Ok(b)
}

/// Deterministic primitive polynomial search: monic x^a - sum k_i x^i whose
/// companion matrix has multiplicative order exactly p^a - 1, taking the
/// lexicographically smallest coefficient vector (k_0 varying fastest).
pub fn find_primitive_polynomial(field: Fp, a: usize) -> Result<FpPoly> {
    if a == 0 || a > MAX_DEGREE {
        return Err(Error::InvalidParams(format!(
            "degree must be in 1..={MAX_DEGREE}, got {a}"
        )));
    }
    let p = field.modulus() as u128;
    let target = p
        .checked_pow(a as u32)
        .map(|x| x - 1)
        .ok_or_else(|| Error::Envelope(format!("p^{a} overflows the search bound")))?;
    let count = target + 1;
    for idx in 0..count {
        // digits of idx base p are (k_0, k_1, ...), k_0 fastest
        let mut rest = idx;
        let mut coeffs = Vec::with_capacity(a + 1);
        for _ in 0..a {
            coeffs.push(field.neg((rest % p) as u32)); // coefficient of x^i is -k_i
            rest /= p;
        }
        coeffs.push(1);
        let poly = FpPoly::new(field, coeffs);
        if !poly.is_irreducible() {
            continue;
        }
        let b = companion_matrix(&poly)?;
        if matrix_order(&b)? == MatrixOrder::Finite(target) {
            return Ok(poly);
        }
    }
    Err(Error::Internal(format!(
        "no primitive polynomial of degree {a} over F_{} found; this is a bug",
        field.modulus()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffalg::matrix::RowReducer;

    fn f(p: u32) -> Fp {
        Fp::new(p).unwrap()
    }

    #[test]
    fn companion_shapes() {
        // x - 1 over F_2 -> [1]
        let poly = FpPoly::new(f(2), vec![1, 1]); // x + 1 = x - 1
        let b = companion_matrix(&poly).unwrap();
        assert_eq!(b, FpMatrix::from_rows(f(2), &[vec![1]]).unwrap());

        // x^2 + x + 1 over F_2 -> [[0,1],[1,1]]
        let poly = FpPoly::new(f(2), vec![1, 1, 1]);
        let b = companion_matrix(&poly).unwrap();
        assert_eq!(
            b,
            FpMatrix::from_rows(f(2), &[vec![0, 1], vec![1, 1]]).unwrap()
        );
        // direct verification that B^2 + B + I = 0
        assert!(poly.eval_matrix(&b).is_zero());

        // x - 2 over F_3 -> [2]
        let poly = FpPoly::new(f(3), vec![1, 1]); // x + 1 = x - 2
        let b = companion_matrix(&poly).unwrap();
        assert_eq!(b, FpMatrix::from_rows(f(3), &[vec![2]]).unwrap());
    }

    #[test]
    fn companion_rejects_bad_input() {
        assert!(companion_matrix(&FpPoly::new(f(3), vec![2, 2])).is_err()); // not monic
        assert!(companion_matrix(&FpPoly::new(f(3), vec![2])).is_err()); // degree 0
        assert!(companion_matrix(&FpPoly::zero(f(3))).is_err());
    }

    #[test]
    fn irreducibility_known_cases() {
        assert!(FpPoly::new(f(2), vec![1, 1, 1]).is_irreducible()); // x^2+x+1
        assert!(!FpPoly::new(f(2), vec![1, 0, 1]).is_irreducible()); // x^2+1 = (x+1)^2
        assert!(!FpPoly::new(f(3), vec![2, 0, 1]).is_irreducible()); // x^2-1
        assert!(FpPoly::new(f(3), vec![1, 0, 1]).is_irreducible()); // x^2+1 over F_3
        assert!(FpPoly::new(f(5), vec![3, 1]).is_irreducible()); // linear
        assert!(!FpPoly::new(f(5), vec![4]).is_irreducible()); // constant
    }

    #[test]
    fn primitive_polynomial_examples() {
        // F_2, degree 1: x - 1, companion [1], order 1 = 2^1 - 1
        let poly = find_primitive_polynomial(f(2), 1).unwrap();
        assert_eq!(poly, FpPoly::new(f(2), vec![1, 1]));

        // F_2, degree 2: the only irreducible quadratic
        let poly = find_primitive_polynomial(f(2), 2).unwrap();
        assert_eq!(poly, FpPoly::new(f(2), vec![1, 1, 1]));

        // F_3, degree 1: x - 2 (2 generates F_3^*)
        let poly = find_primitive_polynomial(f(3), 1).unwrap();
        assert_eq!(poly, FpPoly::new(f(3), vec![1, 1]));
    }

    #[test]
    fn companion_of_irreducible_has_it_as_minimal_polynomial() {
        for (p, a) in [(2u32, 2usize), (2, 3), (3, 2), (5, 2)] {
            let poly = find_primitive_polynomial(f(p), a).unwrap();
            let b = companion_matrix(&poly).unwrap();
            assert!(poly.eval_matrix(&b).is_zero());
            // I, B, ..., B^{a-1} linearly independent (flattened as vectors)
            let mut red = RowReducer::new(f(p), a * a);
            let mut power = FpMatrix::identity(f(p), a);
            for _ in 0..a {
                assert!(red.add_row(power.entries().to_vec()).is_some());
                power = power.mul(&b);
            }
        }
    }

    #[test]
    fn primitive_companion_powers_form_a_field() {
        for (p, a) in [(2u32, 1usize), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let field = f(p);
            let poly = find_primitive_polynomial(field, a).unwrap();
            let b = companion_matrix(&poly).unwrap();
            let order = (p as u128).pow(a as u32) - 1;
            assert_eq!(matrix_order(&b).unwrap(), MatrixOrder::Finite(order));
            // {0} plus the powers are pairwise distinct and closed under addition
            let mut elements = vec![FpMatrix::zeros(field, a, a)];
            let mut acc = b.clone();
            for _ in 0..order {
                elements.push(acc.clone());
                acc = acc.mul(&b);
            }
            for (i, x) in elements.iter().enumerate() {
                for y in &elements[i + 1..] {
                    assert_ne!(x, y);
                }
            }
            for x in &elements {
                for y in &elements {
                    let sum = x.add(y);
                    assert!(elements.contains(&sum));
                }
            }
        }
    }
}
