//! Scalar arithmetic in the prime field F_p.

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive).
pub const MAX_PRIME: u32 = 1 << 16;

/// A prime field F_p. Elements are plain `u32` residues kept fully reduced
/// in `[0, p)`; every operation here returns reduced values.
///
/// Primality is checked once at construction, so the arithmetic never has to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    /// Builds the field, rejecting composites and moduli outside the envelope.
    pub fn new(p: u32) -> Result<Fp> {
        if p >= MAX_PRIME {
            return Err(Error::Envelope(format!(
                "modulus {p} is not below 2^16"
            )));
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_u64(self, x: u64) -> u32 {
        (x % self.p as u64) as u32
    }

    /// Reduces a possibly negative integer.
    #[inline]
    pub fn reduce_i64(self, x: i64) -> u32 {
        let p = self.p as i64;
        (((x % p) + p) % p) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat; panics on zero, which is always a
    /// caller bug in this crate.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// All residues `0..p`, for small exhaustive scans.
    pub fn residues(self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

/// Trial division; the envelope keeps p below 2^16 so this is instant.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
