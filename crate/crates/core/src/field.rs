//! Arithmetic in the prime field F_p.
//!
//! Elements are plain `u32` values kept in the canonical range `[0, p)`; the
//! field handle only carries the modulus. All products go through `u64`, so
//! any prime below 2^31 is supported.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    /// Builds F_p, rejecting composite or out-of-range moduli.
    pub fn new(p: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&p) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p: p as u32 })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Canonical representative of an arbitrary integer.
    #[inline]
    pub fn elem(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, base: u32, mut exp: u64) -> u32 {
        let p = self.p as u64;
        let mut acc = 1 % p;
        let mut b = base as u64 % p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            exp >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// `a / b`, panicking on division by zero. Callers check pivots first.
    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b).expect("division by zero in F_p"))
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.p == 2 || self.pow(a, (self.p as u64 - 1) / 2) == 1
    }

    /// A square root of `a` if one exists (Tonelli-Shanks).
    pub fn sqrt(&self, a: u32) -> Option<u32> {
        let a = a % self.p;
        if a == 0 || self.p == 2 {
            return Some(a);
        }
        if !self.is_square(a) {
            return None;
        }
        let p = self.p as u64;
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let mut z = 2u32;
        while self.is_square(z) {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, q.div_ceil(2));
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }

    /// All elements `0..p` in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
