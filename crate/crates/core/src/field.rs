//! Arithmetic in the prime field F_p for a runtime odd prime p.

use std::fmt;

use crate::error::{Error, Result};

/// The prime field F_p. Only odd primes are accepted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
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

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1;
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

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, (self.p - 2) as u64)
    }

    /// Sign (-1)^k as a field element.
    #[inline]
    pub fn sign(&self, odd: bool) -> u32 {
        if odd {
            self.p - 1
        } else {
            1
        }
    }

    /// k! mod p.
    pub fn factorial(&self, k: u32) -> u32 {
        (1..=k).fold(1, |acc, i| self.mul(acc, i % self.p))
    }

    /// Binomial coefficient binom(n, k) mod p via Lucas' theorem.
    pub fn binomial(&self, mut n: u64, mut k: u64) -> u32 {
        if k > n {
            return 0;
        }
        let p = self.p as u64;
        let mut acc = 1u32;
        while k > 0 || n > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = self.mul(acc, self.small_binomial(nd as u32, kd as u32));
            n /= p;
            k /= p;
        }
        acc
    }

    fn small_binomial(&self, n: u32, k: u32) -> u32 {
        let num = self.factorial(n);
        let den = self.mul(self.factorial(k), self.factorial(n - k));
        self.mul(num, self.inv(den))
    }

    /// Base-p digits of `k`, least significant first.
    pub fn digits(&self, mut k: u32) -> Vec<u32> {
        let mut out = Vec::new();
        while k > 0 {
            out.push(k % self.p);
            k /= self.p;
        }
        out
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
