//! Arithmetic in the prime field F_p and modular combinatorics.
//!
//! Residues are stored as least nonnegative integers in 64-bit words; every
//! product is reduced immediately.  With p <= 97 this can never overflow and
//! equality of scalars is structural equality of the words.

use thiserror::Error;

/// Largest coefficient prime the workbench accepts.
pub const MAX_PRIME: u64 = 97;

/// Largest supported group order q = p^k.
pub const MAX_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime in the supported range 2..={MAX_PRIME}")]
    NotPrime(u64),
    #[error("exponent k must be positive")]
    ZeroExponent,
    #[error("group order {p}^{k} exceeds 2^20")]
    OrderTooLarge { p: u64, k: u32 },
    #[error("0 has no inverse modulo {0}")]
    ZeroInverse(u64),
}

/// A coefficient prime p together with a group order q = p^k.
///
/// The same value parameterizes both the coefficient field F_p and the
/// cyclic group C_q acting on the polynomial ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime {
    p: u64,
    k: u32,
    q: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Prime {
    /// Validates p (deterministic trial division) and the order bound q <= 2^20.
    pub fn new(p: u64, k: u32) -> Result<Self, ArithError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if k == 0 {
            return Err(ArithError::ZeroExponent);
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).ok_or(ArithError::OrderTooLarge { p, k })?;
            if q > MAX_ORDER {
                return Err(ArithError::OrderTooLarge { p, k });
            }
        }
        Ok(Prime { p, k, q })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// The group order q = p^k.
    pub fn q(self) -> u64 {
        self.q
    }

    /// Canonical residue of an arbitrary signed integer.
    pub fn reduce_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce(self, a: u64) -> u64 {
        a % self.p
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.p && b < self.p);
        a * b % self.p
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        debug_assert!(base < self.p);
        let mut acc = 1 % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse in F_p.  Requesting the inverse of zero is an
    /// explicit error, never a sentinel value.
    pub fn inv(self, a: u64) -> Result<u64, ArithError> {
        debug_assert!(a < self.p);
        if a == 0 {
            return Err(ArithError::ZeroInverse(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }
}

/// Binomial coefficient C(n, k) mod p, zero when k > n.
///
/// Computed by the Pascal-triangle recurrence mod p rather than by
/// factorials, which are undefined mod p once n >= p.
pub fn binom_mod(n: u64, k: u64, prime: Prime) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // row[j] = C(i, j) mod p for the current row i, for j <= k.
    let mut row = vec![0u64; k as usize + 1];
    row[0] = 1 % prime.p();
    for _ in 1..=n {
        for j in (1..row.len()).rev() {
            row[j] = prime.add(row[j], row[j - 1]);
        }
    }
    row[k as usize]
}
