use serde::Serialize;

use super::modarith::is_prime_u64;
use crate::error::{Error, Result};

/// Largest supported sieve limit (entries are `u32`, so this is 4 GiB).
pub const MAX_SIEVE_LIMIT: u64 = 1 << 30;

/// Smallest-prime-factor table for `2..=limit`.
#[derive(Clone, Debug)]
pub struct SpfSieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfSieve {
    /// Linear sieve; `O(limit)` time and `4·limit` bytes.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "sieve limit {limit} exceeds the supported maximum {MAX_SIEVE_LIMIT}"
            )));
        }
        let limit = limit as usize;
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::with_capacity(approx_prime_count(limit));
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let q = p as usize * i;
                if p > si || q > limit {
                    break;
                }
                spf[q] = p;
            }
        }
        Ok(SpfSieve { spf, primes })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Least prime factor of `n`, for `2 <= n <= limit`.
    pub fn smallest_prime_factor(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit() {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        if n <= self.limit() {
            n >= 2 && self.spf[n as usize] as u64 == n
        } else {
            is_prime_u64(n)
        }
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Factorizes `n`. Inside the table this is a walk along smallest prime
    /// factors; above it, trial division by the sieved primes followed by a
    /// deterministic primality test of the cofactor.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::invalid("cannot factorize 0"));
        }
        let mut parts: Vec<(u64, u32)> = Vec::new();
        let mut push = |p: u64| match parts.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => parts.push((p, 1)),
        };
        let mut m = n;
        if m > self.limit() {
            for &p in &self.primes {
                let p = p as u64;
                if p.saturating_mul(p) > m {
                    break;
                }
                while m % p == 0 {
                    m /= p;
                    push(p);
                }
                if m <= self.limit() {
                    break;
                }
            }
            if m > self.limit() {
                let largest = *self.primes.last().unwrap() as u64;
                let fully_sieved = largest.saturating_mul(largest) >= m;
                if fully_sieved || is_prime_u64(m) {
                    push(m);
                    m = 1;
                } else {
                    return Err(Error::unsupported(format!(
                        "{n} has the composite cofactor {m} beyond the sieve limit {}",
                        self.limit()
                    )));
                }
            }
        }
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            m /= p;
            push(p);
        }
        Ok(Factorization { modulus: n, parts })
    }
}

fn approx_prime_count(limit: usize) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

/// Prime factorization `n = Π p^e` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub modulus: u64,
    pub parts: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn product(&self) -> u64 {
        self.parts.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Number of distinct prime factors, ω(n).
    pub fn omega(&self) -> usize {
        self.parts.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.parts.iter().all(|&(_, e)| e == 1)
    }

    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.parts.iter().map(|&(p, e)| (p, e, p.pow(e)))
    }
}
