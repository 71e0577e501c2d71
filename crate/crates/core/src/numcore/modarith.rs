//! Word-sized modular arithmetic: products through `u128`, inverses via the
//! extended Euclidean algorithm, CRT, and a deterministic primality test.

use num_integer::Integer;

use crate::error::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed value into `[0, m)`.
#[inline]
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`. For `m = 1` the answer is 0.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let ext = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if ext.gcd != 1 {
        return None;
    }
    Some(reduce_i128(ext.x, m))
}

/// Combines `r1 mod m1` and `r2 mod m2` into the unique residue modulo `m1·m2`.
pub fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Result<u64> {
    if m1 == 0 || m2 == 0 {
        return Err(Error::invalid("CRT moduli must be positive"));
    }
    if r1 >= m1 || r2 >= m2 {
        return Err(Error::invalid(format!(
            "CRT residues must be reduced: {r1} mod {m1}, {r2} mod {m2}"
        )));
    }
    let m = m1
        .checked_mul(m2)
        .ok_or_else(|| Error::invalid(format!("CRT modulus {m1}*{m2} exceeds 64 bits")))?;
    let inv = inv_mod(m1 % m2, m2).ok_or_else(|| {
        Error::invalid(format!("CRT moduli not coprime: gcd({m1}, {m2}) = {}", m1.gcd(&m2)))
    })?;
    Ok(crt_unchecked(r1, m1, r2, m2, inv, m))
}

/// CRT with a precomputed `inv = m1^{-1} mod m2` and `m = m1·m2`.
#[inline]
pub(crate) fn crt_unchecked(r1: u64, m1: u64, r2: u64, m2: u64, inv: u64, m: u64) -> u64 {
    // x = r1 + m1 * ((r2 - r1) * inv mod m2)
    let t = mul_mod(sub_mod(r2 % m2, r1 % m2, m2), inv, m2);
    (r1 as u128 + m1 as u128 * t as u128) as u64 % m
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crt_examples() {
        assert_eq!(crt_pair(2, 5, 5, 13).unwrap(), 57);
        assert_eq!(crt_pair(0, 7, 0, 11).unwrap(), 0);
        assert_eq!(crt_pair(3, 5, 8, 13).unwrap(), 8);
    }

    #[test]
    fn crt_rejects_common_factor() {
        assert!(matches!(crt_pair(1, 4, 1, 6), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn inverse_roundtrip() {
        for m in 2..200u64 {
            for a in 0..m {
                match inv_mod(a, m) {
                    Some(i) => assert_eq!(mul_mod(a, i, m), 1),
                    None => assert_ne!(gcd(a, m), 1),
                }
            }
        }
    }

    #[test]
    fn primality_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
        assert!(is_prime_u64(999_983));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        // Carmichael number
        assert!(!is_prime_u64(3_215_031_751));
    }
}
