//! Dense polynomials over F_p for word-sized primes.

use num_bigint::BigUint;

use super::modarith::{add_mod, inv_mod, is_prime_u64, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Polynomial over F_p, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl FpPoly {
    pub fn new(coeffs: Vec<u64>, p: u64) -> Self {
        let mut poly = FpPoly {
            coeffs: coeffs.into_iter().map(|c| c % p).collect(),
            p,
        };
        poly.trim();
        poly
    }

    /// Builds from signed coefficients, reducing each mod p.
    pub fn from_i64(coeffs: &[i64], p: u64) -> Self {
        Self::new(
            coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect(),
            p,
        )
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { coeffs: Vec::new(), p }
    }

    pub fn one(p: u64) -> Self {
        Self::new(vec![1], p)
    }

    /// The monomial x.
    pub fn x(p: u64) -> Self {
        Self::new(vec![0, 1], p)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn eval(&self, v: u64) -> u64 {
        super::poly::eval_reduced(&self.coeffs, v, self.p)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                add_mod(a, b, self.p)
            })
            .collect();
        Self::new(c, self.p)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                sub_mod(a, b, self.p)
            })
            .collect();
        Self::new(c, self.p)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        let pp = p as u128;
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % pp;
            }
        }
        Self::new(out.into_iter().map(|c| c as u64).collect(), p)
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = inv_mod(divisor.coeffs[dd], p).expect("leading coefficient not invertible");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = mul_mod(c, lead_inv, p);
            quot[i - dd] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = sub_mod(rem[k], mul_mod(q, d, p), p);
            }
        }
        rem.truncate(dd);
        (Self::new(quot, p), Self::new(rem, p))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Scales to leading coefficient 1. The zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lead) => {
                let inv = inv_mod(lead, self.p).expect("nonzero element of F_p");
                Self::new(self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect(), self.p)
            }
        }
    }
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// Monic gcd over F_p.
pub fn poly_gcd_mod_p(a: &FpPoly, b: &FpPoly, p: u64) -> Result<FpPoly> {
    check_prime(p)?;
    if a.is_zero() && b.is_zero() {
        return Err(Error::invalid("gcd of two zero polynomials is undefined"));
    }
    Ok(gcd_unchecked(a, b))
}

pub(crate) fn gcd_unchecked(a: &FpPoly, b: &FpPoly) -> FpPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// `base^exponent mod (modpoly, p)` by left-to-right square-and-multiply.
pub fn poly_powmod(base: &FpPoly, exponent: &BigUint, modpoly: &FpPoly, p: u64) -> Result<FpPoly> {
    check_prime(p)?;
    if modpoly.degree().unwrap_or(0) == 0 {
        return Err(Error::invalid("modulus polynomial must be nonconstant"));
    }
    Ok(powmod_unchecked(base, exponent, modpoly))
}

pub(crate) fn powmod_unchecked(base: &FpPoly, exponent: &BigUint, modpoly: &FpPoly) -> FpPoly {
    let p = modpoly.p;
    let base = base.rem(modpoly);
    let mut acc = FpPoly::one(p).rem(modpoly);
    for i in (0..exponent.bits()).rev() {
        acc = acc.mul(&acc).rem(modpoly);
        if exponent.bit(i) {
            acc = acc.mul(&base).rem(modpoly);
        }
    }
    acc
}
