//! Exponential sums over root sets, Weyl partial sums with checkpoints,
//! discrepancy, and prime statistics.
//!
//! The central quantity is ρ(h, n) = Σ_v e(h·v/n), summed over the roots v of
//! f mod n, with e(x) = exp(2πix). For admissible n the roots are exactly the
//! residues α(𝔞) of the degree-one ideals of norm n.

mod discrepancy;
mod kahan;
mod stats;
mod weyl;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::numcore::modarith::{inv_mod, mul_mod};
use crate::numcore::{IntPolynomial, SpfSieve};
use crate::roots::{roots_mod_n, roots_mod_prime, RootSet};

pub use discrepancy::{box_discrepancy, star_discrepancy, DiscrepancyKind, DiscrepancyReport, GridHistogram};
pub use kahan::{ComplexKahan, KahanSum};
pub use stats::{prime_stats, rho_sum_progression, PrimeStatsRow, PrimeStatsTable, ProgressionRow, ProgressionSums};
pub use weyl::{
    checkpoints_decades, format_sig, ratio_discrepancy, validate_checkpoints, weyl_partial_sums,
    weyl_partial_sums_with_table, HMode, WeylRow, WeylSeries,
};

/// e(r/n) for an integer residue r.
#[inline]
pub fn unit_phase(r: u64, n: u64) -> Complex64 {
    let t = std::f64::consts::TAU * (r % n) as f64 / n as f64;
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// h mod n as an element of `[0, n)`.
#[inline]
pub fn reduce_h(h: i64, n: u64) -> u64 {
    (h as i128).rem_euclid(n as i128) as u64
}

/// ρ(h, n) = Σ_{v ∈ roots} e(h·v/n).
pub fn rho_h(h: i64, roots: &RootSet) -> Complex64 {
    rho_h_residue(reduce_h(h, roots.modulus), roots)
}

/// ρ(h, n) for h already reduced into `[0, n)`.
pub fn rho_h_residue(hr: u64, roots: &RootSet) -> Complex64 {
    let n = roots.modulus;
    roots.roots.iter().map(|&v| unit_phase(mul_mod(hr, v, n), n)).sum()
}

/// ρ(h, n1·n2) through the product ρ(h·n̄2, n1)·ρ(h·n̄1, n2), where n̄1 is the
/// inverse of n1 mod n2 and n̄2 the inverse of n2 mod n1.
pub fn rho_h_factored(f: &IntPolynomial, h: i64, n1: u64, n2: u64, sieve: &SpfSieve) -> Result<Complex64> {
    if n1 == 0 || n2 == 0 || n1.gcd(&n2) != 1 {
        return Err(Error::invalid(format!("{n1} and {n2} are not coprime positive moduli")));
    }
    let r1 = roots_mod_n(f, n1, sieve)?;
    let r2 = roots_mod_n(f, n2, sieve)?;
    Ok(rho_h_split(h, &r1, &r2))
}

/// The factored form for precomputed root sets of coprime moduli.
pub fn rho_h_split(h: i64, r1: &RootSet, r2: &RootSet) -> Complex64 {
    let (n1, n2) = (r1.modulus, r2.modulus);
    let nbar1 = inv_mod(n1 % n2, n2).expect("coprime");
    let nbar2 = inv_mod(n2 % n1, n1).expect("coprime");
    let h1 = mul_mod(reduce_h(h, n1), nbar2, n1);
    let h2 = mul_mod(reduce_h(h, n2), nbar1, n2);
    rho_h_residue(h1, r1) * rho_h_residue(h2, r2)
}

/// ω_P(n): prime divisors of n that are prime to η·D_f and split completely
/// (f has d roots mod p).
pub fn omega_p(f: &IntPolynomial, n: u64, sieve: &SpfSieve) -> Result<u32> {
    let fact = sieve.factorize(n)?;
    let mut count = 0;
    for &(p, _) in &fact.parts {
        if !f.is_bad_prime(p) && roots_mod_prime(f, p)?.len() == f.degree() {
            count += 1;
        }
    }
    Ok(count)
}

/// Both sides of Σ_{a=1}^{n} |ρ(ah, n)|² ≤ n·(h, n)·ρ(n)² / d^{ω_P(n)}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SieveBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn sieve_bound_check(f: &IntPolynomial, h: i64, n: u64, sieve: &SpfSieve) -> Result<SieveBoundCheck> {
    if n == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let roots = roots_mod_n(f, n, sieve)?;
    let hr = reduce_h(h, n);
    let lhs: f64 = (1..=n)
        .map(|a| rho_h_residue(mul_mod(a % n, hr, n), &roots).norm_sqr())
        .sum();
    let g = hr.gcd(&n) as f64; // gcd(0, n) = n
    let rho = roots.count() as f64;
    let omega = omega_p(f, n, sieve)?;
    let rhs = n as f64 * g * rho * rho / (f.degree() as f64).powi(omega as i32);
    Ok(SieveBoundCheck { lhs, rhs, holds: lhs <= rhs + 1e-6 })
}
