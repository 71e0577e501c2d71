//! Integer and polynomial arithmetic shared by every other module.

pub mod fp;
pub mod modarith;
pub mod poly;
pub mod sieve;

pub use fp::{poly_gcd_mod_p, poly_powmod, FpPoly};
pub use modarith::{crt_pair, gcd, inv_mod, is_prime_u64, mul_mod, pow_mod};
pub use poly::{discriminant, IntPolynomial};
pub use sieve::{Factorization, SpfSieve, MAX_SIEVE_LIMIT};

/// Euler's totient of a factored integer.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.parts
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}
