//! Roots of f(x) ≡ 0 modulo primes, prime powers, and arbitrary moduli.
//!
//! Prime-level roots come from a scan for small primes and from
//! `gcd(x^p − x, f)` plus randomized equal-degree splitting for large ones.
//! Prime-power roots are Hensel lifts; composite moduli are assembled by CRT.

mod stream;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numcore::fp::{gcd_unchecked, powmod_unchecked, FpPoly};
use crate::numcore::modarith::{crt_unchecked, inv_mod, is_prime_u64, mul_mod, sub_mod};
use crate::numcore::poly::eval_reduced;
use crate::numcore::{IntPolynomial, SpfSieve};

pub use stream::{root_stream, ModulusFilter, RootStream, RootTable};

/// Primes below this are scanned exhaustively.
pub const SCAN_CROSSOVER: u64 = 1 << 16;

/// Cap on candidate lifts examined at one level of a ramified lift.
pub const MAX_RAMIFIED_CANDIDATES: u64 = 1_000_000;

/// The roots of f modulo `modulus`, sorted and duplicate free.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSet {
    pub modulus: u64,
    pub roots: Vec<u64>,
}

impl RootSet {
    /// ρ(n), the number of roots.
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    /// The modulus-one set `{0}`.
    pub fn unit() -> Self {
        RootSet { modulus: 1, roots: vec![0] }
    }
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{p} is not prime")))
    }
}

/// Sorted roots of f modulo the prime `p`.
pub fn roots_mod_prime(f: &IntPolynomial, p: u64) -> Result<Vec<u64>> {
    roots_mod_prime_seeded(f, p, 0)
}

/// As [`roots_mod_prime`], with an explicit seed for the splitting step.
pub fn roots_mod_prime_seeded(f: &IntPolynomial, p: u64, seed: u64) -> Result<Vec<u64>> {
    require_prime(p)?;
    Ok(prime_roots_unchecked(f, p, seed))
}

pub(crate) fn prime_roots_unchecked(f: &IntPolynomial, p: u64, seed: u64) -> Vec<u64> {
    let mut coeffs = f.reduce_mod(p);
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    // f is primitive, so it never vanishes identically mod p
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    if p < SCAN_CROSSOVER {
        return (0..p).filter(|&v| eval_reduced(&coeffs, v, p) == 0).collect();
    }
    let fp = FpPoly::new(coeffs, p);
    let x = FpPoly::x(p);
    let xp = powmod_unchecked(&x, &BigUint::from(p), &fp);
    let g = gcd_unchecked(&xp.sub(&x), &fp);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut roots = Vec::with_capacity(g.degree().unwrap_or(0));
    split_linear(&g, &mut rng, &mut roots);
    roots.sort_unstable();
    roots
}

/// Splits a monic product of distinct linear factors over F_p (p odd).
fn split_linear(g: &FpPoly, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    let p = g.modulus();
    match g.degree() {
        None | Some(0) => {}
        Some(1) => {
            let c = g.coeffs();
            let inv = inv_mod(c[1], p).expect("monic");
            out.push(mul_mod(sub_mod(0, c[0], p), inv, p));
        }
        Some(d) => {
            let half = BigUint::from((p - 1) / 2);
            loop {
                let s = rng.random_range(0..p);
                let shifted = FpPoly::new(vec![s, 1], p);
                let pow = powmod_unchecked(&shifted, &half, g);
                let h = gcd_unchecked(&pow.sub(&FpPoly::one(p)), g);
                let hd = h.degree().unwrap_or(0);
                if hd > 0 && hd < d {
                    let (q, _) = g.div_rem(&h);
                    split_linear(&h, rng, out);
                    split_linear(&q.monic(), rng, out);
                    return;
                }
            }
        }
    }
}

/// Lifts of a root `parent_root` of f mod p^{e−1} to roots mod p^e.
pub fn hensel_lift_level(f: &IntPolynomial, p: u64, e: u32, parent_root: u64) -> Result<Vec<u64>> {
    require_prime(p)?;
    if e < 2 {
        return Err(Error::invalid(format!("lift level must be >= 2, got {e}")));
    }
    let lower = checked_prime_power(p, e - 1)?;
    let modulus = checked_prime_power(p, e)?;
    if parent_root >= lower {
        return Err(Error::invalid(format!("{parent_root} is not reduced mod {lower}")));
    }
    let coeffs = f.reduce_mod(modulus);
    if eval_reduced(&coeffs, parent_root, lower) != 0 {
        return Err(Error::invalid(format!("{parent_root} is not a root of f mod {lower}")));
    }
    let deriv = f.derivative_mod(modulus);
    Ok(lift_one(&coeffs, &deriv, p, lower, modulus, parent_root))
}

/// One lifting step with reduced coefficient vectors mod `modulus = lower·p`.
fn lift_one(coeffs: &[u64], deriv: &[u64], p: u64, lower: u64, modulus: u64, v: u64) -> Vec<u64> {
    let dv = eval_reduced(deriv, v, modulus);
    if dv % p != 0 {
        let fv = eval_reduced(coeffs, v, modulus);
        let inv = inv_mod(dv, modulus).expect("unit derivative");
        vec![sub_mod(v, mul_mod(fv, inv, modulus), modulus)]
    } else {
        (0..p)
            .map(|t| v + t * lower)
            .filter(|&w| eval_reduced(coeffs, w, modulus) == 0)
            .collect()
    }
}

fn checked_prime_power(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| Error::ResourceLimit(format!("{p}^{e} exceeds 64 bits")))
}

/// Roots at every level 1..=E above one prime, with parent links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftTree {
    pub prime: u64,
    /// `levels[e-1]` holds `(root mod p^e, index of parent in levels[e-2])`.
    /// Level-one parents are 0.
    pub levels: Vec<Vec<(u64, usize)>>,
}

impl LiftTree {
    pub fn build(f: &IntPolynomial, p: u64, depth: u32) -> Result<Self> {
        require_prime(p)?;
        if depth == 0 {
            return Err(Error::invalid("lift depth must be >= 1"));
        }
        checked_prime_power(p, depth)?;
        let first = prime_roots_unchecked(f, p, 0);
        Self::from_prime_roots(f, p, depth, first)
    }

    pub(crate) fn from_prime_roots(f: &IntPolynomial, p: u64, depth: u32, first: Vec<u64>) -> Result<Self> {
        let mut levels = vec![first.into_iter().map(|v| (v, 0)).collect::<Vec<_>>()];
        for e in 2..=depth {
            let lower = checked_prime_power(p, e - 1)?;
            let modulus = checked_prime_power(p, e)?;
            let coeffs = f.reduce_mod(modulus);
            let deriv = f.derivative_mod(modulus);
            let prev = levels.last().unwrap();
            let ramified_parents = prev
                .iter()
                .filter(|&&(v, _)| eval_reduced(&deriv, v, p) == 0)
                .count() as u64;
            if ramified_parents.saturating_mul(p) > MAX_RAMIFIED_CANDIDATES {
                return Err(Error::ResourceLimit(format!(
                    "lifting to {p}^{e} would examine {} candidates (limit {MAX_RAMIFIED_CANDIDATES})",
                    ramified_parents.saturating_mul(p)
                )));
            }
            let mut next = Vec::new();
            for (i, &(v, _)) in prev.iter().enumerate() {
                for w in lift_one(&coeffs, &deriv, p, lower, modulus, v) {
                    next.push((w, i));
                }
            }
            next.sort_unstable();
            levels.push(next);
        }
        Ok(LiftTree { prime: p, levels })
    }

    /// Sorted roots mod p^e.
    pub fn roots_at(&self, e: u32) -> Vec<u64> {
        self.levels[e as usize - 1].iter().map(|&(v, _)| v).collect()
    }
}

/// Sorted roots of f modulo p^e.
pub fn roots_mod_prime_power(f: &IntPolynomial, p: u64, e: u32) -> Result<Vec<u64>> {
    if e == 0 {
        return Err(Error::invalid("exponent must be >= 1"));
    }
    Ok(LiftTree::build(f, p, e)?.roots_at(e))
}

/// All roots of f modulo `n`, assembled by CRT over the prime-power factors.
pub fn roots_mod_n(f: &IntPolynomial, n: u64, sieve: &SpfSieve) -> Result<RootSet> {
    let fact = sieve.factorize(n)?;
    let mut parts = Vec::with_capacity(fact.parts.len());
    for (p, e, q) in fact.prime_powers() {
        parts.push((q, roots_mod_prime_power(f, p, e)?));
    }
    let refs: Vec<(u64, &[u64])> = parts.iter().map(|(q, r)| (*q, r.as_slice())).collect();
    Ok(RootSet { modulus: n, roots: combine_crt(&refs) })
}

/// Every CRT combination of one root per pairwise-coprime modulus, sorted.
pub fn combine_crt(parts: &[(u64, &[u64])]) -> Vec<u64> {
    let mut acc = vec![0u64];
    let mut m = 1u64;
    for &(q, roots) in parts {
        if roots.is_empty() {
            return Vec::new();
        }
        let inv = inv_mod(m % q, q).expect("pairwise coprime moduli");
        let next_m = m * q;
        let mut next = Vec::with_capacity(acc.len() * roots.len());
        for &a in &acc {
            for &b in roots {
                next.push(crt_unchecked(a, m, b, q, inv, next_m));
            }
        }
        acc = next;
        m = next_m;
    }
    acc.sort_unstable();
    acc
}

/// Reference enumeration of roots mod n by evaluating f at every residue.
pub fn brute_force_roots(f: &IntPolynomial, n: u64) -> Vec<u64> {
    let coeffs = f.reduce_mod(n);
    (0..n).filter(|&v| eval_reduced(&coeffs, v, n) == 0).collect()
}
