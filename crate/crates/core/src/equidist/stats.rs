use rayon::prelude::*;
use serde::Serialize;

use super::kahan::KahanSum;
use super::weyl::validate_checkpoints;
use crate::error::{Error, Result};
use crate::numcore::modarith::gcd;
use crate::numcore::{euler_phi, IntPolynomial, SpfSieve};
use crate::roots::{prime_roots_unchecked, RootTable};

/// Prime-sum statistics at one checkpoint x.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeStatsRow {
    pub x: u64,
    /// Σ_{p≤x} ρ(p)
    pub rho_sum: u64,
    pub x_over_log_x: f64,
    /// π(x)
    pub prime_count: u64,
    /// Σ_{p≤x} ρ(p)/p − log log x
    pub mertens: f64,
    /// Π_{p≤x} (1 + ρ(p)/p) / log x
    pub product_ratio: f64,
    /// Π over completely split p ≤ x of (1 + ρ(p)/p), divided by log^{1/[N:L]} x
    pub split_product_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrimeStatsTable {
    /// [N:L], the degree of the normal closure over Q(α).
    pub nl_degree: u32,
    pub rows: Vec<PrimeStatsRow>,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl PrimeStatsTable {
    pub const CSV_HEADER: &'static str = "x,rho_sum,x_over_log_x,prime_count,mertens,product_ratio,split_product_ratio";

    pub fn to_csv(&self) -> String {
        use super::weyl::format_sig;
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.x,
                r.rho_sum,
                format_sig(r.x_over_log_x),
                r.prime_count,
                format_sig(r.mertens),
                format_sig(r.product_ratio),
                format_sig(r.split_product_ratio)
            ));
        }
        out
    }
}

/// Prime sums of ρ at each checkpoint. `nl_degree` is [N:L], which the caller
/// supplies (1 when Q(α) is Galois).
pub fn prime_stats(f: &IntPolynomial, xmax: u64, checkpoints: &[u64], nl_degree: u32) -> Result<PrimeStatsTable> {
    if xmax < 2 {
        return Err(Error::invalid("prime statistics need xmax >= 2"));
    }
    if nl_degree == 0 {
        return Err(Error::invalid("[N:L] must be >= 1"));
    }
    let cps = validate_checkpoints(checkpoints, xmax)?;
    if cps[0] < 2 {
        return Err(Error::invalid("prime statistics checkpoints must be >= 2"));
    }
    let sieve = SpfSieve::new(xmax)?;
    let d = f.degree();
    let counts: Vec<(u64, usize)> = sieve
        .primes()
        .par_iter()
        .map(|&p| (p as u64, prime_roots_unchecked(f, p as u64, 0).len()))
        .collect();

    let mut rho_sum = 0u64;
    let mut pi = 0u64;
    let mut recip = KahanSum::new();
    let mut log_prod = KahanSum::new();
    let mut log_split = KahanSum::new();
    let mut rows = Vec::with_capacity(cps.len());
    let mut it = counts.iter().peekable();
    for &x in &cps {
        while let Some(&(p, r)) = it.next_if(|&&(p, _)| p <= x) {
            pi += 1;
            rho_sum += r as u64;
            let t = r as f64 / p as f64;
            recip.add(t);
            log_prod.add(t.ln_1p());
            if r == d && !f.is_bad_prime(p) {
                log_split.add(t.ln_1p());
            }
        }
        let lx = (x as f64).ln();
        rows.push(PrimeStatsRow {
            x,
            rho_sum,
            x_over_log_x: x as f64 / lx,
            prime_count: pi,
            mertens: recip.value() - lx.ln(),
            product_ratio: log_prod.value().exp() / lx,
            split_product_ratio: (log_split.value() - lx.ln() / nl_degree as f64).exp(),
        });
    }
    let last = rows.last().expect("nonempty");
    Ok(PrimeStatsTable {
        nl_degree,
        c2: last.mertens,
        c3: last.product_ratio,
        c4: last.split_product_ratio,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProgressionRow {
    pub x: u64,
    pub sum: u64,
    /// sum·φ(m)/x
    pub slope: f64,
}

/// Σ_{n≤x, n≡a (m)} ρ(n) per checkpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProgressionSums {
    pub a: u64,
    pub m: u64,
    pub rows: Vec<ProgressionRow>,
    /// Final-checkpoint slope, the estimate of c_1.
    pub c1: f64,
}

pub fn rho_sum_progression(f: &IntPolynomial, a: u64, m: u64, xmax: u64, checkpoints: &[u64]) -> Result<ProgressionSums> {
    if m == 0 {
        return Err(Error::invalid("progression modulus must be positive"));
    }
    if gcd(a % m, m) != 1 {
        return Err(Error::invalid(format!("progression {a} mod {m} needs gcd(a, m) = 1")));
    }
    let cps = validate_checkpoints(checkpoints, xmax)?;
    let table = RootTable::new(f, xmax)?;
    let phi = euler_phi(&table.sieve().factorize(m)?) as f64;
    let a = a % m;
    let last = *cps.last().expect("nonempty");
    let first = if a == 0 { m } else { a };
    let terms: Vec<(u64, u64)> = (0..)
        .map(|k| first + k * m)
        .take_while(|&n| n <= last)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| (n, table.rho(n).expect("in range") as u64))
        .collect();

    let mut sum = 0u64;
    let mut rows = Vec::with_capacity(cps.len());
    let mut it = terms.iter().peekable();
    for &x in &cps {
        while let Some(&(_, r)) = it.next_if(|&&(n, _)| n <= x) {
            sum += r;
        }
        rows.push(ProgressionRow { x, sum, slope: sum as f64 * phi / x as f64 });
    }
    let c1 = rows.last().expect("nonempty").slope;
    Ok(ProgressionSums { a, m, rows, c1 })
}
