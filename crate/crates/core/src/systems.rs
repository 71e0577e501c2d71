//! Simultaneous congruences f_1(v_1) ≡ … ≡ f_r(v_r) ≡ 0 (mod n) for
//! polynomials with pairwise coprime discriminants.
//!
//! Root tuples stand in for the degree-one ideals of the compositum; the
//! correspondence is a bijection, so nothing on the ideal side is built.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::equidist::{format_sig, unit_phase, validate_checkpoints, ComplexKahan, GridHistogram, KahanSum};
use crate::error::{Error, Result};
use crate::numcore::modarith::{inv_mod, mul_mod};
use crate::numcore::{IntPolynomial, SpfSieve};
use crate::roots::{roots_mod_n, ModulusFilter, RootSet, RootTable};

#[derive(Clone, Debug)]
pub struct PolySystem {
    polys: Vec<IntPolynomial>,
    eta: BigUint,
    joint_disc_product: BigInt,
}

/// Two members of a system whose discriminants share a factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoprimalityViolation {
    pub i: usize,
    pub j: usize,
    pub gcd: BigUint,
}

/// The first pair (i < j, zero-based) with gcd(D_i, D_j) > 1.
pub fn coprimality_violation(polys: &[IntPolynomial]) -> Option<CoprimalityViolation> {
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            let g = polys[i].discriminant().magnitude().gcd(polys[j].discriminant().magnitude());
            if !g.is_one() {
                return Some(CoprimalityViolation { i, j, gcd: g });
            }
        }
    }
    None
}

pub fn validate_system(polys: Vec<IntPolynomial>) -> Result<PolySystem> {
    if polys.is_empty() {
        return Err(Error::invalid("a system needs at least one polynomial"));
    }
    if let Some(v) = coprimality_violation(&polys) {
        return Err(Error::invalid(format!(
            "discriminants of polynomials {} and {} share the factor gcd = {}",
            v.i + 1,
            v.j + 1,
            v.gcd
        )));
    }
    let eta = polys.iter().fold(BigUint::one(), |acc, f| acc.lcm(f.eta()));
    let joint_disc_product = polys.iter().map(|f| f.discriminant().clone()).product();
    Ok(PolySystem { polys, eta, joint_disc_product })
}

impl PolySystem {
    pub fn polys(&self) -> &[IntPolynomial] {
        &self.polys
    }

    pub fn rank(&self) -> usize {
        self.polys.len()
    }

    pub fn discriminants(&self) -> Vec<BigInt> {
        self.polys.iter().map(|f| f.discriminant().clone()).collect()
    }

    /// lcm of the members' η.
    pub fn eta(&self) -> &BigUint {
        &self.eta
    }

    /// Π D_i
    pub fn joint_disc_product(&self) -> &BigInt {
        &self.joint_disc_product
    }
}

/// All (v_1, …, v_r) with f_i(v_i) ≡ 0 mod n, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleRootSet {
    pub modulus: u64,
    pub tuples: Vec<Vec<u64>>,
}

impl TupleRootSet {
    pub fn count(&self) -> usize {
        self.tuples.len()
    }

    fn from_parts(modulus: u64, parts: &[&[u64]]) -> Self {
        let mut tuples: Vec<Vec<u64>> = vec![Vec::with_capacity(parts.len())];
        for roots in parts {
            tuples = tuples
                .iter()
                .flat_map(|t| {
                    roots.iter().map(move |&v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        TupleRootSet { modulus, tuples }
    }
}

pub fn root_tuples(system: &PolySystem, n: u64, sieve: &SpfSieve) -> Result<TupleRootSet> {
    let sets = system
        .polys
        .iter()
        .map(|f| roots_mod_n(f, n, sieve))
        .collect::<Result<Vec<RootSet>>>()?;
    let parts: Vec<&[u64]> = sets.iter().map(|s| s.roots.as_slice()).collect();
    Ok(TupleRootSet::from_parts(n, &parts))
}

fn check_h(system: &PolySystem, h: &[i64]) -> Result<()> {
    if h.len() != system.rank() {
        return Err(Error::invalid(format!("frequency vector has {} entries, system has {}", h.len(), system.rank())));
    }
    Ok(())
}

/// ρ(𝐡, n) = Σ_tuples e(𝐡·𝐯/n) for a precomputed tuple set.
pub fn joint_rho_tuples(h: &[i64], tuples: &TupleRootSet) -> Complex64 {
    let n = tuples.modulus;
    let hr: Vec<u64> = h.iter().map(|&hi| crate::equidist::reduce_h(hi, n)).collect();
    tuples
        .tuples
        .iter()
        .map(|t| {
            let r = t.iter().zip(&hr).fold(0u64, |acc, (&v, &hi)| (acc + mul_mod(hi, v, n)) % n);
            unit_phase(r, n)
        })
        .sum()
}

pub fn joint_rho_h(system: &PolySystem, h: &[i64], n: u64, sieve: &SpfSieve) -> Result<Complex64> {
    check_h(system, h)?;
    Ok(joint_rho_tuples(h, &root_tuples(system, n, sieve)?))
}

/// ρ(𝐡, n1·n2) as ρ(n̄2·𝐡, n1)·ρ(n̄1·𝐡, n2).
pub fn joint_rho_factored(system: &PolySystem, h: &[i64], n1: u64, n2: u64, sieve: &SpfSieve) -> Result<Complex64> {
    check_h(system, h)?;
    if n1 == 0 || n2 == 0 || n1.gcd(&n2) != 1 {
        return Err(Error::invalid(format!("{n1} and {n2} are not coprime positive moduli")));
    }
    let nbar1 = inv_mod(n1 % n2, n2).expect("coprime");
    let nbar2 = inv_mod(n2 % n1, n1).expect("coprime");
    let scaled = |nbar: u64, m: u64| -> Vec<i64> {
        h.iter()
            .map(|&hi| mul_mod(crate::equidist::reduce_h(hi, m), nbar, m) as i64)
            .collect()
    };
    let t1 = root_tuples(system, n1, sieve)?;
    let t2 = root_tuples(system, n2, sieve)?;
    Ok(joint_rho_tuples(&scaled(nbar2, n1), &t1) * joint_rho_tuples(&scaled(nbar1, n2), &t2))
}

/// The 3^r − 1 nonzero vectors with entries in {−1, 0, 1}.
pub fn default_hset(r: usize) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|v| {
                [-1i64, 0, 1].into_iter().map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

pub fn default_grid(r: usize) -> usize {
    match r {
        1 | 2 => 64,
        _ => 16,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointWeylEntry {
    pub signed_re: f64,
    pub signed_im: f64,
    pub abs_sum: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

impl JointWeylEntry {
    pub fn signed(&self) -> Complex64 {
        Complex64::new(self.signed_re, self.signed_im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointRow {
    pub x: u64,
    /// Σ_{n≤x} Π ρ_i(n), the number of tuples so far.
    pub normalizer: u64,
    /// One entry per frequency vector, in hset order.
    pub weyl: Vec<JointWeylEntry>,
    /// Anchored-box discrepancy of the tuple cloud; NaN while it is empty.
    pub box_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JointWeylTable {
    pub hset: Vec<Vec<i64>>,
    pub grid: usize,
    pub rows: Vec<JointRow>,
}

impl JointWeylTable {
    pub fn to_csv(&self) -> String {
        let mut header = vec!["x".to_string(), "normalizer".to_string()];
        for h in &self.hset {
            let tag: Vec<String> = h.iter().map(i64::to_string).collect();
            let tag = tag.join(":");
            for col in ["signed_re", "signed_im", "abs_sum", "W"] {
                header.push(format!("{col}[{tag}]"));
            }
        }
        header.push("box_discrepancy".into());
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![r.x.to_string(), r.normalizer.to_string()];
            for e in &r.weyl {
                cells.extend([e.signed_re, e.signed_im, e.abs_sum, e.w].map(format_sig));
            }
            cells.push(format_sig(r.box_discrepancy));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Per-polynomial root tables up to `xmax`.
fn system_tables(system: &PolySystem, xmax: u64) -> Result<Vec<RootTable>> {
    system.polys.iter().map(|f| RootTable::new(f, xmax)).collect()
}

const CHUNK: u64 = 1 << 12;

/// Tuple sets for `lo..=hi`, ascending.
fn tuple_chunk(tables: &[RootTable], lo: u64, hi: u64) -> Vec<TupleRootSet> {
    let per_poly: Vec<Vec<RootSet>> = tables.iter().map(|t| t.collect_range(lo, hi, &ModulusFilter::All)).collect();
    (0..per_poly[0].len())
        .into_par_iter()
        .map(|k| {
            let parts: Vec<&[u64]> = per_poly.iter().map(|sets| sets[k].roots.as_slice()).collect();
            TupleRootSet::from_parts(per_poly[0][k].modulus, &parts)
        })
        .collect()
}

/// Tuple sets for every n ≤ xmax.
pub fn tuple_cloud(system: &PolySystem, xmax: u64) -> Result<Vec<TupleRootSet>> {
    let tables = system_tables(system, xmax)?;
    let mut out = Vec::new();
    let mut lo = 1;
    while lo <= xmax {
        let hi = lo.saturating_add(CHUNK - 1).min(xmax);
        out.extend(tuple_chunk(&tables, lo, hi));
        lo = hi + 1;
    }
    Ok(out)
}

/// Joint Weyl sums for each 𝐡 and the box discrepancy of
/// {(v_1/n, …, v_r/n)} at every checkpoint. `hset` and `grid` default to
/// [`default_hset`] and [`default_grid`].
pub fn joint_weyl_and_discrepancy(
    system: &PolySystem,
    xmax: u64,
    hset: Option<Vec<Vec<i64>>>,
    checkpoints: &[u64],
    grid: Option<usize>,
) -> Result<JointWeylTable> {
    let r = system.rank();
    if r > 3 {
        return Err(Error::unsupported(format!("box discrepancy supports r <= 3, system has r = {r}")));
    }
    let hset = hset.unwrap_or_else(|| default_hset(r));
    if hset.is_empty() {
        return Err(Error::invalid("at least one frequency vector is required"));
    }
    for h in &hset {
        check_h(system, h)?;
        if h.iter().all(|&x| x == 0) {
            return Err(Error::invalid("the zero frequency vector is not a Weyl test"));
        }
    }
    let grid = grid.unwrap_or_else(|| default_grid(r));
    let mut hist = GridHistogram::new(r, grid)?;
    let cps = validate_checkpoints(checkpoints, xmax)?;
    let last = *cps.last().expect("nonempty");
    let tables = system_tables(system, last)?;

    let mut signed = vec![ComplexKahan::new(); hset.len()];
    let mut abs = vec![KahanSum::new(); hset.len()];
    let mut count = 0u64;
    let mut rows = Vec::with_capacity(cps.len());
    let mut pending = cps.iter().copied().peekable();

    let emit = |x: u64, signed: &[ComplexKahan], abs: &[KahanSum], count: u64, hist: &GridHistogram| {
        let weyl = signed
            .iter()
            .zip(abs)
            .map(|(s, a)| {
                let s = s.value();
                JointWeylEntry {
                    signed_re: s.re,
                    signed_im: s.im,
                    abs_sum: a.value(),
                    w: if count > 0 { s.norm() / count as f64 } else { f64::NAN },
                }
            })
            .collect();
        JointRow {
            x,
            normalizer: count,
            weyl,
            box_discrepancy: hist.discrepancy().unwrap_or(f64::NAN),
        }
    };

    let mut lo = 1;
    while lo <= last {
        let hi = lo.saturating_add(CHUNK - 1).min(last);
        let chunk = tuple_chunk(&tables, lo, hi);
        let terms: Vec<Vec<Complex64>> = chunk
            .par_iter()
            .map(|ts| hset.iter().map(|h| joint_rho_tuples(h, ts)).collect())
            .collect();
        for (ts, term) in chunk.iter().zip(terms) {
            while let Some(x) = pending.next_if(|&x| x < ts.modulus) {
                rows.push(emit(x, &signed, &abs, count, &hist));
            }
            for (k, z) in term.into_iter().enumerate() {
                signed[k].add(z);
                abs[k].add(z.norm());
            }
            count += ts.count() as u64;
            for t in &ts.tuples {
                hist.add_ratio(t, ts.modulus);
            }
        }
        lo = hi + 1;
    }
    for x in pending {
        rows.push(emit(x, &signed, &abs, count, &hist));
    }
    Ok(JointWeylTable { hset, grid, rows })
}

/// Rows `n,v_1,…,v_r` for every tuple.
pub fn tuple_cloud_csv(sets: &[TupleRootSet]) -> String {
    let r = sets.iter().find_map(|s| s.tuples.first().map(Vec::len)).unwrap_or(0);
    let mut out = String::from("n");
    for i in 1..=r {
        out.push_str(&format!(",v_{i}"));
    }
    out.push('\n');
    for s in sets {
        for t in &s.tuples {
            out.push_str(&s.modulus.to_string());
            for v in t {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equidist::{rho_h, weyl_partial_sums, HMode};
    use crate::roots::brute_force_roots;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c).unwrap()
    }

    fn pair() -> PolySystem {
        validate_system(vec![poly(&[1, 1, 1]), poly(&[-1, -1, 1])]).unwrap()
    }

    #[test]
    fn validation() {
        let s = pair();
        assert_eq!(s.discriminants(), vec![BigInt::from(-3), BigInt::from(5)]);
        assert_eq!(s.joint_disc_product(), &BigInt::from(-15));
        let bad = vec![poly(&[1, 0, 1]), poly(&[-2, 0, 1])];
        let v = coprimality_violation(&bad).unwrap();
        assert_eq!((v.i, v.j, v.gcd), (0, 1, BigUint::from(4u32)));
        let err = validate_system(bad).unwrap_err().to_string();
        assert!(err.contains("gcd = 4"), "{err}");
        assert!(validate_system(vec![poly(&[1, 0, 1])]).is_ok());
        assert!(validate_system(vec![]).is_err());
    }

    #[test]
    fn tuple_examples() {
        let sieve = SpfSieve::new(1000).unwrap();
        let s = pair();
        let t = root_tuples(&s, 31, &sieve).unwrap();
        assert_eq!(t.tuples, vec![vec![5, 13], vec![5, 19], vec![25, 13], vec![25, 19]]);
        assert_eq!(root_tuples(&s, 1, &sieve).unwrap().tuples, vec![vec![0, 0]]);
        assert!(root_tuples(&s, 2, &sieve).unwrap().tuples.is_empty());
    }

    #[test]
    fn tuple_count_multiplicative() {
        let sieve = SpfSieve::new(10_000).unwrap();
        let s = pair();
        let counts: Vec<usize> = (0..=10_000u64)
            .map(|n| if n == 0 { 0 } else { root_tuples(&s, n, &sieve).unwrap().count() })
            .collect();
        for n1 in 1..=100u64 {
            for n2 in 1..=10_000 / n1 {
                if n1.gcd(&n2) == 1 {
                    assert_eq!(counts[(n1 * n2) as usize], counts[n1 as usize] * counts[n2 as usize]);
                }
            }
        }
    }

    #[test]
    fn joint_sum_examples() {
        let sieve = SpfSieve::new(1000).unwrap();
        let s = pair();
        let e = |x: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * x);
        let v = joint_rho_h(&s, &[1, 0], 31, &sieve).unwrap();
        assert!((v - (e(5.0 / 31.0) + e(25.0 / 31.0)) * 2.0).norm() < 1e-12);
        assert_eq!(joint_rho_h(&s, &[0, 0], 31, &sieve).unwrap(), Complex64::new(4.0, 0.0));
        let direct: Complex64 = [(5.0, 13.0), (5.0, 19.0), (25.0, 13.0), (25.0, 19.0)]
            .iter()
            .map(|&(a, b): &(f64, f64)| e((a + b) / 31.0))
            .sum();
        assert!((joint_rho_h(&s, &[1, 1], 31, &sieve).unwrap() - direct).norm() < 1e-12);
        let split = joint_rho_factored(&s, &[1, 1], 1, 31, &sieve).unwrap();
        assert!((split - direct).norm() < 1e-12);
        let big = joint_rho_h(&s, &[1, 1], 341, &sieve).unwrap();
        assert!((joint_rho_factored(&s, &[1, 1], 31, 11, &sieve).unwrap() - big).norm() < 1e-9);
        assert!(joint_rho_factored(&s, &[1, 1], 31, 62, &sieve).is_err());
        assert!(joint_rho_h(&s, &[1], 31, &sieve).is_err());
    }

    #[test]
    fn zero_components_separate() {
        let sieve = SpfSieve::new(10_000).unwrap();
        let s = validate_system(vec![poly(&[1, 1, 1]), poly(&[-1, -1, 1]), poly(&[2, 1, 1])]).unwrap();
        for n in [7u64, 31, 91, 341, 1001, 2263] {
            let joint = joint_rho_h(&s, &[2, 0, 0], n, &sieve).unwrap();
            let r1 = roots_mod_n(&s.polys()[0], n, &sieve).unwrap();
            let rest: usize = s.polys()[1..].iter().map(|f| brute_force_roots(f, n).len()).product();
            assert!((joint - rho_h(2, &r1) * rest as f64).norm() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn degenerate_cloud() {
        let s = pair();
        let t = joint_weyl_and_discrepancy(&s, 1, None, &[1], None).unwrap();
        assert_eq!(t.hset.len(), 8);
        assert_eq!(t.rows[0].normalizer, 1);
        assert!((t.rows[0].box_discrepancy - (1.0 - 1.0 / 4096.0)).abs() < 1e-12);
        assert!(joint_weyl_and_discrepancy(&s, 10, Some(vec![vec![0, 0]]), &[10], None).is_err());
        let four =
            validate_system(vec![poly(&[1, 1, 1]), poly(&[-1, -1, 1]), poly(&[2, 1, 1]), poly(&[3, 1, 1])]).unwrap();
        assert!(matches!(joint_weyl_and_discrepancy(&four, 10, None, &[10], None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn singleton_matches_equidist() {
        let f = poly(&[1, 0, 1]);
        let s = validate_system(vec![f.clone()]).unwrap();
        let cps = [10, 500, 3000];
        let joint = joint_weyl_and_discrepancy(&s, 3000, Some(vec![vec![1], vec![-3]]), &cps, None).unwrap();
        for (k, h) in [1i64, -3].into_iter().enumerate() {
            let one = weyl_partial_sums(&f, HMode::Constant(h), 3000, ModulusFilter::All, &cps).unwrap();
            for (a, b) in joint.rows.iter().zip(&one.rows) {
                assert_eq!(a.normalizer, b.normalizer);
                assert!((a.weyl[k].signed() - b.signed()).norm() < 1e-9);
                assert!((a.weyl[k].abs_sum - b.abs_sum).abs() < 1e-9);
                assert!((a.weyl[k].w - b.w).abs() < 1e-9);
            }
        }
        let cloud = tuple_cloud(&s, 200).unwrap();
        let sieve = SpfSieve::new(200).unwrap();
        for t in &cloud {
            let roots = roots_mod_n(&f, t.modulus, &sieve).unwrap().roots;
            let flat: Vec<u64> = t.tuples.iter().map(|v| v[0]).collect();
            assert_eq!(flat, roots);
        }
    }

    #[test]
    fn default_hset_shape() {
        assert_eq!(default_hset(1), vec![vec![-1], vec![1]]);
        assert_eq!(default_hset(2).len(), 8);
        assert_eq!(default_hset(3).len(), 26);
    }

    #[test]
    fn cloud_csv() {
        let s = pair();
        let cloud = tuple_cloud(&s, 31).unwrap();
        let csv = tuple_cloud_csv(&cloud);
        assert!(csv.starts_with("n,v_1,v_2\n1,0,0\n"));
        assert!(csv.ends_with("31,25,19\n"));
    }
}
