//! n-adic expansions of a root α of f, digit statistics, and the Haar-measure
//! Monte-Carlo check of E|S(N, x)|² = 1/N.
//!
//! An expansion is seeded by a root v₀ of f mod n and lifted one digit per
//! level: x_{l+1} = x_l + a_l·n^l with f(x_{l+1}) ≡ 0 mod n^{l+1}. For
//! gcd(n, η·D_f) = 1 each lift is unique, so every root mod n has exactly one
//! expansion.
//!
//! S(N, x) = (1/N)·Σ_{l=1}^{N} e(h·x_l/n^l) where x_l is the l-digit prefix.

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::equidist::KahanSum;
use crate::error::{Error, Result};
use crate::ideals::admissibility;
use crate::numcore::modarith::{inv_mod, mul_mod};
use crate::numcore::poly::eval_reduced;
use crate::numcore::{IntPolynomial, SpfSieve};
use crate::roots::roots_mod_n;

/// Word tables above this many cells are refused.
pub const MAX_WORD_TABLE: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicExpansion {
    pub base: u64,
    pub seed_root: u64,
    /// a_0, a_1, … with x = Σ a_l n^l.
    pub digits: Vec<u64>,
    #[serde(skip)]
    pub poly: IntPolynomial,
}

impl PadicExpansion {
    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// Digits separated by single spaces.
    pub fn digit_line(&self) -> String {
        let parts: Vec<String> = self.digits.iter().map(u64::to_string).collect();
        parts.join(" ")
    }
}

/// Every n-adic expansion of a root of f, lifted to `depth` digits.
pub fn padic_expansions(f: &IntPolynomial, n: u64, depth: usize) -> Result<Vec<PadicExpansion>> {
    if n < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    if depth < 1 {
        return Err(Error::invalid("depth must be >= 1"));
    }
    let sieve = SpfSieve::new(n.clamp(2, 1 << 16))?;
    let report = admissibility(f, n, &sieve)?;
    if !report.admissible {
        return Err(Error::Inadmissible(report));
    }
    let seeds = roots_mod_n(f, n, &sieve)?.roots;
    seeds
        .into_par_iter()
        .map(|v0| lift_expansion(f, n, v0, depth))
        .collect()
}

fn lift_expansion(f: &IntPolynomial, n: u64, v0: u64, depth: usize) -> Result<PadicExpansion> {
    let deriv = eval_reduced(&f.derivative_mod(n), v0, n);
    let inv = inv_mod(deriv, n)
        .ok_or_else(|| Error::unsupported(format!("f'({v0}) is not a unit mod {n}")))?;
    let nb = BigInt::from(n);
    let mut digits = Vec::with_capacity(depth);
    digits.push(v0);
    let mut x = BigInt::from(v0);
    let mut nl = nb.clone(); // n^l
    for _ in 1..depth {
        let next = &nl * &nb;
        let q = f.eval_mod_big(&x, &next) / &nl;
        let q = q.mod_floor(&nb).to_u64().expect("reduced below n");
        let a = (n - mul_mod(q, inv, n)) % n;
        x += BigInt::from(a) * &nl;
        digits.push(a);
        nl = next;
    }
    Ok(PadicExpansion { base: n, seed_root: v0, digits, poly: f.clone() })
}

/// α(𝔞^l) = a_0 + a_1 n + ⋯ + a_{l−1} n^{l−1}.
pub fn alpha_mod_ideal_power(exp: &PadicExpansion, l: usize) -> Result<BigUint> {
    if l < 1 || l > exp.depth() {
        return Err(Error::invalid(format!("level {l} outside [1, {}]", exp.depth())));
    }
    Ok(digits_value(&exp.digits[..l], exp.base))
}

fn digits_value(digits: &[u64], base: u64) -> BigUint {
    digits.iter().rev().fold(BigUint::zero(), |acc, &a| acc * base + a)
}

/// e(h·x/m) with the fractional part taken in exact arithmetic and rounded to
/// 64 bits.
fn exact_phase(hx: &BigInt, m: &BigUint) -> Complex64 {
    let r = hx.mod_floor(&BigInt::from(m.clone()));
    let r = r.to_biguint().expect("nonnegative after mod_floor");
    let frac = ((r << 64u32) / m).to_u64().expect("below 2^64");
    let t = std::f64::consts::TAU * (frac as f64 / 2f64.powi(64));
    Complex64::from_polar(1.0, t)
}

/// S(N, x) for the digit string of an expansion.
pub fn digit_weyl_sum(exp: &PadicExpansion, h: i64, levels: usize) -> Result<Complex64> {
    if levels > exp.depth() {
        return Err(Error::invalid(format!("{levels} levels requested from an expansion of depth {}", exp.depth())));
    }
    weyl_sum_of_digits(&exp.digits, exp.base, h, levels)
}

/// S(N, x) = (1/N) Σ_{l=1}^{N} e(h·x_l/n^l) for an arbitrary digit string.
pub fn weyl_sum_of_digits(digits: &[u64], base: u64, h: i64, levels: usize) -> Result<Complex64> {
    if base < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    if levels < 1 || levels > digits.len() {
        return Err(Error::invalid(format!("levels must lie in [1, {}]", digits.len())));
    }
    if h == 0 {
        return Err(Error::invalid("h must be nonzero"));
    }
    let hb = BigInt::from(h);
    let mut x = BigUint::zero();
    let mut nl = BigUint::from(1u32);
    let mut sum = Complex64::new(0.0, 0.0);
    for &a in &digits[..levels] {
        x += &nl * a;
        nl *= base;
        sum += exact_phase(&(&hb * BigInt::from_biguint(Sign::Plus, x.clone())), &nl);
    }
    Ok(sum / levels as f64)
}

/// Sample mean of |S(N, x)|² under uniform random digits, with its standard
/// error (NaN for a single sample).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    /// 1/N
    pub expected: f64,
}

/// Haar-random n-adic integers: sample `i` draws its digits from ChaCha8
/// seeded by `seed` on stream `i`, so the result does not depend on scheduling.
pub fn haar_monte_carlo(n: u64, levels: usize, samples: u64, seed: u64) -> Result<MonteCarloEstimate> {
    if n < 2 || levels < 1 || samples < 1 {
        return Err(Error::invalid("need n >= 2, N >= 1 and at least one sample"));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let digits: Vec<u64> = (0..levels).map(|_| rng.random_range(0..n)).collect();
            weyl_sum_of_digits(&digits, n, 1, levels).expect("valid arguments").norm_sqr()
        })
        .collect();
    let mut total = KahanSum::new();
    for &v in &values {
        total.add(v);
    }
    let mean = total.value() / samples as f64;
    let std_error = if samples > 1 {
        let mut ss = KahanSum::new();
        for &v in &values {
            ss.add((v - mean) * (v - mean));
        }
        (ss.value() / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        f64::NAN
    };
    Ok(MonteCarloEstimate { mean, std_error, samples, expected: 1.0 / levels as f64 })
}

/// Sliding-window word statistics for one digit string.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    pub base: u64,
    pub word_length: usize,
    pub windows: u64,
    /// Counts indexed by the word read as a base-n number, first digit most
    /// significant.
    pub counts: Vec<u64>,
    pub max_deviation: f64,
    pub chi_square: f64,
}

impl NormalityReport {
    pub fn frequency(&self, word: usize) -> f64 {
        self.counts[word] as f64 / self.windows as f64
    }

    pub fn word_digits(&self, mut word: usize) -> Vec<u64> {
        let mut out = vec![0; self.word_length];
        for slot in out.iter_mut().rev() {
            *slot = word as u64 % self.base;
            word /= self.base as usize;
        }
        out
    }

    fn entry(&self, word: usize) -> WordEntry {
        let freq = self.frequency(word);
        WordEntry {
            word: self.word_digits(word),
            count: self.counts[word],
            frequency: freq,
            deviation: freq - (self.base as f64).powi(-(self.word_length as i32)),
        }
    }
}

#[derive(Serialize)]
struct WordEntry {
    word: Vec<u64>,
    count: u64,
    frequency: f64,
    deviation: f64,
}

impl Serialize for NormalityReport {
    /// Full table for words of length ≤ 3, otherwise the 20 largest deviations.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("NormalityReport", 6)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("word_length", &self.word_length)?;
        st.serialize_field("windows", &self.windows)?;
        st.serialize_field("max_deviation", &self.max_deviation)?;
        st.serialize_field("chi_square", &self.chi_square)?;
        if self.word_length <= 3 {
            let table: Vec<WordEntry> = (0..self.counts.len()).map(|w| self.entry(w)).collect();
            st.serialize_field("table", &table)?;
        } else {
            let mut entries: Vec<WordEntry> = (0..self.counts.len()).map(|w| self.entry(w)).collect();
            entries.sort_by(|a, b| b.deviation.abs().total_cmp(&a.deviation.abs()));
            entries.truncate(20);
            st.serialize_field("top_deviations", &entries)?;
        }
        st.end()
    }
}

pub fn word_frequencies(digits: &[u64], base: u64, m: usize) -> Result<NormalityReport> {
    if base < 2 {
        return Err(Error::invalid("base must be >= 2"));
    }
    if m < 1 || digits.len() < m {
        return Err(Error::invalid(format!("word length {m} needs 1 <= m <= {}", digits.len())));
    }
    if let Some(&bad) = digits.iter().find(|&&a| a >= base) {
        return Err(Error::invalid(format!("digit {bad} out of range for base {base}")));
    }
    let cells = (base as u128).checked_pow(m as u32).filter(|&c| c <= MAX_WORD_TABLE as u128).ok_or_else(|| {
        Error::ResourceLimit(format!("{base}^{m} word table exceeds {MAX_WORD_TABLE} cells"))
    })? as usize;
    let mut counts = vec![0u64; cells];
    let mut word = digits[..m - 1].iter().fold(0usize, |acc, &a| acc * base as usize + a as usize);
    for &a in &digits[m - 1..] {
        word = (word * base as usize + a as usize) % cells;
        counts[word] += 1;
    }
    let windows = (digits.len() - m + 1) as u64;
    let expected = windows as f64 / cells as f64;
    let uniform = 1.0 / cells as f64;
    let max_deviation = counts
        .iter()
        .map(|&c| (c as f64 / windows as f64 - uniform).abs())
        .fold(0.0, f64::max);
    let chi_square = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    Ok(NormalityReport { base, word_length: m, windows, counts, max_deviation, chi_square })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionEvidence {
    pub seed_root: u64,
    pub reports: Vec<NormalityReport>,
    /// (N, |S(N, x)|) with h = 1.
    pub weyl_trajectory: Vec<(usize, f64)>,
}

/// Word statistics and Weyl-sum magnitudes for every expansion of f in base
/// n. This is evidence only; nothing here decides normality.
#[derive(Clone, Debug, Serialize)]
pub struct NormalityEvidence {
    pub base: u64,
    pub depth: usize,
    pub max_word_length: usize,
    /// Set when depth < n^max_m · 100, i.e. most words are seen only rarely.
    pub sparse: bool,
    pub expansions: Vec<ExpansionEvidence>,
}

pub fn normality_evidence(f: &IntPolynomial, n: u64, depth: usize, max_m: usize) -> Result<NormalityEvidence> {
    if max_m < 1 || max_m > depth {
        return Err(Error::invalid(format!("max word length must lie in [1, {depth}]")));
    }
    let expansions = padic_expansions(f, n, depth)?;
    let needed = (n as f64).powi(max_m as i32) * 100.0;
    let sparse = (depth as f64) < needed;
    if sparse {
        log::warn!("depth {depth} < {n}^{max_m}*100: word counts are sparse");
    }
    let mut levels: Vec<usize> = [depth / 4, depth / 2, depth].into_iter().filter(|&l| l >= 1).collect();
    levels.dedup();
    let expansions = expansions
        .par_iter()
        .map(|exp| {
            let reports = (1..=max_m)
                .map(|m| word_frequencies(&exp.digits, n, m))
                .collect::<Result<Vec<_>>>()?;
            let weyl_trajectory = levels
                .iter()
                .map(|&l| Ok((l, digit_weyl_sum(exp, 1, l)?.norm())))
                .collect::<Result<Vec<_>>>()?;
            Ok(ExpansionEvidence { seed_root: exp.seed_root, reports, weyl_trajectory })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalityEvidence { base: n, depth, max_word_length: max_m, sparse, expansions })
}
