//! Degree-one ideals of O[1/η] in factored form.
//!
//! An ideal (α − v, n) with gcd(n, η·D_f) = 1 is stored extensionally as one
//! `(p, e, v mod p^e)` triple per prime power of its norm. Distinct rational
//! primes are exactly the pairwise-coprime-norm condition, and each triple is
//! a power of an unramified degree-one prime, so every well-formed value of
//! [`FactoredIdeal`] is a degree-one ideal.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{AdmissibilityReport, Error, Result};
use crate::numcore::modarith::crt_pair;
use crate::numcore::{IntPolynomial, SpfSieve};
use crate::roots::{combine_crt, roots_mod_prime_power};

/// One prime-power factor 𝔭^e, labelled by the root of f it encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealComponent {
    pub prime: u64,
    pub exponent: u32,
    pub root: u64,
}

impl IdealComponent {
    pub fn new(prime: u64, exponent: u32, root: u64) -> Self {
        IdealComponent { prime, exponent, root }
    }

    pub fn prime_power(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

/// A degree-one ideal with norm Π p^e.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "IdealWire")]
pub struct FactoredIdeal {
    components: Vec<IdealComponent>,
    norm: u64,
}

impl FactoredIdeal {
    /// The unit ideal, norm 1.
    pub fn unit() -> Self {
        FactoredIdeal { components: Vec::new(), norm: 1 }
    }

    /// Validates components against f: distinct admissible primes, each
    /// `root` a root of f modulo `p^e`.
    pub fn new(f: &IntPolynomial, mut components: Vec<IdealComponent>) -> Result<Self> {
        components.sort();
        match classify(f, &components) {
            DegreeOneDiagnosis::DegreeOne => {}
            other => return Err(Error::invalid(other.describe())),
        }
        let norm = components
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.prime_power()))
            .ok_or_else(|| Error::invalid("ideal norm exceeds 64 bits"))?;
        Ok(FactoredIdeal { components, norm })
    }

    pub fn components(&self) -> &[IdealComponent] {
        &self.components
    }

    /// 𝔑(𝔞).
    pub fn norm(&self) -> u64 {
        self.norm
    }

    /// Product of two ideals with coprime norms. Norms multiply.
    pub fn merge_coprime(&self, other: &Self) -> Result<Self> {
        if self.norm.gcd(&other.norm) != 1 {
            return Err(Error::invalid(format!(
                "norms {} and {} are not coprime",
                self.norm, other.norm
            )));
        }
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        components.sort();
        let norm = self
            .norm
            .checked_mul(other.norm)
            .ok_or_else(|| Error::invalid("ideal norm exceeds 64 bits"))?;
        Ok(FactoredIdeal { components, norm })
    }
}

// Wire form: {"norm": n, "components": [[p, e, v], ...]}
#[derive(Deserialize)]
struct IdealWire {
    norm: u64,
    components: Vec<(u64, u32, u64)>,
}

impl TryFrom<IdealWire> for FactoredIdeal {
    type Error = String;

    fn try_from(w: IdealWire) -> std::result::Result<Self, String> {
        let components: Vec<IdealComponent> =
            w.components.into_iter().map(|(p, e, v)| IdealComponent::new(p, e, v)).collect();
        let norm: u64 = components.iter().map(|c| c.prime_power()).product();
        if norm != w.norm {
            return Err(format!("norm {} does not match components (product {norm})", w.norm));
        }
        Ok(FactoredIdeal { components, norm })
    }
}

impl Serialize for FactoredIdeal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let triples: Vec<(u64, u32, u64)> =
            self.components.iter().map(|c| (c.prime, c.exponent, c.root)).collect();
        let mut st = serializer.serialize_struct("FactoredIdeal", 2)?;
        st.serialize_field("norm", &self.norm)?;
        st.serialize_field("components", &triples)?;
        st.end()
    }
}

/// Checks gcd(n, η·D_f) = 1 and names the primes that break it.
pub fn admissibility(f: &IntPolynomial, n: u64, sieve: &SpfSieve) -> Result<AdmissibilityReport> {
    let fact = sieve.factorize(n)?;
    let offending: Vec<u64> = fact.parts.iter().map(|&(p, _)| p).filter(|&p| f.is_bad_prime(p)).collect();
    Ok(AdmissibilityReport {
        modulus: n,
        admissible: offending.is_empty(),
        offending_primes: offending,
    })
}

/// Whether gcd(n, η·D_f) = 1, computed without factoring n.
pub fn is_admissible(f: &IntPolynomial, n: u64) -> bool {
    BigUint::from(n).gcd(&f.bad_product()) == BigUint::from(1u32)
}

fn require_admissible(f: &IntPolynomial, n: u64, sieve: &SpfSieve) -> Result<()> {
    let report = admissibility(f, n, sieve)?;
    if report.admissible {
        Ok(())
    } else {
        Err(Error::Inadmissible(report))
    }
}

/// v ↦ (α − v, n).
pub fn ideal_from_root(f: &IntPolynomial, v: u64, n: u64, sieve: &SpfSieve) -> Result<FactoredIdeal> {
    if n == 0 || v >= n {
        return Err(Error::invalid(format!("root {v} is not reduced mod {n}")));
    }
    require_admissible(f, n, sieve)?;
    if f.eval_mod(v, n) != 0 {
        return Err(Error::invalid(format!("{v} is not a root of f mod {n}")));
    }
    let fact = sieve.factorize(n)?;
    let components = fact
        .prime_powers()
        .map(|(p, e, q)| IdealComponent::new(p, e, v % q))
        .collect();
    Ok(FactoredIdeal { components, norm: n })
}

/// α(𝔞): the representative of α modulo 𝔞 in `[0, 𝔑(𝔞))`.
pub fn residue_alpha(ideal: &FactoredIdeal) -> u64 {
    let mut acc = 0u64;
    let mut m = 1u64;
    for c in &ideal.components {
        let q = c.prime_power();
        acc = crt_pair(acc, m, c.root, q).expect("distinct primes");
        m *= q;
    }
    acc
}

/// Which condition of the degree-one criterion a component list violates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DegreeOneDiagnosis {
    DegreeOne,
    /// Some component is not a root of f modulo its prime power.
    NotARoot { prime: u64, exponent: u32, root: u64 },
    /// A component's prime divides η·D_f.
    Inadmissible { prime: u64 },
    /// Two distinct primes above the same rational prime: their norms share p.
    SharedNorm { prime: u64 },
}

impl DegreeOneDiagnosis {
    pub fn is_degree_one(&self) -> bool {
        matches!(self, DegreeOneDiagnosis::DegreeOne)
    }

    fn describe(&self) -> String {
        match self {
            DegreeOneDiagnosis::DegreeOne => "degree one".into(),
            DegreeOneDiagnosis::NotARoot { prime, exponent, root } => {
                format!("{root} is not a root of f mod {prime}^{exponent}")
            }
            DegreeOneDiagnosis::Inadmissible { prime } => {
                format!("prime {prime} divides eta * disc(f); each prime factor must be unramified and prime to eta")
            }
            DegreeOneDiagnosis::SharedNorm { prime } => {
                format!("two prime factors above {prime} have non-coprime norms")
            }
        }
    }
}

fn classify(f: &IntPolynomial, components: &[IdealComponent]) -> DegreeOneDiagnosis {
    for c in components {
        if c.exponent == 0 || c.prime.checked_pow(c.exponent).is_none() {
            return DegreeOneDiagnosis::NotARoot { prime: c.prime, exponent: c.exponent, root: c.root };
        }
        let q = c.prime_power();
        if c.root >= q || f.eval_mod(c.root, q) != 0 {
            return DegreeOneDiagnosis::NotARoot { prime: c.prime, exponent: c.exponent, root: c.root };
        }
    }
    for c in components {
        if f.is_bad_prime(c.prime) {
            return DegreeOneDiagnosis::Inadmissible { prime: c.prime };
        }
    }
    let mut seen = BTreeMap::new();
    for c in components {
        if seen.insert(c.prime, ()).is_some() {
            return DegreeOneDiagnosis::SharedNorm { prime: c.prime };
        }
    }
    DegreeOneDiagnosis::DegreeOne
}

/// Degree-one test for an arbitrary component list (which may repeat primes).
pub fn is_degree_one(f: &IntPolynomial, components: &[IdealComponent]) -> DegreeOneDiagnosis {
    classify(f, components)
}

/// 𝔦(𝔞) = log|O/𝔞| / log|Z/(𝔞 ∩ Z)| as exponent bookkeeping per prime.
///
/// `numerator[p]` is Σ e over components above p and `denominator[p]` the
/// largest single e above p. The ratio of logarithms is generally irrational,
/// but "equals 1" is decided exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InertiaDegree {
    pub numerator: BTreeMap<u64, u32>,
    pub denominator: BTreeMap<u64, u32>,
}

impl InertiaDegree {
    pub fn is_one(&self) -> bool {
        self.numerator == self.denominator
    }

    /// The value as a reduced fraction, when numerator and denominator
    /// exponent vectors are proportional.
    pub fn as_ratio(&self) -> Option<(u64, u64)> {
        let mut ratio: Option<(u64, u64)> = None;
        for (p, &num) in &self.numerator {
            let den = self.denominator[p] as u64;
            let g = (num as u64).gcd(&den);
            let r = (num as u64 / g, den / g);
            match ratio {
                None => ratio = Some(r),
                Some(prev) if prev == r => {}
                Some(_) => return None,
            }
        }
        Some(ratio.unwrap_or((1, 1)))
    }

    pub fn value(&self) -> f64 {
        let log = |m: &BTreeMap<u64, u32>| m.iter().map(|(&p, &e)| e as f64 * (p as f64).ln()).sum::<f64>();
        let den = log(&self.denominator);
        if den == 0.0 {
            1.0
        } else {
            log(&self.numerator) / den
        }
    }
}

pub fn inertia_degree(f: &IntPolynomial, components: &[IdealComponent]) -> Result<InertiaDegree> {
    let mut numerator = BTreeMap::new();
    let mut denominator = BTreeMap::new();
    for c in components {
        if f.is_bad_prime(c.prime) {
            return Err(Error::unsupported(format!(
                "component above {} is ramified or not prime to eta",
                c.prime
            )));
        }
        let q = c
            .prime
            .checked_pow(c.exponent)
            .filter(|_| c.exponent > 0)
            .ok_or_else(|| Error::invalid(format!("bad exponent {} for {}", c.exponent, c.prime)))?;
        if c.root >= q || f.eval_mod(c.root, q) != 0 {
            return Err(Error::invalid(format!("{} is not a root of f mod {q}", c.root)));
        }
        *numerator.entry(c.prime).or_insert(0) += c.exponent;
        let d = denominator.entry(c.prime).or_insert(0);
        *d = (*d).max(c.exponent);
    }
    Ok(InertiaDegree { numerator, denominator })
}

/// Every degree-one ideal of norm `n`, ordered by α(𝔞).
pub fn enumerate_degree_one(f: &IntPolynomial, n: u64, sieve: &SpfSieve) -> Result<Vec<FactoredIdeal>> {
    if n == 0 {
        return Err(Error::invalid("norm must be positive"));
    }
    require_admissible(f, n, sieve)?;
    let fact = sieve.factorize(n)?;
    let mut per_prime = Vec::with_capacity(fact.parts.len());
    for (p, e, q) in fact.prime_powers() {
        per_prime.push((p, e, q, roots_mod_prime_power(f, p, e)?));
    }
    let parts: Vec<(u64, &[u64])> = per_prime.iter().map(|(_, _, q, r)| (*q, r.as_slice())).collect();
    let residues = combine_crt(&parts);
    Ok(residues
        .into_iter()
        .map(|v| FactoredIdeal {
            components: per_prime
                .iter()
                .map(|&(p, e, q, _)| IdealComponent::new(p, e, v % q))
                .collect(),
            norm: n,
        })
        .collect())
}
