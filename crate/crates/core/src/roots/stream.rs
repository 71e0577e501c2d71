use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::{combine_crt, prime_roots_unchecked, LiftTree, RootSet};
use crate::error::{Error, Result};
use crate::numcore::modarith::gcd;
use crate::numcore::{Factorization, IntPolynomial, SpfSieve};

/// Which moduli a stream emits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModulusFilter {
    All,
    Squarefree,
    /// n ≡ a (mod m), with gcd(a, m) = 1.
    Progression { a: u64, m: u64 },
    /// gcd(n, m) = 1.
    CoprimeTo(u64),
    Explicit(BTreeSet<u64>),
}

impl ModulusFilter {
    pub fn progression(a: u64, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("progression modulus must be positive"));
        }
        if gcd(a % m, m) != 1 {
            return Err(Error::invalid(format!(
                "progression {a} mod {m} needs gcd(a, m) = 1"
            )));
        }
        Ok(ModulusFilter::Progression { a: a % m, m })
    }

    pub fn coprime_to(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("coprime filter needs a positive modulus"));
        }
        Ok(ModulusFilter::CoprimeTo(m))
    }

    /// Whether `n` passes; `fact` must be the factorization of `n`.
    pub fn accepts(&self, n: u64, fact: &Factorization) -> bool {
        match self {
            ModulusFilter::All => true,
            ModulusFilter::Squarefree => fact.is_squarefree(),
            ModulusFilter::Progression { a, m } => n % m == *a,
            ModulusFilter::CoprimeTo(m) => gcd(n, *m) == 1,
            ModulusFilter::Explicit(set) => set.contains(&n),
        }
    }

    /// Decides membership from `n` alone when the filter allows it.
    fn accepts_unfactored(&self, n: u64) -> Option<bool> {
        match self {
            ModulusFilter::All => Some(true),
            ModulusFilter::Squarefree => None,
            ModulusFilter::Progression { a, m } => Some(n % m == *a),
            ModulusFilter::CoprimeTo(m) => Some(gcd(n, *m) == 1),
            ModulusFilter::Explicit(set) => Some(set.contains(&n)),
        }
    }
}

impl FromStr for ModulusFilter {
    type Err = Error;

    /// `all`, `squarefree`, `progression:A:M`, `coprime:M`, or `list:N1,N2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("unrecognized filter {s:?}"));
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| bad());
        match s.split_once(':') {
            None => match s {
                "all" => Ok(ModulusFilter::All),
                "squarefree" => Ok(ModulusFilter::Squarefree),
                _ => Err(bad()),
            },
            Some(("progression", rest)) | Some(("ap", rest)) => {
                let (a, m) = rest.split_once(':').ok_or_else(bad)?;
                ModulusFilter::progression(num(a)?, num(m)?)
            }
            Some(("coprime", m)) => ModulusFilter::coprime_to(num(m)?),
            Some(("list", items)) => {
                let set = items.split(',').map(num).collect::<Result<BTreeSet<_>>>()?;
                if set.contains(&0) {
                    return Err(Error::invalid("moduli must be positive"));
                }
                Ok(ModulusFilter::Explicit(set))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ModulusFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModulusFilter::All => write!(f, "all"),
            ModulusFilter::Squarefree => write!(f, "squarefree"),
            ModulusFilter::Progression { a, m } => write!(f, "progression:{a}:{m}"),
            ModulusFilter::CoprimeTo(m) => write!(f, "coprime:{m}"),
            ModulusFilter::Explicit(set) => {
                let items: Vec<String> = set.iter().map(|n| n.to_string()).collect();
                write!(f, "list:{}", items.join(","))
            }
        }
    }
}

/// Roots of f modulo every prime power up to `xmax`, plus the sieve needed to
/// factor any n ≤ xmax. Read-only once built, so it can be shared by workers.
#[derive(Debug)]
pub struct RootTable {
    poly: IntPolynomial,
    sieve: SpfSieve,
    powers: HashMap<(u64, u32), Vec<u64>>,
    xmax: u64,
}

impl RootTable {
    pub fn new(f: &IntPolynomial, xmax: u64) -> Result<Self> {
        if xmax == 0 {
            return Err(Error::invalid("xmax must be >= 1"));
        }
        let sieve = SpfSieve::new(xmax.max(2))?;
        let trees: Vec<Result<LiftTree>> = sieve
            .primes()
            .par_iter()
            .map(|&p| {
                let p = p as u64;
                let mut depth = 1u32;
                let mut q = p;
                while let Some(next) = q.checked_mul(p).filter(|&n| n <= xmax) {
                    q = next;
                    depth += 1;
                }
                LiftTree::from_prime_roots(f, p, depth, prime_roots_unchecked(f, p, 0))
            })
            .collect();
        let mut powers = HashMap::with_capacity(sieve.primes().len() * 11 / 10);
        for tree in trees {
            let tree = tree?;
            for e in 1..=tree.levels.len() as u32 {
                powers.insert((tree.prime, e), tree.roots_at(e));
            }
        }
        Ok(RootTable { poly: f.clone(), sieve, powers, xmax })
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    pub fn sieve(&self) -> &SpfSieve {
        &self.sieve
    }

    pub fn xmax(&self) -> u64 {
        self.xmax
    }

    /// Roots mod p^e, for p^e ≤ xmax.
    pub fn prime_power_roots(&self, p: u64, e: u32) -> Option<&[u64]> {
        self.powers.get(&(p, e)).map(Vec::as_slice)
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.xmax {
            return Err(Error::invalid(format!("modulus {n} outside the table range [1, {}]", self.xmax)));
        }
        Ok(())
    }

    /// ρ(n) from the prime-power counts, without assembling roots.
    pub fn rho(&self, n: u64) -> Result<usize> {
        self.check_range(n)?;
        let fact = self.sieve.factorize(n)?;
        Ok(fact
            .parts
            .iter()
            .map(|&(p, e)| self.powers[&(p, e)].len())
            .product())
    }

    pub fn roots_mod_n(&self, n: u64) -> Result<RootSet> {
        self.check_range(n)?;
        let fact = self.sieve.factorize(n)?;
        Ok(self.assemble(n, &fact))
    }

    fn assemble(&self, n: u64, fact: &Factorization) -> RootSet {
        let parts: Vec<(u64, &[u64])> = fact
            .prime_powers()
            .map(|(p, e, q)| (q, self.powers[&(p, e)].as_slice()))
            .collect();
        RootSet { modulus: n, roots: combine_crt(&parts) }
    }

    /// Root sets for the moduli in `lo..=hi` that pass `filter`, ascending.
    /// Computed in parallel; the output order does not depend on scheduling.
    pub fn collect_range(&self, lo: u64, hi: u64, filter: &ModulusFilter) -> Vec<RootSet> {
        let hi = hi.min(self.xmax);
        if lo > hi {
            return Vec::new();
        }
        if let ModulusFilter::Explicit(set) = filter {
            return set
                .range(lo..=hi)
                .map(|&n| self.roots_mod_n(n).expect("in range"))
                .collect();
        }
        (lo..=hi)
            .into_par_iter()
            .filter_map(|n| {
                if filter.accepts_unfactored(n) == Some(false) {
                    return None;
                }
                let fact = self.sieve.factorize(n).expect("n within sieve");
                filter.accepts(n, &fact).then(|| self.assemble(n, &fact))
            })
            .collect()
    }

    /// Ascending stream over `1..=xmax`.
    pub fn stream(self: &Arc<Self>, filter: ModulusFilter) -> RootStream {
        RootStream {
            table: Arc::clone(self),
            filter,
            next_n: 1,
            buffer: Vec::new().into_iter(),
        }
    }
}

const CHUNK: u64 = 1 << 14;

/// Ascending sequence of root sets for the moduli passing a filter.
pub struct RootStream {
    table: Arc<RootTable>,
    filter: ModulusFilter,
    next_n: u64,
    buffer: std::vec::IntoIter<RootSet>,
}

impl RootStream {
    pub fn table(&self) -> &RootTable {
        &self.table
    }
}

impl Iterator for RootStream {
    type Item = RootSet;

    fn next(&mut self) -> Option<RootSet> {
        loop {
            if let Some(rs) = self.buffer.next() {
                return Some(rs);
            }
            if self.next_n > self.table.xmax {
                return None;
            }
            let hi = self.next_n.saturating_add(CHUNK - 1).min(self.table.xmax);
            self.buffer = self.table.collect_range(self.next_n, hi, &self.filter).into_iter();
            self.next_n = hi + 1;
        }
    }
}

/// Builds the prime-power table for f up to `xmax` and streams root sets for
/// every n ≤ xmax accepted by `filter`, in ascending order.
pub fn root_stream(f: &IntPolynomial, xmax: u64, filter: ModulusFilter) -> Result<RootStream> {
    let table = Arc::new(RootTable::new(f, xmax)?);
    Ok(table.stream(filter))
}
