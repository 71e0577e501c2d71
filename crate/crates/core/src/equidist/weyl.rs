use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use super::discrepancy::{star_discrepancy_sorted, DiscrepancyKind, DiscrepancyReport};
use super::kahan::{ComplexKahan, KahanSum};
use super::{reduce_h, rho_h_residue};
use crate::error::{Error, Result};
use crate::numcore::modarith::{gcd, inv_mod};
use crate::numcore::IntPolynomial;
use crate::roots::{ModulusFilter, RootSet, RootTable};

const CHUNK: u64 = 1 << 14;

/// How the frequency h is chosen for each modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HMode {
    Constant(i64),
    /// h(n) with m·h(n) ≡ 1 (mod n); moduli sharing a factor with m are skipped.
    InverseOf(u64),
}

impl HMode {
    fn admits(&self, n: u64) -> bool {
        match *self {
            HMode::Constant(_) => true,
            HMode::InverseOf(m) => gcd(m, n) == 1,
        }
    }

    /// h(n) reduced into [0, n).
    fn residue(&self, n: u64) -> u64 {
        match *self {
            HMode::Constant(h) => reduce_h(h, n),
            HMode::InverseOf(m) => inv_mod(m % n, n).expect("gcd checked by admits"),
        }
    }
}

impl FromStr for HMode {
    type Err = Error;

    /// An integer, or `inv:M`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(m) = s.strip_prefix("inv:") {
            let m: u64 = m.trim().parse().map_err(|_| Error::invalid(format!("bad h spec {s:?}")))?;
            if m == 0 {
                return Err(Error::invalid("inverse mode needs m >= 1"));
            }
            return Ok(HMode::InverseOf(m));
        }
        s.replace('\u{2212}', "-")
            .parse()
            .map(HMode::Constant)
            .map_err(|_| Error::invalid(format!("bad h spec {s:?}")))
    }
}

impl fmt::Display for HMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HMode::Constant(h) => write!(f, "{h}"),
            HMode::InverseOf(m) => write!(f, "inv:{m}"),
        }
    }
}

fn as_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One checkpoint of a Weyl series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub x: u64,
    pub signed_re: f64,
    pub signed_im: f64,
    pub abs_sum: f64,
    pub normalizer: u64,
    /// |signed| / normalizer, NaN when no modulus has contributed yet.
    #[serde(rename = "W")]
    pub w: f64,
    pub w_defined: bool,
}

impl WeylRow {
    pub fn signed(&self) -> Complex64 {
        Complex64::new(self.signed_re, self.signed_im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSeries {
    #[serde(serialize_with = "as_display")]
    pub h_mode: HMode,
    #[serde(serialize_with = "as_display")]
    pub filter: ModulusFilter,
    pub rows: Vec<WeylRow>,
}

impl WeylSeries {
    pub const CSV_HEADER: &'static str = "x,signed_re,signed_im,abs_sum,normalizer,W";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.x,
                format_sig(r.signed_re),
                format_sig(r.signed_im),
                format_sig(r.abs_sum),
                r.normalizer,
                format_sig(r.w)
            ));
        }
        out
    }
}

/// `%g`-style formatting with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    const SIG: usize = 12;
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (SIG as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Powers of ten below `xmax`, followed by `xmax` itself.
pub fn checkpoints_decades(xmax: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = 10u64;
    while x < xmax {
        out.push(x);
        match x.checked_mul(10) {
            Some(y) => x = y,
            None => break,
        }
    }
    out.push(xmax.max(1));
    out
}

/// Sorts and dedups checkpoints, requiring each to lie in [1, xmax].
pub fn validate_checkpoints(checkpoints: &[u64], xmax: u64) -> Result<Vec<u64>> {
    if xmax == 0 {
        return Err(Error::invalid("xmax must be >= 1"));
    }
    if checkpoints.is_empty() {
        return Err(Error::invalid("at least one checkpoint is required"));
    }
    if let Some(&bad) = checkpoints.iter().find(|&&x| x == 0 || x > xmax) {
        return Err(Error::invalid(format!("checkpoint {bad} outside [1, {xmax}]")));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    Ok(cps)
}

/// Visits root sets in ascending n, in parallel-built chunks.
fn for_each_chunk(table: &RootTable, hi: u64, filter: &ModulusFilter, mut visit: impl FnMut(Vec<RootSet>)) {
    let mut lo = 1;
    while lo <= hi {
        let end = lo.saturating_add(CHUNK - 1).min(hi);
        visit(table.collect_range(lo, end, filter));
        lo = end + 1;
    }
}

/// Σ_{n≤x} ρ(h(n), n), Σ |ρ(h(n), n)| and Σ ρ(n) at each checkpoint.
pub fn weyl_partial_sums(
    f: &IntPolynomial,
    h_mode: HMode,
    xmax: u64,
    filter: ModulusFilter,
    checkpoints: &[u64],
) -> Result<WeylSeries> {
    let cps = validate_checkpoints(checkpoints, xmax)?;
    let table = Arc::new(RootTable::new(f, xmax)?);
    weyl_partial_sums_with_table(&table, h_mode, filter, &cps)
}

/// As [`weyl_partial_sums`], reusing a prebuilt table (xmax = the table's range).
pub fn weyl_partial_sums_with_table(
    table: &Arc<RootTable>,
    h_mode: HMode,
    filter: ModulusFilter,
    checkpoints: &[u64],
) -> Result<WeylSeries> {
    let cps = validate_checkpoints(checkpoints, table.xmax())?;
    if h_mode == HMode::InverseOf(0) {
        return Err(Error::invalid("inverse mode needs m >= 1"));
    }
    let last = *cps.last().expect("nonempty");
    let mut signed = ComplexKahan::new();
    let mut abs = KahanSum::new();
    let mut count = 0u64;
    let mut rows = Vec::with_capacity(cps.len());
    let mut pending = cps.iter().copied().peekable();

    let emit = |x: u64, signed: &ComplexKahan, abs: &KahanSum, count: u64| {
        let s = signed.value();
        let defined = count > 0;
        WeylRow {
            x,
            signed_re: s.re,
            signed_im: s.im,
            abs_sum: abs.value(),
            normalizer: count,
            w: if defined { s.norm() / count as f64 } else { f64::NAN },
            w_defined: defined,
        }
    };

    for_each_chunk(table, last, &filter, |sets| {
        let terms: Vec<(u64, Complex64, usize)> = sets
            .par_iter()
            .filter(|rs| h_mode.admits(rs.modulus))
            .map(|rs| (rs.modulus, rho_h_residue(h_mode.residue(rs.modulus), rs), rs.count()))
            .collect();
        for (n, term, rho) in terms {
            while let Some(x) = pending.next_if(|&x| x < n) {
                rows.push(emit(x, &signed, &abs, count));
            }
            signed.add(term);
            abs.add(term.norm());
            count += rho as u64;
        }
    });
    for x in pending {
        rows.push(emit(x, &signed, &abs, count));
    }
    Ok(WeylSeries { h_mode, filter, rows })
}

/// Star discrepancy of {v/n : v a root mod n, n ≤ x, n passing `filter`} at
/// each checkpoint.
pub fn ratio_discrepancy(
    table: &RootTable,
    filter: &ModulusFilter,
    checkpoints: &[u64],
) -> Result<Vec<DiscrepancyReport>> {
    let cps = validate_checkpoints(checkpoints, table.xmax())?;
    let last = *cps.last().expect("nonempty");
    let mut points: Vec<f64> = Vec::new();
    let mut reports = Vec::with_capacity(cps.len());
    let mut pending = cps.iter().copied().peekable();

    let mut report = |x: u64, points: &mut Vec<f64>| {
        points.par_sort_unstable_by(f64::total_cmp);
        let value = if points.is_empty() { f64::NAN } else { star_discrepancy_sorted(points) };
        reports.push(DiscrepancyReport {
            checkpoint: x,
            sample_count: points.len() as u64,
            value,
            kind: DiscrepancyKind::Star,
        });
    };

    for_each_chunk(table, last, filter, |sets| {
        for rs in sets {
            while let Some(x) = pending.next_if(|&x| x < rs.modulus) {
                report(x, &mut points);
            }
            let n = rs.modulus as f64;
            points.extend(rs.roots.iter().map(|&v| v as f64 / n));
        }
    });
    for x in pending {
        report(x, &mut points);
    }
    Ok(reports)
}
