use std::fmt::Write as _;

use clap::Subcommand;
use num_bigint::BigUint;
use polycong_core::equidist::{
    checkpoints_decades, format_sig, prime_stats, rho_sum_progression, weyl_partial_sums, HMode,
};
use polycong_core::ideals::{enumerate_degree_one, residue_alpha};
use polycong_core::padic::{haar_monte_carlo, normality_evidence, padic_expansions};
use polycong_core::roots::{root_stream, roots_mod_n};
use polycong_core::systems::{joint_weyl_and_discrepancy, root_tuples, tuple_cloud_csv, validate_system};
use polycong_core::{IntPolynomial, ModulusFilter, SpfSieve};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{missing, CliError};

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum Command {
    /// Roots of f mod n (--n) or for every n ≤ --nmax passing --filter.
    Roots,
    /// Checkpointed Weyl sums Σ ρ(h, n).
    Weyl,
    /// n-adic digit expansions of the roots of f.
    Padic,
    /// Word statistics and Weyl sums of the n-adic digits.
    Normality,
    /// Root tuples (--n) or joint Weyl sums and box discrepancy (--xmax).
    System,
    /// Prime sums of ρ, or progression sums with --progression.
    Stats,
    /// Degree-one ideals of norm n.
    Ideals,
    /// Monte-Carlo mean of |S(N, x)|² over random n-adic integers.
    Haar,
}

type Out = Result<String, CliError>;

pub fn run(cmd: Command, cfg: &RunConfig) -> Out {
    let format = cfg.format.unwrap_or(Format::Csv);
    match cmd {
        Command::Roots => roots(cfg, format),
        Command::Weyl => weyl(cfg, format),
        Command::Padic => padic(cfg, format),
        Command::Normality => normality(cfg, format),
        Command::System => system(cfg, format),
        Command::Stats => stats(cfg, format),
        Command::Ideals => ideals(cfg, format),
        Command::Haar => haar(cfg, format),
    }
}

fn json<T: Serialize>(v: &T) -> Out {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn poly(cfg: &RunConfig) -> Result<IntPolynomial, CliError> {
    let f: IntPolynomial = cfg.poly.as_deref().ok_or_else(|| missing("poly"))?.parse()?;
    match &cfg.eta {
        None => Ok(f),
        Some(s) => {
            let eta: BigUint = s.trim().parse().map_err(|_| CliError::Parse(format!("bad --eta {s:?}")))?;
            Ok(f.with_eta(eta)?)
        }
    }
}

fn filter(cfg: &RunConfig) -> Result<ModulusFilter, CliError> {
    Ok(cfg.filter.as_deref().unwrap_or("all").parse()?)
}

fn checkpoints(cfg: &RunConfig, xmax: u64) -> Result<Vec<u64>, CliError> {
    match cfg.checkpoints.as_deref().map(str::trim) {
        None | Some("decades") => Ok(checkpoints_decades(xmax)),
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| CliError::Parse(format!("bad checkpoint {t:?}"))))
            .collect(),
    }
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| missing(flag))
}

fn sieve_for(n: u64) -> Result<SpfSieve, CliError> {
    Ok(SpfSieve::new(n.clamp(2, 1 << 20))?)
}

fn roots(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let filter = filter(cfg)?;
    let sets = match (cfg.n, cfg.nmax) {
        (Some(n), None) => {
            if n == 0 {
                return Err(CliError::Parse("--n must be positive".into()));
            }
            let sieve = sieve_for(n)?;
            let fact = sieve.factorize(n)?;
            if filter.accepts(n, &fact) {
                vec![roots_mod_n(&f, n, &sieve)?]
            } else {
                Vec::new()
            }
        }
        (None, Some(nmax)) => root_stream(&f, nmax, filter)?.collect(),
        _ => return Err(CliError::Parse("give exactly one of --n and --nmax".into())),
    };
    if format == Format::Json {
        return json(&sets);
    }
    let mut out = String::new();
    for rs in &sets {
        let roots: Vec<String> = rs.roots.iter().map(u64::to_string).collect();
        let sep = if roots.is_empty() { "" } else { " " };
        writeln!(out, "{}:{sep}{}", rs.modulus, roots.join(" ")).unwrap();
    }
    Ok(out)
}

fn weyl(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let xmax = required(cfg.xmax, "xmax")?;
    let h: HMode = cfg.h.as_deref().unwrap_or("1").parse()?;
    let cps = checkpoints(cfg, xmax)?;
    let series = weyl_partial_sums(&f, h, xmax, filter(cfg)?, &cps)?;
    match format {
        Format::Csv => Ok(series.to_csv()),
        Format::Json => json(&series),
    }
}

fn padic(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let exps = padic_expansions(&f, required(cfg.base, "base")?, required(cfg.depth, "depth")?)?;
    match format {
        Format::Csv => Ok(exps.iter().map(|e| e.digit_line() + "\n").collect()),
        Format::Json => json(&exps),
    }
}

fn normality(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let ev = normality_evidence(
        &f,
        required(cfg.base, "base")?,
        required(cfg.depth, "depth")?,
        cfg.max_m.unwrap_or(2),
    )?;
    if format == Format::Json {
        return json(&ev);
    }
    let mut out = String::from("seed_root,m,windows,max_deviation,chi_square\n");
    for e in &ev.expansions {
        for r in &e.reports {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.seed_root,
                r.word_length,
                r.windows,
                format_sig(r.max_deviation),
                format_sig(r.chi_square)
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn parse_hset(s: &str) -> Result<Vec<Vec<i64>>, CliError> {
    s.split(';')
        .map(|v| {
            v.split(',')
                .map(|t| {
                    t.trim()
                        .replace('\u{2212}', "-")
                        .parse::<i64>()
                        .map_err(|_| CliError::Parse(format!("bad frequency entry {t:?}")))
                })
                .collect()
        })
        .collect()
}

fn system(cfg: &RunConfig, format: Format) -> Out {
    let text = cfg.polys.as_deref().ok_or_else(|| missing("polys"))?;
    let polys = text
        .split(';')
        .map(|p| p.parse::<IntPolynomial>())
        .collect::<Result<Vec<_>, _>>()?;
    let sys = validate_system(polys)?;
    match (cfg.n, cfg.xmax) {
        (Some(n), None) => {
            if n == 0 {
                return Err(CliError::Parse("--n must be positive".into()));
            }
            let tuples = root_tuples(&sys, n, &sieve_for(n)?)?;
            match format {
                Format::Csv => Ok(tuple_cloud_csv(std::slice::from_ref(&tuples))),
                Format::Json => json(&tuples),
            }
        }
        (None, Some(xmax)) => {
            let hset = cfg.hset.as_deref().map(parse_hset).transpose()?;
            let table = joint_weyl_and_discrepancy(&sys, xmax, hset, &checkpoints(cfg, xmax)?, cfg.grid)?;
            match format {
                Format::Csv => Ok(table.to_csv()),
                Format::Json => json(&table),
            }
        }
        _ => Err(CliError::Parse("give exactly one of --n and --xmax".into())),
    }
}

fn stats(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let xmax = required(cfg.xmax, "xmax")?;
    let cps = checkpoints(cfg, xmax)?;
    if let Some(spec) = &cfg.progression {
        let (a, m) = spec
            .split_once(':')
            .and_then(|(a, m)| Some((a.trim().parse().ok()?, m.trim().parse().ok()?)))
            .ok_or_else(|| CliError::Parse(format!("bad --progression {spec:?}, expected A:M")))?;
        let sums = rho_sum_progression(&f, a, m, xmax, &cps)?;
        return match format {
            Format::Json => json(&sums),
            Format::Csv => {
                let mut out = String::from("x,sum,slope\n");
                for r in &sums.rows {
                    writeln!(out, "{},{},{}", r.x, r.sum, format_sig(r.slope)).unwrap();
                }
                Ok(out)
            }
        };
    }
    let table = prime_stats(&f, xmax, &cps, cfg.nl_degree.unwrap_or(1))?;
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => json(&table),
    }
}

fn ideals(cfg: &RunConfig, format: Format) -> Out {
    let f = poly(cfg)?;
    let n = required(cfg.n, "n")?;
    if n == 0 {
        return Err(CliError::Parse("--n must be positive".into()));
    }
    let list = enumerate_degree_one(&f, n, &sieve_for(n)?)?;
    if format == Format::Json {
        return json(&list);
    }
    let mut out = String::from("norm,alpha,components\n");
    for ideal in &list {
        let comps: Vec<String> = ideal
            .components()
            .iter()
            .map(|c| format!("{}^{}:{}", c.prime, c.exponent, c.root))
            .collect();
        writeln!(out, "{},{},{}", ideal.norm(), residue_alpha(ideal), comps.join(" ")).unwrap();
    }
    Ok(out)
}

fn haar(cfg: &RunConfig, format: Format) -> Out {
    let est = haar_monte_carlo(
        required(cfg.base, "base")?,
        required(cfg.levels, "levels")?,
        cfg.samples.unwrap_or(1000),
        cfg.seed.unwrap_or(0),
    )?;
    match format {
        Format::Json => json(&est),
        Format::Csv => Ok(format!(
            "mean,std_error,samples,expected\n{},{},{},{}\n",
            format_sig(est.mean),
            format_sig(est.std_error),
            est.samples,
            format_sig(est.expected)
        )),
    }
}
