use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every option any subcommand reads. Flags, a `--config` file and the
/// thread-count environment variable are merged into one of these, in that
/// order of precedence.
#[derive(Clone, Debug, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Coefficients c_0,c_1,...,c_d (constant term first).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Several polynomials separated by ';'.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub polys: Option<String>,
    /// Override for η (defaults to |c_d|).
    #[arg(long, global = true)]
    pub eta: Option<String>,
    #[arg(long, global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub nmax: Option<u64>,
    #[arg(long, global = true)]
    pub xmax: Option<u64>,
    /// Comma-separated list, or "decades".
    #[arg(long, global = true)]
    pub checkpoints: Option<String>,
    /// all | squarefree | progression:A:M | coprime:M | list:N1,N2,...
    #[arg(long, global = true)]
    pub filter: Option<String>,
    /// An integer, or inv:M.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// Frequency vectors for `system`, e.g. "1,0;0,1".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub hset: Option<String>,
    /// Residue class A:M for the progression sums of `stats`.
    #[arg(long, global = true)]
    pub progression: Option<String>,
    #[arg(long, global = true)]
    pub base: Option<u64>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub max_m: Option<usize>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// [N:L] for the split-prime product of `stats`.
    #[arg(long, global = true)]
    pub nl_degree: Option<u32>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct ConfigArgs {
    #[command(flatten)]
    cfg: RunConfig,
}

impl RunConfig {
    /// Parses `key=value` lines; keys are the long flag names. Blank lines and
    /// lines starting with '#' are skipped.
    pub fn from_kv(text: &str) -> Result<Self, CliError> {
        let mut args = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("config line {}: expected key=value", i + 1)))?;
            args.push(format!("--{}={}", k.trim(), v.trim()));
        }
        ConfigArgs::try_parse_from(args)
            .map(|a| a.cfg)
            .map_err(|e| CliError::Parse(format!("config: {}", e.kind())))
    }

    pub fn to_kv(&self) -> String {
        let Value::Object(map) = serde_json::to_value(self).expect("plain data") else {
            unreachable!("struct serializes to an object")
        };
        let mut out = String::new();
        for (k, v) in map {
            match v {
                Value::Null => {}
                Value::String(s) => out.push_str(&format!("{k}={s}\n")),
                other => out.push_str(&format!("{k}={other}\n")),
            }
        }
        out
    }

    /// Fills every unset field from `fallback`.
    pub fn or(self, fallback: RunConfig) -> RunConfig {
        let Value::Object(mut mine) = serde_json::to_value(self).expect("plain data") else {
            unreachable!()
        };
        let Value::Object(theirs) = serde_json::to_value(fallback).expect("plain data") else {
            unreachable!()
        };
        for (k, v) in theirs {
            let slot = mine.entry(k).or_insert(Value::Null);
            if slot.is_null() {
                *slot = v;
            }
        }
        serde_json::from_value(Value::Object(mine)).expect("same shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_round_trip() {
        let cfg = RunConfig {
            poly: Some("-2,0,0,1".into()),
            xmax: Some(1000),
            checkpoints: Some("10,100,1000".into()),
            filter: Some("progression:1:4".into()),
            h: Some("inv:3".into()),
            out: Some("out/w.csv".into()),
            format: Some(Format::Json),
            seed: Some(7),
            threads: Some(2),
            max_m: Some(3),
            ..Default::default()
        };
        let text = cfg.to_kv();
        assert!(text.contains("max-m=3\n"));
        assert_eq!(RunConfig::from_kv(&text).unwrap(), cfg);
    }

    #[test]
    fn kv_errors() {
        assert!(RunConfig::from_kv("xmax 10").is_err());
        assert!(RunConfig::from_kv("bogus=1").is_err());
        assert!(RunConfig::from_kv("xmax=ten").is_err());
        assert_eq!(RunConfig::from_kv("# note\n\nn = 5\n").unwrap().n, Some(5));
    }

    #[test]
    fn precedence() {
        let flags = RunConfig { n: Some(5), ..Default::default() };
        let file = RunConfig { n: Some(9), xmax: Some(10), ..Default::default() };
        let merged = flags.or(file);
        assert_eq!((merged.n, merged.xmax), (Some(5), Some(10)));
    }
}
