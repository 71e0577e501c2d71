mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use config::RunConfig;
use error::CliError;

const THREADS_ENV: &str = "POLYCONG_THREADS";

#[derive(Parser)]
#[command(name = "polycong", version, about = "Roots of polynomial congruences and their equidistribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key=value file with the same option names; flags take precedence.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Print the merged options as key=value lines and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(flatten)]
    run: RunConfig,
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = cli.run.clone();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)?;
        cfg = cfg.or(RunConfig::from_kv(&text)?);
    }
    if cfg.threads.is_none() {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            let t = v.trim().parse().map_err(|_| CliError::Parse(format!("{THREADS_ENV}={v:?} is not a count")))?;
            cfg.threads = Some(t);
        }
    }
    Ok(cfg)
}

/// Writes next to the target and renames, so a failed run leaves no file.
fn write_atomic(path: &Path, data: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data.as_bytes())?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli)?;
    if cli.print_config {
        std::io::stdout().lock().write_all(cfg.to_kv().as_bytes())?;
        return Ok(());
    }
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(CliError::Parse("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Parse(e.to_string()))?;
    }
    let output = commands::run(cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => write_atomic(path, &output),
        None => {
            std::io::stdout().lock().write_all(output.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polycong: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
