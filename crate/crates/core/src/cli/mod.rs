//! Command-line front end: `simulate`, `sweep`, `lambda` and `contour`.
//!
//! Configuration comes from an optional flat `key = value` file, overridden
//! by `--key value` flags. Exit codes: 0 success, 2 usage or configuration
//! error, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config_text, Overrides, RunConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `report` is still written to the output when present.
    #[error("{message}")]
    Numerical {
        message: String,
        report: Option<String>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numerical {
            message: e.to_string(),
            report: None,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fewcycle",
    version,
    about = "Two-level atom dynamics under few-cycle pulses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact and approximate time series at one parameter point.
    Simulate(CommonArgs),
    /// Relative L2 error surface over (omega0_ratio, omegac_ratio).
    Sweep(CommonArgs),
    /// Solve the fixed-point equation for lambda and report it.
    Lambda(CommonArgs),
    /// Trace a level set of an error-surface CSV.
    Contour(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads: a positive count or `auto`.
    #[arg(long, value_name = "N|auto", value_parser = parse_threads)]
    threads: Option<Threads>,
    #[command(flatten)]
    keys: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Threads {
    Auto,
    Fixed(usize),
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    match s {
        "auto" => Ok(Threads::Auto),
        _ => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
            _ => Err(format!("expected a positive integer or 'auto', got '{s}'")),
        },
    }
}

fn load(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut pairs = Vec::new();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        pairs = parse_config_text(&text)?;
    }
    pairs.extend(args.keys.pairs());
    RunConfig::resolve(&pairs)
}

type Handler = fn(&RunConfig) -> Result<String, CliError>;

fn execute(cmd: &Command) -> Result<(String, Option<PathBuf>), CliError> {
    let (args, f): (_, Handler) = match cmd {
        Command::Simulate(a) => (a, commands::simulate),
        Command::Sweep(a) => (a, commands::sweep_surface),
        Command::Lambda(a) => (a, commands::lambda),
        Command::Contour(a) => (a, commands::contour),
    };
    let cfg = load(args)?;
    let threads = match args.threads {
        Some(Threads::Fixed(n)) => n,
        _ => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    let text = pool.install(|| f(&cfg))?;
    Ok((text, args.out.clone()))
}

fn emit(text: &str, out: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => output::write_atomic(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let out_path = match &cli.command {
        Command::Simulate(a) | Command::Sweep(a) | Command::Lambda(a) | Command::Contour(a) => {
            a.out.clone()
        }
    };
    let result = execute(&cli.command).and_then(|(text, out)| emit(&text, out.as_ref(), stdout));
    match result {
        Ok(()) => 0,
        Err(e) => {
            if let CliError::Numerical {
                report: Some(r), ..
            } = &e
            {
                if let Err(w) = emit(r, out_path.as_ref(), stdout) {
                    let _ = writeln!(stderr, "error: {w}");
                }
            }
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["fewcycle"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("sweep"));
        let (code, out, _) = call(&["sweep", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("--omega0_ratio"));
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let (code, _, err) = call(&["lambda", "--omega_zero", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("omega_zero"), "{err}");
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["lambda", "--threads", "0"]).0, 2);
    }

    #[test]
    fn zero_field_lambda_report() {
        let (code, out, _) = call(&["lambda", "--omega0_ratio", "0"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("lambda_re=0.0 lambda_im=0.0 "), "{out}");
        assert!(out.contains("iterations=1 converged=true"));
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn numerical_failure_exits_three() {
        let (code, _, err) = call(&["simulate", "--intervals", "10", "--methods", "f0"]);
        assert_eq!(code, 3, "{err}");
        assert!(err.contains("too coarse"), "{err}");
    }
}
