//! `equipart`: optimal interval partitions from a JSON configuration.

mod commands;
mod config;
mod validate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{split_overrides, Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    Config(String),
    /// A solve or spectral computation failed (exit 3).
    Numerics(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numerics(m) => m,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
        }
    }

    fn report(&self) {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Numerics(_) => "numerics",
        };
        eprintln!("{}", json!({ "error": kind, "message": self.message() }));
    }
}

impl From<equipart::Error> for CliError {
    fn from(e: equipart::Error) -> Self {
        use equipart::Error as E;
        match e {
            E::Numerics(_) | E::ToleranceNotReached { .. } | E::Degenerate(_) | E::Budget(_) => {
                CliError::Numerics(e.to_string())
            }
            E::Domain(_) | E::Shape(_) | E::IncompatibleFamily(_) | E::Invalid(_) => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "equipart", version, about = "Optimal minimax and maximin partitions of an interval")]
#[command(after_help = "Any config value can be overridden with a dotted path, e.g. --solver.value_tol=1e-8.\n\
                        Logging is controlled by EQUIPART_LOG (error, info, debug).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Worker threads for sweeps and eigenvalue batches.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Optimal partition for `problem.n` cells.
    Solve,
    /// Grid enumeration next to the solver, for `n <= 4`.
    Oracle,
    /// Values, residuals and limit diagnostics over many `n`.
    Sweep,
    /// Sturm–Liouville eigenvalues and eigenfunction zeros.
    SturmEig,
    /// Eigenfunction zeros against the optimal cuts.
    Zeros,
    /// Counting function against the Weyl constant.
    Weyl,
    /// Check bounds, compatibility and monotonicity without solving.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
            Command::SturmEig => "sturm-eig",
            Command::Zeros => "zeros",
            Command::Weyl => "weyl",
            Command::Validate => "validate",
        }
    }
}

fn run(cli: Cli, overrides: Vec<(String, String)>) -> Result<(), CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config <path> is required".into()))?;
    let mut overrides = overrides;
    if let Some(f) = &cli.format {
        overrides.push(("output.format".into(), f.clone()));
    }
    if let Some(o) = &cli.out {
        overrides.push(("output.path".into(), serde_json::to_string(&o.to_string_lossy()).unwrap()));
    }
    let cfg = RunConfig::load(&path, &overrides)?;
    if let Some(c) = cfg.command.as_deref().filter(|c| *c != cli.command.name()) {
        log::warn!("config names command {c}; running {}", cli.command.name());
    }
    if let Some(k) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {k} workers: {e}")))?;
    }
    let out = match cli.command {
        Command::Solve => commands::solve_cmd(&cfg)?,
        Command::Oracle => commands::oracle_cmd(&cfg)?,
        Command::Sweep => commands::sweep_cmd(&cfg)?,
        Command::SturmEig => commands::sturm_eig_cmd(&cfg)?,
        Command::Zeros => commands::zeros_cmd(&cfg)?,
        Command::Weyl => commands::weyl_cmd(&cfg)?,
        Command::Validate => {
            if cfg.format(Format::Json) == Format::Csv {
                return Err(CliError::Config("validate reports JSON only".into()));
            }
            let d = validate::validate(&cfg)?;
            let mut body = serde_json::to_vec_pretty(&d).unwrap();
            body.push(b'\n');
            commands::Output { body, failure: None }
        }
    };
    match &cfg.output.path {
        Some(p) => std::fs::write(p, &out.body).map_err(|e| CliError::Config(format!("cannot write {p}: {e}")))?,
        None => std::io::stdout()
            .write_all(&out.body)
            .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?,
    }
    out.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EQUIPART_LOG", "error")).init();
    let (args, overrides) = match split_overrides(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            e.report();
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("bad arguments");
            CliError::Config(line.trim_start_matches("error: ").to_string()).report();
            return ExitCode::from(2);
        }
    };
    match run(cli, overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.exit_code())
        }
    }
}
