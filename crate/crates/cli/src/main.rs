//! `lpp-lab`: command-line front end for the experiment suites.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 when the
//! wall-time budget cut a run short (partial results are still written).

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lpp_experiments::{run, write_table, ExperimentConfig, ExperimentError, OutputFormat, RawConfig};

#[derive(Parser, Debug)]
#[command(name = "lpp-lab", version, about = "Monte Carlo experiments for exponential last-passage percolation")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample passage values, optionally with a stationary boundary.
    Simulate(Flags),
    /// Coupling failure of local increments against stationary ones.
    LocalStationarity(Flags),
    /// Point-to-point versus stationary geodesic trees on small boxes.
    Stabilization(Flags),
    /// Coalescence point tails, microscopic and macroscopic.
    Coalescence(Flags),
    /// Variance, profile and transversal fluctuation exponents.
    Exponents(Flags),
    /// Burke and idle-time checks on stationary queues.
    QueueCheck(Flags),
    /// Idle-probability bounds against Monte Carlo.
    BoundCheck(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Simulate(f) => ("simulate", f),
            Command::LocalStationarity(f) => ("local-stationarity", f),
            Command::Stabilization(f) => ("stabilization", f),
            Command::Coalescence(f) => ("coalescence", f),
            Command::Exponents(f) => ("exponents", f),
            Command::QueueCheck(f) => ("queue-check", f),
            Command::BoundCheck(f) => ("bound-check", f),
        }
    }
}

/// Every flag is optional and overrides the config file. Lists are comma
/// separated or `start:stop:count` geometric ranges.
#[derive(Args, Debug)]
struct Flags {
    /// Key-value config file; flags take precedence over its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed [default: $LPP_LAB_SEED, else 1].
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Direction as `x,y`.
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    m: Option<String>,
    /// Density offsets, or `balanced` to tie them to the box scale.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long = "R")]
    big_r: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    l: Option<String>,
    /// Anchor multiple for the stationary field in stabilization runs.
    #[arg(long)]
    anchor: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long = "budget-seconds")]
    budget_seconds: Option<String>,
}

impl Flags {
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs = [
            ("seed", &self.seed),
            ("reps", &self.reps),
            ("n", &self.n),
            ("rho", &self.rho),
            ("lambda", &self.lambda),
            ("xi", &self.xi),
            ("c", &self.c),
            ("m", &self.m),
            ("r", &self.r),
            ("k", &self.k),
            ("R", &self.big_r),
            ("alpha", &self.alpha),
            ("a", &self.a),
            ("l", &self.l),
            ("anchor", &self.anchor),
            ("jobs", &self.jobs),
            ("out", &self.out),
            ("format", &self.format),
            ("budget-seconds", &self.budget_seconds),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

fn resolve(experiment: &str, flags: &Flags) -> Result<ExperimentConfig, ExperimentError> {
    let mut raw = match &flags.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if let Some(named) = raw.get("experiment") {
        if named.trim() != experiment {
            return Err(ExperimentError::Config {
                field: "experiment".into(),
                reason: format!("config file names `{named}` but the subcommand is `{experiment}`"),
            });
        }
    }
    raw.set("experiment", experiment)?;
    if raw.get("seed").is_none() {
        if let Ok(seed) = std::env::var("LPP_LAB_SEED") {
            raw.set("seed", &seed)?;
        }
    }
    for (key, value) in flags.overrides() {
        raw.set(key, value)?;
    }
    ExperimentConfig::resolve(&raw)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (experiment, flags) = cli.command.parts();
    let cfg = match resolve(experiment, flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = cfg.out.as_ref().map_or("-".to_string(), |p| p.display().to_string());
    eprintln!("resolved-config: {} (out={out}, jobs={})", cfg.canonical(), cfg.jobs);
    let started = Instant::now();
    let table = match run(&cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cfg.out {
        Some(path) => write_table(&table, cfg.format, path),
        None => {
            let text = match cfg.format {
                OutputFormat::Csv => Ok(table.to_csv()),
                OutputFormat::Json => table.to_json().map(|j| j + "\n").map_err(ExperimentError::from),
            };
            text.map(|t| print!("{t}"))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    eprintln!("finished in {:.1} s", started.elapsed().as_secs_f64());
    if table.truncated {
        eprintln!("warning: wall-time budget exhausted; results are partial");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
