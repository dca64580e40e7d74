//! The `fraxim` command-line front end.
//!
//! Every subcommand reads an optional JSON configuration (`--config`) and
//! lets flags override it. Output goes to the configured file or stdout.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 invalid
//! configuration, 4 numeric failure (resonance, failed iteration).

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_band, cmd_converge, cmd_sweep, cmd_validate, CommandError, Output};
pub use config::{ConfigError, ConfigInput, OmegaGrid, RunConfig, Spacing};

use crate::families::{Family, Termination};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "FRAXIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fraxim", version, about = "Characteristic impedances of self-similar LC circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form impedance over a frequency grid (CSV).
    Sweep(Flags),
    /// Pass-band endpoints (JSON).
    Band(Flags),
    /// Closed form vs. iterated map vs. reduced network (JSON; exit 2 on failure).
    Validate(Flags),
    /// Network values over depths and regularizations at one frequency (CSV).
    Converge(Flags),
}

impl Command {
    fn flags(&self) -> &Flags {
        match self {
            Command::Sweep(f) | Command::Band(f) | Command::Validate(f) | Command::Converge(f) => f,
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Circuit family: ladder, sg or hanoi.
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(short = 'L', long = "inductance")]
    pub inductance: Option<f64>,
    #[arg(short = 'C', long = "capacitance")]
    pub capacitance: Option<f64>,
    /// Scale ratio (hanoi).
    #[arg(short = 'r', long = "ratio")]
    pub ratio: Option<f64>,
    /// Depth of the finite approximation.
    #[arg(short = 'N', long)]
    pub depth: Option<u32>,
    /// short, open, inductor, fixed:RE,IM or pair:ZV_RE,ZV_IM,ZL_RE,ZL_IM.
    #[arg(long)]
    pub termination: Option<Termination>,
    /// Series resistance added to every reactive element.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub omega_start: Option<f64>,
    #[arg(long)]
    pub omega_stop: Option<f64>,
    #[arg(long)]
    pub omega_count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Single frequency; shorthand for a one-point grid.
    #[arg(long, conflicts_with_all = ["omega_start", "omega_stop", "omega_count"])]
    pub omega: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Relative deviation accepted by `validate`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Depths for `converge`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<u32>>,
    /// Regularizations for `converge` and the sweep oracle, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Frequency for `converge` (default: the grid start).
    #[arg(long)]
    pub at: Option<f64>,
    /// Add the regularized-limit columns to `sweep`.
    #[arg(long)]
    pub oracle: bool,
    /// `validate` passes only if the iterated map fails to converge.
    #[arg(long)]
    pub expect_divergence: bool,
    /// Sweep the two-terminal impedance of a network file instead of a family.
    #[arg(long)]
    pub network: Option<PathBuf>,
}

impl Flags {
    fn to_input(&self) -> ConfigInput {
        let mut omega = config::GridInput {
            start: self.omega_start,
            stop: self.omega_stop,
            count: self.omega_count,
            spacing: self.spacing,
        };
        if let Some(w) = self.omega {
            omega.start = Some(w);
            omega.stop = Some(w);
            omega.count = Some(1);
        }
        ConfigInput {
            family: self.family,
            inductance: self.inductance,
            capacitance: self.capacitance,
            r: self.ratio,
            depth: self.depth,
            termination: self.termination,
            epsilon: self.epsilon,
            omega,
            output: self.output.clone(),
            tolerance: self.tolerance,
            depths: self.depths.clone(),
            epsilons: self.epsilons.clone(),
            at: self.at,
            oracle: self.oracle.then_some(true),
            expect_divergence: self.expect_divergence.then_some(true),
            network: self.network.clone(),
        }
    }

    /// Reads the configuration file, if any, and overlays the flags.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let base = match &self.config {
            Some(path) => ConfigInput::from_file(path)?,
            None => ConfigInput::default(),
        };
        base.overlay(self.to_input()).resolve()
    }
}

fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

/// Runs one parsed command and returns its output.
pub fn execute(command: &Command) -> Result<(Output, Option<PathBuf>), CommandError> {
    let cfg = command.flags().resolve()?;
    let out = thread_pool().install(|| match command {
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::Band(_) => cmd_band(&cfg),
        Command::Validate(_) => cmd_validate(&cfg),
        Command::Converge(_) => cmd_converge(&cfg),
    })?;
    Ok((out, cfg.output))
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (out, path) = match execute(&cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("fraxim: {e}");
            return e.exit_code();
        }
    };
    let written = match &path {
        Some(p) => std::fs::write(p, out.text.as_bytes()).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            let mut text = out.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("fraxim: cannot write output: {msg}");
        return EXIT_IO;
    }
    if out.passed {
        EXIT_OK
    } else {
        eprintln!("fraxim: validation failed");
        EXIT_VALIDATION
    }
}
