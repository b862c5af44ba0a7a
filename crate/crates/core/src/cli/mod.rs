//! The `cs-ustat` command line.
//!
//! Every subcommand resolves its settings from flags, then from the
//! matching `[section]` of an optional TOML file given with `--config`,
//! then from defaults. It writes one CSV plus a `<csv>.manifest.json`
//! sidecar recording the resolved settings and their digest.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or cap error,
//! 4 partial success (some trials did not converge).

mod bounds;
mod config;
mod manifest;
mod rate;
mod recover;
mod ustat;
mod values;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use bounds::{BoundOp, BoundsArgs};
pub use config::ConfigFile;
pub use manifest::{config_digest, RunManifest};
pub use rate::RateArgs;
pub use recover::RecoverArgs;
pub use ustat::UstatArgs;
pub use values::Values;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "CS_USTAT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cs-ustat", version, about = "U-statistics, bounds and recovery experiments for random sensing matrices")]
pub struct Cli {
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// TOML file with one section per subcommand; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output CSV path (default `<command>.csv`); `-` writes to stdout
    /// without a manifest.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate U_n(a) (and optionally p(a)) for a kernel over a threshold grid.
    Ustat(UstatArgs),
    /// Tabulate the measurement-rate formula.
    Rate(RateArgs),
    /// Run sparse recovery trials, or solve one imported instance.
    Recover(RecoverArgs),
    /// Tabulate closed-form bounds over parameter grids.
    Bounds(BoundsArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ustat(_) => "ustat",
            Command::Rate(_) => "rate",
            Command::Recover(_) => "recover",
            Command::Bounds(_) => "bounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error::*;
        match e {
            InvalidDimensions(_) | OutOfRange(_) | Parse(_) | IndexOutOfRange { .. } => CliError::config(e.to_string()),
            _ => CliError::numeric(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::numeric(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a subcommand produced: CSV text, the settings it resolved, and
/// whether some trials failed.
pub(crate) struct Output {
    pub csv: String,
    pub config: serde_json::Value,
    pub seed: Option<crate::SeedSpec>,
    pub partial: bool,
}

/// Fills `None` fields of `$a` from `$b`.
macro_rules! merge_fields {
    ($a:expr, $b:expr; $($f:ident),* $(,)?) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )*
    };
}
pub(crate) use merge_fields;

pub(crate) fn required<T>(v: Option<T>, name: &str, section: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::config(format!("missing setting '{name}' (flag --{} or key {name} in [{section}])", name.replace('_', "-"))))
}

pub(crate) fn list_f64(v: &Values, name: &str) -> CliResult<Vec<f64>> {
    v.f64s().map_err(|e| CliError::config(format!("{name}: {e}")))
}

pub(crate) fn list_usize(v: &Values, name: &str) -> CliResult<Vec<usize>> {
    v.usizes().map_err(|e| CliError::config(format!("{name}: {e}")))
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| CliError::numeric(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::numeric(e.to_string()))
}

pub(crate) fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("resolved configs serialize")
}

/// Shortest round-trip decimal, switching to exponent form for very small
/// or very large magnitudes.
pub(crate) fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Formats an optional float cell; `None` and non-finite values are blank.
pub(crate) fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => num(x),
        _ => String::new(),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Output> {
    let file = match &cli.config {
        Some(p) => config::load(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Ustat(a) => ustat::run(a.clone().merged(file.ustat)),
        Command::Rate(a) => rate::run(a.clone().merged(file.rate)),
        Command::Recover(a) => recover::run(a.clone().merged(file.recover)),
        Command::Bounds(a) => bounds::run(a.clone().merged(file.bounds)),
    }
}

fn write_outputs(cli: &Cli, out: &Output, started: chrono::DateTime<chrono::Utc>) -> CliResult<()> {
    let path = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", cli.command.name())));
    if path == Path::new("-") {
        print!("{}", out.csv);
        return Ok(());
    }
    let io = |e: std::io::Error, p: &Path| CliError::numeric(format!("{}: {e}", p.display()));
    std::fs::write(&path, &out.csv).map_err(|e| io(e, &path))?;
    let manifest = RunManifest::new(cli.command.name(), &out.config, out.seed, started, vec![path.display().to_string()]);
    let mpath = manifest::sidecar_path(&path);
    std::fs::write(&mpath, manifest.to_json()).map_err(|e| io(e, &mpath))?;
    Ok(())
}

/// Parses and runs an already-built command line; returns the exit code.
pub fn execute(cli: &Cli) -> i32 {
    let started = chrono::Utc::now();
    let result = match cli.threads {
        Some(0) => Err(CliError::config("--threads must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::numeric(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(cli))),
        None => dispatch(cli),
    };
    let result = result.and_then(|out| write_outputs(cli, &out, started).map(|_| out.partial));
    match result {
        Ok(false) => EXIT_OK,
        Ok(true) => {
            eprintln!("warning: some trials did not converge; see the solver columns");
            EXIT_PARTIAL
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Runs the CLI on explicit arguments (the first is the program name).
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run() -> ExitCode {
    ExitCode::from(run_with_args(std::env::args_os()) as u8)
}
