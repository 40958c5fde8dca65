//! Command-line front end: `count`, `inspect`, `neighbors`, `embed`,
//! `convergence` and `compare`.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hyperlex::config::OutputFormat;
use hyperlex::{Normalization, RhoMode, RunConfig};

pub mod commands;
pub mod meta;

pub use commands::{cmd_compare, cmd_convergence, cmd_count, cmd_embed, cmd_inspect, cmd_neighbors, View, WordSource};

pub const THREADS_ENV: &str = "HYPERLEX_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Data, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Internal, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Internal => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "tsv" => Ok(OutputFormat::Tsv),
        "json" => Ok(OutputFormat::Json),
        "svg" => Ok(OutputFormat::Svg),
        other => Err(format!("unknown format {other:?} (expected tsv, json or svg)")),
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyperlex", version, about = "Entropy-based word association and hyperbolic disk embedding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Context window on each side of the target.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Drop tokens seen fewer times than this.
    #[arg(long, global = true)]
    pub min_count: Option<u64>,
    /// Neighbor list length.
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Pair frequency in the entropy weight: relative or raw.
    #[arg(long, global = true)]
    pub normalization: Option<Normalization>,
    /// Radius definition: squared (x^2 + y^2) or euclidean.
    #[arg(long, global = true)]
    pub rho_mode: Option<RhoMode>,
    /// Tokens per cumulative epoch.
    #[arg(long, global = true)]
    pub epoch_size: Option<usize>,
    #[arg(long, global = true)]
    pub epsilon_rho: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon_theta: Option<f64>,
    /// tsv, json or svg.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<OutputFormat>,
    /// Write here (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count co-occurrences in text files and save a model.
    Count {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Summarize a model or dump one of its tables.
    Inspect {
        model: PathBuf,
        /// summary, vocab, pairs, entropy or boltzmann.
        #[arg(default_value = "summary")]
        view: View,
    },
    /// Entropy-based neighbor lists for a target word.
    Neighbors { model: PathBuf, target: String },
    /// Disk coordinates for a word list, averaged across models.
    Embed {
        /// Word list file, or a builtin set name (colors, kinship).
        words: String,
        #[arg(required = true)]
        models: Vec<PathBuf>,
    },
    /// Coordinate drift over cumulative epochs of a corpus.
    Convergence {
        /// Word list file, or a builtin set name (colors, kinship).
        words: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Compare entropy neighbors with cosine neighbors from a vector file.
    Compare {
        model: PathBuf,
        vectors: PathBuf,
        target: String,
        /// Gold word sets: builtin names or files. Defaults to colors and kinship.
        gold: Vec<String>,
    },
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let d = RunConfig::default();
        let c = RunConfig {
            window: self.window.unwrap_or(d.window),
            min_count: self.min_count.unwrap_or(d.min_count),
            k: self.top_k.unwrap_or(d.k),
            normalization: self.normalization.unwrap_or(d.normalization),
            rho_mode: self.rho_mode.unwrap_or(d.rho_mode),
            epoch_size: self.epoch_size.unwrap_or(d.epoch_size),
            epsilon_rho: self.epsilon_rho.unwrap_or(d.epsilon_rho),
            epsilon_theta: self.epsilon_theta.unwrap_or(d.epsilon_theta),
            format: self.format.unwrap_or(d.format),
        };
        c.validate().map_err(CliError::usage)?;
        Ok(c)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Writes to `path` through a temporary file in the same directory, or to
/// stdout when no path is given.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| CliError::data(format!("writing stdout: {e}")));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::data(format!("writing {}: {e}", path.display()));
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Parses `args` (including the program name), runs the command and writes
/// its output.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.to_string())),
    };
    configure_threads()?;
    let config = cli.config()?;
    if config.format == OutputFormat::Svg && !matches!(cli.command, Command::Embed { .. }) {
        return Err(CliError::usage("--format svg is only available for embed"));
    }
    let bytes = match &cli.command {
        Command::Count { inputs } => cmd_count(inputs, &config)?,
        Command::Inspect { model, view } => cmd_inspect(model, *view, &config)?,
        Command::Neighbors { model, target } => cmd_neighbors(model, target, &config)?,
        Command::Embed { words, models } => cmd_embed(models, &WordSource::parse(words), &config)?,
        Command::Convergence { words, inputs } => cmd_convergence(inputs, &WordSource::parse(words), &config)?,
        Command::Compare { model, vectors, target, gold } => cmd_compare(model, vectors, target, gold, &config)?,
    };
    write_output(cli.output.as_deref(), &bytes)
}
