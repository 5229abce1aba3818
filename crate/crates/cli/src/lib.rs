//! `rubriq` command line. [`run`] parses arguments, dispatches, and maps
//! failures to exit codes: 0 success, 1 domain error, 2 usage error.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{BackendKind, CliConfig, Normalization};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "rubriq", version, about = "Rubric-driven AI reviews and human-vs-AI review analytics")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Completion backend; overrides the config file.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendKind>,
    /// Seed passed to the completion backend and synthetic data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct TextInput {
    /// Text given inline.
    #[arg(long)]
    text: Option<String>,
    /// Read text from a file (`-` for standard input).
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
    /// Use the full text of a review map JSON file.
    #[arg(long, value_name = "PATH")]
    review: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an AI review of a work, one rubric criterion at a time.
    Review {
        #[arg(long, value_name = "PATH")]
        work: PathBuf,
        /// Rubric JSON; defaults to the config's rubric, else the bundled one.
        #[arg(long, value_name = "PATH")]
        rubric: Option<PathBuf>,
        #[arg(long)]
        parallelism: Option<usize>,
        /// Summarize even when the work fits the context budget.
        #[arg(long)]
        always_summarize: bool,
        /// Keep criteria with unparseable ratings instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Validate a review map JSON against a stored corpus and add it.
    ImportReview {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, value_name = "PATH")]
        review: PathBuf,
    },
    /// Sentence-level sentiment of a text.
    Sentiment {
        #[command(flatten)]
        input: TextInput,
    },
    /// Grade-level readability of a text.
    Readability {
        #[command(flatten)]
        input: TextInput,
    },
    /// Compare human and AI reviews in a stored corpus.
    Compare {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, value_enum)]
        normalization: Option<Normalization>,
    },
    /// Render a saved JSON comparison report.
    Report {
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Write a synthetic corpus with peer reviews and AI reviews.
    Demo {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        #[arg(long, default_value_t = 6)]
        works: usize,
        #[arg(long, default_value_t = 2)]
        peer_reviews: usize,
    },
    /// Check a corpus directory, or a single work, rubric or review.
    Validate {
        #[arg(long, value_name = "DIR", conflicts_with_all = ["work", "rubric", "review"])]
        corpus: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        work: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        rubric: Option<PathBuf>,
        /// Needs `--work`; checked against `--rubric` or the default rubric.
        #[arg(long, value_name = "PATH", requires = "work")]
        review: Option<PathBuf>,
    },
}

/// Resolved global settings handed to each command.
pub struct Context {
    pub config: CliConfig,
    pub format: Format,
    pub seed: Option<u64>,
}

pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| CliError::Domain(format!("standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

/// Run with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_io(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with_io<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli) {
        Ok((data, out)) => match out {
            Some(path) => match rubriq_core::storage::write_atomic(&path, data.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            },
            None => {
                let _ = stdout.write_all(data.as_bytes());
                0
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let mut config = match &cli.config {
        Some(path) => CliConfig::load(path)?,
        None => CliConfig::default(),
    };
    if let Some(b) = cli.backend {
        config.backend = b;
    }
    if let Some(seed) = cli.seed {
        config.pipeline.seed = Some(seed);
    }
    let ctx = Context {
        config,
        format: cli.format.unwrap_or_default(),
        seed: cli.seed,
    };
    let mut data = commands::execute(cli.command, &ctx)?;
    if !data.is_empty() && !data.ends_with('\n') {
        data.push('\n');
    }
    Ok((data, cli.out))
}
