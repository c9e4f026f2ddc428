//! Command-line front end for the `gstb` binary.
//!
//! Exit codes: 0 success, 1 failed validation checks, 2 input or runtime error.
//! Errors are printed to stderr as one JSON line: `{"error":CODE,"message":TEXT}`.

mod commands;

pub use commands::{sidecar_path, METRIC_NAMES};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{env_seed, ReportFile, RunConfig};
use crate::numerics::DistanceKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gstb", version, about = "Geometric stability metrics for embedding matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute stability, supervised and similarity metrics.
    Metrics(MetricsArgs),
    /// Run a synthetic validation suite against its acceptance bounds.
    Validate(ValidateArgs),
    /// Pairwise drift or a noise-sweep drift series.
    Drift(DriftArgs),
    /// Apply an encoder transformation to a matrix file.
    Transform(TransformArgs),
    /// Linear-probe steering sweep with controls.
    Steer(SteerArgs),
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Base seed; falls back to GSTB_SEED, then 320.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of random splits for split-averaged metrics.
    #[arg(long, global = true)]
    pub splits: Option<usize>,
    /// RDM distance: cosine, correlation or euclidean.
    #[arg(long, global = true)]
    pub distance: Option<String>,
    /// Row cap before RDM construction; `none` disables it.
    #[arg(long, global = true)]
    pub max_samples: Option<String>,
    /// Bootstrap iterations.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Report (or matrix) output path; stdout when omitted.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; never changes results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Include wall-clock seconds in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Single-column integer labels file.
    #[arg(long, conflicts_with = "label_col")]
    pub labels: Option<PathBuf>,
    /// Header name of a label column inside the input CSV.
    #[arg(long)]
    pub label_col: Option<String>,
    /// Second representation for similarity metrics.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Comma-separated metric names.
    #[arg(long, value_delimiter = ',', default_value = "shesha_fs")]
    pub metric: Vec<String>,
    /// Wrap each metric in a percentile bootstrap over rows.
    #[arg(long)]
    pub bootstrap: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    pub suite: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct DriftArgs {
    #[arg(long, required_unless_present = "table")]
    pub baseline: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["sweep", "table"])]
    pub current: Option<PathBuf>,
    /// Noise sweep, e.g. `noise:0.01,0.05,0.1`.
    #[arg(long, conflicts_with = "table")]
    pub sweep: Option<String>,
    /// Precomputed series CSV with a `level` column, metric columns and an
    /// optional `accuracy` column.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Comma-separated drift metrics.
    #[arg(long, value_delimiter = ',', default_value = "shesha,cka")]
    pub metrics: Vec<String>,
    /// Single-column accuracy per sweep level.
    #[arg(long)]
    pub accuracy: Option<PathBuf>,
    /// Drift value that counts as a detection.
    #[arg(long, default_value_t = crate::inference::DETECTION_THRESHOLD)]
    pub threshold: f64,
    /// Accuracy drop below which a level counts as functionally stable.
    #[arg(long, default_value_t = crate::inference::STABLE_ACCURACY_DROP)]
    pub stable_drop: f64,
    /// False-positive rate for the sensitivity report.
    #[arg(long, default_value_t = 0.1)]
    pub fpr: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Encoder spec, e.g. `pca:k=100` or `noise:sigma=0.2`.
    #[arg(long)]
    pub encoder: String,
    /// Output format; inferred from the output extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    /// `features,labels` for probe training.
    #[arg(long)]
    pub train: String,
    /// `features,labels` for evaluation.
    #[arg(long)]
    pub test: String,
    /// Comma-separated steering strengths.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<f64>>,
    /// Comma-separated controls: `shuffled`, `random:M`.
    #[arg(long, value_delimiter = ',')]
    pub controls: Vec<String>,
    /// Probe L2 penalty.
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl CommonArgs {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            seed: match self.seed {
                Some(s) => s,
                None => env_seed()?,
            },
            ..RunConfig::default()
        };
        if let Some(k) = self.splits {
            cfg.splits = k;
        }
        if let Some(d) = &self.distance {
            cfg.distance = d.parse::<DistanceKind>()?;
        }
        if let Some(m) = &self.max_samples {
            cfg.max_samples = match m.as_str() {
                "none" => None,
                v => Some(v.parse().map_err(|_| Error::InvalidParameter(format!("max-samples '{v}'")))?),
            };
        }
        if let Some(b) = self.iterations {
            cfg.bootstrap_iterations = b;
        }
        if let Some(w) = self.workers {
            if w == 0 {
                return Err(Error::InvalidParameter("workers must be >= 1".into()));
            }
            cfg.workers = w;
        }
        cfg.output = self.output.as_ref().map(|p| p.display().to_string());
        Ok(cfg)
    }
}

/// What a subcommand hands back to the dispatcher.
pub(crate) struct Outcome {
    pub report: Option<ReportFile>,
    pub checks_failed: bool,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            print_error("Usage", first);
            return EXIT_ERROR;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            print_error(e.code(), &e.to_string());
            EXIT_ERROR
        }
    }
}

fn print_error(code: &str, message: &str) {
    let line = serde_json::json!({ "error": code, "message": message });
    eprintln!("{line}");
}

fn execute(cli: &Cli) -> Result<i32> {
    let common = match &cli.command {
        Command::Metrics(a) => &a.common,
        Command::Validate(a) => &a.common,
        Command::Drift(a) => &a.common,
        Command::Transform(a) => &a.common,
        Command::Steer(a) => &a.common,
    };
    let cfg = common.run_config()?;
    let start = Instant::now();
    let outcome = crate::validate::with_workers(cfg.workers, || match &cli.command {
        Command::Metrics(a) => commands::metrics(a, &cfg),
        Command::Validate(a) => commands::validate(a, &cfg),
        Command::Drift(a) => commands::drift(a, &cfg),
        Command::Transform(a) => commands::transform(a, &cfg),
        Command::Steer(a) => commands::steer(a, &cfg),
    })??;
    if let Some(mut report) = outcome.report {
        if common.timing {
            report.timing_seconds = Some(start.elapsed().as_secs_f64());
        }
        let text = report.to_json()?;
        match &common.output {
            Some(p) if !matches!(cli.command, Command::Transform(_)) => std::fs::write(p, text)?,
            _ => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
    }
    Ok(if outcome.checks_failed { EXIT_CHECKS_FAILED } else { EXIT_OK })
}
