use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod run;
mod svg;

/// Finite-n posterior diagnostics for the Barron and cosine models.
#[derive(Parser, Debug)]
#[command(name = "posterior-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one trajectory and write its CSV and JSON sidecar.
    Traj(TrajArgs),
    /// Run several seeds and write their trajectories plus a summary.
    Replicate(ReplicateArgs),
    /// Excursion frequencies of band masses over a grid of bands.
    Scan(ScanArgs),
    /// Line plot of trajectory columns as SVG.
    Plot(PlotArgs),
}

/// Flags mirroring the run config; each one overrides the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// Config JSON, or the sidecar of an earlier trajectory to replay it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `barron` or `cosine`.
    #[arg(long)]
    pub model: Option<String>,
    /// `uniform`, `gauss:THETA`, `step:N:I,J,...` or `file:PATH`.
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Ratio of the geometric part of the evaluation grid.
    #[arg(long)]
    pub grid_ratio: Option<f64>,
    /// Relative tolerance of the Barron-model quadratures.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Prior weight of the continuous half of the Barron prior.
    #[arg(long)]
    pub f0_weight: Option<f64>,
    /// Fixed step-prior truncation level M.
    #[arg(long)]
    pub truncation: Option<u64>,
    /// `exponential:RATE`, `half-cauchy:SCALE` or `uniform:MAX`.
    #[arg(long)]
    pub cosine_prior: Option<String>,
    /// Largest cosine integration cap.
    #[arg(long)]
    pub cosine_max_cap: Option<f64>,
    /// Diagnostic stems such as `gamma_stat@ln2` or `band_mass@0.6:0.75`;
    /// replaces the model's default set. Repeatable.
    #[arg(long = "diag")]
    pub diagnostics: Vec<String>,
}

#[derive(Args, Debug)]
pub struct TrajArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Seed; defaults to the sidecar's seed or the config's first seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// File name prefix; files are `{prefix}_seed{seed}.csv/.json`.
    #[arg(long, default_value = "traj")]
    pub prefix: String,
}

#[derive(Args, Debug)]
pub struct ReplicateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Seeds as ranges and lists, e.g. `1..20` or `1,4,9..12`.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = "traj")]
    pub prefix: String,
    /// Summary path; defaults to `{out}/summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Band lower ends `a:b:step` (inclusive) or a single value.
    #[arg(long)]
    pub alpha_grid: String,
    /// Band upper ends `a:b:step` (inclusive) or a single value.
    #[arg(long)]
    pub beta_grid: String,
    /// Comma-separated excursion thresholds.
    #[arg(long, default_value = "0.5,0.9,0.99")]
    pub deltas: String,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    /// Trajectory CSV. Repeatable.
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Column or bracketed statistic stem to plot. Repeatable.
    #[arg(long = "y", required = true)]
    pub columns: Vec<String>,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long)]
    pub log_y: bool,
    /// Horizontal reference line; `ln2` is accepted. Repeatable.
    #[arg(long = "refline")]
    pub reflines: Vec<String>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, default_value_t = 800)]
    pub width: u32,
    #[arg(long, default_value_t = 500)]
    pub height: u32,
    /// Output SVG.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] posterior_lab::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 3,
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("POSTERIOR_LAB_LOG", "warn")).init();
    // clap exits with 2 on usage errors and 0 on --help / --version
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Traj(a) => run::traj(a),
        Command::Replicate(a) => run::replicate(a),
        Command::Scan(a) => run::scan(a),
        Command::Plot(a) => svg::plot(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
