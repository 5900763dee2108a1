use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "linecluster", version, about = "Cluster points sampled near two crossing line segments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a labeled dataset from the two-segment model.
    Gen(GenArgs),
    /// Print the TLS score of three points.
    TlsScore(TlsScoreArgs),
    /// Spectral clustering at a fixed threshold.
    Cluster(ClusterArgs),
    /// Spectral clustering at a threshold chosen from sampled triples.
    Autocluster(AutoclusterArgs),
    /// Estimate the two lines from a labeling.
    RecoverLines(RecoverLinesArgs),
    /// Known-parameter likelihood classifier and its exact error.
    Oracle(OracleArgs),
    /// Monte-Carlo check of the closed-form probability bounds.
    Bounds(BoundsArgs),
    /// Run a grid of seeded trials from a JSON config.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Opening angle of the cross in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub half_length: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long = "n", default_value_t = 200)]
    pub n_points: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Read the model from a params JSON instead of flags.
    #[arg(long, conflicts_with_all = ["alpha", "half_length", "sigma", "n_points", "seed"])]
    pub params: Option<PathBuf>,
    /// Directory for `points.csv` and `params.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TlsScoreArgs {
    /// Three points as `x,y`; read `x,y` CSV rows from stdin when omitted.
    #[arg(num_args = 3, value_name = "X,Y", allow_hyphen_values = true)]
    pub points: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Dataset CSV (`x,y[,z]`); `z` enables recovery metrics.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for `labels.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the upper triangle of W to `w.csv`.
    #[arg(long, requires = "out")]
    pub dump_w: bool,
}

#[derive(Debug, Args)]
pub struct AutoclusterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Number of sampled triples.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 0.25)]
    pub theta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverLinesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Labels CSV (`index,z_hat`); defaults to the dataset's `z` column.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Params JSON of the true model, for error metrics.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Params JSON of the true model.
    #[arg(long)]
    pub params: PathBuf,
    /// Dataset to classify; sampled from `--params` when omitted.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = linecluster::oracle::DEFAULT_PERR_NODES)]
    pub nodes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Monte-Carlo draws per check.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for `bounds.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for `sweep.csv`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
