//! `adrcm`: simulate age-dependent random connection models, replicate them,
//! fit null laws and test collaboration datasets against them.
//!
//! Exit status is 0 on success, 2 for invalid arguments or input, 3 when a
//! required fit cannot be produced and 1 for anything else (I/O).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use adrcm::montecarlo::Statistic;
use adrcm::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "adrcm", version, about = "Age-dependent random connection models and their clique complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate finite networks and write their vertices, edges and simplices.
    Generate(GenerateArgs),
    /// Replicate finite networks, fit normal and stable nulls and write plotting data.
    Montecarlo(MontecarloArgs),
    /// Sample typical vertices and write generalized-degree value counts.
    Palm(PalmArgs),
    /// Test an observed statistic against a fitted null.
    Test(TestArgs),
    /// Build the complex of a collaboration corpus, summarize it and fit model parameters.
    Ingest(IngestArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Edge density parameter.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Age exponent, in (0, 1).
    #[arg(long)]
    pub gamma: f64,
    /// Half-width of the connection profile; 0.5 is the deterministic kernel.
    #[arg(long = "profile-a", default_value_t = 0.5)]
    pub profile_a: f64,
    /// Thinning exponent for exposed edges; 0 disables thinning.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Window length (expected number of vertices).
    #[arg(long)]
    pub size: Option<f64>,
    /// Wrap distances around the window.
    #[arg(long)]
    pub torus: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Highest simplex dimension written.
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write vertices.bin and edges.bin.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Args, Debug)]
pub struct MontecarloArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Highest clique dimension built; raised as needed by the statistics.
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Lower cutoff of the degree power-law fits.
    #[arg(long, default_value_t = adrcm::stats::X_MIN_SIMULATION)]
    pub x_min: u64,
    /// edge_count, triangle_count, betti_1 or degrees:m,m' (repeatable).
    #[arg(long, value_parser = parse_statistic, default_values = ["edge_count"])]
    pub statistic: Vec<Statistic>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Layout of the per-replication records.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct PalmArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of typical-vertex draws.
    #[arg(long, visible_alias = "draws", default_value_t = 10_000)]
    pub replications: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = adrcm::stats::X_MIN_SIMULATION)]
    pub x_min: u64,
    /// degrees:m,m' pairs (repeatable); defaults to (0,1), (1,2) and (2,3).
    #[arg(long, value_parser = parse_statistic)]
    pub statistic: Vec<Statistic>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write the merged counts as palm.json.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Normal,
    Stable,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[arg(long, value_parser = parse_statistic, default_value = "triangle_count")]
    pub statistic: Statistic,
    /// Observed value of the statistic.
    #[arg(long, conflicts_with = "dataset")]
    pub observed: Option<f64>,
    /// Dataset summary written by `ingest`; supplies the observed value.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Null fits written by `montecarlo` (nulls.json or its directory).
    #[arg(long, conflicts_with_all = ["params", "location"])]
    pub nulls: Option<PathBuf>,
    /// Model parameters written by `ingest`; the null is simulated from them.
    #[arg(long, conflicts_with = "location")]
    pub params: Option<PathBuf>,
    /// Explicit null location (with --scale; stable when --alpha is given).
    #[arg(long, requires = "scale")]
    pub location: Option<f64>,
    #[arg(long, requires = "location")]
    pub scale: Option<f64>,
    #[arg(long, requires = "location")]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha")]
    pub skew: Option<f64>,
    /// Null law used from fitted nulls.
    #[arg(long, value_enum, default_value_t = Law::Stable)]
    pub law: Law,
    /// Replications when simulating the null.
    #[arg(long, default_value_t = 100)]
    pub replications: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Corpus file: one document per line of comma-separated names, or a JSON array of arrays.
    pub corpus: PathBuf,
    /// Corpus layout; inferred from the extension when omitted.
    #[arg(long, value_parser = parse_corpus_format)]
    pub corpus_format: Option<adrcm::ingest::CorpusFormat>,
    /// Documents with more than this many authors minus one are dropped.
    #[arg(long, default_value_t = adrcm::ingest::DEFAULT_MAX_INTERACTION_DIM)]
    pub max_interaction_dim: usize,
    /// Skeleton dimension of the complex.
    #[arg(long, visible_alias = "skeleton-dim", default_value_t = adrcm::ingest::DEFAULT_SKELETON_DIM)]
    pub max_dim: usize,
    #[arg(long, default_value_t = adrcm::stats::X_MIN_DATASET)]
    pub x_min: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_statistic(s: &str) -> Result<Statistic, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_corpus_format(s: &str) -> Result<adrcm::ingest::CorpusFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Fit(_) => 3,
        Error::Parse { .. } => 2,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Montecarlo(a) => commands::montecarlo(&a),
        Command::Palm(a) => commands::palm(&a),
        Command::Test(a) => commands::test(&a),
        Command::Ingest(a) => commands::ingest(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("adrcm: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
