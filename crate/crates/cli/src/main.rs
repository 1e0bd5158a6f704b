mod commands;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Reduced-order rational surrogates from frequency-response samples.
#[derive(Debug, Parser)]
#[command(name = "lrom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a surrogate model and write the model and its report.
    Fit(FitArgs),
    /// Tabulate the error ε(r) over a range of orders for one or more methods.
    Sweep(SweepArgs),
    /// Perturb a dataset with multiplicative complex-normal noise.
    Noise(NoiseArgs),
    /// Evaluate a model on a frequency grid or on the points of a dataset.
    Eval(EvalArgs),
    /// List the poles of a model.
    Poles(PolesArgs),
    /// Generate a random stable system and sample it.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    LoewnerSvd,
    LsLoewner,
    Aaa,
    AaaSp,
    Lfpp,
    Lfapp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::LoewnerSvd => "loewner-svd",
            Method::LsLoewner => "ls-loewner",
            Method::Aaa => "aaa",
            Method::AaaSp => "aaa-sp",
            Method::Lfpp => "lfpp",
            Method::Lfapp => "lfapp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Points {
    Left,
    Right,
    Merged,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file (.csv or .json).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Sample frequencies in the input file (and --peaks, --grid) are in Hz.
    #[arg(long)]
    pub hz: bool,
}

#[derive(Debug, Args)]
pub struct FitOptions {
    /// Model order r (for ls-loewner and lfapp: number of nodes times inputs; for aaa: degree cap).
    #[arg(long)]
    pub order: Option<usize>,
    /// Truncation tolerance τ (loewner-svd, lfpp/lfapp surrogate) or AAA stopping tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Enforce real models by closing the data under conjugation and realifying.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub real: bool,
    /// Interpolation-point selection for ls-loewner and automatic lfapp.
    #[arg(long, value_enum, default_value_t = Points::Merged)]
    pub points: Points,
    /// Poles to enforce (lfpp), comma separated complex literals such as "-1+0.77j".
    #[arg(long, allow_hyphen_values = true)]
    pub poles: Option<String>,
    /// Interpolation nodes (lfpp), comma separated complex literals.
    #[arg(long, allow_hyphen_values = true)]
    pub nodes: Option<String>,
    /// Peak frequencies selecting modified lfapp (rad/s, or Hz with --hz).
    #[arg(long)]
    pub peaks: Option<String>,
    /// Restrict lfapp candidate poles to the open left half-plane.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub stable_only: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(short, long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub opts: FitOptions,
    /// Model file to write.
    #[arg(short, long, default_value = "model.json")]
    pub output: PathBuf,
    /// Report file to write (default: the model path with extension .report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write pointwise errors as CSV (omega,abs_err,rel_err).
    #[arg(long)]
    pub errors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma separated methods (lfpp is not sweepable).
    #[arg(short, long, value_enum, value_delimiter = ',', default_value = "loewner-svd")]
    pub methods: Vec<Method>,
    #[command(flatten)]
    pub data: DataArgs,
    /// Orders r as a list or start:step:stop range; MIMO data keeps multiples of the input count.
    #[arg(long, default_value = "1:1:20")]
    pub orders: String,
    /// Enforce real models by closing the data under conjugation.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub real: bool,
    #[arg(long, value_enum, default_value_t = Points::Merged)]
    pub points: Points,
    /// CSV file with columns method,r,epsilon.
    #[arg(short, long, default_value = "sweep.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Dataset file (.csv or .json); points are kept as stored.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Total variance σ² of the perturbation Z.
    #[arg(long)]
    pub sigma2: f64,
    /// Mean of Z as a complex literal.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub mean: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// Frequency grid (rad/s, or Hz with --hz): list, start:step:stop or log:lo:hi:n.
    #[arg(long, conflicts_with = "input")]
    pub grid: Option<String>,
    /// Dataset whose points are evaluated; errors against it are added as columns.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub hz: bool,
    #[arg(short, long, default_value = "eval.csv")]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    /// Model file written by `fit`.
    pub model: PathBuf,
    /// Include eigenvalue dominance.
    #[arg(long)]
    pub dominance: bool,
    /// JSON file for the pole report.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = 1)]
    pub inputs: usize,
    #[arg(long, default_value_t = 1)]
    pub outputs: usize,
    /// Frequency grid (rad/s, or Hz with --hz).
    #[arg(long, default_value = "log:0.1:100:100")]
    pub grid: String,
    #[arg(long)]
    pub hz: bool,
    /// Damping ratio range "lo,hi" of the oscillatory modes.
    #[arg(long, default_value = "0.02,0.15")]
    pub damping: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the generating state-space model.
    #[arg(long)]
    pub model_output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger_init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return commands::CliError::usage("usage", e.to_string().trim()).report();
        }
    };
    let result = match cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Noise(a) => commands::noise(a),
        Command::Eval(a) => commands::eval(a),
        Command::Poles(a) => commands::poles(a),
        Command::Synth(a) => commands::synth(a),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => e.report(),
    }
}

/// Library warnings go to stderr when `LROM_LOG` is set (e.g. `LROM_LOG=warn`).
fn env_logger_init() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LROM_LOG", "off")).init();
}
