use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scnn_core::{AccumulationMode, ExecPolicy};

#[derive(Debug, Parser)]
#[command(
    name = "scbnn",
    version,
    about = "Stochastic-computing and binary neural network experiments"
)]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// JSON experiment config; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for output files (created if missing).
    #[arg(long = "out-dir", global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Accumulation mode for SC preactivations.
    #[arg(long, global = true, value_parser = parse_mode)]
    pub mode: Option<AccumulationMode>,

    /// Trial scheduling; results are identical either way.
    #[arg(long, global = true, value_enum, default_value_t = Exec::Parallel)]
    pub exec: Exec,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_mode(s: &str) -> Result<AccumulationMode, String> {
    s.parse().map_err(|e: scnn_core::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Exec {
    Parallel,
    Sequential,
}

impl From<Exec> for ExecPolicy {
    fn from(e: Exec) -> Self {
        match e {
            Exec::Parallel => ExecPolicy::Parallel,
            Exec::Sequential => ExecPolicy::Sequential,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a reference network to a target function.
    Fit(FitArgs),
    /// Monte-Carlo convergence sweep over stream lengths.
    Sweep(SweepArgs),
    /// Minimum stream length bound, optionally validated by simulation.
    Bound(BoundArgs),
    /// Binarize a network or convert between BNN and SC stream form.
    Convert(ConvertArgs),
    /// Gate-operation counts for a neuron layer.
    Energy(EnergyArgs),
    /// Single forward pass of a network at one point.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// constant:<c>[:<n>], identity, sin[:<freq>] or product.
    #[arg(long)]
    pub target: Option<String>,
    /// Hidden width.
    #[arg(long = "N")]
    pub width: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Reference network file [default: <out-dir>/network.json].
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Target function, or "self" for the network itself [default: from the network name].
    #[arg(long)]
    pub target: Option<String>,
    /// Stream lengths, comma separated and ascending.
    #[arg(long = "M", value_delimiter = ',')]
    pub lens: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Input dimension.
    #[arg(long = "n")]
    pub dim: Option<usize>,
    /// Hidden width.
    #[arg(long = "N")]
    pub width: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Σ|αᵢ| [default: N, or taken from --network].
    #[arg(long = "alpha-sum")]
    pub alpha_sum: Option<f64>,
    /// Simulate at the bound and check the failure rate.
    #[arg(long)]
    pub validate: bool,
    /// Network to validate [default: a random network of shape (n, N)].
    #[arg(long)]
    pub network: Option<PathBuf>,
    /// Target for validation [default: the network itself].
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("direction").required(true).args(["binarize", "to_scnn", "to_bnn"]))]
pub struct ConvertArgs {
    /// Input artifact.
    pub input: PathBuf,
    /// Reference network → BNN by stochastic binarization.
    #[arg(long)]
    pub binarize: bool,
    /// BNN → SC streams of length M.
    #[arg(long = "to-scnn", value_name = "M")]
    pub to_scnn: Option<usize>,
    /// SC streams → BNN.
    #[arg(long = "to-bnn")]
    pub to_bnn: bool,
    /// Binary input vector for the equivalence check, e.g. 1011 [default: random].
    #[arg(long = "input-bits")]
    pub input_bits: Option<String>,
    /// Chunk length for the equivalence check after --binarize.
    #[arg(long = "M")]
    pub len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long = "n", conflicts_with = "bnn")]
    pub dim: Option<usize>,
    /// Stream length, or the chunk length with --bnn [default there: 1].
    #[arg(long = "M")]
    pub len: Option<usize>,
    #[arg(long = "N", conflicts_with = "bnn")]
    pub width: Option<usize>,
    /// BNN layer with m binary inputs and N units.
    #[arg(long, num_args = 2, value_names = ["m", "N"])]
    pub bnn: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Reference or binary network file.
    #[arg(long)]
    pub network: PathBuf,
    /// Input point: comma-separated reals, or a bit string for a BNN.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    /// Stream length for the SCNN pass.
    #[arg(long = "M")]
    pub len: Option<usize>,
}
