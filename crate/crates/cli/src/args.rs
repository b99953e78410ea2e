use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "whiplab", version, about = "Whip-circuit and WALA simulation and verification lab")]
pub struct Cli {
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; relative paths resolve against $WHIPLAB_OUT_DIR when set.
    /// Tables go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for grid parallelism (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Drop wall-clock columns so output is byte-stable.
    #[arg(long, global = true)]
    pub no_timing: bool,

    /// Seed for --random-theta.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep an expectation value over a θ grid.
    Scan(ScanArgs),
    /// Run an invariant suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Print an exact path count.
    Count {
        #[command(subcommand)]
        what: CountCmd,
    },
    /// Scaling, truncation and cusp measurements.
    Bench {
        #[command(subcommand)]
        what: BenchCmd,
    },
    /// One-parameter VQE against exact ground energies.
    Vqe(VqeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CircuitArg {
    Whip1d,
    Whip2d,
    Whip3d,
    Cycle,
    Nopt,
    Wala,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Naive,
    Early,
    Statevector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    #[value(name = "uniform_half")]
    UniformHalf,
    Bipolar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    #[value(name = "with_pt")]
    WithPt,
    #[value(name = "without_pt")]
    WithoutPt,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub circuit: CircuitArg,

    /// Linear size (ring length for `cycle`).
    #[arg(long = "L")]
    pub l: Option<usize>,

    #[arg(long, value_enum, default_value_t = StyleArg::UniformHalf)]
    pub style: StyleArg,

    #[arg(long, value_enum, default_value_t = VariantArg::WithPt)]
    pub variant: VariantArg,

    #[arg(long, value_enum, default_value_t = EngineArg::Naive)]
    pub engine: EngineArg,

    /// zz | energy | order | diag:D | pair:r,c:r,c | plaquette:P | vertex:V
    #[arg(long, default_value = "zz")]
    pub obs: String,

    /// θ grid `start:stop:count`, endpoints included, radians.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "random_theta")]
    pub theta: Option<String>,

    /// Draw this many θ uniformly from [-π, π) using --seed.
    #[arg(long)]
    pub random_theta: Option<usize>,

    /// Naive engine: stop after this many layers from the end.
    #[arg(long)]
    pub layer_cutoff: Option<usize>,

    /// Naive engine: drop terms with |c| below this.
    #[arg(long)]
    pub coeff_floor: Option<f64>,

    /// Naive engine: drop strings heavier than this.
    #[arg(long)]
    pub weight_cap: Option<usize>,

    /// Naive engine: fail once more terms than this are alive.
    #[arg(long)]
    pub term_budget: Option<usize>,

    /// Largest register the statevector engine will allocate.
    #[arg(long, default_value_t = whiplab::statevector::DEFAULT_QUBIT_CAP)]
    pub qubit_cap: usize,

    /// Write the circuit in the text dump format.
    #[arg(long)]
    pub dump_circuit: Option<PathBuf>,

    /// Write the statevector at the first θ as little-endian (re, im) f64 pairs.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// engines | analytic | symmetry | phasepoints | wala | all
    pub suite: String,
}

#[derive(Subcommand, Debug)]
pub enum CountCmd {
    /// Non-intersecting path pairs closing a cycle with extents (l, w).
    Lgv { l: u32, w: u32 },
    /// Cycles closed at layer ℒ.
    Layer { layer: u32 },
    /// Path pairs joining the diagonal pair at separation d.
    Correlation { d: u32, w: u32, l: u32 },
}

#[derive(Subcommand, Debug)]
pub enum BenchCmd {
    /// Early-evaluation wall time and front size against L.
    Scaling {
        #[arg(long = "L", value_delimiter = ',', default_value = "16,32,64,128")]
        l: Vec<usize>,
        #[arg(long, allow_hyphen_values = true, default_value_t = std::f64::consts::FRAC_PI_4)]
        theta: f64,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Series truncation error against the cutoff.
    Truncation {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.7853981633974483,0.15,0")]
        theta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256")]
        cutoffs: Vec<u32>,
    },
    /// Second differences of the sink-pair value around a critical angle.
    Cusp {
        #[arg(long = "L", value_delimiter = ',', default_value = "4,8,16,32")]
        l: Vec<usize>,
        #[arg(long, allow_hyphen_values = true, default_value_t = -std::f64::consts::FRAC_PI_4)]
        center: f64,
        #[arg(long, default_value_t = 0.05)]
        half_width: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Tfim,
    Z2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AnsatzArg {
    #[value(name = "with_pt")]
    WithPt,
    #[value(name = "without_pt")]
    WithoutPt,
    Both,
}

#[derive(Args, Debug)]
pub struct VqeArgs {
    #[arg(value_enum)]
    pub model: ModelArg,

    #[arg(long, value_enum, default_value_t = AnsatzArg::Both)]
    pub ansatz: AnsatzArg,

    /// Uniform x grid size on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub x_points: usize,

    /// Lattice side for the TFIM.
    #[arg(long = "L", default_value_t = 4)]
    pub l: usize,
}
