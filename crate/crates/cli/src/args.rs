use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dicke_core::{InequalityKind, LossKind, Precision};

use crate::config::{AngleMode, FlagConfig};
use crate::record::Format;
use crate::reproduce::Target;
use crate::sweep::IntSet;

#[derive(Debug, Parser)]
#[command(
    name = "dicke",
    version,
    about = "Loss thresholds of Bell violations by Dicke states"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (eval, threshold, sweep).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output directory for reproduce targets [default: results].
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Also write an SVG chart next to each figure file.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Fill the `seconds` column with wall times.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Standard,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Excitation,
    Particle,
}

impl From<ModelArg> for LossKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Excitation => LossKind::Excitation,
            ModelArg::Particle => LossKind::Particle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InequalityArg {
    Hardy,
    Mabk,
}

impl From<InequalityArg> for InequalityKind {
    fn from(i: InequalityArg) -> Self {
        match i {
            InequalityArg::Hardy => InequalityKind::Hardy,
            InequalityArg::Mabk => InequalityKind::Mabk,
        }
    }
}

/// Loss model, inequality and angle choice shared by the computing commands.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelArg>,
    #[arg(long, value_enum)]
    pub inequality: Option<InequalityArg>,
    /// Angle source; giving --alpha0/--alpha1 implies `explicit`.
    #[arg(long, value_enum)]
    pub angles: Option<AngleMode>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha1")]
    pub alpha0: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "alpha0")]
    pub alpha1: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell value of a (lossy) Dicke state at given angles.
    Eval(EvalArgs),
    /// Loss threshold of one Dicke state.
    Threshold(ThresholdArgs),
    /// Thresholds over ranges of n and k.
    Sweep(SweepArgs),
    /// Check the fast evaluators against the dense simulator.
    Verify(VerifyArgs),
    /// Regenerate a reference table or figure and check its anchor numbers.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Excitation-loss probability (requires --model excitation).
    #[arg(long, conflicts_with = "m")]
    pub p: Option<f64>,
    /// Lost parties (requires --model particle).
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Party counts: `a`, `a..b` (inclusive) or `a,b,c`.
    #[arg(long)]
    pub n: IntSet,
    /// Excitation numbers, same syntax as --n.
    #[arg(long)]
    pub k: IntSet,
    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    /// Also enumerate deterministic local strategies.
    #[arg(long)]
    pub lhv: bool,
    /// Random angle pairs per party count.
    #[arg(long, default_value_t = 50)]
    pub cases: usize,
    #[arg(long, default_value_t = crate::verify::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
}

impl Cli {
    /// The flag layer of the configuration.
    pub fn flag_config(&self) -> FlagConfig {
        let g = &self.global;
        let problem = match &self.command {
            Command::Eval(a) => Some(&a.problem),
            Command::Threshold(a) => Some(&a.problem),
            Command::Sweep(a) => Some(&a.problem),
            Command::Verify(_) | Command::Reproduce(_) => None,
        };
        FlagConfig {
            format: g.format,
            jobs: g.jobs,
            precision: g.precision.map(Into::into),
            plot: g.plot,
            timing: g.timing,
            model: problem.and_then(|p| p.model).map(Into::into),
            inequality: problem.and_then(|p| p.inequality).map(Into::into),
            angles: problem.and_then(|p| p.angles),
            out: g.out.clone(),
            out_dir: g.out_dir.clone(),
        }
    }
}
