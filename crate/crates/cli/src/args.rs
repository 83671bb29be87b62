use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stowage_core::constructive::Regime;
use stowage_core::instance::SynthProfile;
use stowage_core::setpart::SpMode;

#[derive(Debug, Parser)]
#[command(name = "stowage", version, about = "Pack item types into the fewest identical containers")]
pub struct Cli {
    /// Worker threads for pool, bench and evolve; 0 means one per logical core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Greedy (or First-Fit) solve of one instance, verified.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Generate a pattern pool from a schedule of randomized greedy runs.
    Pool(PoolArgs),
    /// Select pool patterns by set partitioning and trim the surplus.
    Sp(SpArgs),
    /// Evolve a scoring program against training instances.
    Evolve(EvolveArgs),
    /// Run a method over a dataset and compare with reference totals.
    Bench(BenchArgs),
    /// Write the set-partitioning model of a pool in LP format.
    ExportLp(ExportLpArgs),
    /// Write deterministic synthetic instances.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Base,
    Stability,
    Separation,
    Both,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Base => Regime::Base,
            RegimeArg::Stability => Regime::Stability,
            RegimeArg::Separation => Regime::Separation,
            RegimeArg::Both => Regime::Both,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value_t = RegimeArg::Base)]
    pub regime: RegimeArg,
    /// Supported base fraction under the stability regimes (full support by default).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ScorerArgs {
    /// `utilization` (alias `appendix-f`), `constant`, or a path to a score program.
    #[arg(long, default_value = "utilization")]
    pub scorer: String,
    /// Value of the `constant` scorer.
    #[arg(long, default_value_t = 1.0)]
    pub constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cover,
    Exact,
}

impl From<ModeArg> for SpMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cover => SpMode::Cover,
            ModeArg::Exact => SpMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Greedy,
    FirstFit,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverArg::Greedy)]
    pub method: SolverArg,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// RCL width in [0, 1]; 0 is deterministic.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds before the solve gives up.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Solution JSON; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub solution: PathBuf,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Comma-separated `beta:runs` stages; one deterministic run, then 200
    /// runs at each of 0.05 and 0.15.
    #[arg(long, default_value = "0:1,0.05:200,0.15:200")]
    pub schedule: String,
    /// Run `r` (counted across stages) uses seed `seed ^ r`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-run limit in seconds; timed-out runs add no patterns.
    #[arg(long)]
    pub run_time_limit: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpArgs {
    /// Pool JSON written by `pool`.
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Cover)]
    pub mode: ModeArg,
    /// Seconds for the search; the incumbent is returned when it runs out.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Trimmed solution JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Selected multiplicities and search statistics as JSON.
    #[arg(long)]
    pub selection_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    Mock,
    Remote,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Dataset directory; its leading `--train-size` instances are used.
    #[arg(long, conflicts_with = "synthetic")]
    pub dataset: Option<PathBuf>,
    /// Train on this many synthetic instances instead of a dataset.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long, value_enum, default_value_t = SynthArgProfile::Small)]
    pub synthetic_profile: SynthArgProfile,
    #[arg(long, default_value_t = 20)]
    pub train_size: usize,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_enum, default_value_t = GeneratorArg::Mock)]
    pub generator: GeneratorArg,
    /// Mock generator: probability that a reply fails to parse.
    #[arg(long, default_value_t = 0.0)]
    pub fault_rate: f64,
    /// Remote generator: append every exchange to this JSONL file.
    #[arg(long)]
    pub journal: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub population: usize,
    /// Initial candidates requested; defaults to the population size.
    #[arg(long)]
    pub init_size: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub generations: u32,
    /// Repair attempts per failed candidate, at most 5.
    #[arg(long, default_value_t = 5)]
    pub max_corrections: u8,
    /// Seconds to solve every training instance for one candidate (10 or 60 in the reference runs).
    #[arg(long, default_value_t = 10.0)]
    pub budget: f64,
    /// Keep children whose program is already in the population.
    #[arg(long)]
    pub allow_duplicates: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for records, trajectory, robustness table and best program.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    FirstFit,
    Greedy,
    PoolSp,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML run configuration; other method flags are ignored when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Dataset directory of instance JSON files.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Greedy RCL width.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value = "0:1,0.05:200,0.15:200")]
    pub schedule: String,
    #[arg(long)]
    pub run_time_limit: Option<f64>,
    #[arg(long)]
    pub sp_time_limit: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Cover)]
    pub mode: ModeArg,
    /// Comma-separated seeds.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    #[arg(long, default_value_t = 20)]
    pub train_size: usize,
    /// Relative tolerance for the reference comparison.
    #[arg(long, default_value_t = 0.03)]
    pub tolerance: f64,
    /// Reference table TOML; the bundled table by default.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// `instance,containers` CSV for a per-instance comparison.
    #[arg(long)]
    pub per_instance: Option<PathBuf>,
    /// Per-instance results CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Full result and comparison as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportLpArgs {
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Cover)]
    pub mode: ModeArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthArgProfile {
    Tiny,
    Small,
    Medium,
}

impl From<SynthArgProfile> for SynthProfile {
    fn from(p: SynthArgProfile) -> Self {
        match p {
            SynthArgProfile::Tiny => SynthProfile::Tiny,
            SynthArgProfile::Small => SynthProfile::Small,
            SynthArgProfile::Medium => SynthProfile::Medium,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthArgProfile::Small)]
    pub profile: SynthArgProfile,
    /// First seed; instances use consecutive seeds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Directory receiving one `<name>.json` per instance.
    #[arg(long)]
    pub out: PathBuf,
}
