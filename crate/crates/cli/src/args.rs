use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "qtop", version, about = "Exact quantum invariants and embedding obstructions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for reports named after the command.
    #[arg(long, global = true, env = "QTOP_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-manifold invariants.
    #[command(subcommand)]
    Invariant(InvariantCmd),
    /// First homology of a description or a presentation.
    Homology(HomologyArgs),
    /// Certify that a candidate does not embed in a target.
    Obstruct(ObstructArgs),
    /// FKB ideal of a closed manifold, or an inner approximation for torus boundary.
    Fkb(FkbArgs),
    /// Random walks, hyperplane probabilities and Monte Carlo.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// Quantum representations.
    #[command(subcommand)]
    Rep(RepCmd),
}

#[derive(Args, Debug, Clone)]
pub struct DescArgs {
    /// Shorthand such as `lens:5`, `mt:1:alpha^2`, `compress:0:c1*s`, `s3 # lens:2`.
    #[arg(long, conflicts_with = "desc_file")]
    pub desc: Option<String>,
    /// JSON manifold description.
    #[arg(long)]
    pub desc_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum InvariantCmd {
    /// SO(3) WRT invariant.
    Rt(RtArgs),
    /// Dijkgraaf-Witten invariant.
    Dw(DwArgs),
}

#[derive(Args, Debug)]
pub struct RtArgs {
    #[command(flatten)]
    pub desc: DescArgs,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// Residues at these primes q = 1 mod 4p.
    #[arg(long)]
    pub q: Vec<u64>,
    /// Also run the Murakami congruence check.
    #[arg(long)]
    pub murakami: bool,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DwMethod {
    Count,
    Tqft,
    Both,
}

#[derive(Args, Debug)]
pub struct DwArgs {
    #[command(flatten)]
    pub desc: DescArgs,
    /// Z2, Z3, Zn, S3 or Q8.
    #[arg(long, conflicts_with = "group_file")]
    pub group: Option<String>,
    /// Multiplication table as CSV.
    #[arg(long)]
    pub group_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DwMethod::Count)]
    pub method: DwMethod,
    /// Node budget for the homomorphism search.
    #[arg(long, default_value_t = qtop::manifold::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct HomologyArgs {
    #[command(flatten)]
    pub desc: DescArgs,
    /// Presentation text `gens: a b; rel: a b A B`.
    #[arg(long, conflicts_with_all = ["desc", "desc_file", "presentation_file"])]
    pub presentation: Option<String>,
    #[arg(long, conflicts_with_all = ["desc", "desc_file"])]
    pub presentation_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ObstructArgs {
    /// Candidate N (bounded or closed).
    #[arg(long)]
    pub candidate: Option<String>,
    #[arg(long)]
    pub candidate_file: Option<PathBuf>,
    /// Target M (closed).
    #[arg(long, default_value = "s3")]
    pub target: String,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// Primes q = 1 mod 4p; defaults to the first five.
    #[arg(long)]
    pub q: Vec<u64>,
    /// Replace the candidate by the first vanishing gluing found from it.
    #[arg(long)]
    pub search: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search budget in candidate words.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Twist power in the search leaves.
    #[arg(long, default_value_t = 3)]
    pub n: i64,
}

#[derive(Args, Debug)]
pub struct FkbArgs {
    #[command(flatten)]
    pub desc: DescArgs,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// Word-length cap for closing fillings (torus boundary only).
    #[arg(long, default_value_t = 3)]
    pub budget: usize,
}

#[derive(Subcommand, Debug)]
pub enum WalkCmd {
    /// Exact total variation to uniform of the lazy walk on PSL_n(F_q).
    Mix(MixArgs),
    /// Probability that X v lands in a fixed m-dimensional subspace.
    Prob(ProbArgs),
    /// Vanishing frequency of random compression gluings modulo J.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args, Debug)]
pub struct MixArgs {
    #[arg(long, default_value_t = 5)]
    pub q: u64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ProbMode {
    Formula,
    Enumerate,
    Sample,
}

#[derive(Args, Debug)]
pub struct ProbArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = ProbMode::Formula)]
    pub mode: ProbMode,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub desc: DescArgs,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    #[arg(long, default_value_t = 41)]
    pub q: u64,
    /// Walk length d.
    #[arg(long, default_value_t = 200)]
    pub length: usize,
    #[arg(long, default_value_t = 2000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of certified leaves in the step set (each with its inverse).
    #[arg(long, default_value_t = 6)]
    pub leaves: usize,
    #[arg(long, default_value_t = 4)]
    pub conjugator_len: usize,
    /// Twist power n of the T_n leaves.
    #[arg(long, default_value_t = 3)]
    pub n: i64,
}

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Relation suite, and span of random words modulo q.
    Check(RepCheckArgs),
}

#[derive(Args, Debug)]
pub struct RepCheckArgs {
    #[arg(long, default_value_t = 2)]
    pub genus: u8,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 200)]
    pub words: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
