//! Command-line interface: reproduce the closed-form tables, sample and
//! export trees, run the enumeration and verification suites.
//!
//! Exit codes: 0 = success/pass, 1 = verification failure, 2 = usage or
//! parameter error.

mod params;
mod run;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "fragtree",
    version,
    about = "Gibbs-type Markov branching fragmentation trees: tables, sampling, enumeration, verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Print the weight/normalization/rate tables of a model as TSV.
    Tables(TablesArgs),
    /// Sample fragmentation trees and print them in JSON, Newick or DOT.
    Sample(SampleArgs),
    /// Run a verification suite; the exit code reports the verdict.
    Check(CheckArgs),
    /// Exhaustive enumeration: counts, signature tables, shape collisions.
    Enumerate(EnumArgs),
    /// Split-rate sequences and their inversion back to a splitting rule.
    Rates(RatesArgs),
}

/// Model selection. Rational parameters ("-3/2", "2", "inf") keep the run in
/// exact arithmetic; decimal parameters ("-1.5", "2.7e0") switch the whole
/// model to float mode (with a warning), where exact identity checks refuse
/// to run.
#[derive(Args, Clone, Default)]
pub struct ModelArgs {
    /// Beta-splitting model parameter: rational > -2, or "inf".
    #[arg(long, value_name = "RATIONAL|inf", allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// Ewens-Pitman alpha (with --theta).
    #[arg(long, value_name = "RATIONAL", allow_hyphen_values = true, requires = "theta")]
    pub alpha: Option<String>,
    /// Ewens-Pitman theta (with --alpha).
    #[arg(long, value_name = "RATIONAL", allow_hyphen_values = true, requires = "alpha")]
    pub theta: Option<String>,
    /// Recursive coupon collector on M coupons (M >= 2).
    #[arg(long, value_name = "M")]
    pub coupon: Option<u32>,
    /// Deterministic split into singleton blocks.
    #[arg(long)]
    pub singleton: bool,
    /// The comb model (pure erosion boundary of the binary family).
    #[arg(long)]
    pub comb: bool,
    /// Raw binary weight table w(1),w(2),... for adversarial checks.
    #[arg(long, value_name = "W1,W2,...", value_delimiter = ',', allow_hyphen_values = true)]
    pub raw_weights: Option<Vec<String>>,
}

#[derive(Args)]
pub struct TablesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest block size n to tabulate.
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    /// Base rate lambda_2.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambda2: String,
    /// Check the emitted rows against the hard-coded closed forms
    /// (beta in {-3/2, -1, 0, inf} only); exit 1 on mismatch.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum SampleMethod {
    Growth,
    Branching,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Json,
    Newick,
    Dot,
}

#[derive(Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of leaves (1..=64).
    #[arg(long)]
    pub n: u32,
    /// Number of trees to sample.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// RNG seed (FRAGTREE_SEED is the fallback).
    #[arg(long, env = "FRAGTREE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SampleMethod::Growth)]
    pub method: SampleMethod,
    #[arg(long, value_enum, default_value_t = TreeFormat::Json)]
    pub format: TreeFormat,
    /// Attach exponential edge lengths (growth sampling only).
    #[arg(long)]
    pub timed: bool,
    /// Base rate lambda_2 for --timed.
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum CheckSuite {
    /// Exact sampling-consistency identities.
    Consistency,
    /// Exact row normalization of the splitting rule.
    Normalization,
    /// Exact signature expansion of the tree-probability normalizer.
    WExpansion,
    /// Empirical TV distance between the two samplers.
    SamplerAgreement,
    /// Moment factorization cross-ratios of a split measure.
    Factorization,
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: CheckSuite,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest total size for the identity checks.
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    /// Tree size for sampler agreement.
    #[arg(long, default_value_t = 5)]
    pub n: u32,
    /// Samples per sampler for sampler agreement.
    #[arg(long, default_value_t = 1_000_000)]
    pub count: u64,
    #[arg(long, env = "FRAGTREE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// TV threshold for sampler agreement.
    #[arg(long, default_value_t = 0.005)]
    pub tv_threshold: f64,
    /// Moment matrix size for factorization.
    #[arg(long, default_value_t = 10)]
    pub i_max: u32,
    /// Tolerance for float-mode comparisons.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Factorization: use the point mass at 1/2 as the measure.
    #[arg(long)]
    pub delta_half: bool,
    /// Factorization: discrete measure as x:w pairs, e.g. "0.25:0.5,0.75:0.5".
    #[arg(long, value_name = "X:W,...")]
    pub atoms: Option<String>,
}

#[derive(Args)]
pub struct EnumArgs {
    /// Label set size (may be omitted when --collisions carries a value).
    #[arg(long)]
    pub n: Option<u32>,
    /// Enumerate all arities, not just binary trees.
    #[arg(long)]
    pub all: bool,
    /// Print the count only.
    #[arg(long)]
    pub count: bool,
    /// Print the signature table (binary trees).
    #[arg(long)]
    pub signatures: bool,
    /// List signatures carried by several shapes; an optional value
    /// overrides --n.
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "0")]
    pub collisions: Option<u32>,
    /// With --collisions: emit the colliding shapes as DOT graphs.
    #[arg(long)]
    pub dot: bool,
    /// Stream the trees themselves in this format.
    #[arg(long, value_enum)]
    pub list: Option<TreeFormat>,
    /// Override the enumeration cap.
    #[arg(long)]
    pub cap: Option<u32>,
}

#[derive(Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Explicit rate sequence lambda_2,lambda_3,... instead of a model.
    #[arg(long, value_name = "L2,L3,...", value_delimiter = ',', allow_hyphen_values = true)]
    pub from_lambda: Option<Vec<String>>,
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    /// Base rate lambda_2 (model-derived tables).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambda2: String,
    /// Invert the rates back into a splitting rule table.
    #[arg(long)]
    pub invert: bool,
    /// Also report the alternating-differences check at this order.
    #[arg(long, value_name = "ORDER")]
    pub cm_order: Option<u32>,
    /// Tolerance for float-mode inversion checks.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn main() {
    let cli = Cli::parse();
    let code = match run::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
