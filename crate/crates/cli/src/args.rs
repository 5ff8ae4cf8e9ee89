use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "replan",
    version,
    about = "Plan replication studies: design priors, success probabilities, sample sizes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build the design prior for a study
    Prior(PriorCmd),
    /// Probability of replication success at a given replication size
    Pors(PorsCmd),
    /// Solve the replication size needed to hit a target success probability
    Ssd(SsdCmd),
    /// Success probability and type I error over a grid of relative sizes
    Curve(CurveCmd),
    /// Solve sample sizes for every study in a CSV corpus
    Batch(BatchCmd),
    /// Plan a replication spread over several sites against a cost model
    Multisite(MultisiteCmd),
    /// Type I error over a grid of relative sizes
    T1e(T1eCmd),
    /// Cross-check the closed-form success probability by simulation
    ValidateMc(ValidateMcCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum MethodKind {
    TwoTrials,
    MetaAnalysis,
    Equivalence,
    RepBayesFactor,
    SkepticalP,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone)]
pub struct StudyArgs {
    /// Study label used in reports
    #[arg(long, default_value = "study")]
    pub id: String,

    /// Original effect estimate
    #[arg(long, allow_hyphen_values = true)]
    pub estimate: Option<f64>,

    /// Standard error of the original estimate
    #[arg(long)]
    pub se: Option<f64>,

    /// Original sample size (reported back, not used in computations)
    #[arg(long)]
    pub n: Option<u64>,

    /// Two-group summaries instead of estimate/se (standardized mean difference)
    #[arg(long, value_name = "M1,M2,SD1,SD2,N1,N2", conflicts_with_all = ["estimate", "se"])]
    pub groups: Option<String>,
}

#[derive(Args, Clone)]
pub struct ModelArgs {
    /// Success criteria (comma separated; "all" expands to every one)
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodKind::TwoTrials])]
    pub method: Vec<MethodKind>,

    /// One-sided level for significance-style criteria; two-sided half-level
    /// for equivalence
    #[arg(long, default_value_t = 0.025)]
    pub alpha: f64,

    /// Bayes factor success threshold
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,

    /// Count a Bayes factor success only when the replication estimate has
    /// the original's sign
    #[arg(long)]
    pub same_sign: bool,

    /// Equivalence margin (required when the equivalence criterion runs)
    #[arg(long)]
    pub margin: Option<f64>,

    /// Fixed between-study heterogeneity tau
    #[arg(long, conflicts_with_all = ["tau_d", "tau_i2"])]
    pub tau: Option<f64>,

    /// Elicit tau from a +/- D band believed to hold the study effect with
    /// 95% probability
    #[arg(long, value_name = "D")]
    pub tau_d: Option<f64>,

    /// Elicit tau^2 as a share I2 in (0,1) of the total variance
    #[arg(long, value_name = "I2", conflicts_with = "tau_d")]
    pub tau_i2: Option<f64>,

    /// Initial prior: flat | normal:MU,SD | eb[:MU] | pilot:EST,SE
    #[arg(long, default_value = "flat")]
    pub prior: String,

    /// Unit standard deviation lambda, so that se = lambda/sqrt(n)
    #[arg(long, default_value_t = 2.0, value_name = "LAMBDA")]
    pub unit_sd: f64,
}

#[derive(Args, Clone)]
pub struct SizeArgs {
    /// Replication standard error
    #[arg(long, conflicts_with_all = ["rel_size", "rep_n"])]
    pub sr: Option<f64>,

    /// Relative sample size c = n_r/n_o
    #[arg(long)]
    pub rel_size: Option<f64>,

    /// Replication sample size
    #[arg(long, conflicts_with = "rel_size")]
    pub rep_n: Option<u64>,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output format [default: text, or json when replaying --from-json]
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Write the report to a file instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PriorCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Re-run from the input echo of a previous JSON report
    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct PorsCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub size: SizeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct SsdCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Target probability of replication success
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,

    /// Largest acceptable replication sample size
    #[arg(long)]
    pub max_n: Option<u64>,

    /// Largest acceptable type I error at the solved size
    #[arg(long)]
    pub max_t1e: Option<f64>,

    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct CurveCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Relative sample sizes to tabulate (comma separated)
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0])]
    pub c_grid: Vec<f64>,

    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct BatchCmd {
    /// CSV corpus: id,estimate,se[,n] or id,mean1,mean2,sd1,sd2,n1,n2
    pub input: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Target probability of replication success
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,

    /// Sort studies by their original one-sided p-value instead of input order
    #[arg(long)]
    pub sort_by_p: bool,
}

#[derive(Args)]
pub struct MultisiteCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Target probability of replication success
    #[arg(long, default_value_t = 0.8)]
    pub target: f64,

    /// Cost of opening a site
    #[arg(long, required_unless_present = "from_json")]
    pub cost_site: Option<f64>,

    /// Cost per participant
    #[arg(long, default_value_t = 1.0)]
    pub cost_unit: f64,

    /// Smallest number of sites to consider
    #[arg(long, default_value_t = 1)]
    pub m_min: usize,

    /// Largest number of sites to consider
    #[arg(long, default_value_t = 8)]
    pub m_max: usize,

    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct T1eCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Relative sample sizes to tabulate (comma separated)
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0, 2.0, 4.0])]
    pub c_grid: Vec<f64>,

    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}

#[derive(Args)]
pub struct ValidateMcCmd {
    #[command(flatten)]
    pub study: StudyArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub size: SizeArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    /// Number of sites (above 1 exercises the multisite decision rules)
    #[arg(long, default_value_t = 1)]
    pub sites: usize,

    /// Simulation draws
    #[arg(long, default_value_t = 200_000)]
    pub draws: usize,

    /// Simulation seed
    #[arg(long, default_value_t = 17)]
    pub seed: u64,

    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
}
