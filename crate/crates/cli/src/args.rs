use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Spectral analysis of sensor panels and random-matrix ensembles:
/// empirical spectral distributions, Stieltjes/R transforms, free additive
/// convolution, and composite-event decomposition.
#[derive(Debug, Parser)]
#[command(name = "freespec", version, about)]
pub struct Cli {
    /// Key=value config file supplying defaults for seed and contour flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical spectral density (histogram) with optional law overlay.
    Esd(EsdArgs),
    /// Stieltjes transform G and R-transform along a contour, as a table.
    Transform(TransformArgs),
    /// Free additive convolution of spectra.
    Convolve(ConvolveArgs),
    /// Generate a synthetic scene panel.
    Simulate(SimulateArgs),
    /// Build an event signature from a panel.
    Signature(SignatureArgs),
    /// Rank candidate decompositions of an observed event.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawKind {
    Semicircle,
    Mp,
    FreeWishartSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct LawArgs {
    /// Theoretical law (sampled or used as overlay).
    #[arg(long, value_enum)]
    pub law: Option<LawKind>,

    /// Aspect ratio c = N/T for mp / free-wishart-sum laws.
    #[arg(long)]
    pub c: Option<f64>,

    /// Number of summed Wisharts for free-wishart-sum.
    #[arg(long)]
    pub k: Option<u32>,

    /// Scale: the law of sigma2 * X.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub xmin: f64,

    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub xmax: f64,

    #[arg(long, default_value_t = 241)]
    pub nodes: usize,

    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct EsdArgs {
    #[command(flatten)]
    pub law: LawArgs,

    /// Matrix dimension N when sampling a law.
    #[arg(long)]
    pub n: Option<usize>,

    /// Time samples T when sampling an mp law.
    #[arg(long)]
    pub t: Option<usize>,

    /// Input panel CSV (rows = spatial points, columns = time samples).
    #[arg(long, conflicts_with = "law")]
    pub input: Option<PathBuf>,

    /// Standardize panel rows to zero mean, unit variance.
    #[arg(long, default_value_t = false)]
    pub standardize: bool,

    #[arg(long, default_value_t = 50)]
    pub bins: usize,

    /// Add a theoretical density overlay column.
    #[arg(long, default_value_t = false)]
    pub overlay: bool,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    #[arg(long, env = "SPECTRUM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub law: LawArgs,

    /// Matrix dimension N when sampling a law empirically.
    #[arg(long)]
    pub n: Option<usize>,

    /// Time samples T when sampling an mp law empirically.
    #[arg(long)]
    pub t: Option<usize>,

    /// Evaluate the transform of a sampled matrix instead of the closed form.
    #[arg(long, default_value_t = false)]
    pub empirical: bool,

    /// Input panel CSV.
    #[arg(long, conflicts_with = "law")]
    pub input: Option<PathBuf>,

    #[arg(long, default_value_t = true)]
    pub standardize: bool,

    #[command(flatten)]
    pub contour: ContourArgs,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    #[arg(long, env = "SPECTRUM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ConvolveArgs {
    /// Convolve k independent empirical Wishart spectra and compare against
    /// the closed-form sum law.
    #[arg(long, default_value_t = false)]
    pub wishart_sum: bool,

    /// Number of Wishart terms for --wishart-sum.
    #[arg(long, default_value_t = 5)]
    pub k: u32,

    /// Aspect ratio of each Wishart term.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Row dimension of each sampled Wishart term.
    #[arg(long, default_value_t = 200)]
    pub n: usize,

    /// Input panels to convolve (repeat; needs at least two).
    #[arg(long, num_args = 0.., conflicts_with = "wishart_sum")]
    pub input: Vec<PathBuf>,

    #[arg(long, default_value_t = true)]
    pub standardize: bool,

    /// Output grid resolution.
    #[arg(long, default_value_t = 501)]
    pub grid_points: usize,

    /// Smoothing offset for the final Stieltjes inversion; defaults to 1% of
    /// the support width estimate.
    #[arg(long)]
    pub eps_out: Option<f64>,

    #[command(flatten)]
    pub contour: ContourArgs,

    /// Write the closed-form overlay and its sup-error (wishart-sum mode).
    #[arg(long, default_value_t = false)]
    pub overlay: bool,

    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    #[arg(long, env = "SPECTRUM_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scene name: noise, A, B, or C.
    #[arg(long)]
    pub scene: String,

    #[arg(long, env = "SPECTRUM_SEED")]
    pub seed: Option<u64>,

    /// Spatial dimension override.
    #[arg(long)]
    pub n: Option<usize>,

    /// Temporal dimension override.
    #[arg(long)]
    pub t: Option<usize>,

    #[arg(long)]
    pub noise_sd: Option<f64>,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// Signature id; defaults to the input file stem.
    #[arg(long)]
    pub id: Option<String>,

    #[command(flatten)]
    pub contour: ContourArgs,

    /// Derive the contour from the observed spike band instead of the fixed
    /// contour flags.
    #[arg(long, default_value_t = false)]
    pub spike_band: bool,

    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Observed event: a panel CSV or a signature JSON.
    #[arg(long)]
    pub observed: PathBuf,

    /// Library signatures (JSON) or panels (CSV); repeat per member.
    #[arg(long, num_args = 0..)]
    pub library: Vec<PathBuf>,

    /// Multiset size of the candidate combinations.
    #[arg(long, default_value_t = 2)]
    pub k: usize,

    #[command(flatten)]
    pub contour: ContourArgs,

    /// Derive the observed contour from its spike band (recommended; on by
    /// default).
    #[arg(long, default_value_t = true)]
    pub spike_band: bool,

    /// Score with |Re| instead of the complex modulus.
    #[arg(long, default_value_t = false)]
    pub real_part: bool,

    /// Normalize residuals by the valid node count instead of the raw sum.
    #[arg(long, default_value_t = false)]
    pub per_node: bool,

    #[arg(long)]
    pub out: PathBuf,
}
