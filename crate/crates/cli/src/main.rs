mod commands;
mod inputs;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Laminate verification, lamination search and cone-convex separators.
#[derive(Parser, Debug)]
#[command(name = "lamina", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a scenario's self-checks (exit 0 pass, 1 fail, 2 unknown scenario).
    Verify(VerifyArgs),
    /// Search for a tree reproducing a target measure.
    Search(SearchArgs),
    /// Search over a list of tau values.
    Sweep(SweepArgs),
    /// Look for a cone-convex polynomial with positive Jensen gap.
    Separate(SeparateArgs),
    /// Validate a tree file (exit 0 valid, 1 invalid).
    TreeValidate(TreeValidateArgs),
    /// Write the leaf measure of a tree file.
    TreeFlatten(TreeFlattenArgs),
    /// Transport distance between two measure files.
    MeasureDistance(DistanceArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// nu-tau, nu-bar-tau, three-by-two, nu0-tree or mu-tau-tree.
    pub scenario: String,
    #[arg(long)]
    pub tau: Option<String>,
    /// Cone used for tree validation instead of the scenario's own.
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SearchOptions {
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Magnitudes per sign in the cone's c-grid.
    #[arg(long, default_value_t = 65)]
    pub dict_size: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub w_min: Option<f64>,
    #[arg(long)]
    pub w_max: Option<f64>,
    /// Restrict normals to the three classes and weights to [0.05, 0.95].
    #[arg(long)]
    pub restricted: bool,
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the weight-flow certificate.
    #[arg(long)]
    pub no_certify: bool,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Scenario name or measure file.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub tau: Option<String>,
    /// tau:<t>, 3x2 or none.
    #[arg(long)]
    pub chart: Option<String>,
    /// tau:<t>, lambda0, axes or dict:@file.json.
    #[arg(long)]
    pub cone: Option<String>,
    #[command(flatten)]
    pub opts: SearchOptions,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// nu-tau, nu-bar-tau or mu-tau-tree.
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated, strictly descending.
    #[arg(long)]
    pub taus: String,
    #[command(flatten)]
    pub opts: SearchOptions,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct SeparateArgs {
    /// Scenario name or measure file.
    #[arg(long)]
    pub target: String,
    #[arg(long)]
    pub tau: Option<String>,
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    /// Lines in the final dense check.
    #[arg(long, default_value_t = 1_000_000)]
    pub dense: usize,
    #[arg(long, default_value_t = 50)]
    pub rounds: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct TreeValidateArgs {
    #[arg(long)]
    pub tree: String,
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long)]
    pub chart: Option<String>,
    /// Residual tolerance; 0 checks exactly.
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct TreeFlattenArgs {
    #[arg(long)]
    pub tree: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub out: Option<String>,
}

fn init_threads() {
    if let Some(n) = std::env::var("LAMINA_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let is_verify = std::env::args().nth(1).as_deref() == Some("verify");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ if is_verify => ExitCode::from(2),
                _ => ExitCode::from(1),
            };
        }
    };
    init_threads();
    ExitCode::from(commands::run(cli.command))
}
