use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "trianglecf",
    version,
    about = "Isotropic correlation function of a triangle: closed form, oracle and form factor"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordered sides, angles, heights, area, shape case and breakpoint ladder.
    Classify(ClassifyArgs),
    /// γ, γ', γ'' and γ''' on a radius grid.
    Eval(EvalArgs),
    /// Run the invariant suite on one or more triangles.
    Check(CheckArgs),
    /// Geometric oracle γ and its defect against the closed form.
    Oracle(OracleArgs),
    /// Form factor F(q) = 2π ∫ γ(r) r J₀(qr) dr.
    Formfactor(FormFactorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output encoding; JSON for classify and check, CSV otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SidesArg {
    /// Side lengths, in any order.
    #[arg(long, value_name = "A,B,C", value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub sides: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RadiusGrid {
    /// Explicit radii; sorted and deduplicated before evaluation.
    #[arg(long = "r", value_name = "LIST", value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "grid")]
    pub r: Option<Vec<f64>>,
    /// N uniform radii on [0, c], both ends included.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub sides: SidesArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub sides: SidesArg,
    #[command(flatten)]
    pub grid: RadiusGrid,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Side lengths; without this or --random the four reference triangles
    /// are checked.
    #[arg(long, value_name = "A,B,C", value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "random")]
    pub sides: Option<Vec<f64>>,
    /// Number of seeded random triangles.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    #[arg(long, value_name = "S", default_value_t = 42)]
    pub seed: u64,
    /// Oracle defect tolerance.
    #[arg(long, value_name = "X", default_value_t = 1e-7)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub sides: SidesArg,
    #[command(flatten)]
    pub grid: RadiusGrid,
    /// Largest acceptable |γ - γ_oracle|.
    #[arg(long, value_name = "X", default_value_t = 1e-7)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FormFactorArgs {
    #[command(flatten)]
    pub sides: SidesArg,
    /// Explicit q values.
    #[arg(long, value_name = "LIST", value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "grid")]
    pub q: Option<Vec<f64>>,
    /// N uniform q values on [0, qmax].
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Upper end of the uniform grid; defaults to 50/c.
    #[arg(long, value_name = "Q", requires = "grid")]
    pub qmax: Option<f64>,
    /// Quadrature tolerance relative to the area.
    #[arg(long, value_name = "X", default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}
