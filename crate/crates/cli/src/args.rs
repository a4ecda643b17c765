use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
    Csv,
}

/// Grassmann-valued and supersymmetric ODE systems.
#[derive(Debug, Parser)]
#[command(name = "susyode", version)]
pub struct Cli {
    /// System file to work on.
    #[arg(long, global = true, value_name = "FILE")]
    pub system: Option<PathBuf>,
    /// Directory for artifacts (text, JSON and, where available, CSV).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pass threshold for numeric comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed component system.
    Expand,
    /// Check invariance under dX = eps G X.
    CheckSusy {
        /// `Q`, `Q<i>` or `all`; defaults to the file's generator or `Q`.
        #[arg(long)]
        generator: Option<String>,
    },
    /// Certify `f` as a Darboux polynomial.
    Darboux {
        #[arg(long)]
        f: String,
        /// Cofactor to verify.
        #[arg(long, conflicts_with = "search", required_unless_present = "search")]
        kappa: Option<String>,
        /// Search for a cofactor of degree at most N.
        #[arg(long, value_name = "N")]
        search: Option<u32>,
    },
    /// Certify the file's integrals, or one given expression.
    FirstIntegral {
        #[arg(long)]
        expr: Option<String>,
        /// Only the integral with this name.
        #[arg(long, conflicts_with = "expr")]
        name: Option<String>,
    },
    /// RK4 over the Grassmann layers, with drift of the file's integrals.
    Integrate {
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        /// Number of Grassmann generators.
        #[arg(long = "generators", short = 'L')]
        generators: Option<u32>,
    },
    /// Symbolic Picard iteration from the initial values.
    Picard {
        #[arg(long)]
        iters: u32,
    },
    /// Transform the seed solution and a numeric trajectory.
    Transform {
        /// Generator used as the odd parameter, e.g. `e3`.
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        generator: Option<String>,
    },
    /// Taylor series in the polarized product of the homogenized system.
    Series {
        #[arg(long)]
        order: usize,
        /// Triples tried when looking for a non-associativity witness.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Time at which partial sums are compared with RK4.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Homogenize to a quadratic map and polarize it.
    Homogenize {
        #[arg(long, default_value = "u")]
        var: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::CheckSusy { .. } => "check-susy",
            Command::Darboux { .. } => "darboux",
            Command::FirstIntegral { .. } => "first-integral",
            Command::Integrate { .. } => "integrate",
            Command::Picard { .. } => "picard",
            Command::Transform { .. } => "transform",
            Command::Series { .. } => "series",
            Command::Homogenize { .. } => "homogenize",
        }
    }
}
